"""Smoke tests for the python module and the command-line harness."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

import kamgkdv


def test_site_hypotheses():
    holds, witnesses = kamgkdv.check_hypothesis_s([1, 2])
    assert holds and witnesses == []
    assert kamgkdv.check_s0_s1([1])


def test_resonant_coefficients():
    assert kamgkdv.check_resonant_coeffs([1, 1, 0, 2, 0, 7 / 6, 0])
    assert not kamgkdv.check_resonant_coeffs([0, 0, 1, 0, 0, 0, 0])


def test_spectral_constants_single_site():
    d, c = kamgkdv.spectral_constants([0, 1, 0, 0, 0, 0, 0], [1], [1.0])
    assert abs(c - 16 / 3) < 1e-12
    assert abs(d + 16 / 3) < 1e-12


def test_session_quartic_and_twist():
    s = kamgkdv.Session([1], [0, 0, 0, 1, 0, 0, 0])  # pure quartic density
    q = s.quartic()
    assert abs(q["diag"][1] - 6.0) < 1e-10
    t = s.twist()
    assert abs(t["det_M"]) > 0


def test_torus_residual_and_refine():
    s = kamgkdv.Session([1, 2], [0.25] * 7)
    t_naive = s.build_torus([1.0, 1.0], 0.02, "naive")
    t_bnf = s.build_torus([1.0, 1.0], 0.02, "bnf")
    rn = s.residual(t_naive)
    rb = s.residual(t_bnf)
    assert rb["l2"] < rn["l2"]
    rep = s.refine(t_bnf, L=5, J=15, tol=1e-10)
    assert rep["converged"]
    assert rep["residuals"][-1] < 1e-10


def test_floquet_airy_limit():
    s = kamgkdv.Session([1, 2], [0.0] * 7)
    t0 = s.build_torus([1.0, 1.0], 0.0, "naive")
    rep = s.floquet(t0, L=1, J=8)
    for j, mu in rep["mu"].items():
        assert abs(mu - (-1j * j**3)) < 1e-12


@pytest.fixture(scope="module")
def cli():
    path = os.environ.get("KAMGKDV_BIN")
    if not path or not Path(path).exists():
        pytest.skip("kam-gkdv binary not available")
    return path


def write_config(tmpdir: Path, **overrides) -> Path:
    cfg = {
        "nu": 2,
        "sites": [1, 2],
        "coeffs": {"c1": 0.25, "c2": 0.25, "c3": 0.25, "c4": 0.25,
                   "c5": 0.25, "c6": 0.25, "c7": 0.25},
        "eps": 0.01,
        "a": 0.1,
        "trunc": {"L": 6, "J": 18, "M": 64},
        "seed": 7,
        "output_dir": str(tmpdir / "out"),
    }
    cfg.update(overrides)
    p = tmpdir / "config.json"
    p.write_text(json.dumps(cfg))
    return p


def run_cli(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def test_cli_malformed_config_exits_2(cli, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    r = run_cli(cli, "check-sites", "--config", str(bad))
    assert r.returncode == 2


def test_cli_resonant_coefficients_exit_1(cli, tmp_path):
    cfg = write_config(tmp_path, coeffs={f"c{i}": 0.0 for i in range(1, 8)})
    r = run_cli(cli, "check-sites", "--config", str(cfg))
    assert r.returncode == 1
    assert "resonant-coefficients" in r.stderr
    cert = json.loads((tmp_path / "out" / "sites-certificate.json").read_text())
    assert "resonant-coefficients" in cert["failures"]


def test_cli_check_sites_passes(cli, tmp_path):
    # c2 keeps the C1 inequality away from the 0 = 0 degeneracy
    cfg = write_config(tmp_path, nu=1, sites=[1],
                       coeffs={"c2": 0.5, "c3": 1.0})
    r = run_cli(cli, "check-sites", "--config", str(cfg))
    assert r.returncode == 0, r.stderr
    cert = json.loads((tmp_path / "out" / "sites-certificate.json").read_text())
    assert cert["hypothesis_S"]
    assert abs(cert["det_M"]) > 0


def test_cli_check_sites_pure_c3_fails_only_c1(cli, tmp_path):
    # the twist data itself is fine for a pure-c3 density (det M = -6 c3^2 at
    # S+ = {1}); the certificate still exits 1 because C1 reads 0 != 0
    cfg = write_config(tmp_path, nu=1, sites=[1], coeffs={"c3": 1.0})
    r = run_cli(cli, "check-sites", "--config", str(cfg))
    assert r.returncode == 1
    cert = json.loads((tmp_path / "out" / "sites-certificate.json").read_text())
    assert cert["failures"] == ["C1"]
    assert cert["hypothesis_S"]
    assert abs(cert["det_M"] + 6.0) < 1e-9


def test_cli_missing_upstream_exit_3(cli, tmp_path):
    cfg = write_config(tmp_path)
    r = run_cli(cli, "refine", "--config", str(cfg))
    assert r.returncode == 3


def test_cli_chain_and_determinism(cli, tmp_path):
    cfg = write_config(tmp_path)
    assert run_cli(cli, "build", "--config", str(cfg)).returncode == 0
    assert run_cli(cli, "refine", "--config", str(cfg)).returncode == 0
    refine = json.loads((tmp_path / "out" / "refine.json").read_text())
    assert refine["converged"]
    assert run_cli(cli, "floquet", "--config", str(cfg)).returncode == 0
    fit = json.loads((tmp_path / "out" / "floquet-fit.json").read_text())
    assert fit["max_re_interior"] < 1e-8
    csv1 = (tmp_path / "out" / "floquet.csv").read_text()
    assert csv1.startswith("# config ")
    assert run_cli(cli, "floquet", "--config", str(cfg)).returncode == 0
    csv2 = (tmp_path / "out" / "floquet.csv").read_text()
    assert csv1 == csv2  # byte-identical bodies under the same config and seed


def test_cli_residual_ladder(cli, tmp_path):
    cfg = write_config(tmp_path, eps_ladder=[0.05, 0.02])
    r = run_cli(cli, "residual", "--config", str(cfg))
    assert r.returncode == 0, r.stderr
    rep = json.loads((tmp_path / "out" / "residual.json").read_text())
    assert rep["slope_naive"] > 1.5
    assert rep["slope_bnf"] > 3.0


def test_cli_measure_small(cli, tmp_path):
    cfg = write_config(
        tmp_path,
        coeffs={"c1": 0.0, "c2": 0.2715, "c3": -0.2933, "c4": 0.0,
                "c5": 0.0833, "c6": 4 * 0.2715**2 / 3, "c7": -0.0506},
        eps_ladder=[0.1, 0.05],
        trunc={"L": 12, "J": 60, "M": 64},
        mc_samples=400,
    )
    r = run_cli(cli, "measure", "--config", str(cfg))
    assert r.returncode == 0, r.stderr
    lines = (tmp_path / "out" / "measure.csv").read_text().strip().splitlines()
    assert lines[2] == "eps,gamma,n_samples,accepted,fraction,fitted_exponent"
    assert len(lines) == 5
