// Python bindings for the main operations: normal form and quartic data,
// twist/frequency maps, site certificates, torus construction, residuals,
// Newton refinement, Floquet exponents and the measure scan.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kamgkdv/cantor.hpp"
#include "kamgkdv/linearized.hpp"
#include "kamgkdv/simulate.hpp"

namespace py = pybind11;
using namespace kam;

namespace {

Coefficients coeffs_from_seq(const std::vector<double>& c) {
    if (c.size() != 7) throw std::invalid_argument("expected 7 coefficients");
    Coefficients out;
    out.c1 = c[0];
    out.c2 = c[1];
    out.c3 = c[2];
    out.c4 = c[3];
    out.c5 = c[4];
    out.c6 = c[5];
    out.c7 = c[6];
    return out;
}

Vec vec_from_seq(const std::vector<double>& v) {
    Vec out(long(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[long(i)] = v[i];
    return out;
}

std::vector<double> seq_from_vec(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

struct Session {
    SiteSet sites;
    Coefficients c;
    GkdvHamiltonian H;
    WbnfResult wbnf;
    TwistData twist;

    Session(const std::vector<int>& pos, const std::vector<double>& coeffs)
        : sites(pos), c(coeffs_from_seq(coeffs)) {
        H = build_gkdv(c, 4 * sites.max_site());
        wbnf = run_wbnf(H, sites);
        twist = twist_matrices(wbnf.quartic, sites, c);
    }

    py::dict quartic() const {
        py::dict diag, cross;
        for (auto& [j, v] : wbnf.quartic.diag) diag[py::int_(j)] = v;
        for (auto& [p, v] : wbnf.quartic.cross)
            cross[py::make_tuple(p.first, p.second)] = v;
        py::dict out;
        out["diag"] = diag;
        out["cross"] = cross;
        out["residual_step3"] = wbnf.residual_step3;
        out["residual_linear_in_z"] = wbnf.residual_h41;
        return out;
    }

    py::dict twist_data() const {
        py::dict out;
        int nu = sites.nu();
        std::vector<std::vector<double>> M(static_cast<size_t>(nu)), A(static_cast<size_t>(nu));
        for (int r = 0; r < nu; ++r)
            for (int s = 0; s < nu; ++s) {
                M[size_t(r)].push_back(twist.M(r, s));
                A[size_t(r)].push_back(twist.A(r, s));
            }
        out["M"] = M;
        out["A"] = A;
        out["det_M"] = twist.det_M;
        out["closed_form_max_diff"] = twist.max_closed_diff;
        return out;
    }

    std::vector<double> omega(const std::vector<double>& xi, double eps) const {
        Vec x = vec_from_seq(xi);
        Vec w = linear_frequencies(sites) + eps * eps * (twist.M * x);
        return seq_from_vec(w);
    }

    TorusEmbedding torus(const std::vector<double>& xi, double eps, const std::string& level) {
        return build_approximate_torus(c, sites, vec_from_seq(xi), eps,
                                       level == "naive" ? TorusLevel::Naive : TorusLevel::Bnf,
                                       wbnf, twist);
    }
};

} // namespace

PYBIND11_MODULE(_kamgkdv, m) {
    m.doc() = "quasi-periodic gKdV verification toolkit";

    py::class_<TorusEmbedding>(m, "TorusEmbedding")
        .def_property_readonly("eps", [](const TorusEmbedding& t) { return t.eps; })
        .def_property_readonly("level", [](const TorusEmbedding& t) { return t.level; })
        .def_property_readonly("omega",
                               [](const TorusEmbedding& t) { return seq_from_vec(t.omega); })
        .def("mode_count", [](const TorusEmbedding& t) { return t.modes.size(); })
        .def("sup_norm", [](const TorusEmbedding& t) { return t.sup_norm(); });

    py::class_<Session>(m, "Session")
        .def(py::init<const std::vector<int>&, const std::vector<double>&>(), py::arg("sites"),
             py::arg("coeffs"))
        .def("quartic", &Session::quartic)
        .def("twist", &Session::twist_data)
        .def("omega", &Session::omega, py::arg("xi"), py::arg("eps"))
        .def("build_torus", &Session::torus, py::arg("xi"), py::arg("eps"),
             py::arg("level") = "bnf")
        .def("residual",
             [](Session& s, const TorusEmbedding& t) {
                 auto r = residual_functional(t, s.c);
                 py::dict d;
                 d["sup"] = r.sup;
                 d["l2"] = r.l2;
                 d["l2_tangential"] = r.l2_tangential;
                 d["l2_normal"] = r.l2_normal;
                 return d;
             })
        .def("refine",
             [](Session& s, const TorusEmbedding& t, int L, int J, double tol, int max_iter) {
                 NewtonOptions opt;
                 opt.L = L;
                 opt.J = J;
                 opt.tol = tol;
                 opt.max_iter = max_iter;
                 auto rep = refine_torus_newton(t, s.c, opt);
                 py::dict d;
                 d["converged"] = rep.converged;
                 d["iterations"] = rep.iterations;
                 d["residuals"] = rep.residual_history;
                 d["zeta"] = seq_from_vec(rep.zeta);
                 d["torus"] = rep.torus;
                 return d;
             },
             py::arg("torus"), py::arg("L") = 8, py::arg("J") = 24, py::arg("tol") = 1e-9,
             py::arg("max_iter") = 12)
        .def("floquet",
             [](Session& s, const TorusEmbedding& t, int L, int J) {
                 QuasiPeriodicOperator op(t, s.c, L, J);
                 auto spec = floquet_exponents(op);
                 py::dict mu;
                 for (auto& [j, e] : spec.mu) mu[py::int_(j)] = e.mu;
                 py::dict d;
                 d["mu"] = mu;
                 d["m3"] = spec.m3;
                 d["m1"] = spec.m1;
                 d["max_re_interior"] = spec.max_re_interior;
                 return d;
             },
             py::arg("torus"), py::arg("L") = 2, py::arg("J") = 20);

    m.def("check_hypothesis_s", [](const std::vector<int>& pos) {
        auto rep = check_hypothesis_s(SiteSet(pos));
        return py::make_tuple(rep.holds, rep.witnesses);
    });
    m.def("check_s0_s1", [](const std::vector<int>& pos) { return check_s0_s1(SiteSet(pos)); });
    m.def("check_resonant_coeffs", [](const std::vector<double>& c) {
        return check_resonant_coeffs(coeffs_from_seq(c));
    });
    m.def("spectral_constants",
          [](const std::vector<double>& c, const std::vector<int>& pos,
             const std::vector<double>& xi) {
              auto sc = spectral_constants(coeffs_from_seq(c), SiteSet(pos), vec_from_seq(xi));
              return py::make_tuple(sc.d_xi, sc.c_xi);
          });
    m.def("check_diophantine", [](const std::vector<double>& omega, double gamma, double tau,
                                  int L) {
        auto rep = check_diophantine(vec_from_seq(omega), gamma, tau, L);
        return rep.holds;
    });
    m.def("simulate_energy_drift",
          [](const std::vector<std::pair<int, Cplx>>& modes, const std::vector<double>& c,
             int grid, double dt, double T) {
              SpatialState u;
              for (auto& [j, v] : modes) u.coeffs[j] = v;
              SimConfig cfg;
              cfg.modes = grid;
              cfg.dt = dt;
              cfg.T = T;
              auto r = simulate(u, coeffs_from_seq(c), cfg);
              return r.energy_drift;
          });
}
