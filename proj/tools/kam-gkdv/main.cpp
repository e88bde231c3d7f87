// Command-line driver for the verification campaigns: site certificates,
// normal form, frequency data, torus construction/refinement, simulation,
// Floquet analysis and the admissible-frequency measure scan.
//
// Exit codes: 0 success, 1 domain-check failure, 2 config error,
//             3 missing upstream artifact, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kamgkdv/cantor.hpp"
#include "kamgkdv/config.hpp"
#include "kamgkdv/linearized.hpp"
#include "kamgkdv/outputs.hpp"
#include "kamgkdv/simulate.hpp"

using namespace kam;
using nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct Pipeline {
    RunConfig cfg;
    GkdvHamiltonian H;
    WbnfResult wbnf;
    TwistData twist;

    explicit Pipeline(const RunConfig& c) : cfg(c) {
        int band = std::max(4 * c.sites.max_site(), 4);
        H = build_gkdv(c.coeffs, band);
        if (!c.f5_terms.empty()) {
            PolyHamiltonian H5;
            H5.degree = 5;
            H5.momentum_preserving = true;
            for (auto& row : c.f5_terms) {
                MultiIndex k;
                for (int i = 0; i < 5; ++i) k.push(int(row[size_t(i)]));
                k.sort();
                H5.add(k, Cplx(row[5], row[6]));
            }
            H.H5 = H5;
        }
        wbnf = run_wbnf(H, cfg.sites);
        twist = twist_matrices(wbnf.quartic, cfg.sites, cfg.coeffs);
    }

    Vec default_xi() const {
        Vec xi(cfg.sites.nu());
        for (int i = 0; i < xi.size(); ++i) xi[i] = 1.0;
        return xi;
    }
};

json quartic_json(const ResonantQuartic& q) {
    json d = json::object(), x = json::object();
    for (auto& [j, v] : q.diag) d[std::to_string(j)] = v;
    for (auto& [p, v] : q.cross)
        x[std::to_string(p.first) + "," + std::to_string(p.second)] = v;
    return json{{"diag", d}, {"cross", x}};
}

json vec_json(const Vec& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    return json(s);
}

int cmd_check_sites(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);

    json out;
    out["config_hash"] = cfg.config_hash;
    out["sites"] = cfg.sites.positive;
    std::vector<std::string> failures;

    auto hyp = check_hypothesis_s(cfg.sites);
    out["hypothesis_S"] = hyp.holds;
    if (!hyp.holds) failures.push_back("hypothesis-S");
    out["hypothesis_S0_S1"] = check_s0_s1(cfg.sites);
    if (!check_s0_s1(cfg.sites)) failures.push_back("hypothesis-S0-S1");

    bool resonant = check_resonant_coeffs(cfg.coeffs);
    out["resonant_coefficients"] = resonant;
    if (resonant) failures.push_back("resonant-coefficients");

    auto c12 = check_c1_c2(cfg.coeffs, cfg.nu);
    out["C1"] = c12.C1;
    out["C2"] = c12.C2 == TriState::Holds ? "holds"
               : c12.C2 == TriState::Fails ? "fails"
                                           : "undefined";
    if (!c12.C1) failures.push_back("C1");
    if (c12.C2 == TriState::Fails) failures.push_back("C2");

    out["det_M"] = p.twist.det_M;
    out["rcond_M"] = p.twist.rcond;
    out["twist_closed_form_max_diff"] = p.twist.max_closed_diff;
    double scale = std::max(1.0, p.twist.M.cwiseAbs().maxCoeff());
    bool nondeg = std::abs(p.twist.det_M) > 1e-10 * std::pow(scale, cfg.nu);
    if (!nondeg) failures.push_back("twist-degenerate");

    if (nondeg) {
        std::vector<std::pair<int, int>> pairs;
        for (int j = 3; j <= 6; ++j)
            for (int k = -6; k < j; ++k) {
                if (k == 0 || cfg.sites.contains(k) || cfg.sites.contains(j)) continue;
                if (int(pairs.size()) < 12) pairs.push_back({j, k});
            }
        auto h12 = check_h1_h2(cfg.coeffs, cfg.sites, p.twist, pairs);
        out["H1"] = h12.H1;
        out["H1_value"] = h12.h1_value;
        int h2fail = 0;
        for (auto& [key, ok] : h12.H2) h2fail += ok ? 0 : 1;
        out["H2_pairs_checked"] = int(h12.H2.size());
        out["H2_failures"] = h2fail;
        if (!h12.H1) failures.push_back("H1");
        if (h2fail) failures.push_back("H2");
    }

    // closed-form regression diff for the quartic data (discrepancy log)
    json disc = json::array();
    {
        for (auto& cell : QuarticClosedForms::cells()) {
            for (int a = 0; a < cfg.nu; ++a) {
                int j = cfg.sites.positive[size_t(a)];
                double sum = QuarticClosedForms::diag_sum_form(cell, j);
                double mat = QuarticClosedForms::diag_matrix_form(cell, j);
                double freq = QuarticClosedForms::diag_frequency_form(cell, j);
                if (sum != mat || sum != freq)
                    disc.push_back({{"cell", cell},
                                    {"entry", "diag"},
                                    {"j", j},
                                    {"sum_form", sum},
                                    {"matrix_form", mat},
                                    {"frequency_form", freq}});
            }
        }
    }
    out["closed_form_discrepancies"] = disc;
    out["failures"] = failures;

    write_text(cfg.output_dir + "/sites-certificate.json", out.dump(2) + "\n");
    write_manifest(cfg.output_dir, "check-sites", cfg, timer.seconds());
    if (!failures.empty()) {
        std::cerr << "check-sites: failed:";
        for (auto& f : failures) std::cerr << " " << f;
        std::cerr << "\n";
        return 1;
    }
    std::cout << "check-sites: all requested checks passed\n";
    return 0;
}

int cmd_normal_form(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);
    json out;
    out["config_hash"] = cfg.config_hash;
    out["generator_sizes"] = {{"F3", p.wbnf.F3.F.terms.size()},
                              {"F4", p.wbnf.F4.F.terms.size()},
                              {"F5", p.wbnf.F5.F.terms.size()}};
    out["residuals"] = {{"step3", p.wbnf.residual_step3},
                        {"quartic_linear_in_z", p.wbnf.residual_h41},
                        {"quintic_low_normal", p.wbnf.residual_h5_low}};
    out["discarded_degree6_mass"] = p.wbnf.discarded_mass;
    out["resonant_quartic"] = quartic_json(p.wbnf.quartic);
    write_text(cfg.output_dir + "/bnf-report.json", out.dump(2) + "\n");
    write_manifest(cfg.output_dir, "normal-form", cfg, timer.seconds());
    std::cout << "normal-form: report written\n";
    return 0;
}

int cmd_frequencies(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);
    json out;
    out["config_hash"] = cfg.config_hash;
    out["omega_bar"] = vec_json(linear_frequencies(cfg.sites));
    Vec xi = p.default_xi();
    out["xi"] = vec_json(xi);
    for (double eps : cfg.eps_ladder) {
        Vec omega = linear_frequencies(cfg.sites) + eps * eps * (p.twist.M * xi);
        out["omega"][format_double(eps)] = vec_json(omega);
    }
    out["det_M"] = p.twist.det_M;
    std::vector<std::vector<double>> M(size_t(cfg.nu));
    for (int r = 0; r < cfg.nu; ++r)
        for (int s = 0; s < cfg.nu; ++s) M[size_t(r)].push_back(p.twist.M(r, s));
    out["M"] = M;
    auto sc = spectral_constants(cfg.coeffs, cfg.sites, xi);
    out["d_xi"] = sc.d_xi;
    out["c_xi"] = sc.c_xi;
    write_text(cfg.output_dir + "/frequencies.json", out.dump(2) + "\n");
    write_manifest(cfg.output_dir, "frequencies", cfg, timer.seconds());
    std::cout << "frequencies: report written\n";
    return 0;
}

int cmd_build(const RunConfig& cfg, const std::string& level) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);
    Vec xi = p.default_xi();
    TorusLevel lvl = level == "naive" ? TorusLevel::Naive : TorusLevel::Bnf;
    auto t = build_approximate_torus(cfg.coeffs, cfg.sites, xi, cfg.eps(), lvl, p.wbnf, p.twist);
    save_torus(cfg.output_dir + "/torus.json", t, cfg.config_hash);
    write_manifest(cfg.output_dir, "build", cfg, timer.seconds());
    std::cout << "build: torus (" << t.level << ") with " << t.modes.size() << " modes\n";
    return 0;
}

int cmd_residual(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);
    Vec xi = p.default_xi();
    json out;
    out["config_hash"] = cfg.config_hash;
    std::ostringstream csv;
    csv << csv_header(cfg.config_hash, "eps,naive_l2,bnf_l2");
    std::vector<double> naive, bnf;
    for (double eps : cfg.eps_ladder) {
        auto tn = build_approximate_torus(cfg.coeffs, cfg.sites, xi, eps, TorusLevel::Naive,
                                          p.wbnf, p.twist);
        auto tb = build_approximate_torus(cfg.coeffs, cfg.sites, xi, eps, TorusLevel::Bnf, p.wbnf,
                                          p.twist);
        auto rn = residual_functional(tn, cfg.coeffs);
        auto rb = residual_functional(tb, cfg.coeffs);
        naive.push_back(rn.l2);
        bnf.push_back(rb.l2);
        csv << format_double(eps) << "," << format_double(rn.l2) << "," << format_double(rb.l2)
            << "\n";
        out["norms"][format_double(eps)] = {{"naive_sup", rn.sup},
                                            {"naive_l2", rn.l2},
                                            {"bnf_sup", rb.sup},
                                            {"bnf_l2", rb.l2}};
    }
    if (cfg.eps_ladder.size() >= 2) {
        out["slope_naive"] = fitted_slope(cfg.eps_ladder, naive);
        out["slope_bnf"] = fitted_slope(cfg.eps_ladder, bnf);
    }
    write_text(cfg.output_dir + "/residual.json", out.dump(2) + "\n");
    write_text(cfg.output_dir + "/residual.csv", csv.str());
    write_gnuplot(cfg.output_dir + "/residual.gp", "residual.csv",
                  "torus residual against eps", {"naive_l2", "bnf_l2"}, true);
    write_manifest(cfg.output_dir, "residual", cfg, timer.seconds());
    std::cout << "residual: ladder written\n";
    return 0;
}

int require_torus(const RunConfig& cfg, TorusEmbedding& t) {
    std::string path = cfg.output_dir + "/torus.json";
    if (!std::filesystem::exists(path)) {
        std::cerr << "missing upstream torus file " << path << " (run build first)\n";
        return 3;
    }
    std::string hash;
    t = load_torus(path, &hash);
    if (hash != cfg.config_hash) {
        std::cerr << "torus file was produced under a different config (" << hash << " vs "
                  << cfg.config_hash << ")\n";
        return 3;
    }
    return 0;
}

int cmd_refine(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    TorusEmbedding t;
    if (int rc = require_torus(cfg, t)) return rc;
    double gamma = std::pow(cfg.eps(), 2.0 + cfg.a);
    auto dio = check_diophantine(t.omega, gamma, cfg.tau, cfg.L);
    NewtonOptions opt;
    opt.L = cfg.L;
    opt.J = cfg.J;
    opt.tol = cfg.newton_tol;
    opt.max_iter = cfg.newton_max_iter;
    auto rep = refine_torus_newton(t, cfg.coeffs, opt);
    json out;
    out["config_hash"] = cfg.config_hash;
    out["diophantine_at_gamma"] = dio.holds;
    out["residual_history"] = rep.residual_history;
    out["iterations"] = rep.iterations;
    out["converged"] = rep.converged;
    out["zeta"] = vec_json(rep.zeta);
    write_text(cfg.output_dir + "/refine.json", out.dump(2) + "\n");
    if (!rep.converged) {
        write_manifest(cfg.output_dir, "refine", cfg, timer.seconds());
        std::cerr << "refine: newton did not converge\n";
        return 4;
    }
    save_torus(cfg.output_dir + "/torus.json", rep.torus, cfg.config_hash);
    write_manifest(cfg.output_dir, "refine", cfg, timer.seconds());
    std::cout << "refine: residual " << rep.residual_history.back() << " after "
              << rep.iterations << " iterations\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    TorusEmbedding t;
    if (int rc = require_torus(cfg, t)) return rc;
    SimConfig sc;
    sc.modes = cfg.M;
    sc.dt = cfg.sim_dt;
    sc.T = cfg.sim_T;
    sc.sample_stride = std::max(1, int(sc.T / sc.dt / 200));
    auto res = simulate(t.at_time(0.0), cfg.coeffs, sc);
    std::ostringstream csv;
    csv << csv_header(cfg.config_hash, "t,j,re,im");
    for (auto& s : res.samples) {
        for (auto& [j, v] : s.u.coeffs)
            csv << format_double(s.t) << "," << j << "," << format_double(v.real()) << ","
                << format_double(v.imag()) << "\n";
    }
    write_text(cfg.output_dir + "/trajectory.csv", csv.str());
    json out;
    out["config_hash"] = cfg.config_hash;
    out["energy_drift"] = res.energy_drift;
    out["momentum_drift"] = res.momentum_drift;
    out["max_action_drift"] = res.max_action_drift;
    write_text(cfg.output_dir + "/simulate.json", out.dump(2) + "\n");
    write_manifest(cfg.output_dir, "simulate", cfg, timer.seconds());
    std::cout << "simulate: energy drift " << res.energy_drift << "\n";
    return 0;
}

json floquet_report(const RunConfig& cfg, const TorusEmbedding& t, const Vec& xi,
                    const std::string& csv_path) {
    int Lop = std::min(cfg.L, 3);
    QuasiPeriodicOperator op(t, cfg.coeffs, Lop, cfg.J);
    auto spec = floquet_exponents(op);
    auto sc = spectral_constants(cfg.coeffs, cfg.sites, xi);

    std::ostringstream csv;
    csv << csv_header(cfg.config_hash, "j,re_mu,im_mu,localization");
    for (auto& [j, e] : spec.mu)
        csv << j << "," << format_double(e.mu.real()) << "," << format_double(e.mu.imag()) << ","
            << format_double(e.localization) << "\n";
    write_text(csv_path, csv.str());

    json out;
    out["config_hash"] = cfg.config_hash;
    out["eps"] = t.eps;
    out["m3"] = spec.m3;
    out["m1"] = spec.m1;
    out["pred_m3"] = 1.0 + t.eps * t.eps * sc.d_xi;
    out["pred_m1"] = t.eps * t.eps * sc.c_xi;
    if (sc.d_xi != 0)
        out["rel_err_m3"] = std::abs((spec.m3 - 1.0) / (t.eps * t.eps) - sc.d_xi) /
                            std::abs(sc.d_xi);
    if (sc.c_xi != 0)
        out["rel_err_m1"] =
            std::abs(spec.m1 / (t.eps * t.eps) - sc.c_xi) / std::abs(sc.c_xi);
    out["max_re_interior"] = spec.max_re_interior;
    out["interior_band"] = spec.interior_band;
    double gamma = std::pow(t.eps, 2.0 + cfg.a);
    auto mm = second_melnikov_margins(spec, t.omega, gamma, cfg.tau, Lop);
    out["min_melnikov_margin"] = mm.min_margin;
    out["melnikov_violations"] = mm.violations.size();
    return out;
}

int cmd_floquet(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    if (cfg.eps_ladder.size() > 1) {
        // self-contained ladder: build, refine and analyse one torus per eps
        Pipeline p(cfg);
        Vec xi = p.default_xi();
        for (double eps : cfg.eps_ladder) {
            auto t = build_approximate_torus(cfg.coeffs, cfg.sites, xi, eps, TorusLevel::Bnf,
                                             p.wbnf, p.twist);
            NewtonOptions opt;
            opt.L = cfg.L;
            opt.J = cfg.J;
            opt.tol = cfg.newton_tol;
            opt.max_iter = cfg.newton_max_iter;
            auto rep = refine_torus_newton(t, cfg.coeffs, opt);
            std::string tag = format_double(eps);
            json out = floquet_report(cfg, rep.torus, xi,
                                      cfg.output_dir + "/floquet-" + tag + ".csv");
            out["newton_converged"] = rep.converged;
            write_text(cfg.output_dir + "/floquet-fit-" + tag + ".json", out.dump(2) + "\n");
            std::cout << "floquet eps=" << eps << ": m3 " << out["m3"] << " m1 " << out["m1"]
                      << "\n";
        }
        write_manifest(cfg.output_dir, "floquet", cfg, timer.seconds());
        return 0;
    }
    TorusEmbedding t;
    if (int rc = require_torus(cfg, t)) return rc;
    Pipeline p(cfg);
    Vec xi = t.xi.size() ? t.xi : p.default_xi();
    json out = floquet_report(cfg, t, xi, cfg.output_dir + "/floquet.csv");
    write_text(cfg.output_dir + "/floquet-fit.json", out.dump(2) + "\n");
    write_manifest(cfg.output_dir, "floquet", cfg, timer.seconds());
    std::cout << "floquet: m3 " << out["m3"] << " m1 " << out["m1"] << "\n";
    return 0;
}

int cmd_measure(const RunConfig& cfg) {
    Timer timer;
    ensure_dir(cfg.output_dir);
    Pipeline p(cfg);
    CantorConfig cc;
    cc.eps_ladder = cfg.eps_ladder;
    cc.a = cfg.a;
    cc.tau = cfg.tau;
    cc.L = cfg.L;
    cc.J = cfg.J;
    cc.n_samples = cfg.mc_samples;
    cc.seed = cfg.seed;
    cc.threads = cfg.threads;
    auto table = estimate_cantor_fraction(cfg.coeffs, cfg.sites, p.twist, cc);

    std::ostringstream csv;
    csv << "# model closed-form exponents; bounded eigenvalue corrections omitted\n";
    csv << csv_header(cfg.config_hash, "eps,gamma,n_samples,accepted,fraction,fitted_exponent");
    for (auto& r : table.rows)
        csv << format_double(r.eps) << "," << format_double(r.gamma) << "," << r.n_samples << ","
            << r.accepted << "," << format_double(r.fraction) << ","
            << format_double(table.fitted_exponent) << "\n";
    write_text(cfg.output_dir + "/measure.csv", csv.str());
    write_gnuplot(cfg.output_dir + "/measure.gp", "measure.csv", "excluded fraction", {"fraction"},
                  false);

    std::ostringstream log;
    for (double eps : cfg.eps_ladder) {
        for (uint64_t i = 0; i < 40; ++i) {
            auto d = cantor_sample(cfg.coeffs, cfg.sites, p.twist, eps, cc, i);
            if (d.violation) {
                json row;
                row["eps"] = eps;
                std::vector<int> lv(d.violation->l.begin(), d.violation->l.begin() + cfg.nu);
                row["l"] = lv;
                row["j"] = d.violation->j;
                row["k"] = d.violation->k;
                row["lhs"] = d.violation->lhs;
                row["rhs"] = d.violation->rhs;
                log << row.dump() << "\n";
            }
        }
    }
    write_text(cfg.output_dir + "/violations.jsonl", log.str());
    write_manifest(cfg.output_dir, "measure", cfg, timer.seconds());
    std::cout << "measure: fitted exponent " << table.fitted_exponent << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification toolkit for quasi-periodic gKdV tori"};
    app.require_subcommand(1);

    std::string config_path;
    std::string level = "bnf";
    double eps_override = -1;
    uint64_t seed_override = 0;
    bool has_seed = false;
    int threads = 0;
    std::string outdir_override;

    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--eps", eps_override, "override the first ladder entry");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the RNG seed");
    app.add_option("--threads", threads, "worker thread count (0 = hardware)");
    app.add_option("--output-dir", outdir_override, "override the output directory");

    auto* sub_check = app.add_subcommand("check-sites", "site and coefficient certificates");
    auto* sub_nf = app.add_subcommand("normal-form", "weak normal-form report");
    auto* sub_freq = app.add_subcommand("frequencies", "twist and frequency data");
    auto* sub_build = app.add_subcommand("build", "construct the approximate torus");
    sub_build->add_option("--level", level, "naive or bnf");
    auto* sub_res = app.add_subcommand("residual", "residual ladder naive vs bnf");
    auto* sub_ref = app.add_subcommand("refine", "newton refinement of the stored torus");
    auto* sub_sim = app.add_subcommand("simulate", "pseudospectral trajectory from the torus");
    auto* sub_flo = app.add_subcommand("floquet", "floquet exponents at the stored torus");
    auto* sub_mea = app.add_subcommand("measure", "admissible-frequency fraction scan");
    for (auto* s : {sub_check, sub_nf, sub_freq, sub_build, sub_res, sub_ref, sub_sim, sub_flo,
                    sub_mea})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (eps_override > 0) cfg.eps_ladder = {eps_override};
        if (seed_opt->count()) {
            has_seed = true;
            cfg.seed = seed_override;
        }
        (void)has_seed;
        if (threads > 0) cfg.threads = threads;
        if (!outdir_override.empty()) cfg.output_dir = outdir_override;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sub_check->parsed()) return cmd_check_sites(cfg);
        if (sub_nf->parsed()) return cmd_normal_form(cfg);
        if (sub_freq->parsed()) return cmd_frequencies(cfg);
        if (sub_build->parsed()) return cmd_build(cfg, level);
        if (sub_res->parsed()) return cmd_residual(cfg);
        if (sub_ref->parsed()) return cmd_refine(cfg);
        if (sub_sim->parsed()) return cmd_simulate(cfg);
        if (sub_flo->parsed()) return cmd_floquet(cfg);
        if (sub_mea->parsed()) return cmd_measure(cfg);
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
