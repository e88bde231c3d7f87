#include <doctest.h>

#include "kamgkdv/cantor.hpp"

using namespace kam;

namespace {

struct Setup {
    SiteSet sites{std::vector<int>{1, 2}};
    Coefficients c;
    TwistData twist;
    Setup() {
        c.c1 = c.c2 = c.c3 = c.c4 = c.c5 = c.c6 = c.c7 = 0.1;
        auto H = build_gkdv(c, 8);
        auto wb = run_wbnf(H, sites);
        twist = twist_matrices(wb.quartic, sites, c);
    }
};

} // namespace

TEST_CASE("g0 membership: exact resonances are rejected, gamma = 0 accepts all") {
    Vec w(2);
    w << 1.0, 8.0; // omega.(-8,1) = 0
    CHECK_FALSE(membership_g0(w, 1e-9, 4.0, 8));
    CHECK(membership_g0(w, 0.0, 4.0, 8));
    Vec w2(2);
    w2 << 1.0001736, 8.0000912;
    CHECK(membership_g0(w2, 1e-9, 4.0, 8));
}

TEST_CASE("second melnikov scan: fast path agrees with the exhaustive scan") {
    Setup s;
    MelnikovScanConfig mc;
    mc.tau = 4.0;
    mc.L = 6;
    mc.J = 30;
    double eps = 0.02;
    mc.gamma_n = 2.0 * std::pow(eps, 2.1);
    SecondMelnikovScanner scanner(s.sites, mc);
    CantorConfig cc;
    cc.L = mc.L;
    cc.J = mc.J;
    cc.seed = 7;
    int checked = 0;
    for (uint64_t i = 0; i < 60; ++i) {
        auto d = cantor_sample(s.c, s.sites, s.twist, eps, cc, i);
        SpectralConstants sc = spectral_constants(s.c, s.sites, d.xi);
        double m3 = 1.0 + eps * eps * sc.d_xi;
        double m1 = eps * eps * sc.c_xi;
        auto fast = scanner.scan(d.omega, m3, m1);
        auto full = scanner.scan_exhaustive(d.omega, m3, m1);
        CHECK(fast.accepted == full.accepted);
        checked += fast.used_fast_path ? 1 : 0;
    }
    CHECK(checked > 0); // the pruned route was actually exercised
}

TEST_CASE("second melnikov scan: violations satisfy the defining inequality") {
    Setup s;
    MelnikovScanConfig mc;
    mc.tau = 4.0;
    mc.L = 6;
    mc.J = 30;
    double eps = 0.1;
    mc.gamma_n = 2.0 * std::pow(eps, 2.1);
    SecondMelnikovScanner scanner(s.sites, mc);
    CantorConfig cc;
    cc.L = mc.L;
    cc.J = mc.J;
    cc.seed = 99;
    int rejected = 0;
    for (uint64_t i = 0; i < 400 && rejected < 5; ++i) {
        auto d = cantor_sample(s.c, s.sites, s.twist, eps, cc, i);
        if (d.g0 && !d.melnikov) {
            ++rejected;
            REQUIRE(d.violation.has_value());
            CHECK(d.violation->lhs < d.violation->rhs);
            // re-evaluate independently
            SpectralConstants sc = spectral_constants(s.c, s.sites, d.xi);
            double m3 = 1.0 + eps * eps * sc.d_xi;
            double m1 = eps * eps * sc.c_xi;
            auto& v = *d.violation;
            double d3 = double(v.j) * v.j * v.j - double(v.k) * v.k * v.k;
            double lhs = std::abs(ldot(d.omega, v.l) - m3 * d3 + m1 * (v.j - v.k));
            CHECK(lhs == doctest::Approx(v.lhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("cantor table: deterministic under the seed and well-formed for nu = 1") {
    SiteSet sites({2});
    Coefficients c;
    c.c2 = 0.2;
    c.c3 = 0.1;
    auto H = build_gkdv(c, 8);
    auto wb = run_wbnf(H, sites);
    auto twist = twist_matrices(wb.quartic, sites, c);
    CantorConfig cfg;
    cfg.eps_ladder = {0.1, 0.05};
    cfg.n_samples = 400;
    cfg.L = 6;
    cfg.J = 20;
    cfg.seed = 31;
    auto t1 = estimate_cantor_fraction(c, sites, twist, cfg);
    auto t2 = estimate_cantor_fraction(c, sites, twist, cfg);
    REQUIRE(t1.rows.size() == 2);
    for (size_t i = 0; i < t1.rows.size(); ++i) {
        CHECK(t1.rows[i].accepted == t2.rows[i].accepted);
        CHECK(t1.rows[i].fraction >= 0.0);
        CHECK(t1.rows[i].fraction <= 1.0);
        CHECK(t1.rows[i].audit_mismatches == 0);
    }
}

TEST_CASE("acceptance improves as eps decreases (g0 trend)") {
    Setup s;
    CantorConfig cfg;
    cfg.eps_ladder = {0.1, 0.025};
    cfg.n_samples = 800;
    cfg.L = 8;
    cfg.J = 30;
    cfg.seed = 5;
    auto table = estimate_cantor_fraction(s.c, s.sites, s.twist, cfg);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1].fraction >= table.rows[0].fraction - 2 * table.rows[0].excluded_sigma -
                                        2 * table.rows[1].excluded_sigma);
}
