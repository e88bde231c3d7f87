#include <doctest.h>

#include "kamgkdv/torus.hpp"

using namespace kam;

namespace {

Coefficients ones() {
    Coefficients c;
    c.c1 = c.c2 = c.c3 = c.c4 = c.c5 = c.c6 = c.c7 = 0.25;
    return c;
}

struct Setup {
    SiteSet sites;
    Coefficients c;
    WbnfResult wbnf;
    TwistData twist;
};

Setup make_setup(const Coefficients& c, const SiteSet& sites) {
    Setup s{sites, c, {}, {}};
    auto H = build_gkdv(c, 4 * sites.max_site());
    s.wbnf = run_wbnf(H, sites);
    s.twist = twist_matrices(s.wbnf.quartic, sites, c);
    return s;
}

} // namespace

TEST_CASE("vbar: nu=1 seed is 2 cos(phi + x) and the square has constant mean") {
    SiteSet sites({1});
    Vec xi(1);
    xi << 1.0;
    auto f = build_vbar(sites, xi);
    QPKey k;
    k.l[0] = 1;
    k.j = 1;
    CHECK(std::abs(f.mode(k) - Cplx(1, 0)) < 1e-15);
    QPKey km;
    km.l[0] = -1;
    km.j = -1;
    CHECK(std::abs(f.mode(km) - Cplx(1, 0)) < 1e-15);
    CHECK(f.coeffs.size() == 2);

    // L_{omega_bar} vbar = 0: each mode satisfies i(wbar.l) + (ij)^3 = 0
    for (auto& [key, v] : f.coeffs) {
        double wl = 0;
        for (int i = 0; i < sites.nu(); ++i)
            wl += std::pow(double(sites.positive[size_t(i)]), 3) * key.l[size_t(i)];
        Cplx mult = Cplx(0, wl) + std::pow(Cplx(0, double(key.j)), 3);
        CHECK(std::abs(mult) < 1e-14);
    }
}

TEST_CASE("vbar: the x-mean of the square is constant in the angles") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.0, 1.5;
    auto f = build_vbar(sites, xi);
    // M_x[v^2](phi) = sum over pairs with j1 + j2 = 0: only (j,-j), giving a
    // phi-independent value sum |j| xi_j over S
    double expect = 2.0 * (1.0 * 1.0 + 2.0 * 1.5);
    Cplx acc = 0;
    for (auto& [k1, v1] : f.coeffs)
        for (auto& [k2, v2] : f.coeffs) {
            if (k1.j + k2.j != 0) continue;
            bool zero_l = true;
            for (int i = 0; i < 4; ++i) zero_l = zero_l && (k1.l[i] + k2.l[i] == 0);
            CHECK(zero_l); // pairs with opposite j also carry opposite l
            acc += v1 * v2;
        }
    CHECK(std::abs(acc - Cplx(expect, 0)) < 1e-12);
}

TEST_CASE("approximate torus: eps = 0 and the c = 0 flow identity") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.0, 1.0;
    auto s0 = make_setup(Coefficients{}, sites);
    auto t0 = build_approximate_torus(Coefficients{}, sites, xi, 0.0, TorusLevel::Bnf, s0.wbnf,
                                      s0.twist);
    CHECK(t0.modes.empty());

    auto tn = build_approximate_torus(Coefficients{}, sites, xi, 0.05, TorusLevel::Naive, s0.wbnf,
                                      s0.twist);
    auto tb = build_approximate_torus(Coefficients{}, sites, xi, 0.05, TorusLevel::Bnf, s0.wbnf,
                                      s0.twist);
    REQUIRE(tn.modes.size() == tb.modes.size());
    for (auto& [l, v] : tn.modes) CHECK(std::abs(tb.mode(l) - v) < 1e-12);
}

TEST_CASE("approximate torus: quadratic correction matches the explicit kernel") {
    // || Phi_B(eps vbar) - eps vbar - eps^2 Psi2(vbar) || / eps^3 stays bounded
    SiteSet sites({1});
    Vec xi(1);
    xi << 1.0;
    auto s = make_setup(ones(), sites);
    std::vector<double> ratios;
    for (double eps : {0.1, 0.05, 0.025}) {
        auto tb =
            build_approximate_torus(ones(), sites, xi, eps, TorusLevel::Bnf, s.wbnf, s.twist);
        auto tn =
            build_approximate_torus(ones(), sites, xi, eps, TorusLevel::Naive, s.wbnf, s.twist);
        // Psi2(vbar) = -c1 dx(v^2) - c2/3 dxx[(dx^-1 v)^2] + c2/3 pi0[v^2]
        //              + c3 pi0[(dx^-1 v)^2], evaluated on the profile lattice
        PsiGrid g{1, 16};
        auto v = g.to_grid(tn.modes); // = eps * vbar
        auto vi = g.x_derivative(v, sites, -1);
        size_t n = v.size();
        std::vector<Cplx> v2(n), vi2(n);
        for (size_t i = 0; i < n; ++i) {
            v2[i] = v[i] * v[i];
            vi2[i] = vi[i] * vi[i];
        }
        auto dxv2 = g.x_derivative(v2, sites, 1);
        auto dxxvi2 = g.x_derivative(vi2, sites, 2);
        double mean_v2 = 0, mean_vi2 = 0;
        for (size_t i = 0; i < n; ++i) {
            mean_v2 += v2[i].real();
            mean_vi2 += vi2[i].real();
        }
        mean_v2 /= double(n);
        mean_vi2 /= double(n);
        const Coefficients& cc = s.c;
        std::vector<Cplx> psi2(n);
        for (size_t i = 0; i < n; ++i)
            psi2[i] = -cc.c1 * dxv2[i] - (cc.c2 / 3.0) * dxxvi2[i] +
                      (cc.c2 / 3.0) * (v2[i] - mean_v2) + cc.c3 * (vi2[i] - mean_vi2);
        // compare against the flowed torus
        auto bmodes = g.to_grid(tb.modes);
        double diff = 0;
        for (size_t i = 0; i < n; ++i)
            diff = std::max(diff, std::abs(bmodes[i] - v[i] - psi2[i]));
        ratios.push_back(diff / (eps * eps * eps));
    }
    CHECK(ratios[0] < 10.0);
    CHECK(ratios[2] < 2.0 * ratios[0] + 1.0);
}

TEST_CASE("residual: exact airy torus at c = 0") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.3, 1.7;
    auto s = make_setup(Coefficients{}, sites);
    auto t =
        build_approximate_torus(Coefficients{}, sites, xi, 0.05, TorusLevel::Naive, s.wbnf, s.twist);
    auto r = residual_functional(t, Coefficients{});
    CHECK(r.sup < 1e-12);
    CHECK(r.l2 < 1e-12);
}

TEST_CASE("residual: bnf level beats naive level on a small ladder") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.0, 1.0;
    auto s = make_setup(ones(), sites);
    for (double eps : {0.05, 0.02}) {
        auto tn = build_approximate_torus(ones(), sites, xi, eps, TorusLevel::Naive, s.wbnf,
                                          s.twist);
        auto tb =
            build_approximate_torus(ones(), sites, xi, eps, TorusLevel::Bnf, s.wbnf, s.twist);
        auto rn = residual_functional(tn, ones());
        auto rb = residual_functional(tb, ones());
        CHECK(rb.l2 < rn.l2);
    }
}

TEST_CASE("newton: starting at the exact airy solution returns immediately") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.0, 1.0;
    auto s = make_setup(Coefficients{}, sites);
    auto t = build_approximate_torus(Coefficients{}, sites, xi, 0.02, TorusLevel::Naive, s.wbnf,
                                     s.twist);
    NewtonOptions opt;
    opt.L = 3;
    opt.J = 9;
    auto rep = refine_torus_newton(t, Coefficients{}, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    for (auto& [l, v] : t.modes) CHECK(std::abs(rep.torus.mode(l) - v) < 1e-14);
}

TEST_CASE("newton: contracts the bnf torus residual at eps = 0.02") {
    SiteSet sites({1, 2});
    Vec xi(2);
    xi << 1.0, 1.0;
    auto s = make_setup(ones(), sites);
    auto t = build_approximate_torus(ones(), sites, xi, 0.02, TorusLevel::Bnf, s.wbnf, s.twist);
    NewtonOptions opt;
    opt.L = 5;
    opt.J = 15;
    opt.tol = 1e-10;
    auto rep = refine_torus_newton(t, ones(), opt);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 6);
    REQUIRE(rep.residual_history.size() >= 2);
    CHECK(rep.residual_history.back() < 1e-10);
    CHECK(rep.zeta.cwiseAbs().maxCoeff() < 1e-8);
    // residuals never increase between accepted iterations
    for (size_t i = 1; i < rep.residual_history.size(); ++i)
        CHECK(rep.residual_history[i] <= rep.residual_history[i - 1] * 1.001);
    // reality of the refined embedding
    for (auto& [l, v] : rep.torus.modes)
        CHECK(std::abs(std::conj(rep.torus.mode(lneg(l))) - v) < 1e-13);
}

TEST_CASE("diophantine scan: integer resonance and the trivial gamma") {
    Vec w(2);
    w << 1.0, 8.0;
    auto rep = check_diophantine(w, 1e-6, 4.0, 8);
    CHECK_FALSE(rep.holds); // omega.(-8,1) = 0
    auto rep0 = check_diophantine(w, 0.0, 4.0, 8);
    CHECK(rep0.holds);
}

TEST_CASE("fitted_slope recovers a power law") {
    std::vector<double> eps{0.1, 0.05, 0.025};
    std::vector<double> val;
    for (double e : eps) val.push_back(3.0 * e * e);
    CHECK(fitted_slope(eps, val) == doctest::Approx(2.0).epsilon(1e-10));
}
