#include <doctest.h>

#include "kamgkdv/frequency_map.hpp"
#include "kamgkdv/rng.hpp"

using namespace kam;

namespace {

Coefficients ones() {
    Coefficients c;
    c.c1 = c.c2 = c.c3 = c.c4 = c.c5 = c.c6 = c.c7 = 1.0;
    return c;
}

ResonantQuartic pipeline_quartic(const Coefficients& c, const SiteSet& sites) {
    auto H = build_gkdv(c, 4 * sites.max_site());
    return run_wbnf(H, sites).quartic;
}

} // namespace

TEST_CASE("omega_of_actions: zero-action limit and exact linearity") {
    SiteSet sites({1, 2});
    auto q = pipeline_quartic(ones(), sites);
    Vec zero = Vec::Zero(2);
    Vec w0 = omega_of_actions(q, sites, zero);
    CHECK(w0[0] == doctest::Approx(1.0));
    CHECK(w0[1] == doctest::Approx(8.0));
    // omega(I) - omega(0) is exactly linear
    Vec I1(2), I2(2);
    I1 << 0.1, 0.05;
    I2 << 0.02, 0.07;
    Vec lhs = omega_of_actions(q, sites, I1 + I2) - w0;
    Vec rhs = (omega_of_actions(q, sites, I1) - w0) + (omega_of_actions(q, sites, I2) - w0);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("omega_of_actions: pure c2 diagonal frozen from the bracket pipeline") {
    // the transported-quartic diagonal for pure c2 is -3 c2^2 j^2, hence
    // omega_1(I) = 1 - 6 I at S+ = {1}
    Coefficients c;
    c.c2 = 1.0;
    SiteSet sites({1});
    auto q = pipeline_quartic(c, sites);
    Vec I(1);
    I << 0.1;
    Vec w = omega_of_actions(q, sites, I);
    CHECK(w[0] == doctest::Approx(1.0 - 6.0 * 0.1).epsilon(1e-12));
}

TEST_CASE("twist matrices: zero coefficients, symmetry, closed-form diff") {
    SiteSet sites({1, 2, 3});
    auto q0 = pipeline_quartic(Coefficients{}, sites);
    auto t0 = twist_matrices(q0, sites, Coefficients{});
    CHECK(t0.M.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t0.det_M == 0.0);

    auto q = pipeline_quartic(ones(), sites);
    auto t = twist_matrices(q, sites, ones());
    CHECK((t.M - t.M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    // the compact closed form differs from the pipeline only on the known
    // c2^2/c2c3 diagonal cells
    Mat diff = t.A - t.A_closed;
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
            if (r != s) CHECK(std::abs(diff(r, s)) < 1e-9);
}

TEST_CASE("twist degeneracy at resonant coefficients has rank 2") {
    Coefficients c;
    c.c1 = 1;
    c.c2 = 1;
    c.c4 = 2;           // 2 c1^2
    c.c6 = 7.0 / 6.0;   // 7 c2^2 / 6
    c.c5 = 1;           // does not enter the action data
    REQUIRE(check_resonant_coeffs(c));
    SiteSet sites({1, 2, 3});
    auto q = pipeline_quartic(c, sites);
    auto t = twist_matrices(q, sites, c);
    CHECK(std::abs(t.det_M) < 1e-10 * std::pow(t.M.cwiseAbs().maxCoeff(), 3));
    Eigen::JacobiSVD<Mat> svd(t.M);
    int rank = 0;
    for (int i = 0; i < 3; ++i)
        if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
    CHECK(rank <= 2);

    // exact route
    RationalCoefficients rc;
    rc.c1 = Rational(1);
    rc.c2 = Rational(1);
    rc.c4 = Rational(2);
    rc.c6 = Rational::from_fraction(7, 6);
    rc.c5 = Rational(1);
    auto eq = exact_resonant_quartic(rc, sites);
    auto em = exact_twist_matrix(eq, sites);
    CHECK(exact_det(em).is_zero());
    CHECK(exact_rank(em) == 2);
}

TEST_CASE("finite-difference hessian sandwich matches the twist matrix") {
    SiteSet sites({1, 2});
    auto q = pipeline_quartic(ones(), sites);
    auto t = twist_matrices(q, sites, ones());
    SplitMix64 g(4);
    Vec I(2);
    I << 0.7, 0.4;
    double h = 1e-4;
    Mat fd(2, 2);
    auto action_h = [&](const Vec& a) {
        // h~(I) = sum j^2 I_j + quartic(I); frequencies are j d/dI
        double v = 0;
        for (int i = 0; i < 2; ++i) {
            int j = sites.positive[size_t(i)];
            v += j * j * a[i] + q.diag_at(j) * a[i] * a[i];
        }
        v += q.cross_at(1, 2) * a[0] * a[1];
        return v;
    };
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
            Vec pp = I, pm = I, mp = I, mm = I;
            pp[r] += h;
            pp[s] += h;
            pm[r] += h;
            pm[s] -= h;
            mp[r] -= h;
            mp[s] += h;
            mm[r] -= h;
            mm[s] -= h;
            fd(r, s) = (action_h(pp) - action_h(pm) - action_h(mp) + action_h(mm)) / (4 * h * h);
        }
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 2;
    Mat sandwich = D * fd * D;
    CHECK((sandwich - t.M).cwiseAbs().maxCoeff() <
          1e-6 * std::max(1.0, t.M.cwiseAbs().maxCoeff()));
}

TEST_CASE("resonant coefficient detector") {
    Coefficients r;
    r.c1 = 1;
    r.c2 = 1;
    r.c4 = 2;
    r.c6 = 7.0 / 6.0;
    CHECK(check_resonant_coeffs(r));
    CHECK(check_resonant_coeffs(Coefficients{}));
    Coefficients n;
    n.c3 = 1;
    CHECK_FALSE(check_resonant_coeffs(n));
}

TEST_CASE("non-degeneracy conditions C1 and C2") {
    { // both sides zero: the inequality fails
        auto rep = check_c1_c2(Coefficients{}, 1);
        CHECK_FALSE(rep.C1);
    }
    {
        Coefficients c;
        c.c2 = 1;
        auto rep = check_c1_c2(c, 1);
        CHECK(rep.C1); // (7-16) = -9 differs from 0
    }
    {
        // value nu(3 c6 - 4 c2^2)/(9 c4 - 18 c1^2) = 1 is attained at (1,-1)
        Coefficients c;
        c.c4 = 1;
        c.c6 = 1;
        auto rep = check_c1_c2(c, 3, 50);
        CHECK(rep.c2_value == doctest::Approx(1.0));
        CHECK(rep.C2 == TriState::Fails);
    }
    {
        // undefined denominator with nonzero numerator is reported as such
        Coefficients c;
        c.c6 = 1;
        auto rep = check_c1_c2(c, 2, 10);
        CHECK(rep.C2 == TriState::Undefined);
    }
}

TEST_CASE("spectral constants: zeros, the S+={1} values, homogeneity") {
    SiteSet sites({1});
    Vec xi(1);
    xi << 1.0;
    auto s0 = spectral_constants(Coefficients{}, sites, xi);
    CHECK(s0.d_xi == 0.0);
    CHECK(s0.c_xi == 0.0);

    Coefficients c;
    c.c2 = 1.0;
    auto s = spectral_constants(c, sites, xi);
    CHECK(s.c_xi == doctest::Approx(16.0 / 3.0));
    CHECK(s.d_xi == doctest::Approx(-16.0 / 3.0));

    Vec xi2 = 3.0 * xi;
    auto s2 = spectral_constants(c, sites, xi2);
    CHECK(s2.c_xi == doctest::Approx(3.0 * s.c_xi));
    CHECK(s2.d_xi == doctest::Approx(3.0 * s.d_xi));
}

TEST_CASE("quadratic form j^2 + k^2 + jk stays positive for distinct nonzero pairs") {
    for (int j = -100; j <= 100; ++j)
        for (int k = -100; k <= 100; ++k) {
            if (j == 0 || k == 0 || j == k) continue;
            CHECK(j * j + k * k + j * k > 0);
        }
}

TEST_CASE("H1/H2: pure c3 reduces H2 to the twist determinant") {
    Coefficients c;
    c.c3 = 1.0;
    SiteSet sites({1, 2});
    auto q = pipeline_quartic(c, sites);
    auto t = twist_matrices(q, sites, c);
    REQUIRE(std::abs(t.det_M) > 1e-12);
    auto rep = check_h1_h2(c, sites, t, {{3, 4}, {3, -4}});
    for (auto& [p, b] : rep.H2) CHECK(b); // B = 0, so det(M + B) = det M != 0
    Mat B = bjk_matrix(c, sites, 3, 4);
    CHECK(B.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("H1 holds for most random non-resonant draws") {
    SplitMix64 g(2024);
    int holds = 0, total = 200;
    for (int s = 0; s < total; ++s) {
        Coefficients c;
        c.c1 = g.uniform(-1, 1);
        c.c2 = g.uniform(-1, 1);
        c.c3 = g.uniform(-1, 1);
        c.c4 = g.uniform(-1, 1);
        c.c5 = g.uniform(-1, 1);
        c.c6 = g.uniform(-1, 1);
        c.c7 = g.uniform(-1, 1);
        if (check_resonant_coeffs(c)) continue;
        std::vector<int> pos;
        while (int(pos.size()) < 2) {
            int v = 1 + int(g.next() % 12);
            if (std::find(pos.begin(), pos.end(), v) == pos.end()) pos.push_back(v);
        }
        std::sort(pos.begin(), pos.end());
        SiteSet sites(pos);
        auto q = pipeline_quartic(c, sites);
        auto t = twist_matrices(q, sites, c);
        if (std::abs(t.det_M) < 1e-10) continue;
        auto rep = check_h1_h2(c, sites, t, {});
        holds += rep.H1 ? 1 : 0;
    }
    CHECK(double(holds) / total >= 0.99);
}

TEST_CASE("amplitude_of_frequency: round trip and the box image") {
    Coefficients c = ones();
    SiteSet sites({1, 2});
    auto q = pipeline_quartic(c, sites);
    auto t = twist_matrices(q, sites, c);
    REQUIRE(std::abs(t.det_M) > 1e-10);
    Vec wbar = linear_frequencies(sites);
    CHECK(amplitude_of_frequency(wbar, t, sites, 0.1).cwiseAbs().maxCoeff() < 1e-12);

    double eps = 0.05;
    SplitMix64 g(5);
    for (int s = 0; s < 10; ++s) {
        Vec xi(2);
        xi << g.uniform(1, 2), g.uniform(1, 2);
        Vec omega = wbar + eps * eps * (t.M * xi);
        Vec back = amplitude_of_frequency(omega, t, sites, eps);
        CHECK((back - xi).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(back.minCoeff() >= 1.0 - 1e-9);
        CHECK(back.maxCoeff() <= 2.0 + 1e-9);
    }
}

TEST_CASE("genericity scan: no singular twist matrices in a seeded sample") {
    auto res = twist_genericity_scan(300, 77, 30, 3);
    CHECK(res.singular == 0);
}
