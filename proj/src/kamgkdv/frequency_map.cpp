#include "kamgkdv/frequency_map.hpp"

#include <cmath>
#include <stdexcept>

#include "kamgkdv/parallel.hpp"
#include "kamgkdv/rng.hpp"

namespace kam {

Vec linear_frequencies(const SiteSet& sites) {
    Vec w(sites.nu());
    for (int i = 0; i < sites.nu(); ++i) {
        double j = sites.positive[size_t(i)];
        w[i] = j * j * j;
    }
    return w;
}

Vec omega_of_actions(const ResonantQuartic& q, const SiteSet& sites, const Vec& I) {
    int nu = sites.nu();
    if (I.size() != nu) throw std::invalid_argument("omega_of_actions: dimension mismatch");
    Vec w = linear_frequencies(sites);
    for (int a = 0; a < nu; ++a) {
        int j = sites.positive[size_t(a)];
        double dh = 2.0 * q.diag_at(j) * I[a];
        for (int b = 0; b < nu; ++b) {
            if (b == a) continue;
            dh += q.cross_at(j, sites.positive[size_t(b)]) * I[b];
        }
        w[a] += double(j) * dh;
    }
    return w;
}

namespace {

Mat hessian(const ResonantQuartic& q, const SiteSet& sites) {
    int nu = sites.nu();
    Mat h = Mat::Zero(nu, nu);
    for (int a = 0; a < nu; ++a) {
        int j = sites.positive[size_t(a)];
        h(a, a) = 2.0 * q.diag_at(j);
        for (int b = a + 1; b < nu; ++b) {
            int k = sites.positive[size_t(b)];
            h(a, b) = h(b, a) = q.cross_at(j, k);
        }
    }
    return h;
}

Mat site_diag(const SiteSet& sites, int power) {
    int nu = sites.nu();
    Mat d = Mat::Zero(nu, nu);
    for (int a = 0; a < nu; ++a) d(a, a) = std::pow(double(sites.positive[size_t(a)]), power);
    return d;
}

} // namespace

Mat twist_matrix_closed_form(const Coefficients& c, const SiteSet& sites) {
    int nu = sites.nu();
    Mat U = Mat::Ones(nu, nu);
    Mat D1 = site_diag(sites, 1), D2 = site_diag(sites, 2), D3 = site_diag(sites, 3),
        D5 = site_diag(sites, 5), Dm1 = site_diag(sites, -1), Dm2 = site_diag(sites, -2);
    Mat I = Mat::Identity(nu, nu);
    Mat A = (24 * c.c1 * c.c1 - 12 * c.c4) * D5 * (I - 2 * Dm2 * U * D2) +
            (14.0 / 3.0 * c.c2 * c.c2 - 4 * c.c6) * D3 +
            (4 * c.c6 - 16.0 / 3.0 * c.c2 * c.c2) * (D3 * U + D1 * U * D2) +
            12 * (c.c2 * c.c3 - c.c7) * D1 + (24 * c.c7 - 16 * c.c2 * c.c3) * D1 * U -
            6 * c.c3 * c.c3 * Dm1;
    return A;
}

TwistData twist_matrices(const ResonantQuartic& q, const SiteSet& sites, const Coefficients& c) {
    TwistData t;
    Mat D = site_diag(sites, 1);
    Mat H = hessian(q, sites);
    t.A = D * H;
    t.M = D * H * D;
    t.det_M = t.M.determinant();
    Eigen::JacobiSVD<Mat> svd(t.M);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    t.rcond = smax > 0 ? smin / smax : 0.0;
    t.A_closed = twist_matrix_closed_form(c, sites);
    t.max_closed_diff = (t.A - t.A_closed).cwiseAbs().maxCoeff();
    return t;
}

bool check_resonant_coeffs(const Coefficients& c) {
    const double tol = 1e-14;
    return std::abs(c.c3) <= tol && std::abs(c.c7) <= tol &&
           std::abs(2 * c.c1 * c.c1 - c.c4) <= tol && std::abs(7 * c.c2 * c.c2 - 6 * c.c6) <= tol;
}

C1C2Report check_c1_c2(const Coefficients& c, int nu, int jk_range) {
    if (nu < 1) throw std::invalid_argument("check_c1_c2: nu must be >= 1");
    C1C2Report rep;
    rep.scan_range = jk_range;
    double lhs = (7.0 - 16.0 * nu) * c.c2 * c.c2;
    double rhs = 6.0 * (1.0 - 2.0 * nu) * c.c6;
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    rep.c1_margin = std::abs(lhs - rhs);
    rep.C1 = rep.c1_margin > 1e-10 * scale;

    double num = nu * (3 * c.c6 - 4 * c.c2 * c.c2);
    double den = 9 * c.c4 - 18 * c.c1 * c.c1;
    if (std::abs(den) <= 1e-14 * std::max(1.0, std::abs(num))) {
        // vacuously true only when the numerator vanishes as well
        rep.C2 = std::abs(num) <= 1e-14 ? TriState::Holds : TriState::Undefined;
        return rep;
    }
    double value = num / den;
    rep.c2_value = value;
    rep.C2 = TriState::Holds;
    for (int j = -jk_range; j <= jk_range && rep.C2 == TriState::Holds; ++j) {
        if (j == 0) continue;
        for (int k = -jk_range; k <= jk_range; ++k) {
            if (k == 0 || k == j) continue;
            double form = double(j) * j + double(k) * k + double(j) * k;
            if (std::abs(value - form) <= 1e-10 * std::max(1.0, std::abs(form))) {
                rep.C2 = TriState::Fails;
                break;
            }
        }
    }
    return rep;
}

SpectralConstants spectral_constants(const Coefficients& c, const SiteSet& sites, const Vec& xi) {
    if (xi.size() != sites.nu()) throw std::invalid_argument("spectral_constants: dim mismatch");
    SpectralConstants s;
    s.xi = xi;
    double v1 = 0, v3 = 0;
    for (int a = 0; a < sites.nu(); ++a) {
        double j = sites.positive[size_t(a)];
        v1 += j * xi[a];
        v3 += j * j * j * xi[a];
    }
    s.d_xi = (24 * c.c4 - 48 * c.c1 * c.c1) * v3 + (4 * c.c6 - 16.0 / 3.0 * c.c2 * c.c2) * v1;
    s.c_xi = (16.0 / 3.0 * c.c2 * c.c2 - 4 * c.c6) * v3 + (16 * c.c2 * c.c3 - 24 * c.c7) * v1;
    return s;
}

Mat bjk_matrix(const Coefficients& c, const SiteSet& sites, int j, int k) {
    double form = double(j) * j + double(k) * k + double(j) * k;
    if (form <= 0) throw std::logic_error("bjk_matrix: quadratic form not positive");
    Mat U = Mat::Ones(sites.nu(), sites.nu());
    Mat D1 = site_diag(sites, 1), D3 = site_diag(sites, 3);
    double a = -(24 * c.c4 - 48 * c.c1 * c.c1 +
                 (12 * c.c6 - 16 * c.c2 * c.c2) / (3.0 * form));
    double b = 16.0 * c.c2 * c.c2 / 3.0 - 4 * c.c6 + (16 * c.c2 * c.c3 - 24 * c.c7) / form;
    return a * D3 * U * D3 + b * D1 * U * D3;
}

H1H2Report check_h1_h2(const Coefficients& c, const SiteSet& sites, const TwistData& twist,
                       const std::vector<std::pair<int, int>>& jk_pairs) {
    H1H2Report rep;
    double scale = std::max(1.0, twist.M.cwiseAbs().maxCoeff());
    if (std::abs(twist.det_M) <= 1e-12 * std::pow(scale, sites.nu()))
        throw std::invalid_argument("check_h1_h2: twist matrix is singular");
    Vec wbar = linear_frequencies(sites);
    Vec xi = twist.M.partialPivLu().solve(wbar);
    SpectralConstants s = spectral_constants(c, sites, xi);
    rep.h1_value = s.d_xi - 1.0;
    rep.H1 = std::abs(rep.h1_value) > 1e-10 * std::max(1.0, std::abs(s.d_xi));
    for (auto [j, k] : jk_pairs) {
        if (j == k) throw std::invalid_argument("check_h1_h2: pairs need j != k");
        Mat B = bjk_matrix(c, sites, j, k);
        double det = (twist.M + B).determinant();
        double bscale = std::max(1.0, (twist.M + B).cwiseAbs().maxCoeff());
        rep.H2_dets[{j, k}] = det;
        rep.H2[{j, k}] = std::abs(det) > 1e-10 * std::pow(bscale, sites.nu());
    }
    return rep;
}

Vec amplitude_of_frequency(const Vec& omega, const TwistData& twist, const SiteSet& sites,
                           double eps) {
    if (eps <= 0) throw std::invalid_argument("amplitude_of_frequency: eps must be positive");
    double scale = std::max(1.0, twist.M.cwiseAbs().maxCoeff());
    if (std::abs(twist.det_M) <= 1e-12 * std::pow(scale, sites.nu()))
        throw std::invalid_argument("amplitude_of_frequency: twist matrix is singular");
    Vec rhs = omega - linear_frequencies(sites);
    return twist.M.partialPivLu().solve(rhs) / (eps * eps);
}

// ---------------------------------------------------------------------------

RationalMatrix exact_twist_matrix(const RationalQuartic& q, const SiteSet& sites) {
    int nu = sites.nu();
    RationalMatrix m;
    m.n = nu;
    m.a.assign(size_t(nu * nu), Rational(0));
    for (int a = 0; a < nu; ++a) {
        long ja = sites.positive[size_t(a)];
        m.at(a, a) = Rational(2) * q.diag[size_t(a)] * Rational(ja * ja);
        for (int b = a + 1; b < nu; ++b) {
            long jb = sites.positive[size_t(b)];
            Rational v = q.cross[size_t(a)][size_t(b - a - 1)] * Rational(ja * jb);
            m.at(a, b) = v;
            m.at(b, a) = v;
        }
    }
    return m;
}

Rational exact_det(RationalMatrix m) {
    Rational det(1);
    for (int col = 0; col < m.n; ++col) {
        int pivot = -1;
        for (int r = col; r < m.n; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) return Rational(0);
        if (pivot != col) {
            for (int c = 0; c < m.n; ++c) std::swap(m.at(pivot, c), m.at(col, c));
            det = -det;
        }
        det = det * m.at(col, col);
        for (int r = col + 1; r < m.n; ++r) {
            if (m.at(r, col).is_zero()) continue;
            Rational f = m.at(r, col) / m.at(col, col);
            for (int c = col; c < m.n; ++c) m.at(r, c) -= f * m.at(col, c);
        }
    }
    return det;
}

int exact_rank(RationalMatrix m) {
    int rank = 0;
    int row = 0;
    for (int col = 0; col < m.n && row < m.n; ++col) {
        int pivot = -1;
        for (int r = row; r < m.n; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != row)
            for (int c = 0; c < m.n; ++c) std::swap(m.at(pivot, c), m.at(row, c));
        for (int r = row + 1; r < m.n; ++r) {
            if (m.at(r, col).is_zero()) continue;
            Rational f = m.at(r, col) / m.at(row, col);
            for (int c = col; c < m.n; ++c) m.at(r, c) -= f * m.at(row, c);
        }
        ++rank;
        ++row;
    }
    return rank;
}

GenericityResult twist_genericity_scan(int samples, uint64_t seed, int max_site, int max_nu,
                                       int threads) {
    GenericityResult out;
    out.samples = samples;
    std::vector<int> singular(size_t(samples), 0);
    parallel_for(size_t(samples), [&](size_t i) {
        SplitMix64 g(mix_seed(seed, i));
        int nu = 2 + int(g.next() % uint64_t(std::max(1, max_nu - 1)));
        // distinct sites
        std::vector<int> pos;
        while (int(pos.size()) < nu) {
            int s = 1 + int(g.next() % uint64_t(max_site));
            if (std::find(pos.begin(), pos.end(), s) == pos.end()) pos.push_back(s);
        }
        std::sort(pos.begin(), pos.end());
        SiteSet sites(pos);
        RationalCoefficients rc;
        auto draw = [&] {
            long num = long(g.next() % 21) - 10;
            long den = 1 + long(g.next() % 6);
            return Rational::from_fraction(num, den);
        };
        for (;;) {
            rc.c1 = draw();
            rc.c2 = draw();
            rc.c3 = draw();
            rc.c4 = draw();
            rc.c5 = draw();
            rc.c6 = draw();
            rc.c7 = draw();
            bool resonant = rc.c3.is_zero() && rc.c7.is_zero() &&
                            (Rational(2) * rc.c1 * rc.c1 - rc.c4).is_zero() &&
                            (Rational(7) * rc.c2 * rc.c2 - Rational(6) * rc.c6).is_zero();
            if (!resonant) break;
        }
        RationalQuartic q = exact_resonant_quartic(rc, sites);
        Rational det = exact_det(exact_twist_matrix(q, sites));
        singular[i] = det.is_zero() ? 1 : 0;
    }, threads);
    for (int s : singular) out.singular += s;
    return out;
}

} // namespace kam
