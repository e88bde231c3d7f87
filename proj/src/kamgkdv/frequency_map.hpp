#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "kamgkdv/gkdv.hpp"
#include "kamgkdv/wbnf.hpp"

namespace kam {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Frequencies of the truncated action Hamiltonian:
//   omega_j(I) = j^3 + j * d/dI_j [quartic](I),  j in S^+.
Vec omega_of_actions(const ResonantQuartic& q, const SiteSet& sites, const Vec& I);

Vec linear_frequencies(const SiteSet& sites); // (jbar_i^3)

struct TwistData {
    Mat A;        // frequency shift per action, pipeline route
    Mat M;        // twist matrix, M = A * D_S (symmetric)
    double det_M = 0;
    double rcond = 0;      // reciprocal condition estimate of M
    Mat A_closed; // compact closed-form reference, kept for the regression diff
    double max_closed_diff = 0;
};

TwistData twist_matrices(const ResonantQuartic& q, const SiteSet& sites, const Coefficients& c);

// Compact closed-form twist map (reference only).
Mat twist_matrix_closed_form(const Coefficients& c, const SiteSet& sites);

// Resonance test: c3 = c7 = 2 c1^2 - c4 = 7 c2^2 - 6 c6 = 0 within 1e-14.
bool check_resonant_coeffs(const Coefficients& c);

enum class TriState { Holds, Fails, Undefined };

struct C1C2Report {
    bool C1 = false;
    TriState C2 = TriState::Undefined;
    double c1_margin = 0; // |lhs - rhs| of the C1 inequality
    double c2_value = 0;  // nu (3 c6 - 4 c2^2) / (9 c4 - 18 c1^2) when defined
    int scan_range = 0;
};

C1C2Report check_c1_c2(const Coefficients& c, int nu, int jk_range = 50);

struct SpectralConstants {
    double d_xi = 0;   // cubic-coefficient shift prediction
    double c_xi = 0;   // transport-coefficient shift prediction
    Vec xi;
};

// d(xi) = (24 c4 - 48 c1^2) v3.xi + (4 c6 - 16/3 c2^2) v1.xi
// c(xi) = (16/3 c2^2 - 4 c6) v3.xi + (16 c2 c3 - 24 c7) v1.xi,  v_k = D_S^k 1.
SpectralConstants spectral_constants(const Coefficients& c, const SiteSet& sites, const Vec& xi);

// Resonance-avoidance matrix for the pair (j,k) of normal indices.
Mat bjk_matrix(const Coefficients& c, const SiteSet& sites, int j, int k);

struct H1H2Report {
    bool H1 = false;
    double h1_value = 0; // d(M^{-1} omega_bar) - 1
    std::map<std::pair<int, int>, bool> H2;
    std::map<std::pair<int, int>, double> H2_dets;
};

H1H2Report check_h1_h2(const Coefficients& c, const SiteSet& sites, const TwistData& twist,
                       const std::vector<std::pair<int, int>>& jk_pairs);

// xi = eps^{-2} M^{-1} (omega - omega_bar); throws on singular twist.
Vec amplitude_of_frequency(const Vec& omega, const TwistData& twist, const SiteSet& sites,
                           double eps);

// ---------------------------------------------------------------------------
// exact-rational certificates

struct RationalMatrix {
    int n = 0;
    std::vector<Rational> a; // row major
    Rational& at(int r, int c) { return a[size_t(r * n + c)]; }
    const Rational& at(int r, int c) const { return a[size_t(r * n + c)]; }
};

RationalMatrix exact_twist_matrix(const RationalQuartic& q, const SiteSet& sites);
Rational exact_det(RationalMatrix m); // fraction-based Gaussian elimination
int exact_rank(RationalMatrix m);

// Monte-Carlo genericity experiment: random non-resonant rational coefficients
// and random site sets; counts exactly-singular twist matrices.
struct GenericityResult {
    int samples = 0;
    int singular = 0;
};
GenericityResult twist_genericity_scan(int samples, uint64_t seed, int max_site = 50,
                                       int max_nu = 3, int threads = 0);

} // namespace kam
