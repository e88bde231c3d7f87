#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kamgkdv/gkdv.hpp"
#include "kamgkdv/poly.hpp"
#include "kamgkdv/rational.hpp"

namespace kam {

enum class BnfStep { Three, Four, Five };

// Generator of one normal-form step; the vector field X_F vanishes outside the
// band |j| <= support_bound.
struct BnfGenerator {
    PolyHamiltonian F;
    BnfStep step = BnfStep::Three;
    int support_bound = 0;
};

// Quartic normal-form data H_{4,0}(I) = sum_j diag_j I_j^2
//                                     + sum_{j<j'} cross_{jj'} I_j I_{j'},
// stored in the bare normalisation (2*pi divided out), indices in S^+.
struct ResonantQuartic {
    std::map<int, double> diag;
    std::map<std::pair<int, int>, double> cross; // key j < j'

    double cross_at(int j, int k) const {
        auto it = cross.find({std::min(j, k), std::max(j, k)});
        return it == cross.end() ? 0.0 : it->second;
    }
    double diag_at(int j) const {
        auto it = diag.find(j);
        return it == diag.end() ? 0.0 : it->second;
    }
};

struct HypothesisReport {
    bool holds = true;
    std::vector<std::array<int, 4>> witnesses; // sorted quadruples, deduplicated
};

// Hypothesis on the sites: no quadruple in S^4 with nonzero sum satisfies
// j1^3+j2^3+j3^3+j4^3 = (j1+j2+j3+j4)^3. Factored search path.
HypothesisReport check_hypothesis_s(const SiteSet& sites);
// Independent brute-force oracle (direct cubic arithmetic).
HypothesisReport check_hypothesis_s_oracle(const SiteSet& sites);

// No 5-tuple with at most one index outside S has both zero sum and zero cube
// sum (the step-three solvability conditions).
bool check_s0_s1(const SiteSet& sites);

// Cubic generator removing monomials of H3 with at most one index outside S.
BnfGenerator solve_homological_step3(const PolyHamiltonian& H3, const SiteSet& sites);

// Quartic generator on the nonresonant set (at most one index outside S,
// nonzero cube sum).
BnfGenerator solve_homological_step4(const PolyHamiltonian& H4_transported, const SiteSet& sites);

// Quintic generator removing monomials with at most one index outside S;
// requires check_s0_s1.
BnfGenerator solve_homological_step5(const PolyHamiltonian& H5_transported, const SiteSet& sites);

struct TransportResult {
    std::vector<PolyHamiltonian> by_degree; // degrees 2..max_degree
    double discarded_mass = 0;              // l1 coefficient mass above max_degree

    const PolyHamiltonian& degree(int d) const { return by_degree.at(size_t(d - 2)); }
};

// Lie-series transport H o Phi_F = sum_k ad_F^k(H)/k! truncated at max_degree,
// with ad_F(H) = {H, F}.
TransportResult bnf_transport(const std::vector<PolyHamiltonian>& parts, const BnfGenerator& F,
                              int max_degree);

// Collects the action-type part of the S-supported transported quartic; fails
// when S-supported non-action monomials above tol survive.
ResonantQuartic extract_resonant_quartic(const PolyHamiltonian& H4_final, const SiteSet& sites,
                                         double tol = 1e-12);

// Full three-step pipeline output.
struct WbnfResult {
    BnfGenerator F3, F4, F5;
    PolyHamiltonian H3_final;              // transported cubic
    PolyHamiltonian H4_final;              // transported quartic
    PolyHamiltonian H5_final;              // transported quintic
    ResonantQuartic quartic;
    double residual_step3 = 0;             // | {H2,F3} + H_{3,<=1} |_sup
    double residual_h41 = 0;               // sup of linear-in-z quartic coefficients
    double residual_h5_low = 0;            // sup of quintic coeffs with <=1 normal index
    double discarded_mass = 0;
};

WbnfResult run_wbnf(const GkdvHamiltonian& H, const SiteSet& sites);

// Exact-rational resonant quartic (bare normalisation) for rational
// coefficients; same contraction route as the floating pipeline.
struct RationalQuartic {
    std::vector<Rational> diag;                    // indexed like S^+
    std::vector<std::vector<Rational>> cross;      // upper triangle, cross[a][b-a-1]
};

struct RationalCoefficients {
    Rational c1, c2, c3, c4, c5, c6, c7;
};

RationalQuartic exact_resonant_quartic(const RationalCoefficients& c, const SiteSet& sites);

// Closed-form references for the quartic data evaluated per monomial cell;
// used by the regression diff report (values in the bare normalisation).
struct QuarticClosedForms {
    // Each entry: diag coefficient of I_j^2 and cross coefficient of I_j I_k
    // (unordered), for the listed coefficient monomial.
    // cells: c1c1, c2c2, c3c3, c2c3, c4, c6, c7
    static double diag_sum_form(const std::string& cell, int j);      // developed action sums
    static double diag_matrix_form(const std::string& cell, int j);   // compact twist matrix
    static double diag_frequency_form(const std::string& cell, int j);// action-frequency display
    static double cross_sum_form(const std::string& cell, int j, int k);
    static double cross_matrix_form(const std::string& cell, int j, int k);
    static double cross_frequency_form(const std::string& cell, int j, int k);
    static const std::vector<std::string>& cells();
};

} // namespace kam
