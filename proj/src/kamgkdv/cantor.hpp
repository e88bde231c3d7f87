#pragma once

#include <optional>
#include <vector>

#include "kamgkdv/frequency_map.hpp"
#include "kamgkdv/linearized.hpp"

namespace kam {

struct Violation {
    LVec l = lzero();
    int j = 0, k = 0;
    double lhs = 0, rhs = 0;
};

// First-order diophantine membership: |omega.l| >= 2 gamma <l>^{-tau} for all
// 0 < |l|_inf <= L (<l> = max(1,|l|_1)).
bool membership_g0(const Vec& omega, double gamma, double tau, int L,
                   std::optional<Violation>* first = nullptr);

enum class SpectrumModel { ClosedForm, Floquet };

struct MelnikovScanConfig {
    double gamma_n = 0;   // gap constant (2*gamma at the first stage)
    double tau = 4;
    int L = 10;           // |l|_inf bound
    int J = 60;           // |j|,|k| bound
    bool exhaustive = false; // bypass the resonance pruning (audit path)
};

// Second-order Melnikov membership with the closed-form exponent model
//   mu_j = -i m3 j^3 + i m1 j, m3 = 1 + eps^2 d(xi), m1 = eps^2 c(xi).
// Pruning: only (l,j,k) with omega_bar.l = j^3 - k^3 can produce a violation
// once the perturbative corrections are below 1/2; otherwise the full scan
// runs. Returns acceptance and the first violation found.
struct MelnikovDecision {
    bool accepted = true;
    std::optional<Violation> violation;
    bool used_fast_path = true;
};

class SecondMelnikovScanner {
public:
    SecondMelnikovScanner(const SiteSet& sites, const MelnikovScanConfig& cfg);

    MelnikovDecision scan(const Vec& omega, double m3, double m1) const;
    // exhaustive rescan used by the audit
    MelnikovDecision scan_exhaustive(const Vec& omega, double m3, double m1) const;


private:
    SiteSet sites_;
    MelnikovScanConfig cfg_;
    Vec wbar_;
    std::vector<std::pair<int, int>> jk_pairs_; // sorted by |j^3 - k^3|

    bool check_triple(const Vec& omega, double m3, double m1, const LVec& l, int j, int k,
                      Violation* out) const;
};


struct CantorRow {
    double eps = 0;
    double gamma = 0;
    int n_samples = 0;
    int accepted = 0;
    double fraction = 0;        // accepted fraction
    double excluded = 0;        // 1 - fraction
    double excluded_sigma = 0;  // binomial error bar
    int audit_mismatches = 0;   // fast path vs exhaustive on the audit subset
};

struct CantorTable {
    std::vector<CantorRow> rows;
    double fitted_exponent = 0; // slope of log(excluded) vs log(eps)
    std::vector<Violation> sample_violations;
};

struct CantorConfig {
    std::vector<double> eps_ladder{0.1, 0.05, 0.025, 0.0125};
    double a = 0.1;   // gamma = eps^{2+a}
    double tau = 4;
    int L = 10;
    int J = 60;
    int n_samples = 10000;
    uint64_t seed = 1234;
    double audit_fraction = 0.01;
    double gamma_scale = 1.0; // multiplies gamma (used by the linearity check)
    int threads = 0;
};

// Monte-Carlo estimate of the admissible-frequency fraction: xi uniform in
// [1,2]^nu, omega = omega_bar + eps^2 M xi, accepted when both the zeroth and
// second Melnikov scans pass.
CantorTable estimate_cantor_fraction(const Coefficients& c, const SiteSet& sites,
                                     const TwistData& twist, const CantorConfig& cfg);

// single-sample decision, exposed for the floquet cross-validation
struct SampleDecision {
    Vec xi, omega;
    bool g0 = false, melnikov = false;
    std::optional<Violation> violation;
};
SampleDecision cantor_sample(const Coefficients& c, const SiteSet& sites, const TwistData& twist,
                             double eps, const CantorConfig& cfg, uint64_t sample_index);

} // namespace kam
