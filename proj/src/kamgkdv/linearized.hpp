#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "kamgkdv/torus.hpp"

namespace kam {

// Coefficient fields of the linearised equation at a torus, sampled on the
// profile grid. A, B, C are the second derivatives of the density,
//   A = f_uu(U,Ux), B = f_{u ux}(U,Ux), C = f_{ux ux}(U,Ux),
// and the displayed coefficients are a1 = 1 + C, a0 = B_x - A.
struct CoefficientFields {
    PsiGrid grid;
    SiteSet sites;
    std::vector<Cplx> a1, a0;       // pointwise fields
    std::vector<Cplx> Ahat, Bhat, Chat; // Fourier tensors of A, B, C
    double a1_min = 0;              // min over grid of Re a1
    double a1_dev_sup = 0;          // sup |a1 - 1|
    double a0_sup = 0;
};

CoefficientFields coefficient_fields(const TorusEmbedding& t, const Coefficients& c,
                                     int grid_per_dim = 0);

struct ReducedConstants {
    double m3 = 1;                // phi-average of b3
    double m1 = 0;                // space-time average of the transport coefficient
    double b3_dev_sup = 0;        // sup |b3(phi) - m3|
    double beta_sup = 0;          // sup |beta|
    double pred_m3 = 1;           // 1 + eps^2 d(xi)
    double pred_m1 = 0;           // eps^2 c(xi)
};

// Constant reductions of the cubic-derivative coefficient: b3(phi), its mean
// m3, the straightening primitive beta, and the transport constant m1,
// together with the closed-form predictions from the spectral constants.
ReducedConstants reduced_constants(const TorusEmbedding& t, const Coefficients& c,
                                   int grid_per_dim = 0);

// Quasi-periodic linearised operator, assembled exactly as the second
// variation of the Hamiltonian at the torus, restricted to the normal modes:
//   L h = omega.d_phi h - P_{S^c} d_x (d_u grad H)(u(phi)) h.
class QuasiPeriodicOperator {
public:
    struct Basis {
        LVec l;
        int j;
    };

    QuasiPeriodicOperator(const TorusEmbedding& t, const Coefficients& c, int L, int J);

    // coefficient-path variant: operator built from given a1/a0 profile fields
    // (used for the remainder-size regression against the exact assembly)
    static QuasiPeriodicOperator from_fields(const TorusEmbedding& t, std::vector<Cplx> a1_grid,
                                             std::vector<Cplx> a0_grid, const PsiGrid& grid,
                                             int L, int J);

    Cplx entry(int row, int col) const;
    int dim() const { return int(basis_.size()); }
    const std::vector<Basis>& basis() const { return basis_; }
    const Vec& omega() const { return omega_; }
    int trunc_l() const { return L_; }
    int trunc_j() const { return J_; }
    const SiteSet& sites() const { return sites_; }

    // residue of the Hamiltonian structure: || dx^{-1}(L - D_omega) - herm ||
    double hamiltonian_structure_residue() const;

    // invariant classes d = j - l.jbar; the operator is block diagonal on them
    std::map<int, std::vector<int>> classes() const;

    Eigen::MatrixXcd dense_block(const std::vector<int>& idx) const;

private:
    QuasiPeriodicOperator() = default;
    SiteSet sites_;
    Vec omega_;
    int L_ = 0, J_ = 0, nu_ = 0;
    PsiGrid grid_;
    bool field_path_ = false;
    std::vector<Cplx> Ahat_, Bhat_, Chat_; // exact path
    std::vector<Cplx> a1hat_, a0hat_;      // coefficient path
    std::vector<Basis> basis_;

    Cplx field_at(const std::vector<Cplx>& F, const LVec& lam) const;
    void build_basis();
};

struct FloquetEntry {
    Cplx mu;
    double localization = 0;
    LVec label_l = lzero();
    bool reliable = true;
};

struct FloquetSpectrum {
    std::map<int, FloquetEntry> mu; // j in S^c
    double m3 = 1, m1 = 0;          // fit of Im mu_j ~ -m3 j^3 + m1 j
    std::map<int, double> fit_residual;
    double max_re_interior = 0;
    int interior_band = 0;          // fitted |j| <= interior_band
};

FloquetSpectrum floquet_exponents(const QuasiPeriodicOperator& op, int edge_exclusion = -1);

struct MelnikovMargin {
    double min_margin = 1e300; // min |i w.l + mu_j - mu_k| / (2 gamma |j^3-k^3| <l>^-tau) - 1
    LVec worst_l = lzero();
    int worst_j = 0, worst_k = 0;
    std::vector<std::array<int, 6>> violations; // l(4), j, k
};

MelnikovMargin second_melnikov_margins(const FloquetSpectrum& spec, const Vec& omega, double gamma,
                                       double tau, int L);

struct StabilityRun {
    double max_ratio = 0;   // sup_t ||w(t)||_{H1} / ||w(0)||_{H1}
    double final_ratio = 0; // dissipation diagnostic
    std::vector<double> history;
};

// Evolves the linearised equation at the torus with an integrating-factor RK4
// and reports the H^1 norm history of w. The retained band is min(grid/3,
// band); the step must resolve the largest retained frequency gap, so keep
// 3 band^2 dt below one.
StabilityRun linear_stability_run(const TorusEmbedding& t, const Coefficients& c,
                                  const SpatialState& w0, double T, double dt, int grid_points,
                                  int history_stride = 0, int band = 0);

// Norm history through the exact propagator of the truncated operator: the
// block eigendecomposition integrates w_t = L(omega t) w without time-stepping
// error, which matters over long horizons where RK4 phase pollution grows.
StabilityRun linear_stability_spectral(const TorusEmbedding& t, const Coefficients& c,
                                       const SpatialState& w0, double T, int L, int J,
                                       int samples = 2000);

// candidates for the leading profile of a1 - 1 (see the open question on the
// expansion display); returns sup |a1 - 1 - eps*candidate| for both readings
std::pair<double, double> a1_leading_profile_misfit(const TorusEmbedding& t,
                                                    const Coefficients& c);

} // namespace kam
