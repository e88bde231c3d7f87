#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kamgkdv/frequency_map.hpp"
#include "kamgkdv/gkdv.hpp"
#include "kamgkdv/wbnf.hpp"

namespace kam {

// Angle-lattice vector l in Z^nu (nu <= 4).
using LVec = std::array<int, 4>;

inline LVec lzero() { return {0, 0, 0, 0}; }
inline LVec lneg(const LVec& l) { return {-l[0], -l[1], -l[2], -l[3]}; }
inline bool lpositive(const LVec& l, int nu) {
    for (int i = 0; i < nu; ++i) {
        if (l[i] > 0) return true;
        if (l[i] < 0) return false;
    }
    return false;
}
inline int lnorm1(const LVec& l, int nu) {
    int s = 0;
    for (int i = 0; i < nu; ++i) s += std::abs(l[i]);
    return s;
}
inline int lnorm_inf(const LVec& l, int nu) {
    int s = 0;
    for (int i = 0; i < nu; ++i) s = std::max(s, std::abs(l[i]));
    return s;
}
inline double ldot(const Vec& w, const LVec& l) {
    double s = 0;
    for (int i = 0; i < w.size(); ++i) s += w[i] * l[i];
    return s;
}
inline int spatial_index(const SiteSet& sites, const LVec& l) {
    int s = 0;
    for (int i = 0; i < sites.nu(); ++i) s += sites.positive[size_t(i)] * l[i];
    return s;
}

// Because the density is x-independent, momentum ties every Fourier mode of a
// torus grown from the tangential seed to the sublattice j = l . jbar. The
// embedding is therefore a profile W on T^nu with
//   u(phi, x) = W(phi_1 + jbar_1 x, ..., phi_nu + jbar_nu x).
struct TorusEmbedding {
    SiteSet sites;
    Vec xi;
    double eps = 0;
    Vec omega;
    std::string level; // "naive", "bnf", "refined"
    Vec zeta;          // counterterm at the last refinement (zero until refined)
    std::map<LVec, Cplx> modes; // c_l with c_{-l} = conj(c_l); l.jbar != 0

    int nu() const { return sites.nu(); }
    int l_radius() const; // max |l|_inf over stored modes
    int j_radius() const; // max |l . jbar|
    Cplx mode(const LVec& l) const;
    void set_mode(const LVec& l, Cplx v);
    void prune(double tol);

    // spatial slice u(phi, .) as a SpatialState
    SpatialState slice(const std::vector<double>& phi) const;
    // u evaluated along the flow line phi = omega t
    SpatialState at_time(double t) const;
    double sup_norm(int grid_per_dim = 32) const;
};

// v_bar(phi, x) = sum_{j in S} sqrt(|j| xi_j) e^{i l(j).phi} e^{i j x} with the
// odd index map l(jbar_i) = e_i.
QuasiPeriodicField build_vbar(const SiteSet& sites, const Vec& xi);

// Integrated time-1 flows of the three normal-form generators, acting on
// spatial slices (finite-rank vector fields, RK4 with fixed step).
class BirkhoffFlows {
public:
    BirkhoffFlows(const WbnfResult& wbnf, const SiteSet& sites, double dt = 1e-3);

    // Phi_B(u) = Phi3(Phi4(Phi5(u))); direction -1 applies the inverse map.
    SpatialState forward(const SpatialState& u) const;
    SpatialState inverse(const SpatialState& u) const;
    int band() const { return band_; }

private:
    struct Rule {
        int out = 0;
        Cplx factor;
        std::array<int, 4> in{};
        int n_in = 0;
    };
    std::vector<std::vector<Rule>> rules_; // one set per generator, applied 5,4,3
    int band_ = 0;
    double dt_;

    SpatialState flow(const SpatialState& u, const std::vector<Rule>& rules, double sign) const;
    static std::vector<Rule> compile(const PolyHamiltonian& F);
};

enum class TorusLevel { Naive, Bnf };

// Approximately invariant torus with omega = omega_bar + eps^2 M xi.
TorusEmbedding build_approximate_torus(const Coefficients& c, const SiteSet& sites, const Vec& xi,
                                       double eps, TorusLevel level, const WbnfResult& wbnf,
                                       const TwistData& twist, int grid_per_dim = 16);

struct ResidualReport {
    double sup = 0, l2 = 0;
    double sup_tangential = 0, sup_normal = 0;
    double l2_tangential = 0, l2_normal = 0;
};

// Invariance defect D_omega u + u_xxx + N2(u) of the embedding, reported in
// the original variables.
ResidualReport residual_functional(const TorusEmbedding& t, const Coefficients& c);

struct NewtonOptions {
    int L = 8;            // angle box |l|_inf <= L
    int J = 24;           // spatial cut |l.jbar| <= J
    double tol = 1e-9;
    int max_iter = 12;
};

struct NewtonReport {
    TorusEmbedding torus;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history; // pure invariance residual, l2
    Vec zeta;
    double smallest_singular_value = -1;  // filled on a failed solve
};

NewtonReport refine_torus_newton(const TorusEmbedding& start, const Coefficients& c,
                                 const NewtonOptions& opt);

struct DiophantineReport {
    bool holds = true;
    LVec worst_l = lzero();
    double worst_margin = 0; // min over l of |omega.l| - gamma <l>^-tau
};

DiophantineReport check_diophantine(const Vec& omega, double gamma, double tau, int L);

// log-log least-squares slope of values against eps
double fitted_slope(const std::vector<double>& eps, const std::vector<double>& values);

// Tensor grid over the profile torus T^nu, P points per dimension.
struct PsiGrid {
    int nu = 1;
    int P = 16;

    size_t total() const {
        size_t t = 1;
        for (int i = 0; i < nu; ++i) t *= size_t(P);
        return t;
    }
    std::vector<int> shape() const { return std::vector<int>(size_t(nu), P); }
    size_t index(const LVec& l) const; // wrapped Fourier index
    std::vector<Cplx> to_grid(const std::map<LVec, Cplx>& modes) const;
    // extract modes with |l|_inf <= box (j-cut handled by the caller)
    std::map<LVec, Cplx> from_grid(std::vector<Cplx> grid, int box, double tol = 0.0) const;
    // spectral x-derivative on the sublattice: multiply by (i l.jbar)^order
    std::vector<Cplx> x_derivative(const std::vector<Cplx>& grid, const SiteSet& sites,
                                   int order) const;
};

} // namespace kam
