#include "kamgkdv/torus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "kamgkdv/fft_util.hpp"
#include "kamgkdv/parallel.hpp"

namespace kam {

namespace {

int next_pow2(int n) {
    int p = 8;
    while (p < n) p *= 2;
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// PsiGrid

size_t PsiGrid::index(const LVec& l) const {
    size_t idx = 0;
    for (int i = 0; i < nu; ++i) {
        int w = ((l[i] % P) + P) % P;
        idx = idx * size_t(P) + size_t(w);
    }
    return idx;
}

std::vector<Cplx> PsiGrid::to_grid(const std::map<LVec, Cplx>& modes) const {
    std::vector<Cplx> g(total(), Cplx(0));
    for (auto& [l, v] : modes) {
        if (lnorm_inf(l, nu) * 2 >= P) throw std::runtime_error("PsiGrid: mode outside grid");
        g[index(l)] += v;
    }
    fft_nd(g, shape(), +1);
    return g;
}

std::map<LVec, Cplx> PsiGrid::from_grid(std::vector<Cplx> grid, int box, double tol) const {
    fft_nd(grid, shape(), -1);
    std::map<LVec, Cplx> out;
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (dim == nu) {
            Cplx v = grid[index(l)];
            if (std::abs(v) > tol) out[l] = v;
            return;
        }
        for (int k = -box; k <= box; ++k) {
            l[size_t(dim)] = k;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    return out;
}

std::vector<Cplx> PsiGrid::x_derivative(const std::vector<Cplx>& grid, const SiteSet& sites,
                                        int order) const {
    std::vector<Cplx> g = grid;
    fft_nd(g, shape(), -1);
    std::vector<Cplx> out(g.size());
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (dim == nu) {
            int j = spatial_index(sites, l);
            Cplx mult = (j == 0 && order < 0) ? Cplx(0) : std::pow(Cplx(0, double(j)), order);
            out[index(l)] = g[index(l)] * mult;
            return;
        }
        for (int k = -P / 2; k < P / 2; ++k) {
            l[size_t(dim)] = k;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    fft_nd(out, shape(), +1);
    return out;
}

// ---------------------------------------------------------------------------
// TorusEmbedding

int TorusEmbedding::l_radius() const {
    int r = 0;
    for (auto& [l, v] : modes) r = std::max(r, lnorm_inf(l, nu()));
    return r;
}

int TorusEmbedding::j_radius() const {
    int r = 0;
    for (auto& [l, v] : modes) r = std::max(r, std::abs(spatial_index(sites, l)));
    return r;
}

Cplx TorusEmbedding::mode(const LVec& l) const {
    auto it = modes.find(l);
    return it == modes.end() ? Cplx(0) : it->second;
}

void TorusEmbedding::set_mode(const LVec& l, Cplx v) {
    if (spatial_index(sites, l) == 0)
        throw std::invalid_argument("TorusEmbedding: zero-average mode");
    modes[l] = v;
    modes[lneg(l)] = std::conj(v);
}

void TorusEmbedding::prune(double tol) {
    for (auto it = modes.begin(); it != modes.end();) {
        if (std::abs(it->second) <= tol)
            it = modes.erase(it);
        else
            ++it;
    }
}

SpatialState TorusEmbedding::slice(const std::vector<double>& phi) const {
    SpatialState u;
    for (auto& [l, v] : modes) {
        int j = spatial_index(sites, l);
        if (j == 0) continue;
        double ph = 0;
        for (int i = 0; i < nu(); ++i) ph += phi[size_t(i)] * l[size_t(i)];
        u.coeffs[j] += v * std::exp(Cplx(0, ph));
    }
    u.prune(0.0);
    return u;
}

SpatialState TorusEmbedding::at_time(double t) const {
    std::vector<double> phi(static_cast<size_t>(nu()), 0.0);
    for (int i = 0; i < nu(); ++i) phi[size_t(i)] = omega[i] * t;
    return slice(phi);
}

double TorusEmbedding::sup_norm(int grid_per_dim) const {
    PsiGrid g{nu(), next_pow2(std::max(grid_per_dim, 2 * l_radius() + 2))};
    auto vals = g.to_grid(modes);
    double s = 0;
    for (auto& v : vals) s = std::max(s, std::abs(v));
    return s;
}

// ---------------------------------------------------------------------------

QuasiPeriodicField build_vbar(const SiteSet& sites, const Vec& xi) {
    if (xi.size() != sites.nu()) throw std::invalid_argument("build_vbar: dim mismatch");
    for (int i = 0; i < xi.size(); ++i)
        if (xi[i] <= 0) throw std::invalid_argument("build_vbar: xi must be positive");
    QuasiPeriodicField f;
    f.nu = sites.nu();
    for (int i = 0; i < sites.nu(); ++i) {
        int j = sites.positive[size_t(i)];
        QPKey k;
        k.l[size_t(i)] = 1;
        k.j = int16_t(j);
        f.set_mode(k, Cplx(std::sqrt(double(j) * xi[i]), 0));
    }
    return f;
}

// ---------------------------------------------------------------------------
// BirkhoffFlows

std::vector<BirkhoffFlows::Rule> BirkhoffFlows::compile(const PolyHamiltonian& F) {
    std::vector<Rule> rules;
    for (auto& [k, v] : F.terms) {
        double mu = k.multiplicity();
        int prev = INT32_MIN;
        for (int i = 0; i < k.n; ++i) {
            int m = k.j[i];
            if (m == prev) continue;
            prev = m;
            Rule r;
            r.out = -m;
            r.factor = Cplx(0, double(-m) / kTwoPi) * v * mu * double(k.count(m));
            MultiIndex rest = k.erase_one(m);
            r.n_in = rest.n;
            for (int q = 0; q < rest.n; ++q) r.in[size_t(q)] = rest.j[q];
            rules.push_back(r);
        }
    }
    return rules;
}

BirkhoffFlows::BirkhoffFlows(const WbnfResult& wbnf, const SiteSet& sites, double dt) : dt_(dt) {
    band_ = 4 * sites.max_site();
    rules_.push_back(compile(wbnf.F5.F));
    rules_.push_back(compile(wbnf.F4.F));
    rules_.push_back(compile(wbnf.F3.F));
}

SpatialState BirkhoffFlows::flow(const SpatialState& u, const std::vector<Rule>& rules,
                                 double sign) const {
    int B = std::max(band_, u.support_radius());
    int n = 2 * B + 1;
    auto at = [B](int j) { return size_t(j + B); };
    std::vector<Cplx> y(size_t(n), Cplx(0));
    for (auto& [j, v] : u.coeffs) y[at(j)] = v;

    auto field = [&](const std::vector<Cplx>& s, std::vector<Cplx>& out) {
        std::fill(out.begin(), out.end(), Cplx(0));
        for (auto& r : rules) {
            Cplx p = r.factor;
            for (int q = 0; q < r.n_in; ++q) {
                p *= s[at(r.in[size_t(q)])];
                if (p == Cplx(0)) break;
            }
            out[at(r.out)] += sign * p;
        }
    };

    int steps = std::max(1, int(std::lround(1.0 / dt_)));
    double h = 1.0 / steps;
    std::vector<Cplx> k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    for (int s = 0; s < steps; ++s) {
        field(y, k1);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        field(tmp, k2);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        field(tmp, k3);
        for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
        field(tmp, k4);
        for (size_t i = 0; i < y.size(); ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        bool finite = true;
        for (auto& v : y)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) finite = false;
        if (!finite) throw std::runtime_error("BirkhoffFlows: flow diverged");
    }
    SpatialState out;
    for (int j = -B; j <= B; ++j) {
        if (j == 0) continue;
        if (y[at(j)] != Cplx(0)) out.coeffs[j] = y[at(j)];
    }
    return out;
}

SpatialState BirkhoffFlows::forward(const SpatialState& u) const {
    SpatialState s = u;
    for (auto& rules : rules_) s = flow(s, rules, +1.0); // order 5, 4, 3
    return s;
}

SpatialState BirkhoffFlows::inverse(const SpatialState& u) const {
    SpatialState s = u;
    for (auto it = rules_.rbegin(); it != rules_.rend(); ++it) s = flow(s, *it, -1.0);
    return s;
}

// ---------------------------------------------------------------------------

TorusEmbedding build_approximate_torus(const Coefficients& c, const SiteSet& sites, const Vec& xi,
                                       double eps, TorusLevel level, const WbnfResult& wbnf,
                                       const TwistData& twist, int grid_per_dim) {
    (void)c;
    TorusEmbedding t;
    t.sites = sites;
    t.xi = xi;
    t.eps = eps;
    t.level = level == TorusLevel::Naive ? "naive" : "bnf";
    t.zeta = Vec::Zero(sites.nu());
    t.omega = linear_frequencies(sites) + eps * eps * (twist.M * xi);

    std::map<LVec, Cplx> seed;
    for (int i = 0; i < sites.nu(); ++i) {
        LVec l = lzero();
        l[size_t(i)] = 1;
        double amp = eps * std::sqrt(double(sites.positive[size_t(i)]) * xi[i]);
        seed[l] = Cplx(amp, 0);
        seed[lneg(l)] = Cplx(amp, 0);
    }
    if (eps == 0) {
        t.modes.clear();
        return t;
    }
    if (level == TorusLevel::Naive) {
        t.modes = seed;
        return t;
    }

    // map the seed torus through the normal-form flows, slice by slice
    PsiGrid grid{sites.nu(), next_pow2(grid_per_dim)};
    BirkhoffFlows flows(wbnf, sites);
    size_t n = grid.total();
    std::vector<Cplx> w(n);
    parallel_for(n, [&](size_t i) {
        // grid point coordinates
        std::vector<double> phi(size_t(sites.nu()));
        size_t rem = i;
        for (int d = sites.nu() - 1; d >= 0; --d) {
            phi[size_t(d)] = kTwoPi * double(rem % size_t(grid.P)) / grid.P;
            rem /= size_t(grid.P);
        }
        SpatialState u;
        for (auto& [l, v] : seed) {
            int j = spatial_index(sites, l);
            double ph = 0;
            for (int q = 0; q < sites.nu(); ++q) ph += phi[size_t(q)] * l[size_t(q)];
            u.coeffs[j] += v * std::exp(Cplx(0, ph));
        }
        SpatialState img = flows.forward(u);
        Cplx sum = 0; // value at x = 0
        for (auto& [j, v] : img.coeffs) sum += v;
        w[i] = sum;
    });
    t.modes = grid.from_grid(w, grid.P / 2 - 1, 1e-15);
    // drop any numerically generated zero-average content
    for (auto it = t.modes.begin(); it != t.modes.end();) {
        if (spatial_index(sites, it->first) == 0)
            it = t.modes.erase(it);
        else
            ++it;
    }
    return t;
}

// ---------------------------------------------------------------------------
// residual

namespace {

struct N2Grids {
    std::vector<Cplx> value; // N2(U) on the psi grid
};

// N2 on the profile grid; dx acts as multiplication by i(l.jbar) in Fourier.
std::vector<Cplx> n2_on_grid(const PsiGrid& g, const SiteSet& sites, const Coefficients& c,
                             const std::vector<Cplx>& u, const std::vector<Cplx>& ux) {
    size_t n = u.size();
    std::vector<Cplx> dfu(n), dfux(n);
    for (size_t i = 0; i < n; ++i) {
        Cplx U = u[i], Ux = ux[i];
        dfu[i] = c.c2 * Ux * Ux + 3.0 * c.c3 * U * U + c.c5 * Ux * Ux * Ux +
                 2.0 * c.c6 * Ux * Ux * U + 4.0 * c.c7 * U * U * U;
        dfux[i] = 3.0 * c.c1 * Ux * Ux + 2.0 * c.c2 * Ux * U + 4.0 * c.c4 * Ux * Ux * Ux +
                  3.0 * c.c5 * Ux * Ux * U + 2.0 * c.c6 * Ux * U * U;
    }
    auto inner = g.x_derivative(dfux, sites, 1);
    for (size_t i = 0; i < n; ++i) inner[i] = dfu[i] - inner[i];
    auto res = g.x_derivative(inner, sites, 1);
    for (auto& v : res) v = -v;
    return res;
}

} // namespace

ResidualReport residual_functional(const TorusEmbedding& t, const Coefficients& c) {
    ResidualReport rep;
    int Lr = std::max(1, t.l_radius());
    PsiGrid g{t.nu(), next_pow2(4 * Lr + 4)};
    auto u = g.to_grid(t.modes);
    auto ux = g.x_derivative(u, t.sites, 1);
    auto n2 = n2_on_grid(g, t.sites, c, u, ux);

    // linear part per mode, nonlinear part from the grid
    std::vector<Cplx> lin(g.total(), Cplx(0));
    {
        std::vector<Cplx> spec(g.total(), Cplx(0));
        for (auto& [l, v] : t.modes) {
            double j = spatial_index(t.sites, l);
            spec[g.index(l)] += (Cplx(0, ldot(t.omega, l)) + std::pow(Cplx(0, j), 3)) * v;
        }
        lin = spec;
        fft_nd(lin, g.shape(), +1);
    }
    for (size_t i = 0; i < lin.size(); ++i) lin[i] += n2[i];

    // safe extraction box
    int box = std::min(3 * Lr, g.P - 3 * Lr - 1);
    box = std::max(box, Lr);
    box = std::min(box, g.P / 2 - 1);
    auto rmodes = g.from_grid(lin, box, 0.0);
    for (auto& [l, v] : rmodes) {
        int j = spatial_index(t.sites, l);
        if (j == 0) continue; // zero-average direction is not part of the equation
        double a = std::abs(v);
        rep.l2 += a * a;
        if (t.sites.contains(j)) {
            rep.sup_tangential = std::max(rep.sup_tangential, a);
            rep.l2_tangential += a * a;
        } else {
            rep.sup_normal = std::max(rep.sup_normal, a);
            rep.l2_normal += a * a;
        }
    }
    rep.l2 = std::sqrt(rep.l2);
    rep.l2_tangential = std::sqrt(rep.l2_tangential);
    rep.l2_normal = std::sqrt(rep.l2_normal);

    // sup over the grid of the residual field (zero-average part removed)
    double sup = 0;
    {
        std::vector<Cplx> spec(g.total(), Cplx(0));
        for (auto& [l, v] : rmodes)
            if (spatial_index(t.sites, l) != 0) spec[g.index(l)] = v;
        fft_nd(spec, g.shape(), +1);
        for (auto& v : spec) sup = std::max(sup, std::abs(v));
    }
    rep.sup = sup;
    return rep;
}

// ---------------------------------------------------------------------------
// Newton refinement on the sublattice Galerkin truncation

namespace {

struct LatticeIndex {
    std::vector<LVec> half; // representatives with lexicographically positive l
    std::map<LVec, int> pos;
};

LatticeIndex build_lattice(const SiteSet& sites, int L, int J) {
    LatticeIndex li;
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (dim == sites.nu()) {
            if (!lpositive(l, sites.nu())) return;
            int j = spatial_index(sites, l);
            if (j == 0 || std::abs(j) > J) return;
            li.pos[l] = int(li.half.size());
            li.half.push_back(l);
            return;
        }
        for (int k = -L; k <= L; ++k) {
            l[size_t(dim)] = k;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    return li;
}

} // namespace

NewtonReport refine_torus_newton(const TorusEmbedding& start, const Coefficients& c,
                                 const NewtonOptions& opt) {
    NewtonReport rep;
    rep.torus = start;
    rep.torus.level = "refined";
    const SiteSet& sites = start.sites;
    int nu = sites.nu();
    LatticeIndex li = build_lattice(sites, opt.L, opt.J);
    int n = int(li.half.size());
    int dim = 2 * n + nu;

    // truncate the start torus onto the lattice
    std::map<LVec, Cplx> cur;
    for (auto& l : li.half) {
        Cplx v = start.mode(l);
        cur[l] = v;
    }
    // reference phases for the pinning conditions
    std::vector<Cplx> ref(static_cast<size_t>(nu), Cplx(0));
    for (int k = 0; k < nu; ++k) {
        LVec e = lzero();
        e[size_t(k)] = 1;
        ref[size_t(k)] = cur.count(e) ? cur[e] : Cplx(1, 0);
        if (ref[size_t(k)] == Cplx(0)) ref[size_t(k)] = Cplx(1, 0);
    }

    PsiGrid g{nu, next_pow2(4 * opt.L + 4)};
    Vec zeta = Vec::Zero(nu);

    auto full_modes = [&](const std::map<LVec, Cplx>& half) {
        std::map<LVec, Cplx> m;
        for (auto& [l, v] : half) {
            m[l] = v;
            m[lneg(l)] = std::conj(v);
        }
        return m;
    };

    auto residual_modes = [&](const std::map<LVec, Cplx>& half) {
        auto um = full_modes(half);
        auto u = g.to_grid(um);
        auto ux = g.x_derivative(u, sites, 1);
        auto n2 = n2_on_grid(g, sites, c, u, ux);
        fft_nd(n2, g.shape(), -1);
        std::vector<Cplx> E(static_cast<size_t>(n), Cplx(0));
        for (int i = 0; i < n; ++i) {
            const LVec& l = li.half[size_t(i)];
            double j = spatial_index(sites, l);
            Cplx v = half.at(l);
            E[size_t(i)] = (Cplx(0, ldot(start.omega, l)) + std::pow(Cplx(0, j), 3)) * v +
                           n2[g.index(l)];
        }
        return E;
    };

    auto pure_norm = [&](const std::vector<Cplx>& E) {
        double s = 0;
        for (auto& v : E) s += std::norm(v);
        return std::sqrt(2.0 * s); // both half-lattices
    };

    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    double last = 0;
    for (int iter = 0;; ++iter) {
        auto E = residual_modes(cur);
        double pure = pure_norm(E);
        rep.residual_history.push_back(pure);
        rep.iterations = iter;
        if (pure < opt.tol) {
            rep.converged = true;
            break;
        }
        if (iter >= opt.max_iter) break;

        // linearisation coefficient fields
        auto um = full_modes(cur);
        auto ugrid = g.to_grid(um);
        auto uxgrid = g.x_derivative(ugrid, sites, 1);
        size_t tot = g.total();
        std::vector<Cplx> A(tot), B(tot), C(tot);
        for (size_t i = 0; i < tot; ++i) {
            Cplx U = ugrid[i], Ux = uxgrid[i];
            A[i] = 6.0 * c.c3 * U + 2.0 * c.c6 * Ux * Ux + 12.0 * c.c7 * U * U;
            B[i] = 2.0 * c.c2 * Ux + 3.0 * c.c5 * Ux * Ux + 4.0 * c.c6 * Ux * U;
            C[i] = 6.0 * c.c1 * Ux + 2.0 * c.c2 * U + 12.0 * c.c4 * Ux * Ux + 6.0 * c.c5 * Ux * U +
                   2.0 * c.c6 * U * U;
        }
        fft_nd(A, g.shape(), -1);
        fft_nd(B, g.shape(), -1);
        fft_nd(C, g.shape(), -1);

        auto field_at = [&](const std::vector<Cplx>& F, const LVec& lam) -> Cplx {
            if (lnorm_inf(lam, nu) * 2 >= g.P) return Cplx(0);
            return F[g.index(lam)];
        };
        // DN2 entry from input mode li_ to output mode lo
        auto kernel = [&](const LVec& lo, const LVec& lin_) -> Cplx {
            LVec lam;
            for (int q = 0; q < 4; ++q) lam[size_t(q)] = lo[size_t(q)] - lin_[size_t(q)];
            double j = spatial_index(sites, lo);
            double jp = spatial_index(sites, lin_);
            Cplx a = field_at(A, lam), b = field_at(B, lam), cc = field_at(C, lam);
            return -Cplx(0, j) * a + (j * jp - j * j) * b - Cplx(0, j * j * jp) * cc;
        };

        MatrixXd Jm = MatrixXd::Zero(dim, dim);
        VectorXd rhs = VectorXd::Zero(dim);
        for (int r = 0; r < n; ++r) {
            const LVec& lo = li.half[size_t(r)];
            double j = spatial_index(sites, lo);
            for (int s = 0; s < n; ++s) {
                const LVec& lin_ = li.half[size_t(s)];
                Cplx Tp = kernel(lo, lin_);
                if (s == r) Tp += Cplx(0, ldot(start.omega, lo)) + std::pow(Cplx(0, j), 3);
                Cplx Tm = kernel(lo, lneg(lin_));
                Jm(2 * r, 2 * s) = (Tp + Tm).real();
                Jm(2 * r, 2 * s + 1) = -(Tp - Tm).imag();
                Jm(2 * r + 1, 2 * s) = (Tp + Tm).imag();
                Jm(2 * r + 1, 2 * s + 1) = (Tp - Tm).real();
            }
            rhs[2 * r] = -E[size_t(r)].real();
            rhs[2 * r + 1] = -E[size_t(r)].imag();
        }
        // counterterm columns and current contribution
        for (int k = 0; k < nu; ++k) {
            LVec e = lzero();
            e[size_t(k)] = 1;
            auto it = li.pos.find(e);
            if (it == li.pos.end()) throw std::logic_error("newton: seed mode outside lattice");
            int r = it->second;
            Jm(2 * r, 2 * n + k) = 1.0;
            rhs[2 * r] += -zeta[k];
        }
        // phase pinning rows
        for (int k = 0; k < nu; ++k) {
            LVec e = lzero();
            e[size_t(k)] = 1;
            int s = li.pos.at(e);
            Jm(2 * n + k, 2 * s) = -ref[size_t(k)].imag();
            Jm(2 * n + k, 2 * s + 1) = ref[size_t(k)].real();
            Cplx cv = cur.at(e);
            rhs[2 * n + k] = -(cv.imag() * ref[size_t(k)].real() - cv.real() * ref[size_t(k)].imag());
        }

        Eigen::ColPivHouseholderQR<MatrixXd> qr(Jm);
        VectorXd delta = qr.solve(rhs);
        if (!delta.allFinite() || !qr.isInvertible()) {
            Eigen::JacobiSVD<MatrixXd> svd(Jm);
            rep.smallest_singular_value =
                svd.singularValues()(svd.singularValues().size() - 1);
            throw std::runtime_error("newton: singular truncated Jacobian");
        }
        for (int s = 0; s < n; ++s)
            cur[li.half[size_t(s)]] += Cplx(delta[2 * s], delta[2 * s + 1]);
        for (int k = 0; k < nu; ++k) zeta[k] += delta[2 * n + k];
        (void)last;
        last = pure;
    }

    rep.zeta = zeta;
    rep.torus.zeta = zeta;
    rep.torus.modes = full_modes(cur);
    rep.torus.prune(0.0);
    return rep;
}

DiophantineReport check_diophantine(const Vec& omega, double gamma, double tau, int L) {
    if (L < 1) throw std::invalid_argument("check_diophantine: L must be >= 1");
    DiophantineReport rep;
    rep.worst_margin = 1e300;
    int nu = int(omega.size());
    LVec l = lzero();
    std::function<void(int)> rec = [&](int dim) {
        if (dim == nu) {
            int n1 = lnorm1(l, nu);
            if (n1 == 0) return;
            double margin = std::abs(ldot(omega, l)) - gamma / std::pow(double(n1), tau);
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_l = l;
            }
            return;
        }
        for (int k = -L; k <= L; ++k) {
            l[size_t(dim)] = k;
            rec(dim + 1);
        }
        l[size_t(dim)] = 0;
    };
    rec(0);
    rep.holds = rep.worst_margin >= 0;
    return rep;
}

double fitted_slope(const std::vector<double>& eps, const std::vector<double>& values) {
    if (eps.size() != values.size() || eps.size() < 2)
        throw std::invalid_argument("fitted_slope: need matching arrays of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(eps.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(eps[size_t(i)]);
        double y = std::log(std::max(values[size_t(i)], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace kam
