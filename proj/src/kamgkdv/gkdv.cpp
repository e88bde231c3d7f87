#include "kamgkdv/gkdv.hpp"

#include <cmath>
#include <stdexcept>

#include "kamgkdv/fft_util.hpp"

namespace kam {

namespace {

// symmetrised weight of u_x^2 u over a zero-sum triple: mean of (ia)(ib) over
// slot choices = (a^2+b^2+c^2)/6 when a+b+c = 0
double sym_uxxu(const MultiIndex& k) {
    double s = 0;
    for (int i = 0; i < k.n; ++i) s += double(k.j[i]) * k.j[i];
    return s / 6.0;
}

} // namespace

GkdvHamiltonian build_gkdv(const Coefficients& c, int max_mode) {
    if (max_mode < 1) throw std::invalid_argument("build_gkdv: max_mode must be >= 1");
    GkdvHamiltonian H;
    H.coeffs = c;
    H.max_mode = max_mode;

    H.H2.degree = 2;
    H.H2.momentum_preserving = true;
    for (int j = 1; j <= max_mode; ++j) {
        // per-ordered-tuple value of (1/2) int u_x^2 at (j,-j)
        H.H2.add(MultiIndex::of({j, -j}), Cplx(M_PI * double(j) * double(j), 0));
    }

    H.H3.degree = 3;
    H.H3.momentum_preserving = true;
    if (c.c1 != 0 || c.c2 != 0 || c.c3 != 0) {
        for (int a = -max_mode; a <= max_mode; ++a) {
            if (a == 0) continue;
            for (int b = a; b <= max_mode; ++b) {
                if (b == 0) continue;
                int cc = -a - b;
                if (cc < b || cc == 0 || cc > max_mode) continue;
                MultiIndex k = MultiIndex::of({a, b, cc});
                Cplx v = kTwoPi * (Cplx(0, -c.c1 * double(a) * b * cc) +
                                   Cplx(c.c2 * sym_uxxu(k) + c.c3, 0));
                if (v != Cplx(0)) H.H3.add(k, v);
            }
        }
    }

    H.H4.degree = 4;
    H.H4.momentum_preserving = true;
    if (c.c4 != 0 || c.c5 != 0 || c.c6 != 0 || c.c7 != 0) {
        for (int a = -max_mode; a <= max_mode; ++a) {
            if (a == 0) continue;
            for (int b = a; b <= max_mode; ++b) {
                if (b == 0) continue;
                for (int d = b; d <= max_mode; ++d) {
                    if (d == 0) continue;
                    int e = -a - b - d;
                    if (e < d || e == 0 || e > max_mode) continue;
                    MultiIndex k = MultiIndex::of({a, b, d, e});
                    double sumsq = double(a) * a + double(b) * b + double(d) * d + double(e) * e;
                    double e3 = double(a) * b * d + double(a) * b * e + double(a) * d * e +
                                double(b) * d * e;
                    Cplx v = kTwoPi * (Cplx(c.c4 * double(a) * b * d * e + c.c6 * sumsq / 12.0 +
                                                c.c7,
                                            -c.c5 * e3 / 4.0));
                    if (v != Cplx(0)) H.H4.add(k, v);
                }
            }
        }
    }
    return H;
}

namespace {

struct GridWork {
    Grid1d grid;
    std::vector<Cplx> u, ux;

    GridWork(const SpatialState& s, int m) : grid(m) {
        int support = s.support_radius();
        if (3 * support > m)
            throw std::runtime_error("pseudospectral: state support exceeds grid/3");
        u = grid.to_grid(s);
        ux = grid.derivative(u, 1);
    }
};

} // namespace

SpatialState nonlinearity_n2(const SpatialState& s, const Coefficients& c, int m) {
    GridWork w(s, m);
    int n = m;
    std::vector<Cplx> dfu(n), dfux(n);
    for (int i = 0; i < n; ++i) {
        Cplx u = w.u[i], ux = w.ux[i];
        dfu[i] = c.c2 * ux * ux + 3.0 * c.c3 * u * u + c.c5 * ux * ux * ux +
                 2.0 * c.c6 * ux * ux * u + 4.0 * c.c7 * u * u * u;
        dfux[i] = 3.0 * c.c1 * ux * ux + 2.0 * c.c2 * ux * u + 4.0 * c.c4 * ux * ux * ux +
                  3.0 * c.c5 * ux * ux * u + 2.0 * c.c6 * ux * u * u;
    }
    Grid1d g(m);
    std::vector<Cplx> inner = g.derivative(dfux, 1);
    for (int i = 0; i < n; ++i) inner[i] = dfu[i] - inner[i];
    std::vector<Cplx> res = g.derivative(inner, 1);
    for (auto& v : res) v = -v;
    // retained band: alias-free for the highest product order present
    int p = (c.c4 != 0 || c.c5 != 0 || c.c6 != 0 || c.c7 != 0) ? 3 : 2;
    int K = s.support_radius();
    int keep = std::min({m / 2 - 1, p * K, m - p * K - 1});
    return g.to_modes(res, std::max(keep, 0));
}

double hamiltonian_energy(const SpatialState& u, const GkdvHamiltonian& H) {
    double e = evaluate(H.H2, u) + evaluate(H.H3, u) + evaluate(H.H4, u);
    if (H.H5) e += evaluate(*H.H5, u);
    return e;
}

double energy_quadrature(const SpatialState& s, const Coefficients& c, int m) {
    GridWork w(s, m);
    std::vector<Cplx> f(m);
    for (int i = 0; i < m; ++i) {
        Cplx u = w.u[i], ux = w.ux[i];
        f[i] = 0.5 * ux * ux + c.c1 * ux * ux * ux + c.c2 * ux * ux * u + c.c3 * u * u * u +
               c.c4 * ux * ux * ux * ux + c.c5 * ux * ux * ux * u + c.c6 * ux * ux * u * u +
               c.c7 * u * u * u * u;
    }
    return kTwoPi * grid_mean(f);
}

SpatialState gradient_pseudospectral(const SpatialState& s, const Coefficients& c, int m) {
    GridWork w(s, m);
    std::vector<Cplx> dfu(m), dfux(m);
    for (int i = 0; i < m; ++i) {
        Cplx u = w.u[i], ux = w.ux[i];
        dfu[i] = c.c2 * ux * ux + 3.0 * c.c3 * u * u + c.c5 * ux * ux * ux +
                 2.0 * c.c6 * ux * ux * u + 4.0 * c.c7 * u * u * u;
        dfux[i] = 3.0 * c.c1 * ux * ux + 2.0 * c.c2 * ux * u + 4.0 * c.c4 * ux * ux * ux +
                  3.0 * c.c5 * ux * ux * u + 2.0 * c.c6 * ux * u * u;
    }
    Grid1d g(m);
    std::vector<Cplx> uxx = g.derivative(w.u, 2);
    std::vector<Cplx> ddfux = g.derivative(dfux, 1);
    std::vector<Cplx> res(m);
    for (int i = 0; i < m; ++i) res[i] = -uxx[i] + dfu[i] - ddfux[i];
    int p = (c.c4 != 0 || c.c5 != 0 || c.c6 != 0 || c.c7 != 0) ? 3 : 2;
    int K = s.support_radius();
    int keep = std::min({m / 2 - 1, std::max(p * K, K), m - p * K - 1});
    return g.to_modes(res, std::max(keep, 0)); // to_modes drops the mean (pi0)
}

} // namespace kam
