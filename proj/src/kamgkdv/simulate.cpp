#include "kamgkdv/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "kamgkdv/fft_util.hpp"

namespace kam {

namespace {

// phi functions of ETDRK4 evaluated by the mean-value contour trick (unit
// circle around each z; exact for entire functions up to trig-rule error).
struct EtdCoeffs {
    std::vector<Cplx> E, E2, Q, f1, f2, f3;
};

EtdCoeffs etd_coeffs(const std::vector<Cplx>& Ldt) {
    const int M = 64;
    size_t n = Ldt.size();
    EtdCoeffs c;
    c.E.resize(n);
    c.E2.resize(n);
    c.Q.assign(n, Cplx(0));
    c.f1.assign(n, Cplx(0));
    c.f2.assign(n, Cplx(0));
    c.f3.assign(n, Cplx(0));
    for (size_t k = 0; k < n; ++k) {
        Cplx L = Ldt[k];
        c.E[k] = std::exp(L);
        c.E2[k] = std::exp(0.5 * L);
        for (int m = 0; m < M; ++m) {
            Cplx z = L + std::exp(Cplx(0, kTwoPi * (m + 0.5) / M));
            Cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
            c.Q[k] += (ez2 - 1.0) / z;
            c.f1[k] += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / (z * z * z);
            c.f2[k] += (2.0 + z + ez * (-2.0 + z)) / (z * z * z);
            c.f3[k] += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / (z * z * z);
        }
        c.Q[k] /= M;
        c.f1[k] /= M;
        c.f2[k] /= M;
        c.f3[k] /= M;
    }
    return c;
}

struct SpectralRhs {
    Grid1d grid;
    Coefficients c;
    int cut; // dealiasing cut: quadratic terms allow m/3, cubic ones m/4

    explicit SpectralRhs(int m, const Coefficients& cc) : grid(m), c(cc) {
        bool cubic = cc.c4 != 0 || cc.c5 != 0 || cc.c6 != 0 || cc.c7 != 0;
        cut = cubic ? m / 4 - 1 : m / 3;
    }

    void dealias(std::vector<Cplx>& spec) const {
        int m = grid.n;
        for (int k = 0; k < m; ++k)
            if (std::abs(grid.freq(k)) > cut) spec[k] = 0;
        spec[0] = 0; // zero average
    }

    // N(u) = -N2(u) in spectral space; input/output are mode arrays
    std::vector<Cplx> nonlinear(const std::vector<Cplx>& spec) const {
        int m = grid.n;
        std::vector<Cplx> u = spec;
        dealias(u);
        std::vector<Cplx> ux(m);
        for (int k = 0; k < m; ++k) ux[size_t(k)] = Cplx(0, double(grid.freq(k))) * u[size_t(k)];
        if (m % 2 == 0) ux[size_t(m / 2)] = 0;
        fft_1d(u, +1);
        fft_1d(ux, +1);
        std::vector<Cplx> dfu(m), dfux(m);
        for (int i = 0; i < m; ++i) {
            Cplx U = u[size_t(i)], Ux = ux[size_t(i)];
            dfu[size_t(i)] = c.c2 * Ux * Ux + 3.0 * c.c3 * U * U + c.c5 * Ux * Ux * Ux +
                             2.0 * c.c6 * Ux * Ux * U + 4.0 * c.c7 * U * U * U;
            dfux[size_t(i)] = 3.0 * c.c1 * Ux * Ux + 2.0 * c.c2 * Ux * U +
                              4.0 * c.c4 * Ux * Ux * Ux + 3.0 * c.c5 * Ux * Ux * U +
                              2.0 * c.c6 * Ux * U * U;
        }
        fft_1d(dfu, -1);
        fft_1d(dfux, -1);
        std::vector<Cplx> out(m);
        for (int k = 0; k < m; ++k) {
            Cplx ij(0, double(grid.freq(k)));
            // N2 = -d_x[dfu - d_x dfux]; N = -N2
            out[size_t(k)] = ij * (dfu[size_t(k)] - ij * dfux[size_t(k)]);
        }
        dealias(out);
        return out;
    }
};

} // namespace

SimResult simulate(const SpatialState& u0, const Coefficients& c, const SimConfig& cfg) {
    int m = cfg.modes;
    if (m < 8 || (m & (m - 1)) != 0)
        throw std::invalid_argument("simulate: modes must be a power of two >= 8");
    if (cfg.dt <= 0) throw std::invalid_argument("simulate: dt must be positive");
    if (3 * u0.support_radius() > m)
        throw std::runtime_error("simulate: initial support exceeds grid/3");

    SpectralRhs rhs(m, c);
    std::vector<Cplx> v(size_t(m), Cplx(0));
    for (auto& [j, a] : u0.coeffs) v[size_t((j % m + m) % m)] = a;

    // linear multiplier of u_t = -u_xxx: L_j = i j^3
    std::vector<Cplx> Ldt(static_cast<size_t>(m), Cplx(0));
    for (int k = 0; k < m; ++k) {
        double j = rhs.grid.freq(k);
        Ldt[size_t(k)] = Cplx(0, j * j * j * cfg.dt);
    }

    int steps = int(std::llround(cfg.T / cfg.dt));
    SimResult out;

    auto record = [&](double t, const std::vector<Cplx>& spec) {
        SimSample s;
        s.t = t;
        for (int j = 1; j < m / 2; ++j) {
            if (spec[size_t(j)] != Cplx(0)) s.u.coeffs[j] = spec[size_t(j)];
            if (spec[size_t(m - j)] != Cplx(0)) s.u.coeffs[-j] = spec[size_t(m - j)];
        }
        out.samples.push_back(std::move(s));
    };

    record(0.0, v);
    double e0 = energy_quadrature(out.samples[0].u, c, 2 * m);
    double p0 = 0;
    for (auto& [j, a] : out.samples[0].u.coeffs) p0 += std::norm(a);
    std::vector<double> act0(size_t(m), 0.0);
    for (int k = 0; k < m; ++k) act0[size_t(k)] = std::abs(v[size_t(k)]);

    auto diagnostics = [&](const std::vector<Cplx>& spec, const SpatialState& u) {
        double e = energy_quadrature(u, c, 2 * m);
        out.energy_drift = std::max(out.energy_drift, std::abs(e - e0));
        double p = 0;
        for (auto& [j, a] : u.coeffs) p += std::norm(a);
        out.momentum_drift = std::max(out.momentum_drift, kTwoPi * std::abs(p - p0));
        for (int k = 0; k < m; ++k)
            out.max_action_drift = std::max(
                out.max_action_drift, std::abs(std::abs(spec[size_t(k)]) - act0[size_t(k)]));
    };

    if (cfg.integrator == Integrator::Etdrk4) {
        EtdCoeffs ec = etd_coeffs(Ldt);
        std::vector<Cplx> a(static_cast<size_t>(m)), b(static_cast<size_t>(m)), cc(static_cast<size_t>(m));
        for (int s = 1; s <= steps; ++s) {
            auto Nv = rhs.nonlinear(v);
            for (int k = 0; k < m; ++k)
                a[size_t(k)] = ec.E2[size_t(k)] * v[size_t(k)] +
                               cfg.dt * ec.Q[size_t(k)] * Nv[size_t(k)];
            auto Na = rhs.nonlinear(a);
            for (int k = 0; k < m; ++k)
                b[size_t(k)] = ec.E2[size_t(k)] * v[size_t(k)] +
                               cfg.dt * ec.Q[size_t(k)] * Na[size_t(k)];
            auto Nb = rhs.nonlinear(b);
            for (int k = 0; k < m; ++k)
                cc[size_t(k)] = ec.E2[size_t(k)] * a[size_t(k)] +
                                cfg.dt * ec.Q[size_t(k)] * (2.0 * Nb[size_t(k)] - Nv[size_t(k)]);
            auto Nc = rhs.nonlinear(cc);
            for (int k = 0; k < m; ++k) {
                v[size_t(k)] = ec.E[size_t(k)] * v[size_t(k)] +
                               cfg.dt * (ec.f1[size_t(k)] * Nv[size_t(k)] +
                                         2.0 * ec.f2[size_t(k)] * (Na[size_t(k)] + Nb[size_t(k)]) +
                                         ec.f3[size_t(k)] * Nc[size_t(k)]);
                if (!std::isfinite(v[size_t(k)].real()))
                    throw std::runtime_error("simulate: step failure");
            }
            if (s % cfg.sample_stride == 0 || s == steps) {
                record(s * cfg.dt, v);
                diagnostics(v, out.samples.back().u);
            }
        }
    } else {
        // integrating-factor RK4: w = e^{-Lt} v
        std::vector<Cplx> eL(static_cast<size_t>(m)), eL2(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            eL[size_t(k)] = std::exp(Ldt[size_t(k)]);
            eL2[size_t(k)] = std::exp(0.5 * Ldt[size_t(k)]);
        }
        std::vector<Cplx> k1(static_cast<size_t>(m)), k2(static_cast<size_t>(m)), k3(static_cast<size_t>(m)), k4(static_cast<size_t>(m)),
            tmp(static_cast<size_t>(m));
        for (int s = 1; s <= steps; ++s) {
            k1 = rhs.nonlinear(v);
            for (int k = 0; k < m; ++k)
                tmp[size_t(k)] = eL2[size_t(k)] * (v[size_t(k)] + 0.5 * cfg.dt * k1[size_t(k)]);
            k2 = rhs.nonlinear(tmp);
            for (int k = 0; k < m; ++k)
                tmp[size_t(k)] = eL2[size_t(k)] * v[size_t(k)] + 0.5 * cfg.dt * k2[size_t(k)];
            k3 = rhs.nonlinear(tmp);
            for (int k = 0; k < m; ++k)
                tmp[size_t(k)] = eL[size_t(k)] * v[size_t(k)] + cfg.dt * eL2[size_t(k)] * k3[size_t(k)];
            k4 = rhs.nonlinear(tmp);
            for (int k = 0; k < m; ++k) {
                v[size_t(k)] = eL[size_t(k)] * v[size_t(k)] +
                               cfg.dt / 6.0 *
                                   (eL[size_t(k)] * k1[size_t(k)] +
                                    2.0 * eL2[size_t(k)] * (k2[size_t(k)] + k3[size_t(k)]) +
                                    k4[size_t(k)]);
                if (!std::isfinite(v[size_t(k)].real()))
                    throw std::runtime_error("simulate: step failure");
            }
            if (s % cfg.sample_stride == 0 || s == steps) {
                record(s * cfg.dt, v);
                diagnostics(v, out.samples.back().u);
            }
        }
    }
    return out;
}

} // namespace kam
