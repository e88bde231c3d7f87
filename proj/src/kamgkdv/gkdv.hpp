#pragma once

#include <optional>

#include "kamgkdv/fourier.hpp"
#include "kamgkdv/poly.hpp"

namespace kam {

// Coefficients of the quasi-linear Hamiltonian density
//   f(u,u_x) = c1 u_x^3 + c2 u_x^2 u + c3 u^3
//            + c4 u_x^4 + c5 u_x^3 u + c6 u_x^2 u^2 + c7 u^4.
struct Coefficients {
    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0;

    double operator[](int i) const {
        const double* p[7] = {&c1, &c2, &c3, &c4, &c5, &c6, &c7};
        return *p[i - 1];
    }
    bool all_zero() const {
        return c1 == 0 && c2 == 0 && c3 == 0 && c4 == 0 && c5 == 0 && c6 == 0 && c7 == 0;
    }
};

struct GkdvHamiltonian {
    PolyHamiltonian H2, H3, H4;
    std::optional<PolyHamiltonian> H5; // injected homogeneous quintic, usually absent
    Coefficients coeffs;
    int max_mode = 0;
};

// Coefficient tables for all zero-sum multi-indices with entries in
// [-max_mode, max_mode]. Tables carry the 2*pi factor of the x-integral.
GkdvHamiltonian build_gkdv(const Coefficients& c, int max_mode);

// Quadratic-and-higher part of the equation right-hand side,
//   N2(u) = -d_x[(d_u f) - d_x (d_{u_x} f)],
// evaluated pseudospectrally on a grid of m points. Throws when the support of
// u exceeds m/3 (resolution error). The retained output band is chosen so that
// cubic products are alias-free.
SpatialState nonlinearity_n2(const SpatialState& u, const Coefficients& c, int grid_points);

// Full equation right-hand side u_t = -u_xxx - N2(u) on the grid (complex
// spectrum layout of Grid1d); used by the simulator.
// (declared in simulate.hpp)

double hamiltonian_energy(const SpatialState& u, const GkdvHamiltonian& H);

// Energy by 2*pi*mean of the grid integrand u_x^2/2 + f(u,u_x); test oracle.
double energy_quadrature(const SpatialState& u, const Coefficients& c, int grid_points);

// L2 gradient of the full Hamiltonian at u, computed pseudospectrally:
//   grad H = -u_xx + pi0[d_u f] - d_x (d_{u_x} f).
SpatialState gradient_pseudospectral(const SpatialState& u, const Coefficients& c, int grid_points);

} // namespace kam
