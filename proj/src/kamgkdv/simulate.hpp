#pragma once

#include <vector>

#include "kamgkdv/gkdv.hpp"

namespace kam {

enum class Integrator { Etdrk4, Ifrk4 };

struct SimConfig {
    int modes = 128;        // grid points, power of two
    double dt = 1e-3;
    double T = 10.0;
    Integrator integrator = Integrator::Etdrk4;
    int sample_stride = 100; // record every k-th step
};

struct SimSample {
    double t;
    SpatialState u;
};

struct SimResult {
    std::vector<SimSample> samples;
    double energy_drift = 0;      // max |H(u(t)) - H(u(0))|
    double momentum_drift = 0;    // max |M(u(t)) - M(u(0))|, M(u) = int u^2
    double max_action_drift = 0;  // max_t max_j | |u_j(t)| - |u_j(0)| |
};

// Time integration of u_t = -u_xxx - N2(u) with the cubic term handled by an
// exact integrating factor (ETDRK4 or IF-RK4).
SimResult simulate(const SpatialState& u0, const Coefficients& c, const SimConfig& cfg);

} // namespace kam
