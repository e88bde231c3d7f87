#pragma once

#include <complex>
#include <vector>

#include "kamgkdv/fourier.hpp"

namespace kam {

// In-place complex FFT through FFTW (plans cached per size, ESTIMATE mode).
// sign = -1: forward (coefficients = sum/N after normalisation), +1: backward.
void fft_1d(std::vector<Cplx>& data, int sign);

// Multidimensional complex FFT over a row-major tensor with the given shape.
void fft_nd(std::vector<Cplx>& data, const std::vector<int>& shape, int sign);

// One-dimensional spectral grid of size n (power of two not required).
// Mode layout: index k holds frequency k for k < n/2, k - n otherwise.
struct Grid1d {
    int n;

    explicit Grid1d(int n_) : n(n_) {}

    std::vector<Cplx> to_grid(const SpatialState& u) const;     // inverse transform
    SpatialState to_modes(const std::vector<Cplx>& g, int max_mode) const;
    std::vector<Cplx> derivative(const std::vector<Cplx>& g, int order) const;
    int freq(int idx) const { return idx < n / 2 ? idx : idx - n; }
};

// mean over the grid = (1/2pi) * integral over T
double grid_mean(const std::vector<Cplx>& g);

} // namespace kam
