#include "kamgkdv/fft_util.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace kam {

namespace {

std::mutex plan_mutex;

fftw_plan get_plan(const std::vector<int>& shape, int sign, fftw_complex* buf) {
    // FFTW_ESTIMATE does not touch the arrays, so one plan per (shape,sign)
    // can be reused with fftw_execute_dft on any aligned buffer.
    static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(shape, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_plan p = fftw_plan_dft(int(shape.size()), shape.data(), buf, buf,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[key] = p;
    return p;
}

} // namespace

void fft_nd(std::vector<Cplx>& data, const std::vector<int>& shape, int sign) {
    size_t total = 1;
    for (int s : shape) total *= size_t(s);
    if (data.size() != total) throw std::invalid_argument("fft_nd: shape mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan p = get_plan(shape, sign, buf);
    fftw_execute_dft(p, buf, buf);
    if (sign < 0) {
        double inv = 1.0 / double(total);
        for (auto& c : data) c *= inv;
    }
}

void fft_1d(std::vector<Cplx>& data, int sign) {
    fft_nd(data, {int(data.size())}, sign);
}

std::vector<Cplx> Grid1d::to_grid(const SpatialState& u) const {
    std::vector<Cplx> g(n, Cplx(0));
    for (auto& [j, v] : u.coeffs) {
        if (2 * std::abs(j) >= n) throw std::runtime_error("Grid1d: mode outside grid");
        g[(j % n + n) % n] = v;
    }
    fft_1d(g, +1);
    return g;
}

SpatialState Grid1d::to_modes(const std::vector<Cplx>& grid, int max_mode) const {
    std::vector<Cplx> g = grid;
    fft_1d(g, -1);
    SpatialState u;
    for (int j = 1; j <= max_mode; ++j) {
        u.coeffs[j] = g[j];
        u.coeffs[-j] = g[n - j];
    }
    u.prune(0.0);
    return u;
}

std::vector<Cplx> Grid1d::derivative(const std::vector<Cplx>& grid, int order) const {
    std::vector<Cplx> g = grid;
    fft_1d(g, -1);
    for (int k = 0; k < n; ++k) {
        g[k] *= std::pow(Cplx(0, double(freq(k))), order);
    }
    // unresolved Nyquist mode is dropped for odd derivatives
    if (n % 2 == 0 && order % 2 == 1) g[n / 2] = 0;
    fft_1d(g, +1);
    return g;
}

double grid_mean(const std::vector<Cplx>& g) {
    Cplx s = 0;
    for (auto& v : g) s += v;
    return (s / double(g.size())).real();
}

} // namespace kam
