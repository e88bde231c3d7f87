#include "kamgkdv/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kam {

SiteSet::SiteSet(std::vector<int> pos) : positive(std::move(pos)) {
    for (size_t i = 0; i < positive.size(); ++i) {
        if (positive[i] < 1) throw std::invalid_argument("SiteSet: sites must be >= 1");
        if (i > 0 && positive[i] <= positive[i - 1])
            throw std::invalid_argument("SiteSet: sites must be strictly increasing");
    }
}

bool SiteSet::contains(int j) const {
    return std::binary_search(positive.begin(), positive.end(), std::abs(j)) && j != 0;
}

int SiteSet::index_of(int j) const {
    auto it = std::lower_bound(positive.begin(), positive.end(), std::abs(j));
    if (it == positive.end() || *it != std::abs(j)) return -1;
    return int(it - positive.begin());
}

void SpatialState::set_mode(int j, Cplx v) {
    if (j == 0) throw std::invalid_argument("SpatialState: j = 0 is excluded");
    coeffs[j] = v;
    coeffs[-j] = std::conj(v);
}

void SpatialState::add_mode(int j, Cplx v) {
    if (j == 0) throw std::invalid_argument("SpatialState: j = 0 is excluded");
    coeffs[j] += v;
}

Cplx SpatialState::mode(int j) const {
    auto it = coeffs.find(j);
    return it == coeffs.end() ? Cplx(0) : it->second;
}

int SpatialState::support_radius() const {
    int r = 0;
    for (auto& [j, v] : coeffs)
        if (std::abs(v) > 0) r = std::max(r, std::abs(j));
    return r;
}

double SpatialState::l2_norm() const {
    double s = 0;
    for (auto& [j, v] : coeffs) s += std::norm(v);
    return std::sqrt(s);
}

double SpatialState::sup_coeff() const {
    double s = 0;
    for (auto& [j, v] : coeffs) s = std::max(s, std::abs(v));
    return s;
}

void SpatialState::prune(double tol) {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (std::abs(it->second) <= tol)
            it = coeffs.erase(it);
        else
            ++it;
    }
}

bool SpatialState::is_real(double tol) const {
    for (auto& [j, v] : coeffs) {
        if (std::abs(v - std::conj(mode(-j))) > tol) return false;
    }
    return true;
}

SpatialState dx(const SpatialState& u, int order) {
    SpatialState r;
    for (auto& [j, v] : u.coeffs) {
        Cplx m = std::pow(Cplx(0, double(j)), order);
        r.coeffs[j] = m * v;
    }
    return r;
}

SpatialState dx_inverse(const SpatialState& u) {
    SpatialState r;
    for (auto& [j, v] : u.coeffs) r.coeffs[j] = v / Cplx(0, double(j));
    return r;
}

SpatialState project(const SpatialState& u, bool keep_tangential, const SiteSet& sites) {
    SpatialState r;
    for (auto& [j, v] : u.coeffs)
        if (sites.contains(j) == keep_tangential) r.coeffs[j] = v;
    return r;
}

SpatialState operator+(const SpatialState& a, const SpatialState& b) {
    SpatialState r = a;
    for (auto& [j, v] : b.coeffs) r.coeffs[j] += v;
    return r;
}

SpatialState operator-(const SpatialState& a, const SpatialState& b) {
    SpatialState r = a;
    for (auto& [j, v] : b.coeffs) r.coeffs[j] -= v;
    return r;
}

SpatialState operator*(double s, const SpatialState& a) {
    SpatialState r = a;
    for (auto& [j, v] : r.coeffs) v *= s;
    return r;
}

void QuasiPeriodicField::set_mode(const QPKey& k, Cplx v) {
    if (k.j == 0) throw std::invalid_argument("QuasiPeriodicField: j = 0 is excluded");
    coeffs[k] = v;
    QPKey m;
    for (int i = 0; i < 4; ++i) m.l[i] = -k.l[i];
    m.j = -k.j;
    coeffs[m] = std::conj(v);
}

void QuasiPeriodicField::add_mode(const QPKey& k, Cplx v) {
    if (k.j == 0) throw std::invalid_argument("QuasiPeriodicField: j = 0 is excluded");
    coeffs[k] += v;
}

Cplx QuasiPeriodicField::mode(const QPKey& k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? Cplx(0) : it->second;
}

double QuasiPeriodicField::l2_norm() const {
    double s = 0;
    for (auto& [k, v] : coeffs) s += std::norm(v);
    return std::sqrt(s);
}

double QuasiPeriodicField::sup_coeff() const {
    double s = 0;
    for (auto& [k, v] : coeffs) s = std::max(s, std::abs(v));
    return s;
}

void QuasiPeriodicField::prune(double tol) {
    for (auto it = coeffs.begin(); it != coeffs.end();) {
        if (std::abs(it->second) <= tol)
            it = coeffs.erase(it);
        else
            ++it;
    }
}

QuasiPeriodicField project(const QuasiPeriodicField& u, bool keep_tangential, const SiteSet& sites) {
    QuasiPeriodicField r;
    r.nu = u.nu;
    for (auto& [k, v] : u.coeffs)
        if (sites.contains(k.j) == keep_tangential) r.coeffs[k] = v;
    return r;
}

} // namespace kam
