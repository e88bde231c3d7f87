#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace kam {

using Cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Tangential sites S^+ = {jbar_1 < ... < jbar_nu}; S = S^+ u (-S^+).
struct SiteSet {
    std::vector<int> positive; // strictly increasing, all >= 1

    SiteSet() = default;
    explicit SiteSet(std::vector<int> pos);

    int nu() const { return int(positive.size()); }
    int max_site() const { return positive.empty() ? 0 : positive.back(); }
    bool contains(int j) const; // membership in S (both signs)
    int index_of(int j) const;  // index in S^+ of |j|, -1 if absent
};

// Real zero-average function on the circle as sparse Fourier amplitudes.
// Invariants: no j = 0 entry; u_{-j} = conj(u_j).
struct SpatialState {
    std::map<int, Cplx> coeffs;

    void set_mode(int j, Cplx v); // sets j and enforces the conjugate at -j
    void add_mode(int j, Cplx v);
    Cplx mode(int j) const;
    int support_radius() const;
    double l2_norm() const;  // sqrt(sum |u_j|^2)
    double sup_coeff() const;
    void prune(double tol);
    bool is_real(double tol) const; // conjugate-symmetry residue below tol
};

SpatialState dx(const SpatialState& u, int order = 1);
SpatialState dx_inverse(const SpatialState& u);
SpatialState project(const SpatialState& u, bool keep_tangential, const SiteSet& sites);
SpatialState operator+(const SpatialState& a, const SpatialState& b);
SpatialState operator-(const SpatialState& a, const SpatialState& b);
SpatialState operator*(double s, const SpatialState& a);

// Key of a Fourier mode of a function on T^nu x T.
struct QPKey {
    std::array<int16_t, 4> l{0, 0, 0, 0};
    int16_t j = 0;

    bool operator<(const QPKey& o) const {
        if (j != o.j) return j < o.j;
        return l < o.l;
    }
    bool operator==(const QPKey& o) const { return j == o.j && l == o.l; }
};

// Real function on T^nu x T as sparse Fourier amplitudes; no j = 0 modes.
struct QuasiPeriodicField {
    int nu = 0;
    std::map<QPKey, Cplx> coeffs;

    void set_mode(const QPKey& k, Cplx v); // enforces conjugate at (-l,-j)
    void add_mode(const QPKey& k, Cplx v);
    Cplx mode(const QPKey& k) const;
    double l2_norm() const;
    double sup_coeff() const;
    void prune(double tol);
};

QuasiPeriodicField project(const QuasiPeriodicField& u, bool keep_tangential, const SiteSet& sites);

} // namespace kam
