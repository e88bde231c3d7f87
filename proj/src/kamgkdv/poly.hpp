#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kamgkdv/fourier.hpp"
#include "kamgkdv/rational.hpp"

namespace kam {

// Sorted multi-index (j_1 <= ... <= j_n), all entries nonzero, n <= 6.
struct MultiIndex {
    std::array<int16_t, 6> j{0, 0, 0, 0, 0, 0};
    uint8_t n = 0;

    static MultiIndex of(std::initializer_list<int> js) {
        MultiIndex m;
        for (int v : js) m.push(v);
        m.sort();
        return m;
    }
    void push(int v) {
        if (n >= 6) throw std::length_error("MultiIndex: degree > 6");
        j[n++] = int16_t(v);
    }
    void sort() { std::sort(j.begin(), j.begin() + n); }

    int sum() const {
        int s = 0;
        for (int i = 0; i < n; ++i) s += j[i];
        return s;
    }
    int64_t cube_sum() const {
        int64_t s = 0;
        for (int i = 0; i < n; ++i) s += int64_t(j[i]) * j[i] * j[i];
        return s;
    }
    int count(int v) const {
        int c = 0;
        for (int i = 0; i < n; ++i) c += (j[i] == v);
        return c;
    }
    MultiIndex erase_one(int v) const {
        MultiIndex m;
        bool done = false;
        for (int i = 0; i < n; ++i) {
            if (!done && j[i] == v) {
                done = true;
                continue;
            }
            m.push(j[i]);
        }
        return m; // stays sorted
    }
    MultiIndex merged(const MultiIndex& o) const {
        MultiIndex m;
        int a = 0, b = 0;
        while (a < n || b < o.n) {
            if (b >= o.n || (a < n && j[a] <= o.j[b]))
                m.push(j[a++]);
            else
                m.push(o.j[b++]);
        }
        return m;
    }
    MultiIndex negated() const {
        MultiIndex m;
        for (int i = n; i-- > 0;) m.push(-j[i]);
        return m; // reversal keeps it sorted
    }
    // number of ordered tuples realising this multiset: n! / prod(mult!)
    double multiplicity() const {
        static const double fact[7] = {1, 1, 2, 6, 24, 120, 720};
        double denom = 1;
        int run = 1;
        for (int i = 1; i < n; ++i) {
            if (j[i] == j[i - 1])
                ++run;
            else {
                denom *= fact[run];
                run = 1;
            }
        }
        denom *= fact[run];
        return fact[n] / denom;
    }
    int outside_count(const SiteSet& s) const {
        int c = 0;
        for (int i = 0; i < n; ++i) c += !s.contains(j[i]);
        return c;
    }
    bool operator==(const MultiIndex& o) const { return n == o.n && j == o.j; }
};

struct MultiIndexHash {
    size_t operator()(const MultiIndex& m) const {
        uint64_t h = 1469598103934665603ull;
        for (int i = 0; i < m.n; ++i) {
            h ^= uint64_t(uint16_t(m.j[i]));
            h *= 1099511628211ull;
        }
        return size_t(h ^ m.n);
    }
};

// Scalar adapters so the same algebra runs on complex<double> and on exact
// rational complex numbers.
template <class C>
struct ScalarOps;

template <>
struct ScalarOps<Cplx> {
    static Cplx zero() { return Cplx(0); }
    static Cplx times_i(Cplx c) { return Cplx(-c.imag(), c.real()); }
    static Cplx scale_int(Cplx c, long k) { return c * double(k); }
    static Cplx div_pos_int(Cplx c, double k) { return c / k; }
    static Cplx conj(Cplx c) { return std::conj(c); }
    static bool is_zero(Cplx c) { return c == Cplx(0); }
};

template <>
struct ScalarOps<RationalComplex> {
    static RationalComplex zero() { return RationalComplex(); }
    static RationalComplex times_i(const RationalComplex& c) { return kam::times_i(c); }
    static RationalComplex scale_int(const RationalComplex& c, long k) {
        RationalComplex f{Rational(k), Rational(0)};
        return c * f;
    }
    static RationalComplex div_pos_int(const RationalComplex& c, double k) {
        RationalComplex f{Rational(long(k)), Rational(0)};
        return {c.re / f.re, c.im / f.re};
    }
    static RationalComplex conj(const RationalComplex& c) { return c.conj(); }
    static bool is_zero(const RationalComplex& c) { return c.is_zero(); }
};

// Homogeneous degree-n Hamiltonian as a sparse symmetric coefficient table.
// Storage convention: H(u) = sum over ordered tuples of H_{j1..jn} u_{j1}...u_{jn};
// we keep one canonically sorted key per monomial carrying the (symmetrised)
// per-ordered-tuple coefficient. Physical tables carry the 2*pi factor of the
// x-integral.
template <class C>
struct PolyTable {
    int degree = 2;
    bool momentum_preserving = false;
    std::unordered_map<MultiIndex, C, MultiIndexHash> terms;

    using Ops = ScalarOps<C>;

    void add(MultiIndex key, C v) {
        key.sort();
        if (key.n != degree) throw std::invalid_argument("PolyTable: key degree mismatch");
        auto [it, fresh] = terms.emplace(key, v);
        if (!fresh) it->second = it->second + v;
    }
    C coeff(MultiIndex key) const {
        key.sort();
        auto it = terms.find(key);
        return it == terms.end() ? Ops::zero() : it->second;
    }
    bool empty() const { return terms.empty(); }
};

using PolyHamiltonian = PolyTable<Cplx>;
using RationalPoly = PolyTable<RationalComplex>;

namespace detail {

template <class C>
std::unordered_map<int, std::vector<const std::pair<const MultiIndex, C>*>>
mode_index(const PolyTable<C>& p) {
    std::unordered_map<int, std::vector<const std::pair<const MultiIndex, C>*>> idx;
    for (auto& kv : p.terms) {
        int prev = INT32_MIN;
        for (int i = 0; i < kv.first.n; ++i) {
            if (kv.first.j[i] == prev) continue;
            prev = kv.first.j[i];
            idx[prev].push_back(&kv);
        }
    }
    return idx;
}

} // namespace detail

// Poisson bracket in the Fourier representation,
//   {F,G}(u) = -prefac * sum_j i j (d_{u_{-j}} F)(d_{u_j} G),
// with prefac = 1/(2*pi) for physical (2*pi-carrying) tables and 1 for tables
// in the bare normalisation. Result degree = deg F + deg G - 2.
template <class C, class Real>
PolyTable<C> poisson_bracket_scaled(const PolyTable<C>& F, const PolyTable<C>& G, Real prefac) {
    using Ops = ScalarOps<C>;
    if (F.degree + G.degree < 4)
        throw std::invalid_argument("poisson_bracket: result degree would be below 2");

    PolyTable<C> out;
    out.degree = F.degree + G.degree - 2;
    out.momentum_preserving = F.momentum_preserving && G.momentum_preserving;

    auto gidx = detail::mode_index(G);

    // accumulate in monomial-total form, convert back at the end
    std::unordered_map<MultiIndex, C, MultiIndexHash> total;
    for (auto& [ka, va] : F.terms) {
        double mua = ka.multiplicity();
        int prev = INT32_MIN;
        for (int i = 0; i < ka.n; ++i) {
            int m = ka.j[i];
            if (m == prev) continue;
            prev = m;
            auto it = gidx.find(-m);
            if (it == gidx.end()) continue;
            // d_{u_m} F in total form at key ka\m : Ftot_a * count_m(a)
            C fpart = Ops::scale_int(va, long(std::llround(mua)) * ka.count(m));
            MultiIndex resta = ka.erase_one(m);
            for (auto* kvb : it->second) {
                const MultiIndex& kb = kvb->first;
                double mub = kb.multiplicity();
                C gpart = Ops::scale_int(kvb->second, long(std::llround(mub)) * kb.count(-m));
                MultiIndex key = resta.merged(kb.erase_one(-m));
                // factor i*m (from j = -m in the bracket formula, -i j = i m)
                C contrib = Ops::scale_int(Ops::times_i(fpart * gpart), m);
                auto [slot, fresh] = total.emplace(key, contrib);
                if (!fresh) slot->second = slot->second + contrib;
            }
        }
    }
    for (auto& [key, v] : total) {
        C val = Ops::div_pos_int(v, key.multiplicity());
        val = val * C(prefac);
        if (!Ops::is_zero(val)) out.terms.emplace(key, val);
    }
    return out;
}

inline PolyHamiltonian poisson_bracket(const PolyHamiltonian& F, const PolyHamiltonian& G) {
    return poisson_bracket_scaled(F, G, Cplx(1.0 / kTwoPi));
}

// Hamiltonian vector field [X_H(u)]_j = (1/2pi) * i j * d_{u_{-j}} H(u) for
// physical tables (the 1/2pi matches the 2*pi carried by the table, so the
// result is the physical field d_x grad H).
SpatialState vector_field_apply(const PolyHamiltonian& H, const SpatialState& u);

// Value of the Hamiltonian at a state (physical normalisation).
double evaluate(const PolyHamiltonian& H, const SpatialState& u);

// Gradient-entry d_{u_m} H(u).
Cplx partial(const PolyHamiltonian& H, const SpatialState& u, int m);

double max_abs_coeff(const PolyHamiltonian& H);
PolyHamiltonian operator+(const PolyHamiltonian& a, const PolyHamiltonian& b);
PolyHamiltonian operator-(const PolyHamiltonian& a, const PolyHamiltonian& b);
PolyHamiltonian scaled(const PolyHamiltonian& a, Cplx s);
void prune(PolyHamiltonian& a, double tol);

// max |coeff(-key) - conj(coeff(key))|
double reality_residue(const PolyHamiltonian& a);
// true if every stored key sums to zero
bool momentum_support_ok(const PolyHamiltonian& a);

} // namespace kam
