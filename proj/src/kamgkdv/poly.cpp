#include "kamgkdv/poly.hpp"

namespace kam {

SpatialState vector_field_apply(const PolyHamiltonian& H, const SpatialState& u) {
    SpatialState out;
    for (auto& [key, v] : H.terms) {
        double mu = key.multiplicity();
        int prev = INT32_MIN;
        for (int i = 0; i < key.n; ++i) {
            int m = key.j[i];
            if (m == prev) continue;
            prev = m;
            // term of d_{u_m} H(u); contributes to X at mode j = -m
            Cplx prod = v * mu * double(key.count(m));
            MultiIndex rest = key.erase_one(m);
            for (int q = 0; q < rest.n; ++q) {
                prod *= u.mode(rest.j[q]);
                if (prod == Cplx(0)) break;
            }
            if (prod == Cplx(0)) continue;
            out.coeffs[-m] += Cplx(0, double(-m)) * prod / kTwoPi;
        }
    }
    out.prune(0.0);
    return out;
}

double evaluate(const PolyHamiltonian& H, const SpatialState& u) {
    Cplx s = 0;
    for (auto& [key, v] : H.terms) {
        Cplx prod = v * key.multiplicity();
        for (int i = 0; i < key.n; ++i) {
            prod *= u.mode(key.j[i]);
            if (prod == Cplx(0)) break;
        }
        s += prod;
    }
    return s.real();
}

Cplx partial(const PolyHamiltonian& H, const SpatialState& u, int m) {
    Cplx s = 0;
    for (auto& [key, v] : H.terms) {
        int c = key.count(m);
        if (c == 0) continue;
        Cplx prod = v * key.multiplicity() * double(c);
        MultiIndex rest = key.erase_one(m);
        for (int q = 0; q < rest.n; ++q) {
            prod *= u.mode(rest.j[q]);
            if (prod == Cplx(0)) break;
        }
        s += prod;
    }
    return s;
}

double max_abs_coeff(const PolyHamiltonian& H) {
    double s = 0;
    for (auto& [k, v] : H.terms) s = std::max(s, std::abs(v));
    return s;
}

PolyHamiltonian operator+(const PolyHamiltonian& a, const PolyHamiltonian& b) {
    if (a.degree != b.degree) throw std::invalid_argument("PolyHamiltonian +: degree mismatch");
    PolyHamiltonian r = a;
    r.momentum_preserving = a.momentum_preserving && b.momentum_preserving;
    for (auto& [k, v] : b.terms) {
        auto [it, fresh] = r.terms.emplace(k, v);
        if (!fresh) it->second += v;
    }
    return r;
}

PolyHamiltonian operator-(const PolyHamiltonian& a, const PolyHamiltonian& b) {
    return a + scaled(b, Cplx(-1));
}

PolyHamiltonian scaled(const PolyHamiltonian& a, Cplx s) {
    PolyHamiltonian r = a;
    for (auto& [k, v] : r.terms) v *= s;
    return r;
}

void prune(PolyHamiltonian& a, double tol) {
    for (auto it = a.terms.begin(); it != a.terms.end();) {
        if (std::abs(it->second) <= tol)
            it = a.terms.erase(it);
        else
            ++it;
    }
}

double reality_residue(const PolyHamiltonian& a) {
    double r = 0;
    for (auto& [k, v] : a.terms) {
        Cplx other = a.coeff(k.negated());
        r = std::max(r, std::abs(std::conj(other) - v));
    }
    return r;
}

bool momentum_support_ok(const PolyHamiltonian& a) {
    for (auto& [k, v] : a.terms)
        if (k.sum() != 0 && std::abs(v) > 0) return false;
    return true;
}

} // namespace kam
