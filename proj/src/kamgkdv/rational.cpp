#include "kamgkdv/rational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kam {

BigInt::BigInt(int64_t v) {
    if (v == 0) return;
    sign_ = v < 0 ? -1 : 1;
    uint64_t m = v < 0 ? uint64_t(-(v + 1)) + 1 : uint64_t(v);
    while (m) {
        limbs_.push_back(uint32_t(m & 0xffffffffu));
        m >>= 32;
    }
}

void BigInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) sign_ = 1;
}

int BigInt::cmp_mag(const BigInt& a, const BigInt& b) {
    if (a.limbs_.size() != b.limbs_.size())
        return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (size_t i = a.limbs_.size(); i-- > 0;) {
        if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigInt BigInt::add_mag(const BigInt& a, const BigInt& b) {
    BigInt r;
    const auto& x = a.limbs_.size() >= b.limbs_.size() ? a.limbs_ : b.limbs_;
    const auto& y = a.limbs_.size() >= b.limbs_.size() ? b.limbs_ : a.limbs_;
    r.limbs_.resize(x.size() + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        uint64_t s = uint64_t(x[i]) + (i < y.size() ? y[i] : 0) + carry;
        r.limbs_[i] = uint32_t(s);
        carry = s >> 32;
    }
    r.limbs_[x.size()] = uint32_t(carry);
    r.trim();
    return r;
}

BigInt BigInt::sub_mag(const BigInt& a, const BigInt& b) {
    BigInt r;
    r.limbs_.resize(a.limbs_.size(), 0);
    int64_t borrow = 0;
    for (size_t i = 0; i < a.limbs_.size(); ++i) {
        int64_t d = int64_t(a.limbs_[i]) - (i < b.limbs_.size() ? b.limbs_[i] : 0) - borrow;
        if (d < 0) {
            d += (int64_t(1) << 32);
            borrow = 1;
        } else {
            borrow = 0;
        }
        r.limbs_[i] = uint32_t(d);
    }
    r.trim();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.limbs_.empty()) r.sign_ = -r.sign_;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (sign_ == o.sign_) {
        BigInt r = add_mag(*this, o);
        r.sign_ = sign_;
        r.trim();
        return r;
    }
    int c = cmp_mag(*this, o);
    if (c == 0) return BigInt();
    BigInt r = c > 0 ? sub_mag(*this, o) : sub_mag(o, *this);
    r.sign_ = c > 0 ? sign_ : o.sign_;
    r.trim();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    if (is_zero() || o.is_zero()) return BigInt();
    BigInt r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (size_t i = 0; i < limbs_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < o.limbs_.size(); ++j) {
            uint64_t cur = uint64_t(r.limbs_[i + j]) + uint64_t(limbs_[i]) * o.limbs_[j] + carry;
            r.limbs_[i + j] = uint32_t(cur);
            carry = cur >> 32;
        }
        size_t k = i + o.limbs_.size();
        while (carry) {
            uint64_t cur = uint64_t(r.limbs_[k]) + carry;
            r.limbs_[k] = uint32_t(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    r.sign_ = sign_ * o.sign_;
    r.trim();
    return r;
}

bool BigInt::operator==(const BigInt& o) const {
    return sign() == o.sign() && limbs_ == o.limbs_;
}

bool BigInt::operator<(const BigInt& o) const {
    if (sign() != o.sign()) return sign() < o.sign();
    int c = cmp_mag(*this, o);
    return sign() >= 0 ? c < 0 : c > 0;
}

bool BigInt::is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }

void BigInt::shr1() {
    uint32_t carry = 0;
    for (size_t i = limbs_.size(); i-- > 0;) {
        uint32_t cur = limbs_[i];
        limbs_[i] = (cur >> 1) | (carry << 31);
        carry = cur & 1u;
    }
    trim();
}

void BigInt::shl(unsigned k) {
    if (is_zero() || k == 0) return;
    unsigned words = k / 32, bits = k % 32;
    limbs_.insert(limbs_.begin(), words, 0);
    if (bits) {
        uint32_t carry = 0;
        for (size_t i = words; i < limbs_.size(); ++i) {
            uint32_t cur = limbs_[i];
            limbs_[i] = (cur << bits) | carry;
            carry = cur >> (32 - bits);
        }
        if (carry) limbs_.push_back(carry);
    }
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
    a.sign_ = 1;
    b.sign_ = 1;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    unsigned shift = 0;
    while (a.is_even() && b.is_even()) {
        a.shr1();
        b.shr1();
        ++shift;
    }
    while (a.is_even()) a.shr1();
    while (!b.is_zero()) {
        while (b.is_even()) b.shr1();
        if (cmp_mag(a, b) > 0) std::swap(a, b);
        b = sub_mag(b, a);
    }
    a.shl(shift);
    return a;
}

double BigInt::to_double() const {
    double r = 0;
    for (size_t i = limbs_.size(); i-- > 0;) r = r * 4294967296.0 + double(limbs_[i]);
    return sign() < 0 ? -r : r;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    static const char* hexd = "0123456789abcdef";
    std::string s = sign() < 0 ? "-0x" : "0x";
    bool lead = true;
    for (size_t i = limbs_.size(); i-- > 0;) {
        for (int sh = 28; sh >= 0; sh -= 4) {
            int d = (limbs_[i] >> sh) & 0xf;
            if (lead && d == 0) continue;
            lead = false;
            s.push_back(hexd[d]);
        }
    }
    return s;
}

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) {
    if (den_.is_zero()) throw std::invalid_argument("Rational: zero denominator");
    normalise();
}

void Rational::normalise() {
    if (den_.sign() < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    if (num_.is_zero()) {
        den_ = BigInt(1);
        return;
    }
    BigInt g = BigInt::gcd(num_, den_);
    if (!(g == BigInt(1))) {
        // exact division via repeated subtraction is too slow; divide through gcd
        // using double-free long division on limbs is overkill here: instead use
        // the identity num = g*q -> recover q by schoolbook division.
        // Implemented as binary long division.
        auto divide = [](const BigInt& a, const BigInt& g2) {
            // a, g2 > 0, g2 divides a exactly
            BigInt q(0), r(0), one(1);
            // binary long division over bits of a
            // collect bits most-significant first
            std::vector<int> bits;
            BigInt tmp = a;
            while (!tmp.is_zero()) {
                bits.push_back(tmp.is_even() ? 0 : 1);
                tmp.shr1();
            }
            for (size_t i = bits.size(); i-- > 0;) {
                r.shl(1);
                if (bits[i]) r = r + one;
                q.shl(1);
                if (!(r < g2)) {
                    r = r - g2;
                    q = q + one;
                }
            }
            return q;
        };
        BigInt an = num_.sign() < 0 ? -num_ : num_;
        BigInt qn = divide(an, g);
        num_ = num_.sign() < 0 ? -qn : qn;
        den_ = divide(den_, g);
    }
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
}

bool Rational::operator==(const Rational& o) const {
    return num_ * o.den_ == o.num_ * den_;
}

double Rational::to_double() const { return num_.to_double() / den_.to_double(); }

} // namespace kam
