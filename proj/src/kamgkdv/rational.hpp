#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace kam {

// Arbitrary-precision signed integer, just enough for exact determinant and
// resonance certificates: +, -, *, comparison, binary gcd. No division beyond
// what gcd-normalised rationals need.
class BigInt {
public:
    BigInt() = default;
    BigInt(int64_t v);

    static BigInt zero() { return BigInt(0); }

    bool is_zero() const { return limbs_.empty(); }
    int sign() const { return limbs_.empty() ? 0 : sign_; }

    BigInt operator-() const;
    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;

    bool operator==(const BigInt& o) const;
    bool operator<(const BigInt& o) const;

    static BigInt gcd(BigInt a, BigInt b); // nonnegative

    double to_double() const;
    std::string to_string() const; // hex magnitude, for diagnostics

    bool is_even() const;
    void shr1();
    void shl(unsigned k);

private:
    int sign_ = 1;                  // ignored when limbs_ empty
    std::vector<uint32_t> limbs_;   // little endian, normalised (no leading 0)

    void trim();
    static int cmp_mag(const BigInt& a, const BigInt& b);
    static BigInt add_mag(const BigInt& a, const BigInt& b);
    static BigInt sub_mag(const BigInt& a, const BigInt& b); // |a| >= |b|
};

// Normalised fraction over BigInt; denominator always positive.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(int64_t v) : num_(v), den_(1) {}
    Rational(BigInt n, BigInt d);
    static Rational from_fraction(int64_t n, int64_t d) { return Rational(BigInt(n), BigInt(d)); }

    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    Rational operator-() const;
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }

    bool operator==(const Rational& o) const;

    double to_double() const;

private:
    BigInt num_, den_;
    void normalise();
};

// Complex number with exact rational parts, for the exact pipeline route.
struct RationalComplex {
    Rational re, im;

    RationalComplex() = default;
    RationalComplex(Rational r) : re(r) {}
    RationalComplex(Rational r, Rational i) : re(r), im(i) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    RationalComplex operator+(const RationalComplex& o) const { return {re + o.re, im + o.im}; }
    RationalComplex operator-(const RationalComplex& o) const { return {re - o.re, im - o.im}; }
    RationalComplex operator*(const RationalComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    RationalComplex conj() const { return {re, -im}; }
};

inline RationalComplex times_i(const RationalComplex& c) { return {-c.im, c.re}; }

} // namespace kam
