#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "cbcast/errors.hpp"

namespace cbcast {

using BigInt = boost::multiprecision::cpp_int;

// log2 of a positive big integer, accurate to double precision for any size.
inline double log2_big(const BigInt& x) {
    if (x <= 0) throw Error("log2_big: argument must be positive");
    const unsigned hi = boost::multiprecision::msb(x);
    if (hi <= 62) return std::log2(x.convert_to<double>());
    const BigInt top = x >> (hi - 52);
    return double(hi - 52) + std::log2(top.convert_to<double>());
}

// Exact rational with arbitrary-precision integer parts, always normalized
// (den > 0, gcd(num,den) = 1).
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    static Rational parse(const std::string& s) {
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(BigInt(s), 1);
            return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("bad rational literal: '" + s + "'");
        }
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool positive() const { return num_ > 0; }

    Rational operator+(const Rational& o) const {
        return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    Rational operator-(const Rational& o) const {
        return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    Rational operator*(const Rational& o) const { return Rational(num_ * o.num_, den_ * o.den_); }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw Error("rational division by zero");
        return Rational(num_ * o.den_, den_ * o.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator<=(const Rational& o) const { return num_ * o.den_ <= o.num_ * den_; }
    bool operator>(const Rational& o) const { return o < *this; }

    double to_double() const {
        if (num_ == 0) return 0.0;
        const double sign = num_ < 0 ? -1.0 : 1.0;
        const BigInt an = boost::multiprecision::abs(num_);
        return sign * std::exp2(log2_big(an) - log2_big(den_));
    }

    // log2(num/den); requires a positive value.
    double log2() const {
        if (num_ <= 0) throw Error("log2 of non-positive rational");
        return log2_big(num_) - log2_big(den_);
    }

    std::string str() const {
        if (den_ == 1) return num_.str();
        return num_.str() + "/" + den_.str();
    }

  private:
    void normalize() {
        if (den_ == 0) throw Error("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        const BigInt g = boost::multiprecision::gcd(boost::multiprecision::abs(num_), den_);
        num_ /= g;
        den_ /= g;
    }

    BigInt num_;
    BigInt den_;
};

// -p*log2(p) for a probability; exact rational in, double out.
inline double entropy_term(const Rational& p) {
    if (p.is_zero()) return 0.0;
    return -p.to_double() * p.log2();
}

}  // namespace cbcast
