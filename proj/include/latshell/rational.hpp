#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace latshell {

using BigInt = mpz_class;
using Rational = mpq_class;

// Parses "5", "-7/2", "0.125". No exponent notation. Throws std::invalid_argument.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

// floor(x) as an exact integer.
BigInt floor_rational(const Rational& x);

// floor(x) snapped to int64; throws if it does not fit.
std::int64_t floor_rational_i64(const Rational& x);

// q^e for rational exponent e and q > 0, exact when the root exists
// (num and den of q^|e.num| are perfect e.den-th powers), nullopt otherwise.
std::optional<Rational> exact_rational_power(const Rational& q, const Rational& e);

// q^e in floating point (q > 0).
double rational_power_double(const Rational& q, const Rational& e);

BigInt bigint_from_i128(__int128 v);

// Exact comparison of integers against a fixed rational threshold.
// sign(v - r) with no floating arithmetic; an __int128 fast path covers
// thresholds whose numerator fits 125 bits and denominator fits 62 bits.
class PreparedRational {
public:
    explicit PreparedRational(const Rational& r);

    int cmp(std::int64_t v) const;
    int cmp(__int128 v) const;
    int cmp(const BigInt& v) const;

    const Rational& value() const { return value_; }

private:
    Rational value_;
    BigInt num_, den_;
    bool fast_ = false;
    __int128 num_fast_ = 0;
    std::int64_t den_fast_ = 1;
    unsigned __int128 max_safe_abs_ = 0; // largest |v| with v*den safe in i128
};

// Exact membership of an integer value in the rational window [lo, hi]
// (or (lo, hi] when the lower edge is strict). `lower_vacuous` drops the
// lower constraint entirely, used when a clamped bound was negative.
class RationalWindow {
public:
    RationalWindow(const Rational& lo, const Rational& hi, bool lower_strict,
                   bool lower_vacuous = false);

    bool empty() const { return empty_; }

    template <typename V>
    bool contains(const V& v) const {
        if (empty_) return false;
        if (hi_.cmp(v) > 0) return false;
        if (lower_vacuous_) return true;
        const int c = lo_.cmp(v); // sign(v - lo)
        return lower_strict_ ? c > 0 : c >= 0;
    }

private:
    PreparedRational lo_, hi_;
    bool lower_strict_;
    bool lower_vacuous_;
    bool empty_;
};

} // namespace latshell
