#include "latshell/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace latshell {

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = text.find('/');
    const auto dot = text.find('.');
    if (slash != std::string::npos && dot != std::string::npos)
        throw std::invalid_argument("rational literal mixes '/' and '.': " + text);

    auto check_digits = [&](const std::string& s, bool sign_ok) {
        if (s.empty()) throw std::invalid_argument("malformed rational literal: " + text);
        std::size_t i = 0;
        if (sign_ok && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) throw std::invalid_argument("malformed rational literal: " + text);
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                throw std::invalid_argument("malformed rational literal: " + text);
    };

    if (slash != std::string::npos) {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        check_digits(num, true);
        check_digits(den, false);
        BigInt d(den);
        if (d == 0) throw std::invalid_argument("zero denominator: " + text);
        Rational r(BigInt(num), d);
        r.canonicalize();
        return r;
    }
    if (dot != std::string::npos) {
        const std::string whole = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        check_digits(whole.empty() ? "0" : whole, true);
        check_digits(frac, false);
        bool neg = !whole.empty() && whole[0] == '-';
        std::string digits = whole.empty() ? "0" : whole;
        if (digits[0] == '-' || digits[0] == '+') digits = digits.substr(1);
        if (digits.empty()) digits = "0";
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt n = BigInt(digits) * scale + BigInt(frac);
        if (neg) n = -n;
        Rational r(n, scale);
        r.canonicalize();
        return r;
    }
    check_digits(text, true);
    return Rational(BigInt(text));
}

std::string rational_to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

BigInt floor_rational(const Rational& x) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

std::int64_t floor_rational_i64(const Rational& x) {
    BigInt q = floor_rational(x);
    if (!q.fits_slong_p()) throw std::invalid_argument("floor value does not fit int64");
    return static_cast<std::int64_t>(q.get_si());
}

std::optional<Rational> exact_rational_power(const Rational& q, const Rational& e) {
    if (q <= 0) throw std::invalid_argument("exact_rational_power requires q > 0");
    Rational ec = e;
    ec.canonicalize();
    const BigInt& enum_ = ec.get_num();
    const BigInt& eden = ec.get_den();
    if (!enum_.fits_slong_p() || !eden.fits_ulong_p()) return std::nullopt;
    long a = enum_.get_si();
    unsigned long b = eden.get_ui();

    Rational base = q;
    base.canonicalize();
    bool invert = a < 0;
    unsigned long abs_a = invert ? static_cast<unsigned long>(-a) : static_cast<unsigned long>(a);

    BigInt pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), base.get_num().get_mpz_t(), abs_a);
    mpz_pow_ui(pd.get_mpz_t(), base.get_den().get_mpz_t(), abs_a);

    BigInt rn, rd;
    if (mpz_root(rn.get_mpz_t(), pn.get_mpz_t(), b) == 0) return std::nullopt;
    if (mpz_root(rd.get_mpz_t(), pd.get_mpz_t(), b) == 0) return std::nullopt;

    Rational out = invert ? Rational(rd, rn) : Rational(rn, rd);
    out.canonicalize();
    return out;
}

double rational_power_double(const Rational& q, const Rational& e) {
    if (q <= 0) throw std::invalid_argument("rational_power_double requires q > 0");
    if (auto exact = exact_rational_power(q, e)) return exact->get_d();
    return std::pow(q.get_d(), e.get_d());
}

BigInt bigint_from_i128(__int128 v) {
    const bool neg = v < 0;
    unsigned __int128 a = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    BigInt hi(static_cast<unsigned long>(a >> 64));
    BigInt out = (hi << 64) + BigInt(static_cast<unsigned long>(a & 0xffffffffffffffffULL));
    return neg ? BigInt(-out) : out;
}

PreparedRational::PreparedRational(const Rational& r) : value_(r) {
    value_.canonicalize();
    num_ = value_.get_num();
    den_ = value_.get_den();
    const std::size_t num_bits = mpz_sizeinbase(num_.get_mpz_t(), 2);
    const std::size_t den_bits = mpz_sizeinbase(den_.get_mpz_t(), 2);
    if (num_bits <= 125 && den_bits <= 62) {
        fast_ = true;
        num_fast_ = 0;
        BigInt an = abs(num_);
        BigInt hi = an >> 64;
        BigInt lo = an - (hi << 64);
        num_fast_ = (static_cast<__int128>(hi.get_ui()) << 64) + static_cast<__int128>(lo.get_ui());
        if (num_ < 0) num_fast_ = -num_fast_;
        den_fast_ = static_cast<std::int64_t>(den_.get_si());
        const unsigned __int128 i128_max =
            (static_cast<unsigned __int128>(1) << 126);
        max_safe_abs_ = i128_max / static_cast<unsigned __int128>(den_fast_);
    }
}

int PreparedRational::cmp(std::int64_t v) const {
    return cmp(static_cast<__int128>(v));
}

int PreparedRational::cmp(__int128 v) const {
    if (fast_) {
        const unsigned __int128 av =
            v < 0 ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
        if (av <= max_safe_abs_) {
            const __int128 lhs = v * den_fast_;
            if (lhs < num_fast_) return -1;
            if (lhs > num_fast_) return 1;
            return 0;
        }
    }
    return cmp(bigint_from_i128(v));
}

int PreparedRational::cmp(const BigInt& v) const {
    BigInt lhs = v * den_;
    return mpz_cmp(lhs.get_mpz_t(), num_.get_mpz_t());
}

RationalWindow::RationalWindow(const Rational& lo, const Rational& hi, bool lower_strict,
                               bool lower_vacuous)
    : lo_(lo), hi_(hi), lower_strict_(lower_strict), lower_vacuous_(lower_vacuous) {
    empty_ = !lower_vacuous && (lower_strict ? lo >= hi : lo > hi);
}

} // namespace latshell
