#include "schedpred/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace schedpred {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

constexpr i128 kMax64 = std::numeric_limits<std::int64_t>::max();

u128 abs128(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        if ((a >> 64) == 0 && (b >> 64) == 0) {
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        }
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    u128 g = gcd128(abs128(num), static_cast<u128>(den));
    if (g > 1) {
        num /= static_cast<i128>(g);
        den /= static_cast<i128>(g);
    }
    if (num > kMax64 || num < -kMax64 || den > kMax64) {
        throw RationalOverflow("rational arithmetic overflowed 64-bit terms");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == rhs.den_) {
        *this = from_wide(static_cast<i128>(num_) + rhs.num_, den_);
        return *this;
    }
    const std::int64_t g = std::gcd(den_, rhs.den_);
    const i128 n = static_cast<i128>(num_) * (rhs.den_ / g) + static_cast<i128>(rhs.num_) * (den_ / g);
    const i128 d = static_cast<i128>(den_ / g) * rhs.den_;
    *this = from_wide(n, d);
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    *this = from_wide(static_cast<i128>(num_) * rhs.num_, static_cast<i128>(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
    *this = from_wide(static_cast<i128>(num_) * rhs.den_, static_cast<i128>(den_) * rhs.num_);
    return *this;
}

Rational operator-(const Rational& r) {
    Rational out;
    out.num_ = -r.num_;
    out.den_ = r.den_;
    return out;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    const i128 a = static_cast<i128>(lhs.num_) * rhs.den_;
    const i128 b = static_cast<i128>(rhs.num_) * lhs.den_;
    return a <=> b;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
    const std::string_view whole = text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash), whole), parse_int(text.substr(slash + 1), whole));
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text, whole));

    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.size() > 17) throw std::invalid_argument("too many decimals: '" + std::string(whole) + "'");
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);

    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t ip = int_part.empty() ? 0 : parse_int(int_part, whole);
    const std::int64_t fp = frac_part.empty() ? 0 : parse_int(frac_part, whole);
    if (fp < 0) throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
    Rational r = from_wide(static_cast<i128>(ip) * scale + fp, scale);
    return negative ? -r : r;
}

Rational Rational::from_double(double x, std::int64_t den) {
    if (!std::isfinite(x)) throw std::domain_error("cannot convert non-finite value to a rational");
    return Rational(static_cast<std::int64_t>(std::llround(x * static_cast<double>(den))), den);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

BigRational to_big(const Rational& r) { return BigRational(r.num(), r.den()); }

double to_double(const BigRational& r) { return r.convert_to<double>(); }

std::string to_fraction_string(const BigRational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

}  // namespace schedpred
