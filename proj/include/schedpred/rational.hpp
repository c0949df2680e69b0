#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace schedpred {

/// Raised when an exact rational result no longer fits in 64-bit terms.
class RationalOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Exact fraction with 64-bit numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator. Intermediate
/// products are formed in 128 bits and reduced before narrowing; a result
/// that still does not fit throws RationalOverflow rather than wrapping.
class Rational {
public:
    constexpr Rational() noexcept = default;
    constexpr Rational(std::int64_t value) noexcept : num_(value) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }

    [[nodiscard]] double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    [[nodiscard]] bool is_zero() const noexcept { return num_ == 0; }

    /// `num/den` always, including integers (`3/1`).
    [[nodiscard]] std::string str() const;

    /// Accepts `a/b`, integers and plain decimals such as `0.41421356`.
    static Rational parse(std::string_view text);

    /// Nearest multiple of 1/den to x.
    static Rational from_double(double x, std::int64_t den);

    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
    friend Rational operator-(const Rational& r);

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// Arbitrary precision fraction for sums whose denominators outgrow 64 bits
/// (binomial mixtures, expectimax values).
using BigRational = boost::multiprecision::cpp_rational;

[[nodiscard]] BigRational to_big(const Rational& r);
[[nodiscard]] double to_double(const BigRational& r);
[[nodiscard]] std::string to_fraction_string(const BigRational& r);

}  // namespace schedpred
