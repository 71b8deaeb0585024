#ifndef CUSPEC_RATIONAL_HPP
#define CUSPEC_RATIONAL_HPP

#include <cstdint>
#include <compare>
#include <ostream>
#include <string>

namespace cuspec {

/// Exact rational number p/q with q > 0 and gcd(p, q) = 1. Arithmetic is
/// carried out in 128-bit intermediates and throws ArithmeticOverflow when a
/// reduced result no longer fits in 64 bits.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_ == 0; }
    bool is_integer() const noexcept { return den_ == 1; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Largest integer not above the value.
    std::int64_t floor() const noexcept;
    /// Representative of the class modulo 1 in (-1/2, 1/2].
    Rational reduced_mod_one() const;

    /// Parses "p/q" or "p".
    static Rational parse(const std::string& text);
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

std::int64_t gcd64(std::int64_t a, std::int64_t b) noexcept;
/// Least common multiple of |a| and |b|; throws ArithmeticOverflow.
std::int64_t lcm64(std::int64_t a, std::int64_t b);

}  // namespace cuspec

#endif
