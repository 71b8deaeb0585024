#include "cuspec/rational.hpp"

#include <cstdlib>
#include <limits>
#include <numeric>

#include "cuspec/error.hpp"

namespace cuspec {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < -std::numeric_limits<std::int64_t>::max()) {
        throw Error(ErrorKind::ArithmeticOverflow, "rational component exceeds 64 bits");
    }
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make(i128 num, i128 den) {
    if (den == 0) throw Error(ErrorKind::BadParameters, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational(narrow(num), narrow(den));
}

}  // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) noexcept {
    return static_cast<std::int64_t>(gcd128(a, b));
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    i128 aa = a < 0 ? -static_cast<i128>(a) : a;
    i128 bb = b < 0 ? -static_cast<i128>(b) : b;
    return narrow(aa / gcd128(aa, bb) * bb);
}

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::BadParameters, "zero denominator");
    i128 n = num;
    i128 d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = narrow(n);
    den_ = narrow(d);
}

std::int64_t Rational::floor() const noexcept {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational Rational::reduced_mod_one() const {
    // r - floor(r) lies in [0, 1); shift (1/2, 1) down by one.
    Rational frac = *this - Rational(floor());
    if (Rational(2) * frac > Rational(1)) frac -= Rational(1);
    return frac;
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            long long v = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return Rational(v);
        }
        std::string a = text.substr(0, slash);
        std::string b = text.substr(slash + 1);
        long long p = std::stoll(a, &used);
        if (used != a.size()) throw std::invalid_argument(text);
        long long q = std::stoll(b, &used);
        if (used != b.size()) throw std::invalid_argument(text);
        if (q <= 0) throw Error(ErrorKind::BadParameters, "denominator must be positive in '" + text + "'");
        return Rational(p, q);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(ErrorKind::BadParameters, "not a rational 'p/q': '" + text + "'");
    }
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorKind::BadParameters, "division by zero rational");
    return make(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace cuspec
