#ifndef CUSPEC_PHASE_HPP
#define CUSPEC_PHASE_HPP

#include <optional>
#include <string>

#include "cuspec/rational.hpp"

namespace cuspec {

/// Phase value with a dual representation: an exact number of turns
/// (a rational multiple of 2*pi) when known, and its value in radians.
///
/// The stored value is a lift to R; arithmetic is performed on the lift and
/// `reduced()` picks the representative in (-pi, pi]. Keeping the lift matters
/// for non-integer rescaling, where Hol_{lambda theta} depends on it.
class Phase {
public:
    Phase() = default;

    static Phase from_turns(Rational turns);
    static Phase from_radians(double radians);

    bool is_exact() const noexcept { return turns_.has_value(); }
    const std::optional<Rational>& turns() const noexcept { return turns_; }
    double radians() const noexcept { return radians_; }

    Phase reduced() const;
    /// Radians reduced to (-pi, pi].
    double reduced_radians() const;

    /// Zero in R/2piZ. Exact phases are tested exactly, others within `tol`.
    bool is_zero_mod_2pi(double tol = 1e-10) const;
    bool equal_mod_2pi(const Phase& other, double tol = 1e-10) const;

    Phase scaled(const Rational& k) const;
    Phase scaled(double k) const;

    friend Phase operator+(const Phase& a, const Phase& b);
    friend Phase operator-(const Phase& a, const Phase& b);
    Phase operator-() const;
    Phase& operator+=(const Phase& o) { return *this = *this + o; }

    std::string str() const;

private:
    std::optional<Rational> turns_ = Rational(0);
    double radians_ = 0.0;
};

/// Reduce radians to (-pi, pi].
double wrap_radians(double r) noexcept;

}  // namespace cuspec

#endif
