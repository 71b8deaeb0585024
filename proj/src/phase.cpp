#include "cuspec/phase.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cuspec {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_radians(double r) noexcept {
    double w = std::remainder(r, kTwoPi);  // [-pi, pi]
    if (w <= -std::numbers::pi) w += kTwoPi;
    return w;
}

Phase Phase::from_turns(Rational turns) {
    Phase p;
    p.radians_ = kTwoPi * turns.to_double();
    p.turns_ = turns;
    return p;
}

Phase Phase::from_radians(double radians) {
    Phase p;
    p.turns_.reset();
    p.radians_ = radians;
    return p;
}

Phase Phase::reduced() const {
    if (turns_) return from_turns(turns_->reduced_mod_one());
    return from_radians(wrap_radians(radians_));
}

double Phase::reduced_radians() const { return reduced().radians_; }

bool Phase::is_zero_mod_2pi(double tol) const {
    if (turns_) return turns_->is_integer();
    return std::abs(wrap_radians(radians_)) <= tol;
}

bool Phase::equal_mod_2pi(const Phase& other, double tol) const { return (*this - other).is_zero_mod_2pi(tol); }

Phase Phase::scaled(const Rational& k) const {
    if (turns_) return from_turns(*turns_ * k);
    return from_radians(radians_ * k.to_double());
}

Phase Phase::scaled(double k) const { return from_radians(radians_ * k); }

Phase operator+(const Phase& a, const Phase& b) {
    if (a.turns_ && b.turns_) return Phase::from_turns(*a.turns_ + *b.turns_);
    return Phase::from_radians(a.radians_ + b.radians_);
}

Phase operator-(const Phase& a, const Phase& b) { return a + (-b); }

Phase Phase::operator-() const {
    if (turns_) return from_turns(-*turns_);
    return from_radians(-radians_);
}

std::string Phase::str() const {
    std::ostringstream os;
    if (turns_) {
        os << "2pi*" << turns_->str();
    } else {
        os.precision(17);
        os << radians_;
    }
    return os.str();
}

}  // namespace cuspec
