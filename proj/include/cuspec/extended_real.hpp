#ifndef CUSPEC_EXTENDED_REAL_HPP
#define CUSPEC_EXTENDED_REAL_HPP

#include <compare>
#include <ostream>

#include "cuspec/error.hpp"

namespace cuspec {

/// A nonnegative real or +infinity. Infinity is a state, not a float value.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    explicit constexpr ExtendedReal(double v) : value_(v), infinite_(false) {}

    static constexpr ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_finite() const noexcept { return !infinite_; }
    constexpr bool is_infinite() const noexcept { return infinite_; }

    double value() const {
        if (infinite_) throw Error(ErrorKind::BadParameters, "value() of an infinite extended real");
        return value_;
    }

    constexpr ExtendedReal half() const { return infinite_ ? infinity() : ExtendedReal(value_ / 2.0); }

    friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return ExtendedReal(a.value_ + b.value_);
    }

    friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }

    friend constexpr std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
        if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
        if (a.infinite_) return std::partial_ordering::greater;
        if (b.infinite_) return std::partial_ordering::less;
        return a.value_ <=> b.value_;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

inline std::ostream& operator<<(std::ostream& os, ExtendedReal r) {
    if (r.is_infinite()) return os << "inf";
    return os << r.value();
}

}  // namespace cuspec

#endif
