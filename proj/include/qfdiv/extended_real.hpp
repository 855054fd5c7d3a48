#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "qfdiv/errors.hpp"

namespace qfdiv {

/// A finite real or +infinity. -infinity and NaN are never constructed.
///
/// Products follow the measure-theoretic convention 0 * (+inf) = 0, so a
/// term weighted by a vanishing mass drops out even when its coefficient is
/// infinite.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    ExtendedReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
        if (std::isnan(v)) throw ParameterError("ExtendedReal cannot hold NaN");
        if (v == -std::numeric_limits<double>::infinity())
            throw ParameterError("ExtendedReal cannot hold -infinity");
        if (std::isinf(v)) infinite_ = true, value_ = 0.0;
    }

    static constexpr ExtendedReal infinity() {
        ExtendedReal e;
        e.infinite_ = true;
        return e;
    }

    constexpr bool is_infinite() const noexcept { return infinite_; }
    constexpr bool is_finite() const noexcept { return !infinite_; }

    // Finite value; throws for +inf.
    double value() const {
        if (infinite_) throw ParameterError("ExtendedReal is +infinity");
        return value_;
    }
    // Finite value, or +inf as a double.
    double to_double() const noexcept {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    ExtendedReal& operator+=(const ExtendedReal& rhs) {
        if (rhs.infinite_)
            infinite_ = true, value_ = 0.0;
        else if (!infinite_)
            value_ += rhs.value_;
        return *this;
    }

    friend ExtendedReal operator+(ExtendedReal lhs, const ExtendedReal& rhs) { return lhs += rhs; }

    // c * x for c >= 0 with 0 * inf = 0; negative multiples of +inf are rejected.
    friend ExtendedReal operator*(double c, const ExtendedReal& x) {
        if (std::isnan(c)) throw ParameterError("ExtendedReal scaled by NaN");
        if (!x.infinite_) return ExtendedReal(c * x.value_);
        if (c == 0.0) return ExtendedReal(0.0);
        if (c < 0.0) throw ParameterError("negative multiple of +infinity is not representable");
        return infinity();
    }
    friend ExtendedReal operator*(const ExtendedReal& x, double c) { return c * x; }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_) return false;
        return b.infinite_ || a.value_ < b.value_;
    }
    friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return !(b < a); }
    friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return !(a < b); }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
        if (x.infinite_) return os << "inf";
        return os << x.value_;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

// Both +inf, or both finite with |a - b| <= tol * max(1, |a|, |b|).
inline bool approx_equal(const ExtendedReal& a, const ExtendedReal& b, double tol) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
    const double x = a.value();
    const double y = b.value();
    return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace qfdiv
