#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace ostop {

/// Open interval (lo, hi) with extended-real endpoints. Membership excludes
/// the endpoints. A degenerate interval (lo == hi) is allowed only as a
/// point seed / restriction domain; ordinary intervals keep lo < hi.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval whole_line() { return {}; }

    bool contains(double x) const noexcept { return lo < x && x < hi; }
    bool closure_contains(double x) const noexcept { return lo <= x && x <= hi; }

    bool bounded_below() const noexcept { return std::isfinite(lo); }
    bool bounded_above() const noexcept { return std::isfinite(hi); }
    bool bounded() const noexcept { return bounded_below() && bounded_above(); }

    bool degenerate() const noexcept { return lo == hi; }
    double width() const noexcept { return hi - lo; }
    double midpoint() const noexcept { return 0.5 * (lo + hi); }

    bool subset_of(const Interval& other) const noexcept {
        return other.lo <= lo && hi <= other.hi;
    }

    /// Open intervals intersect when they share a point; `slack` widens the
    /// test so endpoints closer than `slack` count as touching.
    bool intersects(const Interval& other, double slack = 0.0) const noexcept {
        return lo < other.hi + slack && other.lo < hi + slack;
    }

    Interval intersect(const Interval& other) const noexcept {
        return {std::max(lo, other.lo), std::min(hi, other.hi)};
    }

    bool operator==(const Interval&) const noexcept = default;
};

} // namespace ostop
