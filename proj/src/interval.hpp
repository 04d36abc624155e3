#ifndef SEPKERN_INTERVAL_HPP
#define SEPKERN_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace sepkern {

// Closed bounded interval [lo, hi]; lo == hi (measure zero) is allowed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw ArgumentError("interval endpoints must be finite");
        if (lo > hi)
            throw ArgumentError("interval requires lo <= hi");
    }

    double measure() const { return hi - lo; }
    bool degenerate() const { return hi == lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }

    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (lo > hi) return std::nullopt;
    return Interval(lo, hi);
}

inline std::optional<Interval> intersect(const std::optional<Interval>& a, const Interval& b) {
    if (!a) return std::nullopt;
    return intersect(*a, b);
}

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

// a \ b as a list of positive-measure intervals (at most two pieces).
inline std::vector<Interval> subtract(const Interval& a, const Interval& b) {
    std::vector<Interval> out;
    if (b.hi <= a.lo || b.lo >= a.hi) {
        if (!a.degenerate()) out.push_back(a);
        return out;
    }
    if (b.lo > a.lo) out.emplace_back(a.lo, b.lo);
    if (b.hi < a.hi) out.emplace_back(b.hi, a.hi);
    return out;
}

} // namespace sepkern

#endif
