#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace symdyn {

inline double round_down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double round_up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

/// Closed real interval [lo, hi]. Arithmetic is outward-rounded: every
/// operation steps its result one ulp outward, which dominates the half-ulp
/// error of round-to-nearest.
struct Interval {
    double lo = 0;
    double hi = 0;

    static Interval point(double v) { return {v, v}; }

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    bool is_point() const { return lo == hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Outward-rounded sum. Exact when both operands are points and the sum is
/// representable; otherwise widened by one ulp per side.
inline Interval operator+(const Interval& a, const Interval& b) {
    double lo = a.lo + b.lo;
    double hi = a.hi + b.hi;
    if (!(a.is_point() && b.is_point() && lo - a.lo == b.lo && hi - a.hi == b.hi)) {
        lo = round_down(lo);
        hi = round_up(hi);
    }
    return {lo, hi};
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }

/// Hull of two intervals.
inline Interval hull(const Interval& a, const Interval& b) {
    return {std::fmin(a.lo, b.lo), std::fmax(a.hi, b.hi)};
}

/// Certified enclosure of ln(sum_i exp(x_i)).
///
/// Terms are shifted by the maximum, exponentiated with one-ulp outward
/// rounding, summed pairwise (error at most ceil(log2 N) ulps relative), and
/// the logarithm is rounded outward. `lower` and `upper` return directed
/// bounds for the exponents supplied to them; the result is deterministic
/// for a given term order.
class LogSumExp {
public:
    static double lower(std::span<const double> exponents);
    static double upper(std::span<const double> exponents);

    /// Unrounded value, for diagnostics and oracles.
    static double nearest(std::span<const double> exponents);
};

} // namespace symdyn
