#ifndef DYADINT_INTERVAL_HPP
#define DYADINT_INTERVAL_HPP

#include "dyadint/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dyadint {

// Closed interval [lo, hi] of extended reals. Every operation below is the
// scalar reference for the batch kernels and must stay bit-identical to them.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    bool is_point() const { return lo == hi; }
    bool is_finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    double width() const { return hi - lo; }
    double mid() const { return lo + 0.5 * (hi - lo); }

    std::string to_string() const;

    friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

inline Interval hull(const Interval& a, double v) { return {std::min(a.lo, v), std::max(a.hi, v)}; }

// Empty result is reported through the return flag.
inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
    out = {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    return out.lo <= out.hi;
}

namespace ia {

using namespace rounding;

inline Interval add(Interval a, Interval b) { return {add_down(a.lo, b.lo), add_up(a.hi, b.hi)}; }

inline Interval sub(Interval a, Interval b) { return {sub_down(a.lo, b.hi), sub_up(a.hi, b.lo)}; }

inline Interval neg(Interval a) { return {-a.hi, -a.lo}; }

inline Interval mul(Interval a, Interval b) {
    const double l1 = mul_down(a.lo, b.lo);
    const double l2 = mul_down(a.lo, b.hi);
    const double l3 = mul_down(a.hi, b.lo);
    const double l4 = mul_down(a.hi, b.hi);
    const double u1 = mul_up(a.lo, b.lo);
    const double u2 = mul_up(a.lo, b.hi);
    const double u3 = mul_up(a.hi, b.lo);
    const double u4 = mul_up(a.hi, b.hi);
    return {std::min(std::min(l1, l2), std::min(l3, l4)), std::max(std::max(u1, u2), std::max(u3, u4))};
}

// Sets domain_error when b contains zero.
inline Interval div(Interval a, Interval b, bool& domain_error) {
    if (b.lo <= 0.0 && 0.0 <= b.hi) {
        domain_error = true;
        return {-HUGE_VAL, HUGE_VAL};
    }
    const double l1 = div_down(a.lo, b.lo);
    const double l2 = div_down(a.lo, b.hi);
    const double l3 = div_down(a.hi, b.lo);
    const double l4 = div_down(a.hi, b.hi);
    const double u1 = div_up(a.lo, b.lo);
    const double u2 = div_up(a.lo, b.hi);
    const double u3 = div_up(a.hi, b.lo);
    const double u4 = div_up(a.hi, b.hi);
    return {std::min(std::min(l1, l2), std::min(l3, l4)), std::max(std::max(u1, u2), std::max(u3, u4))};
}

inline Interval abs(Interval a) {
    if (a.lo >= 0.0) {
        return a;
    }
    if (a.hi <= 0.0) {
        return neg(a);
    }
    return {0.0, std::max(-a.lo, a.hi)};
}

inline Interval min(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }
inline Interval max(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }

inline double pow_down_nonneg(double x, unsigned n) {
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) {
        r = mul_down(r, x);
    }
    return r;
}

inline double pow_up_nonneg(double x, unsigned n) {
    double r = 1.0;
    for (unsigned i = 0; i < n; ++i) {
        r = mul_up(r, x);
    }
    return r;
}

// Even powers never go negative: [-1,1]^2 = [0,1].
inline Interval pow(Interval a, unsigned n) {
    if (n == 0) {
        return {1.0, 1.0};
    }
    if (n % 2 == 0) {
        if (a.lo >= 0.0) {
            return {pow_down_nonneg(a.lo, n), pow_up_nonneg(a.hi, n)};
        }
        if (a.hi <= 0.0) {
            return {pow_down_nonneg(-a.hi, n), pow_up_nonneg(-a.lo, n)};
        }
        return {0.0, std::max(pow_up_nonneg(-a.lo, n), pow_up_nonneg(a.hi, n))};
    }
    const double lo = a.lo >= 0.0 ? pow_down_nonneg(a.lo, n) : -pow_up_nonneg(-a.lo, n);
    const double hi = a.hi >= 0.0 ? pow_up_nonneg(a.hi, n) : -pow_down_nonneg(-a.hi, n);
    return {lo, hi};
}

// Negative part of the argument is clamped away; fully negative is an error.
inline Interval sqrt(Interval a, bool& domain_error) {
    if (a.hi < 0.0) {
        domain_error = true;
        return {-HUGE_VAL, HUGE_VAL};
    }
    return {sqrt_down(std::max(a.lo, 0.0)), sqrt_up(a.hi)};
}

namespace detail {

// Whether [t_lo, t_hi] may contain an integer, erring towards yes.
inline bool may_contain_integer(double t_lo, double t_hi) {
    const double slack = 1e-12 * (1.0 + std::max(std::fabs(t_lo), std::fabs(t_hi)));
    return std::floor(t_hi + slack) >= std::ceil(t_lo - slack);
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kRangeLimit = 1e8;

// Range of a 2*pi periodic function with maximum at phase_max and minimum at
// phase_min, evaluated through fn at the endpoints between critical points.
template <class Fn>
Interval periodic_range(Interval a, double phase_max, double phase_min, Fn fn) {
    if (!(std::fabs(a.lo) < kRangeLimit && std::fabs(a.hi) < kRangeLimit) || a.hi - a.lo >= 6.25) {
        return {-1.0, 1.0};
    }
    const bool has_max =
        may_contain_integer((a.lo - phase_max) / kTwoPi, (a.hi - phase_max) / kTwoPi);
    const bool has_min =
        may_contain_integer((a.lo - phase_min) / kTwoPi, (a.hi - phase_min) / kTwoPi);
    const double f_lo = fn(a.lo);
    const double f_hi = fn(a.hi);
    const double hi = has_max ? 1.0 : std::min(1.0, pad_up(std::max(f_lo, f_hi)));
    const double lo = has_min ? -1.0 : std::max(-1.0, pad_down(std::min(f_lo, f_hi)));
    return {lo, hi};
}

} // namespace detail

inline Interval sin(Interval a) {
    return detail::periodic_range(a, std::numbers::pi / 2, -std::numbers::pi / 2,
                                  [](double x) { return std::sin(x); });
}

inline Interval cos(Interval a) {
    return detail::periodic_range(a, 0.0, std::numbers::pi, [](double x) { return std::cos(x); });
}

inline Interval exp(Interval a) {
    return {std::max(0.0, pad_down(std::exp(a.lo))), pad_up(std::exp(a.hi))};
}

} // namespace ia

} // namespace dyadint

#endif
