#ifndef DYADINT_ROUNDING_HPP
#define DYADINT_ROUNDING_HPP

// Directed rounding without touching the FPU rounding mode. Each operation
// computes the round-to-nearest result together with the sign of its
// rounding error (exact via TwoSum / FMA residuals) and steps one ulp in the
// requested direction only when the result fell on the wrong side. The
// outcome equals what a round-up / round-down mode would produce, and it is
// reproducible bit for bit by the SIMD kernels.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace dyadint::rounding {

inline double next_up(double x) {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
        return x;
    }
    if (x == 0.0) {
        return std::numeric_limits<double>::denorm_min();
    }
    auto bits = std::bit_cast<std::int64_t>(x);
    bits += x > 0.0 ? 1 : -1;
    return std::bit_cast<double>(bits);
}

inline double next_down(double x) { return -next_up(-x); }

// Rounding error of a + b, exactly: a + b = s + err.
inline double two_sum_err(double a, double b, double s) {
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline double add_down(double a, double b) {
    const double s = a + b;
    if (!std::isfinite(s)) {
        return s == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::max() : s;
    }
    return two_sum_err(a, b, s) < 0.0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
    const double s = a + b;
    if (!std::isfinite(s)) {
        return s == -std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::lowest() : s;
    }
    return two_sum_err(a, b, s) > 0.0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

inline double mul_down(double a, double b) {
    const double p = a * b;
    if (!std::isfinite(p)) {
        return p == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::max() : p;
    }
    const double err = std::fma(a, b, -p);
    // Underflowed products can be inexact with a zero residual; step anyway.
    const bool tiny = std::fabs(p) < std::numeric_limits<double>::min() && a != 0.0 && b != 0.0;
    return (err < 0.0 || tiny) ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
    const double p = a * b;
    if (!std::isfinite(p)) {
        return p == -std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::lowest() : p;
    }
    const double err = std::fma(a, b, -p);
    const bool tiny = std::fabs(p) < std::numeric_limits<double>::min() && a != 0.0 && b != 0.0;
    return (err > 0.0 || tiny) ? next_up(p) : p;
}

// b must be nonzero.
inline double div_down(double a, double b) {
    const double q = a / b;
    if (!std::isfinite(q)) {
        return q == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::max() : q;
    }
    // a - q b exactly; the true quotient lies below q iff r / b < 0.
    const double r = std::fma(-q, b, a);
    const bool tiny = std::fabs(q) < std::numeric_limits<double>::min() && a != 0.0;
    return ((r != 0.0 && ((r < 0.0) != (b < 0.0))) || tiny) ? next_down(q) : q;
}

inline double div_up(double a, double b) {
    const double q = a / b;
    if (!std::isfinite(q)) {
        return q == -std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::lowest() : q;
    }
    const double r = std::fma(-q, b, a);
    const bool tiny = std::fabs(q) < std::numeric_limits<double>::min() && a != 0.0;
    return ((r != 0.0 && ((r > 0.0) != (b < 0.0))) || tiny) ? next_up(q) : q;
}

// x >= 0.
inline double sqrt_down(double x) {
    const double s = std::sqrt(x);
    const double r = std::fma(-s, s, x);
    return r < 0.0 ? next_down(s) : s;
}

inline double sqrt_up(double x) {
    const double s = std::sqrt(x);
    const double r = std::fma(-s, s, x);
    return r > 0.0 ? next_up(s) : s;
}

// Libm transcendentals are not correctly rounded; glibc documents errors
// below 1 ulp for sin, cos and exp. Two ulps of padding each way covers it.
inline constexpr int kTranscendentalPadUlps = 2;

inline double pad_down(double x, int ulps = kTranscendentalPadUlps) {
    for (int i = 0; i < ulps; ++i) {
        x = next_down(x);
    }
    return x;
}

inline double pad_up(double x, int ulps = kTranscendentalPadUlps) {
    for (int i = 0; i < ulps; ++i) {
        x = next_up(x);
    }
    return x;
}

} // namespace dyadint::rounding

#endif
