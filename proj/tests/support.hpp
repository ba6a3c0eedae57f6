#ifndef DYADINT_TESTS_SUPPORT_HPP
#define DYADINT_TESTS_SUPPORT_HPP

// Helpers shared by the test binaries: seeded random expressions, random
// boxes, and brute-force reference values computed without the library's
// summation or interval code.

#include "dyadint/dyadic_rational.hpp"
#include "dyadint/expr.hpp"
#include "dyadint/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    // Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1p-53; }
    double uniform(double a, double b) { return a + unit() * (b - a); }
    bool coin() { return (next() & 1U) != 0; }

private:
    std::mt19937_64 gen_;
};

// Random expression text over x1..xm without division or square roots of
// possibly negative arguments, so every box evaluates without domain errors.
inline std::string random_expr(Rng& rng, std::size_t dim, int depth) {
    if (depth <= 0 || rng.integer(0, 9) < 2) {
        if (rng.coin()) {
            return "x" + std::to_string(rng.integer(1, static_cast<std::int64_t>(dim)));
        }
        const std::int64_t n = rng.integer(-8, 8);
        return n < 0 ? "(" + std::to_string(n) + "/4)" : std::to_string(n) + "/4";
    }
    const auto sub = [&] { return random_expr(rng, dim, depth - 1); };
    switch (rng.integer(0, 11)) {
    case 0:
    case 1:
        return "(" + sub() + " + " + sub() + ")";
    case 2:
        return "(" + sub() + " - " + sub() + ")";
    case 3:
    case 4:
        return "(" + sub() + " * " + sub() + ")";
    case 5:
        return "abs(" + sub() + ")";
    case 6:
        return "min(" + sub() + ", " + sub() + ")";
    case 7:
        return "max(" + sub() + ", " + sub() + ")";
    case 8:
        return "sin(" + sub() + ")";
    case 9:
        return "cos(" + sub() + ")";
    case 10:
        return "(" + sub() + ")^" + std::to_string(rng.integer(2, 3));
    default:
        return "sqrt(abs(" + sub() + "))";
    }
}

// Box with endpoints on the grid 2^-4 inside [-2, 2].
inline std::string random_dyadic_box_text(Rng& rng, std::size_t dim) {
    std::string out;
    for (std::size_t j = 0; j < dim; ++j) {
        std::int64_t a = rng.integer(-32, 31);
        std::int64_t b = rng.integer(a + 1, 32);
        if (j > 0) {
            out += "x";
        }
        out += "[" + std::to_string(a) + "/2^4," + std::to_string(b) + "/2^4)";
    }
    return out;
}

// Evaluates the expression on a plain grid of sample points inside the
// closed box (including corners) and returns the extreme sampled values.
inline std::pair<double, double> sampled_range(const dyadint::Expr& e, const dyadint::Cell& c, int per_axis) {
    double lo = INFINITY;
    double hi = -INFINITY;
    std::vector<int> idx(c.dim, 0);
    std::vector<double> p(c.dim);
    while (true) {
        for (std::size_t j = 0; j < c.dim; ++j) {
            p[j] = idx[j] == per_axis ? c.hi[j] : c.lo[j] + (c.hi[j] - c.lo[j]) * idx[j] / per_axis;
        }
        const double v = e.eval_point(p);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        std::size_t j = 0;
        while (j < c.dim && ++idx[j] > per_axis) {
            idx[j] = 0;
            ++j;
        }
        if (j == c.dim) {
            break;
        }
    }
    return {lo, hi};
}

// Midpoint rule in one variable, plain double arithmetic.
inline double midpoint_1d(const std::function<double(double)>& f, double a, double b, int n) {
    double s = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        s += f(a + (i + 0.5) * h);
    }
    return s * h;
}

// Midpoint rule on a product grid in two variables.
inline double midpoint_2d(const std::function<double(double, double)>& f, double a0, double b0, double a1, double b1,
                          int n) {
    double s = 0.0;
    const double h0 = (b0 - a0) / n;
    const double h1 = (b1 - a1) / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            s += f(a0 + (i + 0.5) * h0, a1 + (j + 0.5) * h1);
        }
    }
    return s * h0 * h1;
}

} // namespace testsupport

#endif
