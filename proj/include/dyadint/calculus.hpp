#ifndef DYADINT_CALCULUS_HPP
#define DYADINT_CALCULUS_HPP

#include "dyadint/expr.hpp"
#include "dyadint/integrator.hpp"
#include "dyadint/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dyadint {

struct NLCheck {
    Expr g;
    Expr F;
    double a = 0.0;
    double b = 0.0;
    DyadicSumReport report;
    Interval integral{}; // rigorous enclosure of the integral of g over [a,b)
    Interval nl_value{}; // enclosure of F(b) - F(a)
    bool contained = false;
    std::vector<std::string> warnings; // derivative spot-check findings
};

// Integrates g over [a,b) and compares with F(b) - F(a). `contained` holds
// when the enclosure of F(b) - F(a) meets the integral enclosure.
NLCheck newton_leibniz_check(const Expr& g, const Expr& F, double a, double b, double epsilon = kDefaultEpsilon,
                             int k_max = -1, unsigned threads = 1);

// phi(x) = integral of f(x, y) over u(x) <= y <= v(x), x ranging over `outer`.
// f has m axes, the last one being y; u and v use the first m - 1.
// Bounds over an outer cell come from an inner adaptive integration of
// f(C, y) · [u(C) <= y <= v(C)], refined to a few levels past the cell's own
// level. The oracle is not isotonic.
OraclePtr parameter_integral(const OraclePtr& f, const Expr& u, const Expr& v, const Box& outer,
                             double inner_epsilon, int extra_levels = 3);

// Expression form: f is taken on outer x [min u, max v].
OraclePtr parameter_integral(const Expr& f, const Expr& u, const Expr& v, const Box& outer, double inner_epsilon);

struct RepeatedIntegralPlan {
    OraclePtr f;    // m axes
    Expr lower;     // u, in the first m - 1 axes
    Expr upper;     // v, in the first m - 1 axes
    Box outer;      // outer_dims = m - 1 axes
    double outer_epsilon = kDefaultEpsilon;
    double inner_epsilon = 0.0; // 0: outer_epsilon / (4 · |outer|)
    int k_max = -1;             // outer integration
    int extra_levels = 3;
    Strategy strategy = Strategy::Adaptive;
    unsigned threads = 1;

    std::size_t outer_dims() const { return outer.dim(); }
};

// Plan for f over a box: u, v are the last-axis bounds.
RepeatedIntegralPlan plan_for_box(const OraclePtr& f, const Box& box);

DyadicSumReport repeated_integral(const RepeatedIntegralPlan& plan);

// Explicit description of a region as u(x) <= y <= v(x) over its bbox.
struct Slice {
    Expr lower;
    Expr upper;
};

struct FubiniOptions {
    double epsilon = 1e-3;
    int k_max = -1;
    Strategy strategy = Strategy::Adaptive;
    unsigned threads = 1;
    bool swap = true; // also integrate with the last two axes exchanged
};

struct FubiniReport {
    DyadicSumReport direct;
    DyadicSumReport repeated;
    bool overlap = false;
    std::optional<DyadicSumReport> swapped;
    bool swapped_overlap = true;
    // Two Integrable enclosures that fail to meet. Never expected.
    bool critical = false;
};

FubiniReport fubini_check(const Expr& f, const Region& region, const std::optional<Slice>& slice,
                          const FubiniOptions& options = {});

} // namespace dyadint

#endif
