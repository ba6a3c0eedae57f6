#include "dyadint/calculus.hpp"
#include "dyadint/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dyadint;

namespace {

Cell cell1(double a, double b) {
    Cell c;
    c.dim = 1;
    c.lo[0] = a;
    c.hi[0] = b;
    return c;
}

Interval scaled(const Interval& x, double c) { return ia::mul(Interval::point(c), x); }

} // namespace

TEST_CASE("Newton-Leibniz examples") {
    struct Case {
        const char* g;
        const char* F;
        double a;
        double b;
        double value;
    };
    const Case cases[] = {
        {"2*x1", "x1^2", 0.0, 1.0, 1.0},
        {"cos(x1)", "sin(x1)", 0.0, 1.5707963, std::sin(1.5707963)},
        {"1", "x1 + 5", 0.0, 1.0, 1.0},
    };
    for (const auto& c : cases) {
        const NLCheck r = newton_leibniz_check(Expr::parse(c.g, 1), Expr::parse(c.F, 1), c.a, c.b);
        CHECK_MESSAGE(r.contained, c.g);
        CHECK(r.integral.contains(c.value));
        CHECK(r.nl_value.contains(c.value));
        CHECK(r.report.verdict.kind == VerdictKind::Integrable);
        CHECK(r.integral.width() <= 1e-6);
        CHECK(r.warnings.empty());
    }
}

TEST_CASE("a wrong antiderivative is reported, not thrown") {
    const NLCheck r = newton_leibniz_check(Expr::parse("2*x1", 1), Expr::parse("x1^3", 1), 0.0, 2.0, 1e-6);
    CHECK_FALSE(r.contained);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("Newton-Leibniz preconditions") {
    CHECK_THROWS_AS(newton_leibniz_check(Expr::parse("1", 1), Expr::parse("x1", 1), 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(newton_leibniz_check(Expr::parse("1", 2), Expr::parse("x1", 1), 0.0, 1.0), DimensionError);
}

TEST_CASE("parameter integral over a triangle") {
    const OraclePtr phi = parameter_integral(Expr::parse("1", 2), Expr::parse("0", 1), Expr::parse("x1", 1),
                                             Box::parse("[0,1]"), 1e-5);
    CHECK_FALSE(phi->isotonic());
    // phi(x) = x; any cell's enclosure holds the range of x over it.
    const Interval v = phi->bounds(cell1(0.25, 0.5));
    CHECK(v.contains(Interval{0.25, 0.5}));
    // The inner integration goes a few levels past the cell's own, so the
    // excess over the true range shrinks with the cell.
    for (int k = 2; k <= 12; k += 2) {
        const double h = std::ldexp(1.0, -k);
        const Interval w = phi->bounds(cell1(0.5, 0.5 + h));
        CHECK(w.contains(Interval{0.5, 0.5 + h}));
        CHECK(w.width() <= 1.25 * h);
    }
    IntegrateOptions o;
    o.epsilon = 1e-3;
    const auto r = integrate(*phi, o);
    CHECK(r.enclosure().contains(0.5));
    CHECK(r.verdict.kind == VerdictKind::Integrable);
}

TEST_CASE("parameter integral of the inner variable is constant") {
    const OraclePtr phi = parameter_integral(Expr::parse("x2", 2), Expr::parse("0", 1), Expr::parse("1", 1),
                                             Box::parse("[0,1]"), 1e-6);
    for (int k = 2; k <= 12; k += 2) {
        const double h = std::ldexp(1.0, -k);
        for (double a : {0.0, 0.5, 1.0 - h}) {
            const Interval v = phi->bounds(cell1(a, a + h));
            CHECK(v.contains(0.5));
            CHECK(v.width() <= 0.25 * h + 1e-12);
        }
    }
    CHECK(phi->bounds(cell1(2.0, 3.0)) == Interval{0.0, 0.0});
}

TEST_CASE("parameter integral rejects reversed limits") {
    CHECK_THROWS_AS(parameter_integral(Expr::parse("1", 2), Expr::parse("1", 1), Expr::parse("0", 1),
                                       Box::parse("[0,1]"), 1e-3),
                    PreconditionError);
    CHECK_THROWS_AS(parameter_integral(Expr::parse("1", 2), Expr::parse("x1 - 1/2", 1), Expr::parse("0", 1),
                                       Box::parse("[0,1]"), 1e-3),
                    PreconditionError);
    CHECK_THROWS_AS(parameter_integral(Expr::parse("1", 2), Expr::parse("0", 2), Expr::parse("1", 1),
                                       Box::parse("[0,1]"), 1e-3),
                    DimensionError);
}

TEST_CASE("repeated integral examples") {
    // phi(x) psi(y) with both factors the indicator of [0,1).
    RepeatedIntegralPlan p = plan_for_box(box_indicator(Box::parse("[0,1)x[0,1)")), Box::parse("[0,1)x[0,1)"));
    p.outer_epsilon = 1e-3;
    const auto r1 = repeated_integral(p);
    CHECK(r1.enclosure().contains(1.0));

    RepeatedIntegralPlan q =
        plan_for_box(from_expr(Expr::parse("x1*x2", 2), Box::parse("[0,1)x[0,1)")), Box::parse("[0,1)x[0,1)"));
    q.outer_epsilon = 1e-3;
    const auto r2 = repeated_integral(q);
    CHECK(r2.enclosure().contains(0.25));
    CHECK(r2.verdict.kind == VerdictKind::Integrable);

    RepeatedIntegralPlan t;
    t.f = from_expr(Expr::parse("1", 2), Box::parse("[0,1]x[0,1]"));
    t.lower = Expr::parse("0", 1);
    t.upper = Expr::parse("x1", 1);
    t.outer = Box::parse("[0,1]");
    t.outer_epsilon = 1e-3;
    const auto r3 = repeated_integral(t);
    CHECK(r3.enclosure().contains(0.5));
}

TEST_CASE("triple integral with two outer axes") {
    // Volume under z = x + y over the unit square is 1.
    RepeatedIntegralPlan p;
    p.f = from_expr(Expr::parse("1", 3), Box::parse("[0,1]x[0,1]x[0,2]"));
    p.lower = Expr::parse("0", 2);
    p.upper = Expr::parse("x1 + x2", 2);
    p.outer = Box::parse("[0,1]x[0,1]");
    p.outer_epsilon = 0.05;
    CHECK(p.outer_dims() == 2);
    const auto r = repeated_integral(p);
    CHECK(r.enclosure().contains(1.0));
    CHECK(r.verdict.kind == VerdictKind::Integrable);
}

TEST_CASE("repeated integrals are linear, monotone and separate products") {
    testsupport::Rng rng(61);
    const Box box = Box::parse("[0,1)x[0,1)");
    auto rep = [&](const OraclePtr& f) {
        RepeatedIntegralPlan p = plan_for_box(f, box);
        p.outer_epsilon = 1e-2;
        p.k_max = 10;
        return repeated_integral(p).enclosure();
    };
    for (int trial = 0; trial < 4; ++trial) {
        const auto f = from_expr(Expr::parse(testsupport::random_expr(rng, 2, 2), 2), box);
        const auto g = from_expr(Expr::parse(testsupport::random_expr(rng, 2, 2), 2), box);
        const double alpha = rng.uniform(-2.0, 2.0);
        const double beta = rng.uniform(-2.0, 2.0);
        const Interval lhs = rep(add(f, g, alpha, beta));
        const Interval rhs = ia::add(scaled(rep(f), alpha), scaled(rep(g), beta));
        CHECK(lhs.overlaps(rhs));

        const auto h = from_expr(Expr::parse("abs(" + testsupport::random_expr(rng, 2, 2) + ")", 2), box);
        CHECK(rep(f).lo <= rep(add(f, h)).hi);
    }
    for (int trial = 0; trial < 4; ++trial) {
        const std::string phi = testsupport::random_expr(rng, 1, 2);
        const std::string psi = testsupport::random_expr(rng, 1, 2);
        // psi in y: rename x1 to x2 for the product.
        std::string renamed;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (psi[i] == 'x' && i + 1 < psi.size() && psi[i + 1] == '1') {
                renamed += "x2";
                ++i;
            } else {
                renamed += psi[i];
            }
        }
        const auto prod = from_expr(Expr::parse("(" + phi + ") * (" + renamed + ")", 2), box);
        IntegrateOptions o;
        o.epsilon = 1e-4;
        const Interval a = integrate(*from_expr(Expr::parse(phi, 1), Box::parse("[0,1)")), o).enclosure();
        const Interval b = integrate(*from_expr(Expr::parse(psi, 1), Box::parse("[0,1)")), o).enclosure();
        CHECK_MESSAGE(rep(prod).overlaps(ia::mul(a, b)), phi << " * " << renamed);
    }
}

TEST_CASE("Fubini on boxes") {
    FubiniOptions o;
    o.epsilon = 1e-2;
    for (const auto& [text, value] : {std::pair{"x1*x2", 0.25}, std::pair{"x1 + x2", 1.0}}) {
        const FubiniReport r = fubini_check(Expr::parse(text, 2), Region(Box::parse("[0,1)x[0,1)"), {}), std::nullopt, o);
        CHECK(r.direct.enclosure().contains(value));
        CHECK(r.repeated.enclosure().contains(value));
        REQUIRE(r.swapped.has_value());
        CHECK(r.swapped->enclosure().contains(value));
        CHECK(r.overlap);
        CHECK(r.swapped_overlap);
        CHECK_FALSE(r.critical);
    }
}

TEST_CASE("Fubini on the disk with and without a slice description") {
    const Region disk(Box::parse("[-1,1]x[-1,1]"), {Constraint{Expr::parse("x1^2 + x2^2 - 1", 2), false}});
    FubiniOptions o;
    o.epsilon = 0.05;
    const Slice slice{Expr::parse("-sqrt(1 - x1^2)", 1), Expr::parse("sqrt(1 - x1^2)", 1)};
    const FubiniReport a = fubini_check(Expr::parse("1", 2), disk, slice, o);
    CHECK(a.direct.enclosure().contains(std::numbers::pi));
    CHECK(a.repeated.enclosure().contains(std::numbers::pi));
    CHECK(a.overlap);
    CHECK(a.swapped_overlap);
    o.swap = false;
    const FubiniReport b = fubini_check(Expr::parse("1", 2), disk, std::nullopt, o);
    CHECK(b.repeated.enclosure().contains(std::numbers::pi));
    CHECK(b.overlap);
    CHECK_FALSE(b.swapped.has_value());
}

TEST_CASE("Fubini dimension checks") {
    CHECK_THROWS_AS(fubini_check(Expr::parse("x1", 1), Region(Box::parse("[0,1)"), {}), std::nullopt),
                    DimensionError);
    CHECK_THROWS_AS(fubini_check(Expr::parse("x1", 3), Region(Box::parse("[0,1)x[0,1)"), {}), std::nullopt),
                    DimensionError);
}
