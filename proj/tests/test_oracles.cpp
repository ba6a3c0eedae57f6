#include "dyadint/errors.hpp"
#include "dyadint/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace dyadint;

namespace {

Cell cell2(double x0, double x1, double y0, double y1) {
    Cell c;
    c.dim = 2;
    c.lo[0] = x0;
    c.hi[0] = x1;
    c.lo[1] = y0;
    c.hi[1] = y1;
    return c;
}

Cell cell1(double a, double b) {
    Cell c;
    c.dim = 1;
    c.lo[0] = a;
    c.hi[0] = b;
    return c;
}

Region disk() {
    return Region(Box::parse("[-1,1]x[-1,1]"), {Constraint{Expr::parse("x1^2 + x2^2 - 1", 2), false}});
}

// Sampled values of an oracle's function, including zero outside the support.
double sample_f(const Expr& e, const Box& support, double x) {
    const DyadicRational X = DyadicRational::from_double(x);
    const bool in = X >= support.lower(0) && (X < support.upper(0) || (support.closure(0) == Closure::Closed &&
                                                                         X == support.upper(0)));
    return in ? e.eval_point(std::vector<double>{x}) : 0.0;
}

} // namespace

TEST_CASE("expression oracles vanish off the support and hull boundary cells with zero") {
    const auto f = from_expr(Expr::parse("x1 + 2", 1), Box::parse("[0,1)"));
    CHECK(f->bounds(cell1(2.0, 3.0)) == Interval{0.0, 0.0});
    CHECK(f->bounds(cell1(0.25, 0.5)).contains(Interval{2.25, 2.5}));
    CHECK(f->bounds(cell1(0.25, 0.5)).lo > 0.0);
    const Interval edge = f->bounds(cell1(0.5, 1.5));
    CHECK(edge.lo == 0.0);
    CHECK(edge.hi >= 3.0);
    // [-1/4, 0) misses [0,1); its closure touches 0.
    CHECK(f->bounds(cell1(-0.25, 0.0), Topology::SemiClosed) == Interval{0.0, 0.0});
    CHECK(f->bounds(cell1(-0.25, 0.0), Topology::Closed) == Interval{0.0, 2.0});
    // The closure of [1, 5/4) still misses [0,1).
    CHECK(f->bounds(cell1(1.0, 1.25), Topology::Closed) == Interval{0.0, 0.0});
    CHECK(f->isotonic());
    CHECK_FALSE(f->indicator_like());
}

TEST_CASE("expression oracle bounds contain sampled values") {
    testsupport::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Expr e = Expr::parse(testsupport::random_expr(rng, 1, 4), 1);
        const Box support = Box::parse(testsupport::random_dyadic_box_text(rng, 1));
        const auto f = from_expr(e, support);
        const double a = rng.uniform(-2.5, 2.5);
        const double b = a + rng.uniform(0.0, 1.0);
        const Interval enc = f->bounds(cell1(a, b));
        for (int i = 0; i < 50; ++i) {
            const double x = a + (b - a) * i / 50.0;
            CHECK_MESSAGE(enc.contains(sample_f(e, support, x)), e.to_string() << " on " << support.to_string());
        }
    }
}

TEST_CASE("domain failures are reported with the offending cell") {
    const auto f = from_expr(Expr::parse("1/x1", 1), Box::parse("[-1,1)"));
    try {
        (void)f->bounds(cell1(-0.5, 0.5));
        FAIL("expected an oracle error");
    } catch (const OracleError& e) {
        CHECK(e.cell().lo[0] == -0.5);
        CHECK(std::string(e.what()).find("[-0.5,0.5)") != std::string::npos);
    }
    CHECK_NOTHROW(f->bounds(cell1(0.25, 0.5)));
    CHECK_THROWS_AS(from_expr(Expr::parse("x1", 1), Box::parse("[0,1)x[0,1)")), DimensionError);
}

TEST_CASE("region classification of the unit disk") {
    const Region r = disk();
    CHECK(r.classify(cell2(-0.25, 0.25, -0.25, 0.25)) == Relation::Inside);
    CHECK(r.classify(cell2(0.9, 1.0, 0.9, 1.0)) == Relation::Outside);
    CHECK(r.classify(cell2(0.5, 1.0, 0.0, 0.5)) == Relation::Boundary);
    CHECK(r.classify(cell2(1.5, 2.0, 0.0, 0.5)) == Relation::Outside);
    CHECK(r.contains(std::vector<double>{0.5, 0.5}));
    CHECK(r.contains(std::vector<double>{1.0, 0.0}));
    CHECK_FALSE(r.contains(std::vector<double>{0.8, 0.8}));
}

TEST_CASE("strict constraints exclude their zero set") {
    const Region open(Box::parse("[-1,1]"), {Constraint{Expr::parse("x1", 1), true}});
    CHECK(open.contains(std::vector<double>{-0.5}));
    CHECK_FALSE(open.contains(std::vector<double>{0.0}));
    CHECK(open.classify(cell1(0.0, 0.5), Topology::Closed) == Relation::Outside);
    const Region closed(Box::parse("[-1,1]"), {Constraint{Expr::parse("x1", 1), false}});
    CHECK(closed.classify(cell1(0.0, 0.5), Topology::Closed) == Relation::Boundary);
}

TEST_CASE("region JSON round trip") {
    const Region r = disk();
    const Region back = Region::from_json_text(r.to_json_text());
    CHECK(back.bbox() == r.bbox());
    REQUIRE(back.constraints().size() == 1);
    CHECK(back.constraints()[0].expr.to_string() == r.constraints()[0].expr.to_string());
    CHECK_THROWS_AS(Region::from_json_text("{"), ParseError);
    CHECK_THROWS_AS(Region::from_json_text(R"j({"dim":3,"bbox":"[0,1)","constraints":[]})j"), DimensionError);
    CHECK_THROWS_AS(Region::load("/nonexistent/region.json"), ParseError);
}

TEST_CASE("indicator oracles report only the three canonical enclosures") {
    const auto chi = indicator(disk());
    CHECK(chi->indicator_like());
    testsupport::Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        const double x = rng.uniform(-1.5, 1.5);
        const double y = rng.uniform(-1.5, 1.5);
        const double h = rng.uniform(0.0, 0.5);
        const Interval v = chi->bounds(cell2(x, x + h, y, y + h));
        CHECK((v == Interval{0, 0} || v == Interval{1, 1} || v == Interval{0, 1}));
    }
    CHECK_FALSE(add(chi, chi)->indicator_like());
}

TEST_CASE("combinators follow interval arithmetic") {
    const Box support = Box::parse("[0,1)");
    const auto f = from_expr(Expr::parse("x1", 1), support);
    const auto g = from_expr(Expr::parse("1 - x1", 1), support);
    const Cell c = cell1(0.25, 0.5);
    const Interval sum = add(f, g)->bounds(c);
    CHECK(sum.contains(1.0));
    CHECK(sum.width() <= 0.5 + 1e-15);
    CHECK(scale(f, -2.0)->bounds(c).contains(Interval{-1.0, -0.5}));
    CHECK(negate(f)->bounds(c) == Interval{-0.5, -0.25});
    CHECK(mul(f, g)->bounds(c).contains(Interval{0.1875, 0.25}));
    const auto shifted = from_expr(Expr::parse("x1 - 1/2", 1), support);
    CHECK(abs(shifted)->bounds(c) == Interval{0.0, 0.25});
    CHECK(pos_part(shifted)->bounds(c) == Interval{0.0, 0.0});
    CHECK(neg_part(shifted)->bounds(c) == Interval{0.0, 0.25});
    CHECK(max(f, g)->bounds(c) == Interval{0.5, 0.75});
    CHECK(min(f, g)->bounds(c) == Interval{0.25, 0.5});
    CHECK(add(f, g)->support() == support);
    CHECK_THROWS_AS(add(f, from_expr(Expr::parse("x1", 2), Box::parse("[0,1)x[0,1)"))), DimensionError);
}

TEST_CASE("combinator supports use box hulls") {
    const Box a = Box::parse("[0,1)");
    const Box b = Box::parse("[1/2,2)");
    CHECK(support_union(a, b) == Box::parse("[0,2)"));
    CHECK(support_intersection(a, b) == Box::parse("[1/2,1)"));
    const auto f = from_expr(Expr::parse("1", 1), a);
    const auto g = from_expr(Expr::parse("1", 1), b);
    CHECK(add(f, g)->support() == Box::parse("[0,2)"));
    CHECK(mul(f, g)->support() == Box::parse("[1/2,1)"));
}

TEST_CASE("restrict multiplies by the region indicator") {
    const auto one = from_expr(Expr::parse("3", 2), Box::parse("[-1,1]x[-1,1]"));
    const auto r = restrict(one, disk());
    CHECK(r->bounds(cell2(-0.25, 0.25, -0.25, 0.25)) == Interval{3.0, 3.0});
    CHECK(r->bounds(cell2(0.9, 1.0, 0.9, 1.0)) == Interval{0.0, 0.0});
    CHECK(r->bounds(cell2(0.5, 1.0, 0.0, 0.5)) == Interval{0.0, 3.0});
}

TEST_CASE("lipschitz composition checks its preconditions") {
    const auto f = from_expr(Expr::parse("x1 - 1/2", 1), Box::parse("[0,1)"));
    CHECK_THROWS_AS(lipschitz_compose(Expr::parse("x1 + 1", 1), f), PreconditionError);
    CHECK_THROWS_AS(lipschitz_compose(Expr::parse("x1 + x2", 2), f), DimensionError);
    CHECK_THROWS_AS(lipschitz_compose(Expr::parse("x1 / (x1 + 2)", 1), f), PreconditionError);
    CHECK_NOTHROW(lipschitz_compose(Expr::parse("x1 / (x1 + 2)", 1), f, Expr::parse("2 / (x1 + 2)^2", 1)));
    CHECK_THROWS_AS(lipschitz_compose(Expr::parse("x1 / (x1 + 2)", 1), f, Expr::parse("1 / x1", 1)),
                    PreconditionError);
    const auto sq = lipschitz_compose(Expr::parse("x1^2", 1), f);
    CHECK(sq->bounds(cell1(0.0, 0.25)).contains(Interval{1.0 / 16, 0.25}));
    CHECK(sq->bounds(cell1(2.0, 3.0)) == Interval{0.0, 0.0});
    const auto s = lipschitz_compose(Expr::parse("sin(x1)", 1), f);
    CHECK(s->bounds(cell1(0.75, 1.0)).contains(std::sin(0.4)));
}

TEST_CASE("permute_axes swaps coordinates") {
    const auto f = from_expr(Expr::parse("x1 - 10*x2", 2), Box::parse("[0,1)x[0,2)"));
    const std::size_t perm[] = {1, 0};
    const auto p = permute_axes(f, perm);
    CHECK(p->support() == Box::parse("[0,2)x[0,1)"));
    // p(y, x) = f(x, y): on [1.5,1.75) x [0.25,0.5), f = x - 10 y with x in the second slot.
    const Interval v = p->bounds(cell2(1.5, 1.75, 0.25, 0.5));
    CHECK(v.contains(Interval{0.5 - 17.5, 0.25 - 15.0}));
    CHECK(v == f->bounds(cell2(0.25, 0.5, 1.5, 1.75)));
    const std::size_t bad[] = {0, 0};
    CHECK_THROWS_AS(permute_axes(f, bad), PreconditionError);
    const std::size_t short_perm[] = {0};
    CHECK_THROWS_AS(permute_axes(f, short_perm), DimensionError);
}

TEST_CASE("isotonic flags propagate") {
    const auto f = from_expr(Expr::parse("x1", 1), Box::parse("[0,1)"));
    CHECK(add(f, f)->isotonic());
    CHECK(abs(f)->isotonic());
    CHECK(zero_oracle(1)->bounds(cell1(0.0, 1.0)) == Interval{0.0, 0.0});
}
