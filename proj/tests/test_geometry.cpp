#include "dyadint/errors.hpp"
#include "dyadint/geometry.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace dyadint;

namespace {

// Reference: does the cube (as [a,b) or [a,b]) meet the box, checked with
// exact rationals axis by axis.
bool brute_meets(const DyadicCube& c, const Box& box, Topology t) {
    for (std::size_t j = 0; j < box.dim(); ++j) {
        const DyadicRational a = c.lower(j);
        const DyadicRational b = c.upper(j);
        const DyadicRational& lo = box.lower(j);
        const DyadicRational& hi = box.upper(j);
        const bool lo_in = box.closure(j) != Closure::Open;
        const bool hi_in = box.closure(j) == Closure::Closed;
        // Largest lower end and smallest upper end of the intersection.
        DyadicRational L = a;
        bool L_in = true;
        if (lo > L || (lo == L && !lo_in)) {
            L = lo;
            L_in = lo_in;
        }
        DyadicRational U = b;
        bool U_in = t == Topology::Closed;
        if (hi < U || (hi == U && !hi_in)) {
            U = hi;
            U_in = hi_in;
        }
        if (!(L < U || (L == U && L_in && U_in))) {
            return false;
        }
    }
    return true;
}

std::vector<std::int64_t> corner(std::initializer_list<std::int64_t> v) { return v; }

} // namespace

TEST_CASE("cube order puts the last axis most significant") {
    std::vector<DyadicCube> cubes;
    for (auto c : {corner({1, 1}), corner({0, 1}), corner({1, 0}), corner({0, 0})}) {
        cubes.emplace_back(1, c);
    }
    std::sort(cubes.begin(), cubes.end());
    CHECK(cubes[0].to_string() == "k=1 (0,0)");
    CHECK(cubes[1].to_string() == "k=1 (1,0)");
    CHECK(cubes[2].to_string() == "k=1 (0,1)");
    CHECK(cubes[3].to_string() == "k=1 (1,1)");
}

TEST_CASE("children partition the parent in cube order") {
    const DyadicCube c(2, corner({-3, 5}));
    const auto kids = c.children();
    REQUIRE(kids.size() == 4);
    CHECK(std::is_sorted(kids.begin(), kids.end()));
    DyadicRational total(0);
    for (const auto& k : kids) {
        CHECK(k.parent() == c);
        CHECK(k.level() == 3);
        total = total + k.volume();
    }
    CHECK(total == c.volume());
    CHECK(kids[0].lower(0) == c.lower(0));
    CHECK(kids[3].upper(1) == c.upper(1));
}

TEST_CASE("parent floors negative corners") {
    const DyadicCube c(3, corner({-1}));
    CHECK(c.parent().corner(0) == -1);
    CHECK(DyadicCube(3, corner({-2})).parent().corner(0) == -1);
    CHECK(DyadicCube(3, corner({-3})).parent().corner(0) == -2);
}

TEST_CASE("cube geometry is exact") {
    const DyadicCube c(5, corner({3, -7, 0}));
    CHECK(c.volume() == DyadicRational::pow2(15));
    CHECK(c.volume_double() == std::ldexp(1.0, -15));
    CHECK(c.lower(1) == DyadicRational(-7) * DyadicRational::pow2(5));
    const Cell cell = c.cell();
    CHECK(cell.lo[0] == 3.0 / 32);
    CHECK(cell.hi[1] == -6.0 / 32);
}

TEST_CASE("box literals parse with every closure kind") {
    const Box b = Box::parse("[0,1)x[0.25,3/2^2]x(0,1)");
    REQUIRE(b.dim() == 3);
    CHECK(b.closure(0) == Closure::SemiClosed);
    CHECK(b.closure(1) == Closure::Closed);
    CHECK(b.closure(2) == Closure::Open);
    CHECK(b.upper(1) == DyadicRational::parse("0.75"));
    CHECK(b.volume() == DyadicRational::parse("0.5"));
    CHECK(Box::parse("[0,1)*[0,2)").volume() == DyadicRational(2));
    CHECK(Box::parse(b.to_string()) == b);
}

TEST_CASE("malformed box literals are rejected") {
    CHECK_THROWS_AS(Box::parse("(0,1]"), ParseError);
    CHECK_THROWS_AS(Box::parse("[0,1"), ParseError);
    CHECK_THROWS_AS(Box::parse("[0,0.1)"), ParseError);
    CHECK_THROWS_AS(Box::parse("[1,0)"), PreconditionError);
    CHECK_THROWS_AS(Box::parse(""), ParseError);
}

TEST_CASE("empty boxes") {
    CHECK(Box::parse("[0,0)").empty());
    CHECK_FALSE(Box::parse("[0,0]").empty());
    CHECK(Box::parse("[0,0]x[0,1)").volume() == DyadicRational(0));
}

TEST_CASE("surface area of rectangles") {
    CHECK(Box::parse("[0,1)x[0,1)").surface_area() == doctest::Approx(4.0));
    CHECK(Box::parse("[0,2)x[0,1)x[0,1)").surface_area() == doctest::Approx(10.0));
    CHECK(Box::parse("[0,3)").surface_area() == doctest::Approx(2.0));
}

TEST_CASE("relate distinguishes semiclosed and closed cubes at shared endpoints") {
    const Box unit = Box::parse("[0,1)");
    const DyadicCube left(2, corner({-1}));  // [-1/4, 0)
    const DyadicCube right(2, corner({4}));  // [1, 5/4)
    const DyadicCube inner(2, corner({3}));  // [3/4, 1)
    CHECK(unit.relate(left.cell(), Topology::SemiClosed) == Relation::Outside);
    CHECK(unit.relate(left.cell(), Topology::Closed) == Relation::Boundary);
    CHECK(unit.relate(right.cell(), Topology::SemiClosed) == Relation::Outside);
    CHECK(unit.relate(right.cell(), Topology::Closed) == Relation::Outside);
    CHECK(unit.relate(inner.cell(), Topology::SemiClosed) == Relation::Inside);
    CHECK(unit.relate(inner.cell(), Topology::Closed) == Relation::Boundary);

    const Box closed = Box::parse("[0,1]");
    CHECK(closed.relate(right.cell(), Topology::SemiClosed) == Relation::Boundary);
    CHECK(closed.relate(inner.cell(), Topology::Closed) == Relation::Inside);

    const Box open = Box::parse("(0,1)");
    const DyadicCube first(2, corner({0})); // [0, 1/4)
    CHECK(open.relate(first.cell(), Topology::SemiClosed) == Relation::Boundary);
}

TEST_CASE("cubes_intersecting matches brute force") {
    testsupport::Rng rng(3);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t dim = static_cast<std::size_t>(rng.integer(1, 2));
        std::string text;
        const char* opens[] = {"[", "("};
        for (std::size_t j = 0; j < dim; ++j) {
            const std::int64_t a = rng.integer(-12, 11);
            const std::int64_t b = rng.integer(a + 1, 12);
            const bool open = rng.integer(0, 3) == 0;
            const bool closed = !open && rng.coin();
            text += (j ? "x" : "");
            text += open ? opens[1] : opens[0];
            text += std::to_string(a) + "/2^3," + std::to_string(b) + "/2^3";
            text += open ? ")" : (closed ? "]" : ")");
        }
        const Box box = Box::parse(text);
        const int level = static_cast<int>(rng.integer(0, 4));
        for (Topology t : {Topology::SemiClosed, Topology::Closed}) {
            std::set<std::vector<std::int64_t>> got;
            std::vector<DyadicCube> ordered;
            for (const auto& c : cubes_intersecting(box, level, t)) {
                got.insert(std::vector<std::int64_t>(c.corners().begin(), c.corners().end()));
                ordered.push_back(c);
            }
            CHECK(std::is_sorted(ordered.begin(), ordered.end()));
            CHECK(got.size() == cubes_intersecting(box, level, t).size());
            std::set<std::vector<std::int64_t>> want;
            const std::int64_t lim = (std::int64_t{3} << level);
            std::vector<std::int64_t> c(dim, -lim);
            while (true) {
                const DyadicCube cube(level, c);
                if (brute_meets(cube, box, t)) {
                    want.insert(c);
                    CHECK(box.relate(cube.cell(), t) != Relation::Outside);
                } else {
                    CHECK(box.relate(cube.cell(), t) == Relation::Outside);
                }
                std::size_t j = 0;
                while (j < dim && ++c[j] > lim) {
                    c[j] = -lim;
                    ++j;
                }
                if (j == dim) {
                    break;
                }
            }
            CHECK_MESSAGE(got == want, "box " << text << " level " << level);
        }
    }
}

TEST_CASE("cube_containing uses the half-open convention") {
    std::vector<DyadicRational> p{DyadicRational(1), DyadicRational::parse("-0.25")};
    const DyadicCube c = cube_containing(p, 2);
    CHECK(c.corner(0) == 4);
    CHECK(c.corner(1) == -1);
}

TEST_CASE("clip returns the closure of the intersection") {
    const Box b = Box::parse("[0,3/4)x[0,1)");
    const Cell c = DyadicCube(1, corner({1, 0})).cell(); // [1/2,1) x [0,1/2)
    const Cell k = b.clip(c);
    CHECK(k.lo[0] == 0.5);
    CHECK(k.hi[0] == 0.75);
    CHECK(k.hi[1] == 0.5);
}

TEST_CASE("product and select rearrange axes") {
    const Box a = Box::parse("[0,1)");
    const Box b = Box::parse("[2,3]");
    const Box p = a.product(b);
    CHECK(p.to_string() == Box::parse("[0,1)x[2,3]").to_string());
    const std::size_t axes[] = {1, 0};
    CHECK(p.select(axes) == Box::parse("[2,3]x[0,1)"));
}

TEST_CASE("corner range limit is enforced") {
    CHECK_THROWS_AS(DyadicCube(1, corner({std::int64_t{1} << 53})), PreconditionError);
}
