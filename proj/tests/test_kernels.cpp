#include "dyadint/batch_eval.hpp"
#include "dyadint/dyadic_rational.hpp"
#include "dyadint/errors.hpp"
#include "dyadint/simd/kernels.hpp"
#include "support.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

using namespace dyadint;

namespace {

// Mixture of ordinary values and the awkward ones: signed zeros, subnormals,
// values near overflow, and exact ties for the rounding logic.
double awkward(testsupport::Rng& rng) {
    static const double specials[] = {
        0.0,
        -0.0,
        std::numeric_limits<double>::denorm_min(),
        -std::numeric_limits<double>::denorm_min(),
        std::numeric_limits<double>::min(),
        std::numeric_limits<double>::max(),
        -std::numeric_limits<double>::max(),
        1.0,
        -1.0,
        0.5,
        3.0,
        1e300,
        -1e300,
        1e-300,
        std::numbers::pi,
        1e9,
    };
    switch (rng.integer(0, 5)) {
    case 0:
        return specials[rng.integer(0, std::size(specials) - 1)];
    case 1:
        return rng.uniform(-1.0, 1.0) * std::ldexp(1.0, static_cast<int>(rng.integer(-1070, 1020)));
    case 2:
        return static_cast<double>(rng.integer(-64, 64)) / 8.0;
    default:
        return rng.uniform(-10.0, 10.0);
    }
}

struct Operands {
    std::vector<double> alo, ahi, blo, bhi;
};

Operands random_operands(testsupport::Rng& rng, std::size_t n) {
    Operands o;
    for (std::size_t i = 0; i < n; ++i) {
        double a = awkward(rng);
        double b = rng.coin() ? a : awkward(rng);
        double c = awkward(rng);
        double d = rng.coin() ? c : awkward(rng);
        o.alo.push_back(std::min(a, b));
        o.ahi.push_back(std::max(a, b));
        o.blo.push_back(std::min(c, d));
        o.bhi.push_back(std::max(c, d));
    }
    return o;
}

bool same_bits(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("active kernels honour the scalar override") {
    const auto& k = simd::active_kernels();
    const char* env = std::getenv("DYADINT_SIMD");
    if (env != nullptr && std::string(env) == "scalar") {
        CHECK(k.isa == simd::Isa::Scalar);
    } else if (simd::avx2_kernels() != nullptr) {
        CHECK(k.isa == simd::Isa::Avx2);
    }
    CHECK(simd::scalar_kernels().name == "scalar");
}

TEST_CASE("vector kernels agree with the scalar reference bit for bit") {
    const simd::KernelTable* v = simd::avx2_kernels();
    if (v == nullptr) {
        MESSAGE("AVX2 kernels unavailable on this machine; nothing to compare");
        return;
    }
    const simd::KernelTable& s = simd::scalar_kernels();
    testsupport::Rng rng(17);
    // Odd length exercises the vector tail.
    const std::size_t n = 4099;
    for (int round = 0; round < 8; ++round) {
        const Operands o = random_operands(rng, n);
        std::vector<double> slo(n), shi(n), vlo(n), vhi(n);
        const auto binaries = {std::pair{"add", &simd::KernelTable::add}, std::pair{"sub", &simd::KernelTable::sub},
                               std::pair{"mul", &simd::KernelTable::mul}, std::pair{"min", &simd::KernelTable::min},
                               std::pair{"max", &simd::KernelTable::max}};
        for (const auto& [name, fn] : binaries) {
            (s.*fn)(o.alo.data(), o.ahi.data(), o.blo.data(), o.bhi.data(), slo.data(), shi.data(), n);
            (v->*fn)(o.alo.data(), o.ahi.data(), o.blo.data(), o.bhi.data(), vlo.data(), vhi.data(), n);
            CHECK_MESSAGE(same_bits(slo, vlo), name);
            CHECK_MESSAGE(same_bits(shi, vhi), name);
        }
        const auto unaries = {std::pair{"neg", &simd::KernelTable::neg}, std::pair{"abs", &simd::KernelTable::abs},
                              std::pair{"sin", &simd::KernelTable::sin}, std::pair{"cos", &simd::KernelTable::cos},
                              std::pair{"exp", &simd::KernelTable::exp}};
        for (const auto& [name, fn] : unaries) {
            (s.*fn)(o.alo.data(), o.ahi.data(), slo.data(), shi.data(), n);
            (v->*fn)(o.alo.data(), o.ahi.data(), vlo.data(), vhi.data(), n);
            CHECK_MESSAGE(same_bits(slo, vlo), name);
            CHECK_MESSAGE(same_bits(shi, vhi), name);
        }
        for (unsigned e = 0; e <= 5; ++e) {
            s.pow(o.alo.data(), o.ahi.data(), e, slo.data(), shi.data(), n);
            v->pow(o.alo.data(), o.ahi.data(), e, vlo.data(), vhi.data(), n);
            CHECK_MESSAGE(same_bits(slo, vlo), "pow " << e);
            CHECK_MESSAGE(same_bits(shi, vhi), "pow " << e);
        }
        std::vector<std::uint8_t> sf(n, 0), vf(n, 0);
        s.div(o.alo.data(), o.ahi.data(), o.blo.data(), o.bhi.data(), slo.data(), shi.data(), sf.data(), n);
        v->div(o.alo.data(), o.ahi.data(), o.blo.data(), o.bhi.data(), vlo.data(), vhi.data(), vf.data(), n);
        CHECK(same_bits(slo, vlo));
        CHECK(same_bits(shi, vhi));
        CHECK(sf == vf);
        std::fill(sf.begin(), sf.end(), 0);
        std::fill(vf.begin(), vf.end(), 0);
        s.sqrt(o.alo.data(), o.ahi.data(), slo.data(), shi.data(), sf.data(), n);
        v->sqrt(o.alo.data(), o.ahi.data(), vlo.data(), vhi.data(), vf.data(), n);
        CHECK(same_bits(slo, vlo));
        CHECK(same_bits(shi, vhi));
        CHECK(sf == vf);

        for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7}, n}) {
            const auto a = s.sum(o.alo.data(), len);
            const auto b = v->sum(o.alo.data(), len);
            CHECK(std::bit_cast<std::uint64_t>(a.sum) == std::bit_cast<std::uint64_t>(b.sum));
            CHECK(std::bit_cast<std::uint64_t>(a.abs_sum) == std::bit_cast<std::uint64_t>(b.abs_sum));
        }
    }
}

TEST_CASE("compensated sum is close to the exact sum") {
    testsupport::Rng rng(23);
    for (const simd::KernelTable* k : {&simd::scalar_kernels(), simd::avx2_kernels()}) {
        if (k == nullptr) {
            continue;
        }
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3000));
            std::vector<double> x(n);
            DyadicRational exact(0);
            double abs_sum = 0.0;
            for (auto& v : x) {
                v = rng.uniform(-1.0, 1.0) * std::ldexp(1.0, static_cast<int>(rng.integer(-40, 10)));
                exact = exact + DyadicRational::from_double(v);
                abs_sum += std::fabs(v);
            }
            const auto r = k->sum(x.data(), n);
            const double u = std::numeric_limits<double>::epsilon() / 2;
            const double bound = (4 * u + 8 * (n + 1) * u * u) * r.abs_sum * 1.0000001;
            const double err = std::fabs((DyadicRational::from_double(r.sum) - exact).to_double());
            CHECK(err <= bound);
            CHECK(r.abs_sum == doctest::Approx(abs_sum));
        }
    }
}

TEST_CASE("cancellation is recovered by the compensation") {
    const std::vector<double> x{1e16, 1.0, -1e16, 1.0};
    CHECK(simd::scalar_kernels().sum(x.data(), x.size()).sum == 2.0);
    if (const auto* v = simd::avx2_kernels()) {
        CHECK(v->sum(x.data(), x.size()).sum == 2.0);
    }
}

TEST_CASE("batch evaluation equals per-box interval evaluation") {
    testsupport::Rng rng(29);
    std::vector<const simd::KernelTable*> tables{&simd::scalar_kernels()};
    if (simd::avx2_kernels() != nullptr) {
        tables.push_back(simd::avx2_kernels());
    }
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = static_cast<std::size_t>(rng.integer(1, 3));
        std::string text = testsupport::random_expr(rng, dim, 4);
        if (trial % 5 == 0) {
            text = "(" + text + ") / (x1 + 1/2)";
        }
        const Expr e = Expr::parse(text, dim);
        const std::size_t n = static_cast<std::size_t>(rng.integer(1, 700));
        BoxBatch boxes(dim, n);
        std::vector<Cell> cells(n);
        for (std::size_t i = 0; i < n; ++i) {
            Cell c;
            c.dim = static_cast<std::uint8_t>(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                const double a = rng.uniform(-1.0, 1.0);
                c.lo[j] = a;
                c.hi[j] = a + rng.uniform(0.0, 0.3);
            }
            cells[i] = c;
            boxes.set(i, c);
        }
        for (const auto* k : tables) {
            BatchEvaluator be(e, k);
            std::vector<Interval> out(n);
            std::vector<std::uint8_t> flags(n);
            be.evaluate(boxes, out, flags);
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<Interval> b(dim);
                for (std::size_t j = 0; j < dim; ++j) {
                    b[j] = {cells[i].lo[j], cells[i].hi[j]};
                }
                try {
                    const Interval want = e.eval_interval(b);
                    CHECK(flags[i] == 0);
                    CHECK(std::bit_cast<std::uint64_t>(out[i].lo) == std::bit_cast<std::uint64_t>(want.lo));
                    CHECK(std::bit_cast<std::uint64_t>(out[i].hi) == std::bit_cast<std::uint64_t>(want.hi));
                } catch (const DomainError&) {
                    CHECK((flags[i] & kFlagDomain) != 0);
                }
            }
        }
    }
}

TEST_CASE("batch evaluator checks its arguments") {
    const Expr e = Expr::parse("x1 + x2", 2);
    BatchEvaluator be(e);
    BoxBatch wrong(1, 4);
    std::vector<Interval> out(4);
    std::vector<std::uint8_t> flags(4);
    CHECK_THROWS_AS(be.evaluate(wrong, out, flags), DimensionError);
    BoxBatch right(2, 4);
    std::vector<Interval> small(2);
    CHECK_THROWS_AS(be.evaluate(right, small, flags), PreconditionError);
}
