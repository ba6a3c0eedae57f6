#include "dyadint/calculus.hpp"

#include "dyadint/errors.hpp"
#include "dyadint/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace dyadint {

namespace {

std::vector<Interval> cell_intervals(const Cell& c) {
    std::vector<Interval> v(c.dim);
    for (std::size_t j = 0; j < c.dim; ++j) {
        v[j] = {c.lo[j], c.hi[j]};
    }
    return v;
}

// y ↦ f(x, y) · [u <= y <= v] for all x in the outer cell at once: the
// enclosure over a y-cell covers every x of the outer cell and every
// admissible u(x), v(x).
class SliceOracle final : public BoundOracle {
public:
    SliceOracle(const BoundOracle& f, const Cell& outer, Interval u, Interval v)
        : BoundOracle(1, support_box(u, v)), f_(f), outer_(outer), u_(u), v_(v) {}

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Cell> core;
        std::vector<std::size_t> core_idx;
        std::vector<Cell> edge;
        std::vector<std::size_t> edge_idx;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const double c = cells[i].lo[0];
            const double d = cells[i].hi[0];
            const bool disjoint = topology == Topology::SemiClosed ? (d <= u_.lo || c > v_.hi)
                                                                  : (d < u_.lo || c > v_.hi);
            if (disjoint) {
                out[i] = {0.0, 0.0};
                continue;
            }
            if (c >= u_.hi && d <= v_.lo) {
                core.push_back(lift(c, d));
                core_idx.push_back(i);
            } else {
                edge.push_back(lift(std::max(c, u_.lo), std::min(d, v_.hi)));
                edge_idx.push_back(i);
            }
        }
        if (!core.empty()) {
            std::vector<Interval> r(core.size());
            f_.bounds(core, topology, r);
            for (std::size_t t = 0; t < core.size(); ++t) {
                out[core_idx[t]] = r[t];
            }
        }
        if (!edge.empty()) {
            std::vector<Interval> r(edge.size());
            f_.bounds(edge, Topology::Closed, r);
            for (std::size_t t = 0; t < edge.size(); ++t) {
                out[edge_idx[t]] = hull(r[t], 0.0);
            }
        }
    }

private:
    static Box support_box(Interval u, Interval v) {
        const double lo[1] = {u.lo};
        const double hi[1] = {v.hi};
        return Box::from_doubles(lo, hi, Closure::Closed);
    }

    Cell lift(double y0, double y1) const {
        Cell c = outer_;
        const std::size_t m = outer_.dim;
        c.dim = static_cast<std::uint8_t>(m + 1);
        c.lo[m] = y0;
        c.hi[m] = y1;
        return c;
    }

    const BoundOracle& f_;
    Cell outer_;
    Interval u_;
    Interval v_;
};

// Checks u <= v on the closed outer box by interval evaluation of u - v on
// successively finer cube covers.
void require_ordered(const Expr& u, const Expr& v, const Box& outer) {
    const Expr diff = u - v;
    constexpr std::uint64_t kMaxCheckCubes = 4096;
    for (int k = 0; k <= kDefaultLevelCap; ++k) {
        CubeRange range(outer, k, Topology::Closed);
        if (k > 0 && range.size() > kMaxCheckCubes) {
            break;
        }
        bool settled = true;
        for (const auto& cube : range) {
            const Cell x = outer.clip(cube.cell());
            const Interval d = diff.eval_interval(cell_intervals(x));
            if (d.lo > 0.0) {
                throw PreconditionError("lower limit exceeds upper limit over " + describe(x, Topology::Closed));
            }
            if (d.hi > 0.0) {
                settled = false;
            }
        }
        if (settled) {
            return;
        }
    }
    throw PreconditionError("could not verify lower limit <= upper limit over " + outer.to_string());
}

class ParameterIntegralOracle final : public BoundOracle {
public:
    ParameterIntegralOracle(OraclePtr f, Expr u, Expr v, Box outer, double inner_epsilon, int extra_levels)
        : BoundOracle(outer.dim(), outer), f_(std::move(f)), u_(std::move(u)), v_(std::move(v)),
          inner_epsilon_(inner_epsilon), extra_levels_(extra_levels) {}

    bool isotonic() const override { return false; }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out[i] = one(cells[i], topology);
        }
    }

private:
    Interval one(const Cell& cell, Topology topology) const {
        const Relation rel = support().relate(cell, topology);
        if (rel == Relation::Outside) {
            return {0.0, 0.0};
        }
        const Cell x = support().clip(cell);
        const auto xs = cell_intervals(x);
        Interval u;
        Interval v;
        try {
            u = u_.eval_interval(xs);
            v = v_.eval_interval(xs);
        } catch (const DomainError& e) {
            throw OracleError(std::string("integration limits: ") + e.what(), cell, topology);
        }
        if (!u.is_finite() || !v.is_finite()) {
            throw OracleError("integration limits are not finite", cell, topology);
        }
        if (u.lo > v.hi) {
            throw PreconditionError("lower limit exceeds upper limit over " + describe(cell, topology));
        }
        if (u.lo == v.hi) {
            return {0.0, 0.0};
        }
        const double width = cell.hi[0] - cell.lo[0];
        const int level = width > 0.0 ? std::max(0, -std::ilogb(width)) : kDefaultLevelCap;
        IntegrateOptions opt;
        opt.epsilon = inner_epsilon_;
        opt.k_max = std::min(level + extra_levels_, kDefaultLevelCap);
        opt.strategy = Strategy::Adaptive;
        opt.threads = 1;
        const SliceOracle slice(*f_, x, u, v);
        const Interval r = integrate(slice, opt).enclosure();
        return rel == Relation::Boundary ? hull(r, 0.0) : r;
    }

    OraclePtr f_;
    Expr u_;
    Expr v_;
    double inner_epsilon_;
    int extra_levels_;
};

void check_limits(const BoundOracle& f, const Expr& u, const Expr& v, const Box& outer) {
    if (f.dim() < 2) {
        throw DimensionError("parameter integrals need at least two axes");
    }
    if (outer.dim() + 1 != f.dim()) {
        throw DimensionError("outer box must have one axis fewer than the integrand");
    }
    if (u.dim() != outer.dim() || v.dim() != outer.dim()) {
        throw DimensionError("integration limits must use the outer axes only");
    }
}

} // namespace

OraclePtr parameter_integral(const OraclePtr& f, const Expr& u, const Expr& v, const Box& outer,
                             double inner_epsilon, int extra_levels) {
    check_limits(*f, u, v, outer);
    if (!(inner_epsilon > 0.0)) {
        throw PreconditionError("inner epsilon must be positive");
    }
    if (extra_levels < 0) {
        throw PreconditionError("extra levels must be nonnegative");
    }
    require_ordered(u, v, outer);
    return std::make_shared<ParameterIntegralOracle>(f, u, v, outer, inner_epsilon, extra_levels);
}

OraclePtr parameter_integral(const Expr& f, const Expr& u, const Expr& v, const Box& outer, double inner_epsilon) {
    if (u.dim() != outer.dim() || v.dim() != outer.dim()) {
        throw DimensionError("integration limits must use the outer axes only");
    }
    const auto xs = cell_intervals(outer.closure_cell());
    const Interval ur = u.eval_interval(xs);
    const Interval vr = v.eval_interval(xs);
    const double lo[1] = {std::min(ur.lo, vr.lo)};
    const double hi[1] = {std::max(ur.hi, vr.hi)};
    std::vector<double> olo(outer.dim());
    std::vector<double> ohi(outer.dim());
    for (std::size_t j = 0; j < outer.dim(); ++j) {
        olo[j] = outer.lower_d(j);
        ohi[j] = outer.upper_d(j);
    }
    const Box support = Box::from_doubles(olo, ohi, Closure::Closed).product(Box::from_doubles(lo, hi, Closure::Closed));
    return parameter_integral(from_expr(f, support), u, v, outer, inner_epsilon);
}

RepeatedIntegralPlan plan_for_box(const OraclePtr& f, const Box& box) {
    if (box.dim() < 2 || box.dim() != f->dim()) {
        throw DimensionError("repeated integration needs a box of the integrand's dimension >= 2");
    }
    const std::size_t m = box.dim();
    std::vector<std::size_t> axes(m - 1);
    std::iota(axes.begin(), axes.end(), std::size_t{0});
    RepeatedIntegralPlan plan;
    plan.f = f;
    plan.outer = box.select(axes);
    plan.lower = Expr::constant(box.lower_d(m - 1), m - 1);
    plan.upper = Expr::constant(box.upper_d(m - 1), m - 1);
    return plan;
}

DyadicSumReport repeated_integral(const RepeatedIntegralPlan& plan) {
    if (!plan.f) {
        throw PreconditionError("repeated integral plan has no integrand");
    }
    double inner = plan.inner_epsilon;
    if (!(inner > 0.0)) {
        const double vol = plan.outer.volume().to_double();
        inner = plan.outer_epsilon / (4.0 * std::max(vol, 1.0));
    }
    const OraclePtr phi = parameter_integral(plan.f, plan.lower, plan.upper, plan.outer, inner, plan.extra_levels);
    IntegrateOptions opt;
    opt.epsilon = plan.outer_epsilon;
    opt.k_max = plan.k_max;
    opt.strategy = plan.strategy;
    opt.threads = plan.threads;
    return integrate(*phi, opt);
}

FubiniReport fubini_check(const Expr& f, const Region& region, const std::optional<Slice>& slice,
                          const FubiniOptions& options) {
    const std::size_t m = region.dim();
    if (m < 2) {
        throw DimensionError("fubini-check needs at least two axes");
    }
    if (f.dim() != m) {
        throw DimensionError("expression and region differ in dimension");
    }
    const Box& bbox = region.bbox();
    const OraclePtr base = from_expr(f, bbox);
    const OraclePtr direct_f = region.constraints().empty() ? base : restrict(base, region);

    IntegrateOptions opt;
    opt.epsilon = options.epsilon;
    opt.k_max = options.k_max;
    opt.strategy = options.strategy;
    opt.threads = options.threads;

    FubiniReport report;
    report.direct = integrate(*direct_f, opt);

    auto run_plan = [&](RepeatedIntegralPlan plan) {
        plan.outer_epsilon = options.epsilon;
        plan.k_max = options.k_max < 0 ? std::min(default_k_max(m - 1), 16) : options.k_max;
        plan.strategy = options.strategy;
        plan.threads = options.threads;
        return repeated_integral(plan);
    };

    RepeatedIntegralPlan plan = plan_for_box(direct_f, bbox);
    if (slice) {
        plan.f = base;
        plan.lower = slice->lower;
        plan.upper = slice->upper;
    }
    report.repeated = run_plan(plan);
    report.overlap = report.direct.enclosure().overlaps(report.repeated.enclosure());
    const bool direct_ok = report.direct.verdict.kind == VerdictKind::Integrable;
    report.critical = direct_ok && report.repeated.verdict.kind == VerdictKind::Integrable && !report.overlap;

    if (options.swap) {
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::swap(perm[m - 2], perm[m - 1]);
        const OraclePtr swapped = permute_axes(direct_f, perm);
        report.swapped = run_plan(plan_for_box(swapped, bbox.select(perm)));
        report.swapped_overlap = report.direct.enclosure().overlaps(report.swapped->enclosure());
        if (direct_ok && report.swapped->verdict.kind == VerdictKind::Integrable && !report.swapped_overlap) {
            report.critical = true;
        }
    }
    return report;
}

NLCheck newton_leibniz_check(const Expr& g, const Expr& F, double a, double b, double epsilon, int k_max,
                             unsigned threads) {
    if (g.dim() != 1 || F.dim() != 1) {
        throw DimensionError("Newton-Leibniz check works in one variable");
    }
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw PreconditionError("need finite a < b");
    }
    NLCheck out;
    out.g = g;
    out.F = F;
    out.a = a;
    out.b = b;

    const double lo[1] = {a};
    const double hi[1] = {b};
    IntegrateOptions opt;
    opt.epsilon = epsilon;
    opt.k_max = k_max;
    opt.threads = threads;
    out.report = integrate(*from_expr(g, Box::from_doubles(lo, hi)), opt);
    out.integral = out.report.enclosure();

    const Interval fa = F.eval_interval(std::vector<Interval>{Interval::point(a)});
    const Interval fb = F.eval_interval(std::vector<Interval>{Interval::point(b)});
    out.nl_value = ia::sub(fb, fa);
    out.contained = out.nl_value.overlaps(out.integral);

    // Spot-check F' against g at Chebyshev points of (a, b).
    constexpr int kPoints = 17;
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    for (int i = 0; i < kPoints; ++i) {
        const double t = mid + rad * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * kPoints));
        const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(t));
        try {
            const double tp[1] = {t + h};
            const double tm[1] = {t - h};
            const double tt[1] = {t};
            const double d = (F.eval_point(tp) - F.eval_point(tm)) / (2.0 * h);
            const double gv = g.eval_point(tt);
            if (std::abs(d - gv) > 1e-4 * std::max(1.0, std::abs(gv))) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "F'(" << t << ") ~ " << d << " differs from g = " << gv;
                out.warnings.push_back(msg.str());
            }
        } catch (const DomainError& e) {
            out.warnings.push_back(std::string("derivative check skipped: ") + e.what());
        }
    }
    return out;
}

} // namespace dyadint
