#include "dyadint/integrator.hpp"

#include "dyadint/errors.hpp"
#include "dyadint/parallel.hpp"
#include "dyadint/rounding.hpp"
#include "dyadint/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dyadint {

std::string to_string(Strategy s) { return s == Strategy::Uniform ? "uniform" : "adaptive"; }

std::string to_string(VerdictKind v) {
    switch (v) {
    case VerdictKind::Integrable:
        return "Integrable";
    case VerdictKind::Undecided:
        return "Undecided";
    case VerdictKind::NotConverging:
        return "NotConverging";
    }
    return "Undecided";
}

Interval SumRow::enclosure() const { return {rounding::sub_down(lower, pad), rounding::add_up(upper, pad)}; }

int default_k_max(std::size_t dim) {
    switch (dim) {
    case 1:
        return 24;
    case 2:
        return 14;
    case 3:
        return 9;
    default:
        return std::max(4, static_cast<int>(27 / std::max<std::size_t>(dim, 1)));
    }
}

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

// Bound on |computed - exact| for the canonical compensated sum of n terms
// whose absolute values add up to abs_sum.
double sum_pad(std::size_t n, double abs_sum) {
    const double c = 4.0 * kUnit + 8.0 * (static_cast<double>(n) + 1.0) * kUnit * kUnit;
    return rounding::mul_up(c, abs_sum);
}

struct Sums {
    double lower = 0.0;
    double upper = 0.0;
    double pad = 0.0;
};

Sums reduce(const std::vector<double>& lo_terms, const std::vector<double>& hi_terms) {
    const auto& kern = simd::active_kernels();
    const auto l = kern.sum(lo_terms.data(), lo_terms.size());
    const auto u = kern.sum(hi_terms.data(), hi_terms.size());
    return {l.sum, u.sum, sum_pad(lo_terms.size(), std::max(l.abs_sum, u.abs_sum))};
}

// Cells are handed to the oracle in blocks so its temporaries stay small.
constexpr std::size_t kEvalBlock = 4096;

void evaluate(const BoundOracle& f, const std::vector<DyadicCube>& cubes, Topology topology, unsigned threads,
              std::vector<Interval>& out) {
    out.resize(cubes.size());
    parallel_chunks(cubes.size(), threads, [&](std::size_t b, std::size_t e) {
        std::vector<Cell> cells(std::min(kEvalBlock, e - b));
        for (std::size_t start = b; start < e; start += kEvalBlock) {
            const std::size_t n = std::min(kEvalBlock, e - start);
            for (std::size_t i = 0; i < n; ++i) {
                cells[i] = cubes[start + i].cell();
            }
            f.bounds(std::span<const Cell>(cells).first(n), topology, std::span<Interval>(out).subspan(start, n));
        }
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out[i].is_finite() || !(out[i].lo <= out[i].hi)) {
            throw OracleError("oracle returned an invalid enclosure " + out[i].to_string(), cubes[i].cell(), topology);
        }
    }
}

std::vector<DyadicCube> initial_cubes(const BoundOracle& f, Topology topology, std::uint64_t max_cubes) {
    std::vector<DyadicCube> out;
    if (f.support().empty()) {
        return out;
    }
    CubeRange range(f.support(), 0, topology);
    if (range.size() > max_cubes) {
        throw PreconditionError("support needs " + std::to_string(range.size()) +
                                " level-0 cubes, above the cube budget");
    }
    out.reserve(range.size());
    for (const auto& c : range) {
        out.push_back(c);
    }
    return out;
}

bool stalled(const std::vector<SumRow>& rows) {
    if (rows.size() < 3) {
        return false;
    }
    const auto n = rows.size();
    return rows[n - 1].gap() == rows[n - 2].gap() && rows[n - 2].gap() == rows[n - 3].gap();
}

} // namespace

LevelSums dyadic_sums(const BoundOracle& f, int k, Topology topology, unsigned threads, std::uint64_t max_cubes,
                      int level_cap) {
    if (k < 0 || k > level_cap) {
        throw PreconditionError("level " + std::to_string(k) + " outside [0, " + std::to_string(level_cap) + "]");
    }
    LevelSums result;
    if (f.support().empty()) {
        return result;
    }
    CubeRange range(f.support(), k, topology);
    if (range.size() > max_cubes) {
        throw PreconditionError("level " + std::to_string(k) + " needs " + std::to_string(range.size()) +
                                " cubes, above the cube budget");
    }
    std::vector<DyadicCube> cubes;
    cubes.reserve(range.size());
    for (const auto& c : range) {
        cubes.push_back(c);
    }
    std::vector<Interval> b;
    evaluate(f, cubes, topology, threads, b);
    const double vol = cubes.empty() ? 0.0 : cubes.front().volume_double();
    std::vector<double> lo(b.size());
    std::vector<double> hi(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        lo[i] = b[i].lo * vol;
        hi[i] = b[i].hi * vol;
    }
    const Sums s = reduce(lo, hi);
    result.lower = s.lower;
    result.upper = s.upper;
    result.pad = s.pad;
    result.cubes = cubes.size();
    return result;
}

DyadicSumReport integrate(const BoundOracle& f, const IntegrateOptions& options) {
    if (!(options.epsilon > 0.0) || !std::isfinite(options.epsilon)) {
        throw PreconditionError("epsilon must be positive and finite");
    }
    const int k_max = options.k_max < 0 ? default_k_max(f.dim()) : options.k_max;
    if (k_max > options.level_cap) {
        throw PreconditionError("k_max " + std::to_string(k_max) + " exceeds the level cap " +
                                std::to_string(options.level_cap));
    }

    DyadicSumReport report;
    report.dim = f.dim();
    report.strategy = options.strategy;
    report.topology = options.topology;
    report.epsilon = options.epsilon;
    report.k_max = k_max;

    const bool isotonic = f.isotonic();
    const bool adaptive = options.strategy == Strategy::Adaptive;

    std::vector<DyadicCube> candidates = initial_cubes(f, options.topology, options.max_cubes);
    std::vector<Interval> parent_bounds;
    // Threshold on hi - lo below which the adaptive strategy stops refining a
    // cube: gaps then add up to at most epsilon over the level-0 cover.
    const double tau = options.epsilon / std::max<double>(1.0, static_cast<double>(candidates.size()));

    std::vector<std::size_t> active; // indices into candidates
    std::vector<Interval> active_bounds;
    std::vector<StepPiece> settled_steps;
    // Summands in canonical order: every settled cube in the order it was
    // settled, then the active cubes of the current level. The settled
    // prefix persists across levels.
    std::vector<double> lo_terms;
    std::vector<double> hi_terms;
    std::size_t settled = 0;

    // Buffers reused from level to level.
    std::vector<Interval> b;
    std::vector<DyadicCube> next;
    std::vector<Interval> next_parent;
    std::vector<std::size_t> order;

    auto finish = [&](VerdictKind kind, std::string note) {
        Verdict v;
        v.kind = kind;
        v.note = std::move(note);
        if (report.rows.empty()) {
            v.enclosure = {0.0, 0.0};
            v.level = -1;
        } else {
            const SumRow& r = report.rows.back();
            v.enclosure = r.enclosure();
            v.level = r.k;
            v.gap = r.gap();
            report.pad = r.pad;
        }
        report.verdict = std::move(v);
        if (options.keep_steps) {
            report.steps = settled_steps;
            for (std::size_t i = 0; i < active.size(); ++i) {
                report.steps.push_back({candidates[active[i]], active_bounds[i]});
            }
            std::sort(report.steps.begin(), report.steps.end(),
                      [](const StepPiece& a, const StepPiece& c) { return a.cube < c.cube; });
        }
        return report;
    };

    for (int k = 0;; ++k) {
        evaluate(f, candidates, options.topology, options.threads, b);
        if (!isotonic && !parent_bounds.empty()) {
            for (std::size_t i = 0; i < b.size(); ++i) {
                Interval cut;
                if (!intersect(b[i], parent_bounds[i], cut)) {
                    throw SoundnessError("enclosure of " + candidates[i].to_string() + " " + b[i].to_string() +
                                         " misses its parent enclosure " + parent_bounds[i].to_string());
                }
                b[i] = cut;
            }
        }

        active.clear();
        active_bounds.clear();
        active.reserve(b.size());
        active_bounds.reserve(b.size());
        lo_terms.resize(settled);
        hi_terms.resize(settled);
        lo_terms.reserve(settled + b.size());
        hi_terms.reserve(settled + b.size());
        const double vol = candidates.empty() ? 0.0 : candidates.front().volume_double();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Interval& e = b[i];
            if (e.lo == 0.0 && e.hi == 0.0) {
                continue;
            }
            if (e.is_point() || (adaptive && e.width() <= tau)) {
                lo_terms.push_back(e.lo * vol);
                hi_terms.push_back(e.hi * vol);
                if (options.keep_steps) {
                    settled_steps.push_back({candidates[i], e});
                }
                continue;
            }
            active.push_back(i);
            active_bounds.push_back(e);
        }
        settled = lo_terms.size();
        for (const auto& e : active_bounds) {
            lo_terms.push_back(e.lo * vol);
            hi_terms.push_back(e.hi * vol);
        }
        const Sums s = reduce(lo_terms, hi_terms);
        SumRow row{k, s.lower, s.upper, static_cast<std::uint64_t>(candidates.size()), s.pad};
        report.rows.push_back(row);

        const Interval enc = row.enclosure();
        if (rounding::sub_up(enc.hi, enc.lo) <= options.epsilon) {
            return finish(VerdictKind::Integrable, "");
        }
        if (options.stop && options.stop(row)) {
            return finish(VerdictKind::Undecided, "stopped by caller");
        }
        if (options.detect_stall && f.indicator_like() && stalled(report.rows)) {
            return finish(VerdictKind::NotConverging, "gap unchanged for three consecutive levels");
        }
        if (active.empty()) {
            return finish(VerdictKind::Undecided, "rounding pad exceeds epsilon");
        }
        if (k >= k_max) {
            return finish(VerdictKind::Undecided, "k_max reached");
        }
        const std::uint64_t fan = std::uint64_t{1} << f.dim();
        if (static_cast<std::uint64_t>(active.size()) * fan > options.max_cubes) {
            return finish(VerdictKind::Undecided, "cube budget exhausted");
        }

        // Refine every active cube, keeping children that meet the support.
        // Children of a cube inside the support are inside it too.
        next.clear();
        next_parent.clear();
        next.reserve(active.size() * fan);
        next_parent.reserve(active.size() * fan);
        for (std::size_t i = 0; i < active.size(); ++i) {
            const DyadicCube& parent = candidates[active[i]];
            const bool inside = f.support().relate(parent.cell(), options.topology) == Relation::Inside;
            for (std::size_t mask = 0; mask < fan; ++mask) {
                const DyadicCube child = parent.child(mask);
                if (!inside && f.support().relate(child.cell(), options.topology) == Relation::Outside) {
                    continue;
                }
                next.push_back(child);
                next_parent.push_back(active_bounds[i]);
            }
        }
        if (f.dim() > 1) {
            order.resize(next.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return next[a] < next[c]; });
            candidates.resize(next.size());
            parent_bounds.resize(next.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                candidates[i] = next[order[i]];
                parent_bounds[i] = next_parent[order[i]];
            }
        } else {
            candidates.swap(next);
            parent_bounds.swap(next_parent);
        }
    }
}

DyadicSumReport jordan_measure(const Region& region, IntegrateOptions options) {
    return integrate(*indicator(region), options);
}

VerySmallResult is_very_small(const Region& region, double epsilon, int k_max, unsigned threads) {
    if (!(epsilon > 0.0)) {
        throw PreconditionError("epsilon must be positive");
    }
    IntegrateOptions opt;
    opt.strategy = Strategy::Uniform;
    opt.epsilon = epsilon;
    opt.k_max = k_max;
    opt.threads = threads;
    opt.stop = [epsilon](const SumRow& row) { return rounding::add_up(row.upper, row.pad) <= epsilon; };
    VerySmallResult r;
    r.report = jordan_measure(region, opt);
    if (!r.report.rows.empty()) {
        const SumRow& last = r.report.rows.back();
        r.covering_volume = last.upper;
        if (rounding::add_up(last.upper, last.pad) <= epsilon) {
            r.very_small = true;
            r.witness_level = last.k;
        }
    } else {
        // Empty bounding box: covered by nothing.
        r.very_small = true;
        r.witness_level = 0;
    }
    return r;
}

AdditivityReport additivity_check(const OraclePtr& f, const Region& r1, const Region& r2, double epsilon, int k_max,
                                  unsigned threads) {
    if (r1.dim() != f->dim() || r2.dim() != f->dim()) {
        throw DimensionError("regions and oracle differ in dimension");
    }
    AdditivityReport out;
    out.overlap = is_very_small(r1.intersect(r2), epsilon, k_max, threads);
    if (!out.overlap.very_small) {
        throw PreconditionError("regions overlap in a set that is not very small (covering volume " +
                                std::to_string(out.overlap.covering_volume) + ")");
    }
    IntegrateOptions opt;
    opt.epsilon = epsilon;
    opt.k_max = k_max;
    opt.threads = threads;
    out.first = integrate(*restrict(f, r1), opt);
    out.second = integrate(*restrict(f, r2), opt);
    out.united = integrate(*mul(f, max(indicator(r1), indicator(r2))), opt);
    out.sum = ia::add(out.first.enclosure(), out.second.enclosure());
    out.consistent = out.united.enclosure().overlaps(out.sum);
    return out;
}

std::size_t monotone_violations(const DyadicSumReport& report) {
    std::size_t bad = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const SumRow& a = report.rows[i - 1];
        const SumRow& b = report.rows[i];
        const double slack = a.pad + b.pad;
        if (b.lower < a.lower - slack || b.upper > a.upper + slack || b.lower > b.upper + b.pad) {
            ++bad;
        }
    }
    return bad;
}

} // namespace dyadint
