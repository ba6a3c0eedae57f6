#include "dyadint/classical.hpp"

#include "dyadint/errors.hpp"
#include "dyadint/parallel.hpp"
#include "dyadint/rounding.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace dyadint {

using rounding::add_down;
using rounding::add_up;
using rounding::mul_down;
using rounding::mul_up;
using rounding::sub_down;
using rounding::sub_up;

Partition::Partition(std::vector<std::vector<double>> cuts) : cuts_(std::move(cuts)) {
    if (cuts_.empty() || cuts_.size() > kMaxDim) {
        throw DimensionError("partition needs between 1 and " + std::to_string(kMaxDim) + " axes");
    }
    for (std::size_t j = 0; j < cuts_.size(); ++j) {
        const auto& c = cuts_[j];
        if (c.size() < 2) {
            throw PreconditionError("partition axis " + std::to_string(j + 1) + " needs at least two cut points");
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!std::isfinite(c[i])) {
                throw PreconditionError("partition cut points must be finite");
            }
            if (i > 0 && !(c[i - 1] < c[i])) {
                throw PreconditionError("partition axis " + std::to_string(j + 1) +
                                        " has repeated or unsorted cut points");
            }
        }
    }
}

Partition Partition::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("partition JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("cuts") || !doc["cuts"].is_array()) {
        throw ParseError("partition JSON needs a \"cuts\" array");
    }
    std::vector<std::vector<double>> cuts;
    for (const auto& axis : doc["cuts"]) {
        if (!axis.is_array()) {
            throw ParseError("partition cuts must be arrays of numbers");
        }
        std::vector<double> c;
        for (const auto& v : axis) {
            if (!v.is_number()) {
                throw ParseError("partition cuts must be arrays of numbers");
            }
            c.push_back(v.get<double>());
        }
        cuts.push_back(std::move(c));
    }
    return Partition(std::move(cuts));
}

Partition Partition::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open partition file " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return from_json_text(s.str());
}

std::string Partition::to_json_text() const {
    nlohmann::json doc;
    doc["cuts"] = cuts_;
    return doc.dump();
}

Partition Partition::uniform(const Box& box, unsigned log2_cells) {
    if (log2_cells > 30) {
        throw PreconditionError("too many partition cells");
    }
    std::vector<std::vector<double>> cuts(box.dim());
    const std::uint64_t n = std::uint64_t{1} << log2_cells;
    for (std::size_t j = 0; j < box.dim(); ++j) {
        const DyadicRational a = box.lower(j);
        const DyadicRational step = (box.upper(j) - a) * DyadicRational::pow2(static_cast<int>(log2_cells));
        cuts[j].reserve(n + 1);
        for (std::uint64_t i = 0; i <= n; ++i) {
            cuts[j].push_back((a + step * DyadicRational(static_cast<std::int64_t>(i))).to_double());
        }
    }
    return Partition(std::move(cuts));
}

Partition Partition::random(const Box& box, std::size_t cells_per_axis, std::uint64_t seed) {
    if (cells_per_axis == 0) {
        throw PreconditionError("partition needs at least one cell per axis");
    }
    // mt19937_64 output is fixed by the standard; the mapping to [0,1) is ours
    // so that schedules are identical on every platform.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> cuts(box.dim());
    for (std::size_t j = 0; j < box.dim(); ++j) {
        const double a = box.lower_d(j);
        const double b = box.upper_d(j);
        std::vector<double> c{a, b};
        for (std::size_t i = 1; i < cells_per_axis; ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
            const double t = a + u * (b - a);
            if (t > a && t < b) {
                c.push_back(t);
            }
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        cuts[j] = std::move(c);
    }
    return Partition(std::move(cuts));
}

std::uint64_t Partition::cell_count() const {
    std::uint64_t n = 1;
    for (const auto& c : cuts_) {
        n *= c.size() - 1;
    }
    return n;
}

Box Partition::span() const {
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& c : cuts_) {
        lo.push_back(c.front());
        hi.push_back(c.back());
    }
    return Box::from_doubles(lo, hi, Closure::Closed);
}

Cell Partition::cell(std::uint64_t index) const {
    Cell out;
    out.dim = static_cast<std::uint8_t>(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
        const std::uint64_t n = cuts_[j].size() - 1;
        const std::uint64_t i = index % n;
        index /= n;
        out.lo[j] = cuts_[j][i];
        out.hi[j] = cuts_[j][i + 1];
    }
    return out;
}

bool Partition::refines(const Partition& coarse) const {
    if (coarse.dim() != dim()) {
        return false;
    }
    for (std::size_t j = 0; j < dim(); ++j) {
        for (double t : coarse.cuts_[j]) {
            if (!std::binary_search(cuts_[j].begin(), cuts_[j].end(), t)) {
                return false;
            }
        }
    }
    return true;
}

ClassicalSums classical_sums(const BoundOracle& f, const Partition& p, unsigned threads) {
    if (p.dim() != f.dim()) {
        throw DimensionError("partition and oracle differ in dimension");
    }
    const Box& s = f.support();
    if (!s.empty()) {
        for (std::size_t j = 0; j < p.dim(); ++j) {
            if (p.cuts(j).front() > s.lower_d(j) || p.cuts(j).back() < s.upper_d(j)) {
                throw PreconditionError("partition does not span the support " + s.to_string());
            }
        }
    }
    ClassicalSums out;
    out.cells = p.cell_count();
    constexpr std::uint64_t kBlock = 1 << 16;
    std::vector<Cell> cells;
    std::vector<Interval> b;
    for (std::uint64_t start = 0; start < out.cells; start += kBlock) {
        const std::uint64_t n = std::min(kBlock, out.cells - start);
        cells.resize(n);
        b.assign(n, Interval{});
        for (std::uint64_t i = 0; i < n; ++i) {
            cells[i] = p.cell(start + i);
        }
        parallel_chunks(n, threads, [&](std::size_t lo, std::size_t hi) {
            f.bounds(std::span<const Cell>(cells).subspan(lo, hi - lo), Topology::Closed,
                     std::span<Interval>(b).subspan(lo, hi - lo));
        });
        for (std::uint64_t i = 0; i < n; ++i) {
            const Interval& e = b[i];
            if (!e.is_finite()) {
                throw OracleError("oracle returned an invalid enclosure", cells[i], Topology::Closed);
            }
            double vlo = 1.0;
            double vhi = 1.0;
            for (std::size_t j = 0; j < cells[i].dim; ++j) {
                vlo = mul_down(vlo, sub_down(cells[i].hi[j], cells[i].lo[j]));
                vhi = mul_up(vhi, sub_up(cells[i].hi[j], cells[i].lo[j]));
            }
            const double tlo = e.lo >= 0.0 ? mul_down(e.lo, vlo) : mul_down(e.lo, vhi);
            const double thi = e.hi >= 0.0 ? mul_up(e.hi, vhi) : mul_up(e.hi, vlo);
            out.lower = add_down(out.lower, tlo);
            out.upper = add_up(out.upper, thi);
        }
    }
    return out;
}

LevelSums closed_cube_sums(const BoundOracle& f, int k, unsigned threads) {
    return dyadic_sums(f, k, Topology::Closed, threads);
}

Box esharp(const Box& closed_box) { return closed_box.semiclosed(); }

std::vector<std::pair<std::string, Partition>> default_schedule(const Box& support, unsigned max_log2,
                                                                std::uint64_t seed) {
    std::vector<std::pair<std::string, Partition>> out;
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    for (std::size_t j = 0; j < support.dim(); ++j) {
        lo.push_back(support.lower(j));
        hi.push_back(support.upper(j));
    }
    const Box span(lo, hi, Closure::Closed);
    for (unsigned e = max_log2 >= 4 ? max_log2 - 4 : 0; e <= max_log2; e += 2) {
        out.emplace_back("dyadic", Partition::uniform(span, e));
        out.emplace_back("random", Partition::random(span, std::size_t{1} << e, seed + e));
    }
    return out;
}

EquivalenceReport equivalence_report(const BoundOracle& f, int k_max,
                                     const std::vector<std::pair<std::string, Partition>>& schedule,
                                     unsigned threads) {
    EquivalenceReport r;
    IntegrateOptions opt;
    opt.strategy = Strategy::Uniform;
    // Run every level up to k_max: the rigorous width never drops below this.
    opt.epsilon = std::numeric_limits<double>::denorm_min();
    opt.k_max = k_max;
    opt.threads = threads;
    opt.topology = Topology::SemiClosed;
    r.semiclosed = integrate(f, opt);
    opt.topology = Topology::Closed;
    r.closed = integrate(f, opt);
    r.semiclosed_enclosure = r.semiclosed.enclosure();
    r.closed_enclosure = r.closed.enclosure();

    bool first = true;
    for (const auto& [kind, p] : schedule) {
        ClassicalRow row{kind, classical_sums(f, p, threads)};
        const Interval e = row.sums.enclosure();
        if (first) {
            r.classical_enclosure = e;
            first = false;
        } else {
            Interval cut;
            if (intersect(r.classical_enclosure, e, cut)) {
                r.classical_enclosure = cut;
            } else {
                r.classical_consistent = false;
                r.classical_enclosure = hull(r.classical_enclosure, e);
            }
        }
        r.classical.push_back(std::move(row));
    }

    r.overlap = r.semiclosed_enclosure.overlaps(r.closed_enclosure);
    if (!schedule.empty()) {
        r.overlap = r.overlap && r.classical_consistent && r.semiclosed_enclosure.overlaps(r.classical_enclosure) &&
                    r.closed_enclosure.overlaps(r.classical_enclosure);
    }

    // A run that ends before k_max has no active cubes left, so its last row
    // holds at every deeper level.
    const SumRow& s = r.semiclosed.last();
    const SumRow& c = r.closed.last();
    r.compared_level = std::max(s.k, c.k);
    r.closed_difference = std::abs(c.upper - s.upper);
    r.stabilized_gap = std::max(s.gap(), c.gap());
    r.limit_agreement = r.closed_difference <= 10.0 * r.stabilized_gap + s.pad + c.pad;
    return r;
}

} // namespace dyadint
