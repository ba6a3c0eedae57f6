#ifndef DYADINT_CLASSICAL_HPP
#define DYADINT_CLASSICAL_HPP

#include "dyadint/integrator.hpp"
#include "dyadint/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dyadint {

// Grid partition of a closed m-rectangle into closed cells: per-axis strictly
// increasing cut points t_{j,0} < ... < t_{j,N_j}.
class Partition {
public:
    explicit Partition(std::vector<std::vector<double>> cuts);

    // {"cuts": [[0, 0.3, 1], [0, 1]]}
    static Partition from_json_text(const std::string& text);
    static Partition load(const std::string& path);
    std::string to_json_text() const;

    // 2^e cells per axis with cut points a + i (b - a) / 2^e.
    static Partition uniform(const Box& box, unsigned log2_cells);
    // n cells per axis with seeded pseudo-random interior cuts.
    static Partition random(const Box& box, std::size_t cells_per_axis, std::uint64_t seed);

    std::size_t dim() const noexcept { return cuts_.size(); }
    const std::vector<double>& cuts(std::size_t axis) const { return cuts_.at(axis); }
    std::uint64_t cell_count() const;

    // The spanned rectangle as a closed box.
    Box span() const;

    // Cell number i; axis 0 varies fastest.
    Cell cell(std::uint64_t index) const;

    // Every cut of `coarse` appears in this partition.
    bool refines(const Partition& coarse) const;

private:
    std::vector<std::vector<double>> cuts_;
};

struct ClassicalSums {
    double lower = 0.0; // rounded downward: <= L(phi, P)
    double upper = 0.0; // rounded upward: >= U(phi, P)
    std::uint64_t cells = 0;

    Interval enclosure() const { return {lower, upper}; }
};

// Darboux sums over the closed cells of P with directed rounding throughout,
// so [lower, upper] is itself a rigorous enclosure.
ClassicalSums classical_sums(const BoundOracle& f, const Partition& p, unsigned threads = 1);

// Dyadic sums at level k with bounds taken over cube closures.
LevelSums closed_cube_sums(const BoundOracle& f, int k, unsigned threads = 1);

// Half-open form of a closed rectangle: same bounds, every axis [a, b).
Box esharp(const Box& closed_box);

struct ClassicalRow {
    std::string kind; // "dyadic" or "random"
    ClassicalSums sums;
};

// Dyadic-aligned and seeded random partitions of the closed support with
// up to 2^max_log2 cells per axis.
std::vector<std::pair<std::string, Partition>> default_schedule(const Box& support, unsigned max_log2,
                                                                std::uint64_t seed);

struct EquivalenceReport {
    DyadicSumReport semiclosed;
    DyadicSumReport closed;
    std::vector<ClassicalRow> classical;
    Interval semiclosed_enclosure{};
    Interval closed_enclosure{};
    Interval classical_enclosure{}; // intersection over the schedule
    bool classical_consistent = true; // the schedule's brackets all meet
    bool overlap = false;             // the three enclosures meet pairwise
    int compared_level = -1;
    double closed_difference = 0.0;   // |U_bar_k - U_k| at compared_level
    double stabilized_gap = 0.0;      // larger of the two dyadic gaps there
    bool limit_agreement = false;     // closed_difference <= 10 · stabilized_gap (+ pads)
};

EquivalenceReport equivalence_report(const BoundOracle& f, int k_max,
                                     const std::vector<std::pair<std::string, Partition>>& schedule,
                                     unsigned threads = 1);

} // namespace dyadint

#endif
