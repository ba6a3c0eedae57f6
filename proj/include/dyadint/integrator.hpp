#ifndef DYADINT_INTEGRATOR_HPP
#define DYADINT_INTEGRATOR_HPP

#include "dyadint/geometry.hpp"
#include "dyadint/interval.hpp"
#include "dyadint/oracle.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dyadint {

enum class Strategy : std::uint8_t { Uniform, Adaptive };
enum class VerdictKind : std::uint8_t { Integrable, Undecided, NotConverging };

std::string to_string(Strategy s);
std::string to_string(VerdictKind v);

// One refinement level: L_k, U_k as computed, the bound on their rounding
// error, and the number of cubes evaluated at this level.
struct SumRow {
    int k = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::uint64_t cubes = 0;
    double pad = 0.0;

    double gap() const { return upper - lower; }
    // Rigorous: [lower - pad, upper + pad].
    Interval enclosure() const;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Undecided;
    Interval enclosure{}; // final rigorous enclosure of the integral
    int level = -1;       // row where the verdict was reached
    double gap = 0.0;
    std::string note;
};

// A piece of the final dyadic step-function sandwich.
struct StepPiece {
    DyadicCube cube;
    Interval bounds;
};

struct DyadicSumReport {
    std::size_t dim = 0;
    Strategy strategy = Strategy::Adaptive;
    Topology topology = Topology::SemiClosed;
    double epsilon = 0.0;
    int k_max = 0;
    std::vector<SumRow> rows;
    Verdict verdict;
    double pad = 0.0; // pad of the final row
    std::vector<StepPiece> steps; // filled when requested

    const SumRow& last() const { return rows.back(); }
    Interval enclosure() const { return verdict.enclosure; }
};

// Default k_max: 24 for m = 1, 14 for m = 2, 9 for m = 3.
int default_k_max(std::size_t dim);

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr std::uint64_t kDefaultMaxCubes = std::uint64_t{1} << 24;

struct IntegrateOptions {
    double epsilon = kDefaultEpsilon;
    int k_max = -1; // -1: default_k_max(dim)
    Strategy strategy = Strategy::Adaptive;
    Topology topology = Topology::SemiClosed;
    unsigned threads = 1;
    int level_cap = kDefaultLevelCap;
    std::uint64_t max_cubes = kDefaultMaxCubes;
    bool keep_steps = false;
    // Report NotConverging for indicator-like runs whose gap is identical for
    // three consecutive levels. Heuristic; off by default.
    bool detect_stall = false;
    // Stop early once this returns true for a row (the verdict then reflects
    // that row). Used by the very-small test.
    std::function<bool(const SumRow&)> stop;
};

struct LevelSums {
    double lower = 0.0;
    double upper = 0.0;
    double pad = 0.0;
    std::uint64_t cubes = 0;
};

// The literal sums at level k over every cube meeting the support.
LevelSums dyadic_sums(const BoundOracle& f, int k, Topology topology = Topology::SemiClosed,
                      unsigned threads = 1, std::uint64_t max_cubes = kDefaultMaxCubes,
                      int level_cap = kDefaultLevelCap);

DyadicSumReport integrate(const BoundOracle& f, const IntegrateOptions& options = {});

// integrate(indicator(region)); L_k is the inner and U_k the outer Jordan approximation.
DyadicSumReport jordan_measure(const Region& region, IntegrateOptions options = {});

struct VerySmallResult {
    bool very_small = false;
    int witness_level = -1;   // first level with U_k + pad <= epsilon
    double covering_volume = 0.0; // U_k at that level (or at the last level)
    DyadicSumReport report;
};

VerySmallResult is_very_small(const Region& region, double epsilon, int k_max = -1, unsigned threads = 1);

struct AdditivityReport {
    DyadicSumReport first;
    DyadicSumReport second;
    DyadicSumReport united;
    Interval sum{};         // enclosure(first) + enclosure(second)
    bool consistent = false; // enclosure(united) meets sum
    VerySmallResult overlap;
};

// Checks that the integral of f over r1 ∪ r2 matches the two parts. The
// intersection of r1 and r2 must be very small.
AdditivityReport additivity_check(const OraclePtr& f, const Region& r1, const Region& r2, double epsilon,
                                  int k_max = -1, unsigned threads = 1);

// Count of consecutive-row pairs violating L_k <= L_{k+1} <= U_{k+1} <= U_k
// by more than the two rows' pads combined.
std::size_t monotone_violations(const DyadicSumReport& report);

} // namespace dyadint

#endif
