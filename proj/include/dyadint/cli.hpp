#ifndef DYADINT_CLI_HPP
#define DYADINT_CLI_HPP

#include "dyadint/integrator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dyadint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndecided = 2;
inline constexpr int kExitUsage = 64;

enum class Command : std::uint8_t { Integrate, Measure, VerySmall, FubiniCheck, NlCheck, EquivalenceReport };
enum class Format : std::uint8_t { Json, Csv, Table };

// Everything a single invocation needs, validated before any work starts.
struct JobSpec {
    Command command = Command::Integrate;
    std::size_t dim = 1;
    std::string expr;
    std::string support;  // box literal
    std::string region;   // region JSON path
    std::string compose;  // oracle pipeline, see docs/compose-pipeline.md
    std::string lower;    // fubini slice bounds
    std::string upper;
    std::string g;
    std::string F;
    double a = 0.0;
    double b = 1.0;
    double epsilon = kDefaultEpsilon;
    int k_max = -1;
    Strategy strategy = Strategy::Adaptive;
    Topology topology = Topology::SemiClosed;
    Format format = Format::Json;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool steps = false;
    bool detect_stall = false;
    bool swap = true;
    std::vector<std::string> partitions;
    int max_log2_cells = -1;
};

struct RunResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// Parses args (without the program name) and executes the job.
RunResult run(const std::vector<std::string>& args);

int main(int argc, char** argv);

} // namespace dyadint::cli

#endif
