#include "dyadint/cli.hpp"

#include "dyadint/calculus.hpp"
#include "dyadint/classical.hpp"
#include "dyadint/errors.hpp"
#include "dyadint/oracle.hpp"
#include "dyadint/parallel.hpp"
#include "dyadint/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace dyadint::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double parse_real(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw ParseError(std::string("trailing characters in ") + what + ": " + text);
        }
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(std::string("not a number for ") + what + ": " + text);
    }
}

Box parse_support(const JobSpec& job) {
    if (job.support.empty()) {
        throw UsageError("--support is required");
    }
    Box box = Box::parse(job.support);
    if (box.dim() != job.dim) {
        throw DimensionError("support has " + std::to_string(box.dim()) + " axes but --dim is " +
                             std::to_string(job.dim));
    }
    return box;
}

Region load_region(const JobSpec& job) {
    Region r = Region::load(job.region);
    if (r.dim() != job.dim) {
        throw DimensionError("region has " + std::to_string(r.dim()) + " axes but --dim is " + std::to_string(job.dim));
    }
    return r;
}

OraclePtr apply_stage(const OraclePtr& f, const std::string& stage, const Box& support, std::size_t dim) {
    const auto colon = stage.find(':');
    const std::string name = trim(stage.substr(0, colon));
    const std::string arg = colon == std::string::npos ? "" : trim(stage.substr(colon + 1));
    auto need_arg = [&] {
        if (arg.empty()) {
            throw ParseError("pipeline stage '" + name + "' needs an argument");
        }
    };
    auto operand = [&] {
        need_arg();
        return from_expr(Expr::parse(arg, dim), support);
    };
    if (name == "abs") {
        return abs(f);
    }
    if (name == "pos") {
        return pos_part(f);
    }
    if (name == "negpart") {
        return neg_part(f);
    }
    if (name == "neg") {
        return negate(f);
    }
    if (name == "scale") {
        need_arg();
        return scale(f, parse_real(arg, "scale"));
    }
    if (name == "restrict") {
        need_arg();
        Region r = Region::load(arg);
        if (r.dim() != dim) {
            throw DimensionError("restrict region has the wrong dimension");
        }
        return restrict(f, r);
    }
    if (name == "compose") {
        need_arg();
        const auto semi = arg.find(';');
        const Expr phi = Expr::parse(trim(arg.substr(0, semi)), 1);
        std::optional<Expr> deriv;
        if (semi != std::string::npos) {
            deriv = Expr::parse(trim(arg.substr(semi + 1)), 1);
        }
        return lipschitz_compose(phi, f, deriv);
    }
    if (name == "add") {
        return add(f, operand());
    }
    if (name == "mul") {
        return mul(f, operand());
    }
    if (name == "max") {
        return max(f, operand());
    }
    if (name == "min") {
        return min(f, operand());
    }
    throw ParseError("unknown pipeline stage '" + name + "'");
}

OraclePtr apply_pipeline(OraclePtr f, const std::string& pipeline, const Box& support, std::size_t dim) {
    std::size_t start = 0;
    while (start <= pipeline.size()) {
        const auto bar = pipeline.find('|', start);
        const std::string stage = trim(pipeline.substr(start, bar == std::string::npos ? bar : bar - start));
        if (stage.empty()) {
            throw ParseError("empty pipeline stage");
        }
        f = apply_stage(f, stage, support, dim);
        if (bar == std::string::npos) {
            break;
        }
        start = bar + 1;
    }
    return f;
}

OraclePtr build_integrand(const JobSpec& job) {
    if (job.expr.empty()) {
        throw UsageError("--expr is required");
    }
    const Box support = parse_support(job);
    OraclePtr f = from_expr(Expr::parse(job.expr, job.dim), support);
    if (!job.region.empty()) {
        f = restrict(f, load_region(job));
    }
    if (!job.compose.empty()) {
        f = apply_pipeline(f, job.compose, support, job.dim);
    }
    return f;
}

Region region_or_box(const JobSpec& job) {
    if (!job.region.empty()) {
        return load_region(job);
    }
    if (!job.support.empty()) {
        return Region(parse_support(job), {});
    }
    throw UsageError("--region or --support is required");
}

IntegrateOptions options_for(const JobSpec& job) {
    IntegrateOptions opt;
    opt.epsilon = job.epsilon;
    opt.k_max = job.k_max;
    opt.strategy = job.strategy;
    opt.topology = job.topology;
    opt.threads = job.threads;
    opt.keep_steps = job.steps;
    opt.detect_stall = job.detect_stall;
    return opt;
}

struct Output {
    json doc;
    std::string csv;
    std::string table;
    int exit_code = kExitOk;
};

int verdict_exit(const DyadicSumReport& r) {
    return r.verdict.kind == VerdictKind::Integrable ? kExitOk : kExitUndecided;
}

std::string interval_text(const Interval& e) {
    return "[" + json(e.lo).dump() + ", " + json(e.hi).dump() + "]";
}

Output report_output(const char* kind, const DyadicSumReport& r) {
    Output o;
    o.doc = to_json(r);
    o.doc["kind"] = kind;
    o.csv = rows_csv(r);
    o.table = rows_table(r);
    o.exit_code = verdict_exit(r);
    return o;
}

Output execute(const JobSpec& job) {
    if (!(job.epsilon > 0.0)) {
        throw UsageError("--eps must be positive");
    }
    switch (job.command) {
    case Command::Integrate: {
        const OraclePtr f = build_integrand(job);
        return report_output("integrate", integrate(*f, options_for(job)));
    }
    case Command::Measure: {
        return report_output("measure", jordan_measure(region_or_box(job), options_for(job)));
    }
    case Command::VerySmall: {
        const VerySmallResult r = is_very_small(region_or_box(job), job.epsilon, job.k_max, job.threads);
        Output o;
        o.doc = to_json(r);
        o.doc["kind"] = "very-small";
        o.csv = rows_csv(r.report);
        o.table = rows_table(r.report) + "very small: " + (r.very_small ? "true" : "false") + "  witness level " +
                  std::to_string(r.witness_level) + "  covering volume " + json(r.covering_volume).dump() + "\n";
        o.exit_code = r.very_small ? kExitOk : kExitUndecided;
        return o;
    }
    case Command::FubiniCheck: {
        if (job.expr.empty()) {
            throw UsageError("--expr is required");
        }
        const Expr f = Expr::parse(job.expr, job.dim);
        std::optional<Slice> slice;
        Region region = [&] {
            if (!job.region.empty()) {
                const json doc = json::parse(read_file(job.region), nullptr, false);
                if (doc.is_discarded()) {
                    throw ParseError("region file is not valid JSON");
                }
                if (doc.is_object() && doc.contains("slice")) {
                    const auto& s = doc["slice"];
                    slice = Slice{Expr::parse(s.at("lower").get<std::string>(), job.dim - 1),
                                  Expr::parse(s.at("upper").get<std::string>(), job.dim - 1)};
                }
                return load_region(job);
            }
            return Region(parse_support(job), {});
        }();
        if (!job.lower.empty() || !job.upper.empty()) {
            if (job.lower.empty() || job.upper.empty()) {
                throw UsageError("--lower and --upper go together");
            }
            slice = Slice{Expr::parse(job.lower, job.dim - 1), Expr::parse(job.upper, job.dim - 1)};
        }
        FubiniOptions opt;
        opt.epsilon = job.epsilon;
        opt.k_max = job.k_max;
        opt.strategy = job.strategy;
        opt.threads = job.threads;
        opt.swap = job.swap;
        const FubiniReport r = fubini_check(f, region, slice, opt);
        Output o;
        o.doc = to_json(r);
        o.doc["kind"] = "fubini-check";
        o.csv = rows_csv(r.direct, "direct", true) + rows_csv(r.repeated, "repeated", false);
        o.table = "direct\n" + rows_table(r.direct) + "repeated\n" + rows_table(r.repeated);
        if (r.swapped) {
            o.csv += rows_csv(*r.swapped, "swapped", false);
            o.table += "swapped\n" + rows_table(*r.swapped);
        }
        o.table += std::string("overlap: ") + (r.overlap ? "true" : "false") +
                   (r.swapped ? std::string("  swapped overlap: ") + (r.swapped_overlap ? "true" : "false") : "") +
                   "\n";
        if (r.critical) {
            o.exit_code = kExitError;
        } else {
            o.exit_code = r.overlap && r.swapped_overlap ? kExitOk : kExitUndecided;
        }
        return o;
    }
    case Command::NlCheck: {
        if (job.g.empty() || job.F.empty()) {
            throw UsageError("--g and --F are required");
        }
        const NLCheck r = newton_leibniz_check(Expr::parse(job.g, 1), Expr::parse(job.F, 1), job.a, job.b,
                                               job.epsilon, job.k_max, job.threads);
        Output o;
        o.doc = to_json(r);
        o.doc["kind"] = "nl-check";
        o.csv = rows_csv(r.report);
        o.table = rows_table(r.report) + "F(b) - F(a) in " + interval_text(r.nl_value) +
                  "  contained: " + (r.contained ? "true" : "false") + "\n";
        for (const auto& w : r.warnings) {
            o.table += "warning: " + w + "\n";
        }
        o.exit_code = r.contained ? kExitOk : kExitUndecided;
        return o;
    }
    case Command::EquivalenceReport: {
        OraclePtr f;
        if (!job.expr.empty()) {
            f = build_integrand(job);
        } else {
            f = indicator(region_or_box(job));
        }
        const int per_axis = std::max(1, 14 / static_cast<int>(job.dim));
        const int k_max = job.k_max < 0 ? per_axis : job.k_max;
        std::vector<std::pair<std::string, Partition>> schedule;
        if (!job.partitions.empty()) {
            for (const auto& p : job.partitions) {
                schedule.emplace_back("file", Partition::load(p));
            }
        } else {
            const int log2 = job.max_log2_cells < 0 ? per_axis : job.max_log2_cells;
            schedule = default_schedule(f->support(), static_cast<unsigned>(log2), job.seed);
        }
        const EquivalenceReport r = equivalence_report(*f, k_max, schedule, job.threads);
        Output o;
        o.doc = to_json(r);
        o.doc["kind"] = "equivalence-report";
        o.csv = rows_csv(r.semiclosed, "semiclosed", true) + rows_csv(r.closed, "closed", false);
        for (std::size_t i = 0; i < r.classical.size(); ++i) {
            const auto& c = r.classical[i];
            o.csv += "classical-" + c.kind + "," + std::to_string(i) + "," + json(c.sums.lower).dump() + "," +
                     json(c.sums.upper).dump() + "," + std::to_string(c.sums.cells) + ",0\n";
        }
        std::ostringstream t;
        t << "semiclosed\n" << rows_table(r.semiclosed) << "closed\n" << rows_table(r.closed) << "classical\n";
        for (const auto& c : r.classical) {
            t << "  " << c.kind << " " << c.sums.cells << " cells: " << interval_text(c.sums.enclosure()) << "\n";
        }
        t << "overlap: " << (r.overlap ? "true" : "false") << "  |Ubar - U| = " << json(r.closed_difference).dump()
          << "  stabilized gap " << json(r.stabilized_gap).dump() << "\n";
        o.table = t.str();
        o.exit_code = r.overlap ? kExitOk : kExitUndecided;
        return o;
    }
    }
    throw UsageError("unknown command");
}

std::string error_document(const std::string& type, const std::string& message) {
    json doc = {{"kind", "error"}, {"error", {{"type", type}, {"message", message}}}};
    return dump_document(std::move(doc));
}

template <typename E>
std::map<std::string, E> enum_map(std::initializer_list<std::pair<const std::string, E>> items) {
    return std::map<std::string, E>(items);
}

} // namespace

RunResult run(const std::vector<std::string>& args) {
    JobSpec job;
    job.threads = threads_from_env(1);

    CLI::App app{"Rigorous dyadic Riemann integration"};
    app.name("dyadint");
    app.require_subcommand(1);

    const auto strategies = enum_map<Strategy>({{"uniform", Strategy::Uniform}, {"adaptive", Strategy::Adaptive}});
    const auto formats = enum_map<Format>({{"json", Format::Json}, {"csv", Format::Csv}, {"table", Format::Table}});
    const auto topologies =
        enum_map<Topology>({{"semiclosed", Topology::SemiClosed}, {"closed", Topology::Closed}});

    std::string a_text;
    std::string b_text;

    auto common = [&](CLI::App* sub, bool with_dim) {
        if (with_dim) {
            sub->add_option("--dim", job.dim, "number of variables")->required()->check(CLI::Range(1, 6));
        }
        sub->add_option("--eps", job.epsilon, "target gap");
        sub->add_option("--k-max", job.k_max, "deepest refinement level")->check(CLI::Range(0, kDefaultLevelCap));
        sub->add_option("--strategy", job.strategy, "uniform or adaptive")
            ->transform(CLI::CheckedTransformer(strategies, CLI::ignore_case));
        sub->add_option("--format", job.format, "json, csv or table")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        sub->add_option("--threads", job.threads, "worker threads (default: DYADINT_THREADS or 1)")
            ->check(CLI::Range(1, 1024));
    };

    auto* integ = app.add_subcommand("integrate", "enclose the integral of an expression over a box");
    common(integ, true);
    integ->add_option("--expr", job.expr, "integrand in x1..xm")->required();
    integ->add_option("--support", job.support, "support box, e.g. [0,1)x[0,1)")->required();
    integ->add_option("--region", job.region, "region JSON restricting the integrand");
    integ->add_option("--compose", job.compose, "oracle pipeline, e.g. \"abs | scale:2\"");
    integ->add_option("--topology", job.topology, "semiclosed or closed cubes")
        ->transform(CLI::CheckedTransformer(topologies, CLI::ignore_case));
    integ->add_flag("--steps", job.steps, "include the final step-function pieces");
    integ->add_flag("--detect-stall", job.detect_stall, "report NotConverging when the gap stops moving");
    integ->callback([&] { job.command = Command::Integrate; });

    auto* meas = app.add_subcommand("measure", "Jordan measure of a region");
    common(meas, true);
    meas->add_option("--region", job.region, "region JSON");
    meas->add_option("--support", job.support, "box literal instead of a region");
    meas->add_option("--topology", job.topology, "semiclosed or closed cubes")
        ->transform(CLI::CheckedTransformer(topologies, CLI::ignore_case));
    meas->add_flag("--detect-stall", job.detect_stall, "report NotConverging when the gap stops moving");
    meas->callback([&] { job.command = Command::Measure; });

    auto* small = app.add_subcommand("very-small", "test whether a region has outer measure below eps");
    common(small, true);
    small->add_option("--region", job.region, "region JSON");
    small->add_option("--support", job.support, "box literal instead of a region");
    small->callback([&] { job.command = Command::VerySmall; });

    auto* fub = app.add_subcommand("fubini-check", "compare direct and repeated integrals");
    common(fub, true);
    fub->add_option("--expr", job.expr, "integrand")->required();
    fub->add_option("--region", job.region, "region JSON (may carry a \"slice\")");
    fub->add_option("--support", job.support, "box literal instead of a region");
    fub->add_option("--lower", job.lower, "lower limit of the last variable");
    fub->add_option("--upper", job.upper, "upper limit of the last variable");
    fub->add_flag("!--no-swap", job.swap, "skip the order-swapped integral");
    fub->callback([&] { job.command = Command::FubiniCheck; });

    auto* nl = app.add_subcommand("nl-check", "check F(b) - F(a) against the integral of g");
    common(nl, false);
    nl->add_option("--g", job.g, "integrand in x1")->required();
    nl->add_option("--F", job.F, "antiderivative in x1")->required();
    nl->add_option("--a", a_text, "left endpoint")->required();
    nl->add_option("--b", b_text, "right endpoint")->required();
    nl->callback([&] { job.command = Command::NlCheck; });

    auto* eq = app.add_subcommand("equivalence-report", "semiclosed, closed and classical brackets side by side");
    common(eq, true);
    eq->add_option("--expr", job.expr, "integrand (with --support)");
    eq->add_option("--support", job.support, "support box");
    eq->add_option("--region", job.region, "region JSON; without --expr its indicator is used");
    eq->add_option("--compose", job.compose, "oracle pipeline");
    eq->add_option("--partition", job.partitions, "partition JSON file (repeatable)");
    eq->add_option("--seed", job.seed, "seed for random partitions");
    eq->add_option("--max-log2-cells", job.max_log2_cells, "finest schedule: 2^n cells per axis")
        ->check(CLI::Range(0, 24));
    eq->callback([&] { job.command = Command::EquivalenceReport; });

    RunResult result;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (job.command == Command::NlCheck) {
            job.dim = 1;
            job.a = parse_real(a_text, "--a");
            job.b = parse_real(b_text, "--b");
        }
    } catch (const CLI::CallForHelp&) {
        result.out = app.help();
        return result;
    } catch (const CLI::CallForAllHelp&) {
        result.out = app.help("", CLI::AppFormatMode::All);
        return result;
    } catch (const CLI::ParseError& e) {
        result.exit_code = kExitUsage;
        result.err = error_document("UsageError", e.what());
        return result;
    } catch (const ParseError& e) {
        result.exit_code = kExitUsage;
        result.err = error_document("ParseError", e.what());
        return result;
    }

    try {
        Output o = execute(job);
        result.exit_code = o.exit_code;
        switch (job.format) {
        case Format::Json:
            result.out = dump_document(std::move(o.doc));
            break;
        case Format::Csv:
            result.out = o.csv;
            break;
        case Format::Table:
            result.out = o.table;
            break;
        }
    } catch (const UsageError& e) {
        result.exit_code = kExitUsage;
        result.err = error_document("UsageError", e.what());
    } catch (const ParseError& e) {
        result.exit_code = kExitUsage;
        result.err = error_document("ParseError", e.what());
    } catch (const DimensionError& e) {
        result.exit_code = kExitError;
        result.err = error_document("DimensionError", e.what());
    } catch (const PreconditionError& e) {
        result.exit_code = kExitError;
        result.err = error_document("PreconditionError", e.what());
    } catch (const SoundnessError& e) {
        result.exit_code = kExitError;
        result.err = error_document("SoundnessError", e.what());
    } catch (const DomainError& e) {
        result.exit_code = kExitError;
        result.err = error_document("DomainError", e.what());
    } catch (const std::exception& e) {
        result.exit_code = kExitError;
        result.err = error_document("Error", e.what());
    }
    return result;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const RunResult r = run(args);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}

} // namespace dyadint::cli
