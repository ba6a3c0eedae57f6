#include "dyadint/cli.hpp"
#include "dyadint/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

using namespace dyadint;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / ("dyadint_test_cli_" + name);
    std::ofstream(path) << text;
    return path.string();
}

std::string disk_file() {
    return write_temp("disk.json", R"j({"dim": 2, "bbox": "[-1,1]x[-1,1]",
        "constraints": [{"expr": "x1^2 + x2^2 - 1", "strict": false}],
        "slice": {"lower": "-sqrt(1 - x1^2)", "upper": "sqrt(1 - x1^2)"}})j");
}

json parse_ok(const cli::RunResult& r) {
    REQUIRE(r.err.empty());
    const json doc = json::parse(r.out);
    CHECK(doc.at("schema") == kReportSchema);
    CHECK_MESSAGE(validate_document(doc).empty(), validate_document(doc));
    return doc;
}

json parse_error(const cli::RunResult& r) {
    CHECK(r.out.empty());
    const json doc = json::parse(r.err);
    CHECK(doc.at("kind") == "error");
    CHECK(validate_document(doc).empty());
    return doc;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("integrate the product over the unit square") {
    const auto r = cli::run({"integrate", "--dim", "2", "--expr", "x1*x2", "--support", "[0,1)x[0,1)", "--eps", "1e-3"});
    CHECK(r.exit_code == cli::kExitOk);
    const json doc = parse_ok(r);
    CHECK(doc.at("kind") == "integrate");
    const auto& v = doc.at("verdict");
    CHECK(v.at("kind") == "Integrable");
    CHECK(v.at("lower").get<double>() <= 0.25);
    CHECK(v.at("upper").get<double>() >= 0.25);
}

TEST_CASE("measure the disk region") {
    const auto r = cli::run({"measure", "--dim", "2", "--region", disk_file(), "--eps", "0.05"});
    CHECK(r.exit_code == cli::kExitOk);
    const json doc = parse_ok(r);
    CHECK(doc.at("verdict").at("lower").get<double>() <= std::numbers::pi);
    CHECK(doc.at("verdict").at("upper").get<double>() >= std::numbers::pi);
}

TEST_CASE("variables beyond the dimension are an error") {
    const auto r = cli::run({"integrate", "--expr", "x3", "--dim", "2", "--support", "[0,1)x[0,1)"});
    CHECK(r.exit_code == cli::kExitError);
    CHECK(parse_error(r).at("error").at("type") == "DimensionError");
}

TEST_CASE("undecided and false verdicts exit with 2") {
    const auto stuck = cli::run({"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--eps", "1e-9",
                                 "--k-max", "4"});
    CHECK(stuck.exit_code == cli::kExitUndecided);
    CHECK(parse_ok(stuck).at("verdict").at("kind") == "Undecided");

    const auto big = cli::run({"very-small", "--dim", "2", "--support", "[0,1)x[0,1)", "--eps", "0.1", "--k-max", "6"});
    CHECK(big.exit_code == cli::kExitUndecided);
    CHECK(parse_ok(big).at("very_small") == false);

    const auto wrong = cli::run({"nl-check", "--g", "2*x1", "--F", "x1^3", "--a", "0", "--b", "2"});
    CHECK(wrong.exit_code == cli::kExitUndecided);
    CHECK(parse_ok(wrong).at("contained") == false);
}

TEST_CASE("usage and parse errors exit with 64 and leave stdout empty") {
    const std::vector<std::vector<std::string>> cases = {
        {},
        {"integrate", "--dim", "1", "--expr", "x1"},
        {"integrate", "--dim", "1", "--expr", "x1 +", "--support", "[0,1)"},
        {"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1"},
        {"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--format", "xml"},
        {"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--eps", "0"},
        {"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--compose", "frobnicate"},
        {"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--compose", "abs ||"},
        {"nl-check", "--g", "1", "--F", "x1", "--a", "zero", "--b", "1"},
        {"measure", "--dim", "2"},
        {"measure", "--dim", "2", "--region", "/nonexistent/region.json"},
        {"fubini-check", "--dim", "2", "--expr", "1", "--support", "[0,1)x[0,1)", "--lower", "0"},
        {"bogus"},
    };
    for (const auto& args : cases) {
        const auto r = cli::run(args);
        std::string joined;
        for (const auto& a : args) {
            joined += a + " ";
        }
        CHECK_MESSAGE(r.exit_code == cli::kExitUsage, joined);
        CHECK_MESSAGE(r.out.empty(), joined);
        CHECK_MESSAGE(json::parse(r.err).at("kind") == "error", joined);
    }
}

TEST_CASE("domain errors carry the cube") {
    const auto r = cli::run({"integrate", "--dim", "1", "--expr", "1/x1", "--support", "[-1,1)"});
    CHECK(r.exit_code == cli::kExitError);
    const json doc = parse_error(r);
    CHECK(doc.at("error").at("message").get<std::string>().find("[") != std::string::npos);
}

TEST_CASE("CSV rows match the JSON rows") {
    const std::vector<std::string> base = {"integrate", "--dim", "1", "--expr", "x1^2", "--support", "[0,1)",
                                           "--eps", "1e-4"};
    auto with = [&](const char* fmt) {
        auto a = base;
        a.push_back("--format");
        a.push_back(fmt);
        return cli::run(a);
    };
    const json doc = parse_ok(with("json"));
    const auto csv = with("csv");
    CHECK(csv.exit_code == cli::kExitOk);
    CHECK(line_count(csv.out) == doc.at("rows").size() + 1);
    CHECK(csv.out.rfind("k,L,U,cubes,pad\n", 0) == 0);
    const auto table = with("table");
    CHECK(table.exit_code == cli::kExitOk);
    CHECK(table.out.find("Integrable") != std::string::npos);

    const auto fub = cli::run({"fubini-check", "--dim", "2", "--expr", "x1 + x2", "--support", "[0,1)x[0,1)", "--eps",
                               "0.05", "--format", "json"});
    const json fdoc = parse_ok(fub);
    const auto fcsv = cli::run({"fubini-check", "--dim", "2", "--expr", "x1 + x2", "--support", "[0,1)x[0,1)",
                                "--eps", "0.05", "--format", "csv"});
    const std::size_t rows = fdoc.at("direct").at("rows").size() + fdoc.at("repeated").at("rows").size() +
                             fdoc.at("swapped").at("rows").size();
    CHECK(line_count(fcsv.out) == rows + 1);
}

TEST_CASE("output does not depend on the thread count") {
    const std::vector<std::vector<std::string>> jobs = {
        {"integrate", "--dim", "2", "--expr", "sin(x1*x2) + x1", "--support", "[0,1)x[0,1)", "--eps", "1e-2",
         "--steps"},
        {"integrate", "--dim", "2", "--expr", "x1*x2", "--support", "[0,1)x[0,1)", "--eps", "1e-3", "--strategy",
         "uniform"},
        {"measure", "--dim", "2", "--region", disk_file(), "--eps", "0.05"},
        {"fubini-check", "--dim", "2", "--expr", "x1*x2", "--region", disk_file(), "--eps", "0.05"},
        {"equivalence-report", "--dim", "1", "--expr", "abs(x1 - 1/3)", "--support", "[0,1)", "--k-max", "10"},
    };
    for (const auto& job : jobs) {
        auto one = job;
        one.insert(one.end(), {"--threads", "1"});
        auto eight = job;
        eight.insert(eight.end(), {"--threads", "8"});
        const auto a = cli::run(one);
        const auto b = cli::run(eight);
        CHECK_MESSAGE(a.exit_code == cli::kExitOk, job[0]);
        CHECK_MESSAGE(a.out == b.out, job[0]);
        parse_ok(a);
    }
}

TEST_CASE("compose pipeline") {
    // |x1 - 1/2| scaled by 2 integrates to 1/2 over [0,1).
    const auto r = cli::run({"integrate", "--dim", "1", "--expr", "x1 - 1/2", "--support", "[0,1)", "--compose",
                             "abs | scale:2", "--eps", "1e-4"});
    CHECK(r.exit_code == cli::kExitOk);
    const json doc = parse_ok(r);
    CHECK(doc.at("verdict").at("lower").get<double>() <= 0.5);
    CHECK(doc.at("verdict").at("upper").get<double>() >= 0.5);

    const auto sq = cli::run({"integrate", "--dim", "1", "--expr", "x1", "--support", "[0,1)", "--compose",
                              "compose: x1^2 | add: 1", "--eps", "1e-4"});
    const json sdoc = parse_ok(sq);
    CHECK(sdoc.at("verdict").at("lower").get<double>() <= 4.0 / 3.0);
    CHECK(sdoc.at("verdict").at("upper").get<double>() >= 4.0 / 3.0);

    const auto clipped = cli::run({"integrate", "--dim", "2", "--expr", "1", "--support", "[-1,1]x[-1,1]",
                                   "--compose", "restrict:" + disk_file(), "--eps", "0.05"});
    const json cdoc = parse_ok(clipped);
    CHECK(cdoc.at("verdict").at("lower").get<double>() <= std::numbers::pi);
    CHECK(cdoc.at("verdict").at("upper").get<double>() >= std::numbers::pi);
}

TEST_CASE("nl-check and equivalence-report documents") {
    const auto nl = cli::run({"nl-check", "--g", "cos(x1)", "--F", "sin(x1)", "--a", "0", "--b", "1"});
    CHECK(nl.exit_code == cli::kExitOk);
    CHECK(parse_ok(nl).at("contained") == true);

    const auto eq = cli::run({"equivalence-report", "--dim", "1", "--expr", "x1*x1", "--support", "[0,1)"});
    CHECK(eq.exit_code == cli::kExitOk);
    const json doc = parse_ok(eq);
    CHECK(doc.at("overlap") == true);
    CHECK(doc.at("compared_level") == 14);

    const std::string part = write_temp("partition.json", R"({"cuts": [[0, 0.3, 0.7, 1]]})");
    const auto custom = cli::run({"equivalence-report", "--dim", "1", "--expr", "x1", "--support", "[0,1)",
                                  "--partition", part, "--k-max", "8"});
    CHECK(custom.exit_code == cli::kExitOk);
    CHECK(parse_ok(custom).at("classical").size() == 1);
}

TEST_CASE("help goes to stdout with exit 0") {
    const auto r = cli::run({"--help"});
    CHECK(r.exit_code == cli::kExitOk);
    CHECK(r.out.find("integrate") != std::string::npos);
    CHECK(r.err.empty());
}
