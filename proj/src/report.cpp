#include "dyadint/report.hpp"

#include <cstdio>
#include <sstream>

namespace dyadint {

using nlohmann::json;

namespace {

// Shortest round-trip decimal, the same digits the JSON writer emits.
std::string num(double v) {
    json j = v;
    return j.dump();
}

const char* topology_name(Topology t) { return t == Topology::SemiClosed ? "semiclosed" : "closed"; }

} // namespace

json to_json(const Interval& e) { return json::array({e.lo, e.hi}); }

json to_json(const DyadicSumReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k}, {"L", row.lower}, {"U", row.upper}, {"cubes", row.cubes}, {"pad", row.pad}});
    }
    json verdict = {{"kind", to_string(r.verdict.kind)},
                    {"lower", r.verdict.enclosure.lo},
                    {"upper", r.verdict.enclosure.hi},
                    {"level", r.verdict.level},
                    {"gap", r.verdict.gap}};
    if (!r.verdict.note.empty()) {
        verdict["note"] = r.verdict.note;
    }
    json out = {{"dim", r.dim},
                {"strategy", to_string(r.strategy)},
                {"topology", topology_name(r.topology)},
                {"epsilon", r.epsilon},
                {"k_max", r.k_max},
                {"rows", std::move(rows)},
                {"verdict", std::move(verdict)},
                {"pad", r.pad}};
    if (!r.steps.empty()) {
        json steps = json::array();
        for (const auto& s : r.steps) {
            steps.push_back({{"level", s.cube.level()},
                             {"corner", std::vector<std::int64_t>(s.cube.corners().begin(), s.cube.corners().end())},
                             {"lo", s.bounds.lo},
                             {"hi", s.bounds.hi}});
        }
        out["steps"] = std::move(steps);
    }
    return out;
}

json to_json(const VerySmallResult& r) {
    return {{"very_small", r.very_small},
            {"witness_level", r.witness_level},
            {"covering_volume", r.covering_volume},
            {"report", to_json(r.report)}};
}

json to_json(const AdditivityReport& r) {
    return {{"first", to_json(r.first)},
            {"second", to_json(r.second)},
            {"united", to_json(r.united)},
            {"sum", to_json(r.sum)},
            {"consistent", r.consistent},
            {"overlap_check", to_json(r.overlap)}};
}

json to_json(const NLCheck& r) {
    return {{"g", r.g.to_string()},
            {"F", r.F.to_string()},
            {"a", r.a},
            {"b", r.b},
            {"integral", to_json(r.integral)},
            {"nl_value", to_json(r.nl_value)},
            {"contained", r.contained},
            {"warnings", r.warnings},
            {"report", to_json(r.report)}};
}

json to_json(const FubiniReport& r) {
    json out = {{"direct", to_json(r.direct)},
                {"repeated", to_json(r.repeated)},
                {"overlap", r.overlap},
                {"critical", r.critical}};
    if (r.swapped) {
        out["swapped"] = to_json(*r.swapped);
        out["swapped_overlap"] = r.swapped_overlap;
    }
    return out;
}

json to_json(const EquivalenceReport& r) {
    json classical = json::array();
    for (const auto& row : r.classical) {
        classical.push_back(
            {{"kind", row.kind}, {"cells", row.sums.cells}, {"L", row.sums.lower}, {"U", row.sums.upper}});
    }
    return {{"semiclosed", to_json(r.semiclosed)},
            {"closed", to_json(r.closed)},
            {"classical", std::move(classical)},
            {"enclosures",
             {{"semiclosed", to_json(r.semiclosed_enclosure)},
              {"closed", to_json(r.closed_enclosure)},
              {"classical", to_json(r.classical_enclosure)}}},
            {"classical_consistent", r.classical_consistent},
            {"overlap", r.overlap},
            {"compared_level", r.compared_level},
            {"closed_difference", r.closed_difference},
            {"stabilized_gap", r.stabilized_gap},
            {"limit_agreement", r.limit_agreement}};
}

std::string dump_document(json doc) {
    doc["schema"] = kReportSchema;
    return doc.dump(2) + "\n";
}

std::string rows_csv(const DyadicSumReport& r) { return rows_csv(r, "", true); }

std::string rows_csv(const DyadicSumReport& r, const std::string& series, bool header) {
    std::ostringstream out;
    const bool labelled = !series.empty();
    if (header) {
        out << (labelled ? "series,k,L,U,cubes,pad\n" : "k,L,U,cubes,pad\n");
    }
    for (const auto& row : r.rows) {
        if (labelled) {
            out << series << ',';
        }
        out << row.k << ',' << num(row.lower) << ',' << num(row.upper) << ',' << row.cubes << ',' << num(row.pad)
            << '\n';
    }
    return out.str();
}

std::string rows_table(const DyadicSumReport& r) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%4s  %24s  %24s  %12s  %10s\n", "k", "L_k", "U_k", "cubes", "pad");
    out << line;
    for (const auto& row : r.rows) {
        std::snprintf(line, sizeof line, "%4d  %24.17g  %24.17g  %12llu  %10.3g\n", row.k, row.lower, row.upper,
                      static_cast<unsigned long long>(row.cubes), row.pad);
        out << line;
    }
    const auto& v = r.verdict;
    out << "verdict: " << to_string(v.kind) << "  enclosure [" << num(v.enclosure.lo) << ", " << num(v.enclosure.hi)
        << "]  gap " << num(v.gap);
    if (!v.note.empty()) {
        out << "  (" << v.note << ")";
    }
    out << '\n';
    return out.str();
}

namespace {

std::string check_report(const json& r, const std::string& where) {
    if (!r.is_object()) {
        return where + ": not an object";
    }
    for (const char* key : {"dim", "k_max"}) {
        if (!r.contains(key) || !r[key].is_number_integer()) {
            return where + ": missing integer '" + key + "'";
        }
    }
    for (const char* key : {"epsilon", "pad"}) {
        if (!r.contains(key) || !r[key].is_number()) {
            return where + ": missing number '" + key + "'";
        }
    }
    if (!r.contains("strategy") || !r["strategy"].is_string()) {
        return where + ": missing 'strategy'";
    }
    const std::string strategy = r["strategy"].get<std::string>();
    if (strategy != "uniform" && strategy != "adaptive") {
        return where + ": unknown strategy";
    }
    if (!r.contains("rows") || !r["rows"].is_array()) {
        return where + ": missing 'rows'";
    }
    for (const auto& row : r["rows"]) {
        if (!row.is_object() || !row.contains("k") || !row["k"].is_number_integer() || !row.contains("L") ||
            !row["L"].is_number() || !row.contains("U") || !row["U"].is_number() || !row.contains("cubes") ||
            !row["cubes"].is_number_unsigned() || !row.contains("pad") || !row["pad"].is_number()) {
            return where + ": malformed row";
        }
        if (row["L"].get<double>() > row["U"].get<double>() + row["pad"].get<double>()) {
            return where + ": row with L > U";
        }
    }
    if (!r.contains("verdict") || !r["verdict"].is_object()) {
        return where + ": missing 'verdict'";
    }
    const auto& v = r["verdict"];
    if (!v.contains("kind") || !v["kind"].is_string()) {
        return where + ": verdict without kind";
    }
    const std::string kind = v["kind"].get<std::string>();
    if (kind != "Integrable" && kind != "Undecided" && kind != "NotConverging") {
        return where + ": unknown verdict kind";
    }
    for (const char* key : {"lower", "upper", "gap"}) {
        if (!v.contains(key) || !v[key].is_number()) {
            return where + ": verdict missing '" + key + "'";
        }
    }
    if (v["lower"].get<double>() > v["upper"].get<double>()) {
        return where + ": verdict enclosure is empty";
    }
    return "";
}

bool is_pair(const json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

} // namespace

std::string validate_document(const json& doc) {
    if (!doc.is_object()) {
        return "document is not an object";
    }
    if (!doc.contains("schema") || doc["schema"] != kReportSchema) {
        return "missing or wrong schema";
    }
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        return "missing kind";
    }
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "integrate" || kind == "measure") {
        return check_report(doc, kind);
    }
    if (kind == "very-small") {
        if (!doc.contains("very_small") || !doc["very_small"].is_boolean() || !doc.contains("witness_level") ||
            !doc.contains("covering_volume")) {
            return "very-small: missing verdict fields";
        }
        return check_report(doc["report"], "very-small.report");
    }
    if (kind == "nl-check") {
        if (!doc.contains("contained") || !doc["contained"].is_boolean() || !is_pair(doc.value("nl_value", json())) ||
            !is_pair(doc.value("integral", json()))) {
            return "nl-check: missing fields";
        }
        return check_report(doc["report"], "nl-check.report");
    }
    if (kind == "fubini-check") {
        if (!doc.contains("overlap") || !doc["overlap"].is_boolean() || !doc.contains("critical")) {
            return "fubini-check: missing overlap";
        }
        for (const char* key : {"direct", "repeated"}) {
            if (auto e = check_report(doc.value(key, json()), std::string("fubini-check.") + key); !e.empty()) {
                return e;
            }
        }
        if (doc.contains("swapped")) {
            return check_report(doc["swapped"], "fubini-check.swapped");
        }
        return "";
    }
    if (kind == "equivalence-report") {
        for (const char* key : {"semiclosed", "closed"}) {
            if (auto e = check_report(doc.value(key, json()), std::string("equivalence-report.") + key); !e.empty()) {
                return e;
            }
        }
        if (!doc.contains("classical") || !doc["classical"].is_array() || !doc.contains("overlap")) {
            return "equivalence-report: missing classical brackets";
        }
        return "";
    }
    if (kind == "additivity") {
        for (const char* key : {"first", "second", "united"}) {
            if (auto e = check_report(doc.value(key, json()), std::string("additivity.") + key); !e.empty()) {
                return e;
            }
        }
        return "";
    }
    if (kind == "error") {
        const json e = doc.value("error", json());
        if (!e.is_object() || !e.contains("type") || !e["type"].is_string() || !e.contains("message") ||
            !e["message"].is_string()) {
            return "error: missing type or message";
        }
        return "";
    }
    return "unknown kind " + kind;
}

} // namespace dyadint
