#ifndef DYADINT_REPORT_HPP
#define DYADINT_REPORT_HPP

#include "dyadint/calculus.hpp"
#include "dyadint/classical.hpp"
#include "dyadint/integrator.hpp"

#include <json.hpp>

#include <string>

namespace dyadint {

inline constexpr const char* kReportSchema = "dyadint/1";

// JSON documents. Doubles use shortest round-trip formatting and object keys
// are sorted, so equal reports serialize to equal bytes.
nlohmann::json to_json(const Interval& e);
nlohmann::json to_json(const DyadicSumReport& r);
nlohmann::json to_json(const VerySmallResult& r);
nlohmann::json to_json(const AdditivityReport& r);
nlohmann::json to_json(const NLCheck& r);
nlohmann::json to_json(const FubiniReport& r);
nlohmann::json to_json(const EquivalenceReport& r);

// Top-level document: the report plus "schema".
std::string dump_document(nlohmann::json doc);

// Header plus one line per row: k,L,U,cubes,pad. With a series label the
// header gains a leading "series" column and the header line is optional,
// so several reports can share one table.
std::string rows_csv(const DyadicSumReport& r);
std::string rows_csv(const DyadicSumReport& r, const std::string& series, bool header);

// Fixed-width text table of the rows followed by the verdict.
std::string rows_table(const DyadicSumReport& r);

// Check that a document has the fields promised for its kind. Returns an
// empty string when valid, otherwise the first problem found.
std::string validate_document(const nlohmann::json& doc);

} // namespace dyadint

#endif
