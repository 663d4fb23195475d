#pragma once
// JSON and CSV serialization: profiles, matchings, evaluation results, bound
// tables, and n=3 sweep summaries.  JSON objects keep insertion order, CSV
// numbers carry 17 significant digits, result documents embed the generating
// config plus a format-version tag, and nothing embeds timestamps, so reruns
// are byte-identical.  Assignments are 1-indexed on disk.

#include <json.hpp>

#include "matchwelfare/core.hpp"
#include "matchwelfare/n3lab.hpp"

namespace matchwelfare {

using Json = nlohmann::ordered_json;

inline constexpr const char* kJsonFormatVersion = "matchwelfare-json-1";
inline constexpr const char* kCsvFormatVersion = "matchwelfare-csv-1";

Json profile_to_json(const ValuationProfile& p);
ValuationProfile profile_from_json(const Json& j);

Json matching_to_json(const Matching& m);
Matching matching_from_json(const Json& j, int n);

Json method_to_json(const EvalMethod& m);
Json result_to_json(const MechanismResult& r);
Json ratio_to_json(const RatioReport& r);

// Wraps a payload with the format version and the config that produced it.
Json document(const Json& config, const char* payload_key, Json payload);

std::string format_double(double v);  // %.17g

std::string bounds_to_csv(const std::vector<BoundCheck>& checks, const Json& config);
std::string surface_to_csv(const std::vector<n3::SurfaceRow>& rows, const Json& config);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace matchwelfare
