#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mudomains/theorem_lab.hpp"

namespace mudomains::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "mudomains";
const char* tool_version();

/// Effective configuration of one invocation, echoed into every envelope.
/// The worker count is deliberately absent: results do not depend on it.
struct RunConfig {
  std::string command;
  json params = json::object();
  Tolerances tol;
  std::uint64_t seed = 0;
  BetaVariant beta = BetaVariant::Paper;
  std::string format = "json";
  std::string out;
};

json config_json(const RunConfig& cfg);
json tolerances_json(const Tolerances& tol);

/// {tool, version, timestamp, config, payload}
json make_envelope(const RunConfig& cfg, json payload, const std::string& timestamp);
/// ISO 8601 UTC, second resolution.
std::string utc_timestamp();

json to_json(cplx z);
json to_json(const DomainPoint& pt);
json to_json(const MembershipVerdict& v);
json to_json(const OrbitVerdict& v);
json to_json(const TrialResult& t);
json to_json(const ScanSummary& s);
json to_json(const FixSetReport& r);
json to_json(const TargetReport& r);

/// Writes via a sibling temporary file and rename, so readers never observe
/// a partial file. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

/// Header `step,re0,im0,re1,im1[,re2,im2],margin`; values printed with
/// 17 significant digits so parsing restores them exactly.
std::string orbit_csv(const OrbitRecord& rec);

struct CsvOrbit {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvOrbit parse_orbit_csv(const std::string& text);

}  // namespace mudomains::cli
