#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mudomains/cli/output.hpp"

namespace mudomains::cli {

struct SuiteOptions {
  std::uint64_t seed = 0;
  Tolerances tol;
  int workers = 1;
  /// Multiplies every sample count; 1 is the full-size run.
  double scale = 1.0;
};

struct SuiteResult {
  std::string name;
  std::string title;
  bool pass = false;
  json details = json::object();
  double seconds = 0.0;
};

/// Individual suites, in order:
///   membership, group-laws, wwd-g2, wwd-g3, wwd-tetra, wwd-penta, penta-orbit,
///   fix-g2, fix-tetra, target, periodic, determinism.
const std::vector<std::string>& suite_names();

/// Expands the groups `wwd-all` and `all`; returns an empty list for unknown
/// names.
std::vector<std::string> expand_suite(std::string_view name);

SuiteResult run_suite(std::string_view name, const SuiteOptions& opts);

}  // namespace mudomains::cli
