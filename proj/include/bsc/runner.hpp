#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsc/config.hpp"

namespace bsc {

/// Everything one run produces. `series` maps file names to CSV text.
struct RunOutputs {
  nlohmann::json report;
  std::map<std::string, std::string> series;
  std::vector<std::string> breaches;  // invariant violations; empty on success

  bool ok() const { return breaches.empty(); }
};

RunOutputs run(const RunConfig& config);

/// Canonical text of a report (stable key order, fixed indentation).
std::string report_text(const nlohmann::json& report);

/// Writes report.json and every series file into `dir`.
void write_outputs(const RunOutputs& out, const std::filesystem::path& dir);

/// Re-runs the config echoed in `report` and lists every field or series
/// hash that differs. Empty means bit-identical.
std::vector<std::string> replay_differences(const nlohmann::json& report);

/// 64-bit FNV-1a, used to fingerprint series files inside the report.
std::string fnv1a_hex(const std::string& bytes);

/// Timing scan rows: gT, residual1, residual2 on a uniform grid.
std::string timing_scan_csv(const TimingSearch& search, double step);

nlohmann::json to_json(const TimingSolution& s);
nlohmann::json to_json(const FeasibilityResult& r);

}  // namespace bsc
