#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bsc/analysis.hpp"

namespace bsc {

inline constexpr int kFormatVersion = 1;

/// Validation failure; `path()` names the offending field, e.g. "cat.p".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ProtocolKind { generate, distinguish, coherence, full_pipeline };
enum class TimeUnits { seconds, gt };

const char* to_string(ProtocolKind k);
const char* to_string(TimeUnits u);

struct CatParams {
  double p = 0.5;
  double phi = 0.0;    // input cat for distinguish / coherence
  double eta0 = 1.0;
  double gamma = 0.0;  // input cat for distinguish / coherence

  bool operator==(const CatParams&) const = default;
};

/// Durations in the config's units. Flight times may instead come from
/// the velocity block.
struct GenerationTiming {
  double varphi1 = 0.0;
  unsigned m = 0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double field_gap = 0.0;

  bool operator==(const GenerationTiming&) const = default;
};

struct DetectionTiming {
  unsigned m = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  double Tprime = 0.0;
  double t1p = 0.0;
  double t2p = 0.0;
  double handoff = 0.0;  // generation end to first probe (full pipeline)

  bool operator==(const DetectionTiming&) const = default;
};

/// Flight durations as distance / velocity (SI units).
struct VelocityTiming {
  double v1 = 0.0;
  double v2 = 0.0;
  double probe_v1 = 0.0;
  double probe_v2 = 0.0;
  double ramsey_to_cavity = 0.0;
  double cavity_to_decoder = 0.0;
  double decoder_to_coherence = 0.0;
  std::optional<double> relative_spread;  // Delta v / v

  bool operator==(const VelocityTiming&) const = default;
};

struct JitterConfig {
  double relative_sigma = 0.0;
  JitterDistribution distribution = JitterDistribution::uniform;
  std::size_t trials = 1000;
  std::optional<std::uint64_t> seed;  // defaults to the run seed

  bool operator==(const JitterConfig&) const = default;
};

struct FeasibilityConfig {
  double tau_at = 0.0;
  double tau_cav = 0.0;

  bool operator==(const FeasibilityConfig&) const = default;
};

struct TimingSearchConfig {
  double gt_min = 0.0;
  double gt_max = 50.0;
  double tolerance = 1e-3;
  double refine_step = 1e-3;

  bool operator==(const TimingSearchConfig&) const = default;
};

struct RunConfig {
  ProtocolKind protocol = ProtocolKind::generate;
  std::uint64_t seed = 1;
  std::size_t trials = 10000;
  int workers = 0;
  std::size_t fock_cutoff = HilbertLayout::kDefaultCutoff;
  TimeUnits units = TimeUnits::gt;
  PhysicalParams physics;
  CatParams cat;
  GenerationTiming generation;
  DetectionTiming detection;
  std::optional<VelocityTiming> velocity;
  std::optional<JitterConfig> jitter;
  std::optional<FeasibilityConfig> feasibility;
  TimingSearchConfig timing_search;
  Tolerances tolerances;

  bool operator==(const RunConfig& o) const;

  GenerationSchedule generation_schedule() const;
  DistinctionSchedule distinction_schedule(std::size_t first_atom = 0) const;
  CoherenceSchedule coherence_schedule(std::size_t first_atom = 0) const;
  CatSpec input_cat() const;
  double seconds(double value) const;  // config duration -> seconds
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical form with every field spelled out; parse(serialize(c)) == c.
nlohmann::json serialize_config(const RunConfig& c);

}  // namespace bsc
