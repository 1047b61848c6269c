#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bsc/protocols.hpp"

namespace bsc {

// ---------------------------------------------------------------------------
// Joint timing conditions for the second generation atom:
//   sin(gT + pi/4) = 1   and   sin(sqrt(2) gT) = 1

struct TimingSolution {
  double gT = 0.0;          // exact maximum (8k+1) pi/4 of the first condition
  double residual1 = 0.0;   // |sin(gT + pi/4) - 1|
  double residual2 = 0.0;   // |sin(sqrt(2) gT) - 1|
  double joint_fidelity = 0.0;  // worst-case generation fidelity using T2 = gT/g
  double refined_gT = 0.0;        // nearby minimizer of max(residual1, residual2)
  double refined_residual = 0.0;

  double max_residual() const { return residual1 > residual2 ? residual1 : residual2; }
};

struct TimingSearch {
  double gt_min = 0.0;
  double gt_max = 50.0;
  double tolerance = 1e-3;
  double refine_step = 1e-3;  // scan step of the continuous refinement
};

double timing_residual1(double gT);
double timing_residual2(double gT);

/// Candidates are the exact solutions gT = (8k+1) pi/4 of the first
/// condition; a candidate is kept when both residuals are strictly below the
/// tolerance. Output is sorted by max residual.
std::vector<TimingSolution> solve_joint_timing(const TimingSearch& search);

/// Worst zero-gap generation fidelity over p in {0, 0.1, ..., 1} and
/// eta0 = +-1 when the second atom's pulse area is `gT`.
double generation_fidelity_for_area(double gT);

// ---------------------------------------------------------------------------
// Lifetime budget

struct FeasibilityBudget {
  double tau_at = 0.0;
  double tau_cav = 0.0;
  double total_sequence_time = 0.0;
  double max_interaction_time = 0.0;

  void validate() const;
};

struct FeasibilityResult {
  bool pass = false;
  double atom_margin = 0.0;      // tau_at / T
  double cavity_margin = 0.0;    // tau_cav / T
  double sequence_margin = 0.0;  // tau_at / total sequence time
};

FeasibilityResult feasibility_check(const FeasibilityBudget& budget);

// ---------------------------------------------------------------------------
// Velocity-jitter sweeps

enum class JitterDistribution { uniform, gaussian };

/// Per-atom relative velocity error. Uniform draws lie in
/// [-relative_sigma, +relative_sigma]; gaussian draws have standard
/// deviation relative_sigma.
struct JitterModel {
  double relative_sigma = 0.0;
  JitterDistribution distribution = JitterDistribution::uniform;
  std::uint64_t seed = 0;

  void validate() const;
  TransitScale draw(RngStream& rng) const;
};

const char* to_string(JitterDistribution d);
JitterDistribution jitter_distribution_from(const std::string& name);

/// Generation from the vacuum; fidelity is against the nominal target,
/// correctness is the probability that both atoms end in the ground state.
struct GenerationCase {
  GenerationSchedule schedule;
  std::size_t fock_cutoff = HilbertLayout::kDefaultCutoff;
};

/// Probes read a prepared cavity state. Correctness is the probability of
/// parallel records when `expect_parallel`, otherwise of antiparallel ones;
/// fidelity is the final cavity overlap with the vacuum.
struct DistinctionCase {
  DistinctionSchedule schedule;
  CatSpec input;
  bool expect_parallel = true;
  std::size_t fock_cutoff = HilbertLayout::kDefaultCutoff;
};

struct CoherenceCase {
  CoherenceSchedule schedule;
  CatSpec input;
  bool expect_parallel = true;
  std::size_t fock_cutoff = HilbertLayout::kDefaultCutoff;
};

using SweepCase = std::variant<GenerationCase, DistinctionCase, CoherenceCase>;

struct TrialMetrics {
  double scale_first = 1.0;
  double scale_second = 1.0;
  double fidelity = 0.0;
  double correctness = 0.0;
};

/// Deterministic evaluation (branch probabilities, no sampling).
TrialMetrics evaluate_trial(const SweepCase& c, TransitScale scale);

struct Summary {
  double min = 0.0;
  double mean = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

Summary summarize(std::vector<double> values);

struct SweepReport {
  JitterModel model;
  std::size_t trials = 0;
  std::vector<TrialMetrics> per_trial;
  Summary fidelity;
  Summary correctness;
};

/// Trial i always uses RngStream(model.seed).split(i), so the result does
/// not depend on the worker count. `workers` = 0 leaves the OpenMP default.
SweepReport jitter_sweep(const SweepCase& c, const JitterModel& model, std::size_t trials,
                         int workers = 0);
/// Single-threaded reference with identical output.
SweepReport jitter_sweep_serial(const SweepCase& c, const JitterModel& model, std::size_t trials);

// ---------------------------------------------------------------------------
// Sampled outcome statistics

struct EmpiricalDistribution {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> counts;

  double frequency(const std::string& key) const;
};

/// Runs the protocol `trials` times with trial i on rng.split(i).
EmpiricalDistribution outcome_statistics(const EventList& events, const QuantumState& initial,
                                         const PhysicalParams& params, std::size_t trials,
                                         const RngStream& rng, int workers = 0);
EmpiricalDistribution outcome_statistics_serial(const EventList& events, const QuantumState& initial,
                                                const PhysicalParams& params, std::size_t trials,
                                                const RngStream& rng);

}  // namespace bsc
