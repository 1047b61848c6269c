#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "bsc/dynamics.hpp"
#include "bsc/states.hpp"

namespace bsc {

struct ScheduleError : Error {
  using Error::Error;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// ---------------------------------------------------------------------------
// Events

/// Replaces atoms (first, second), which must both be down, with the
/// entangled pair N(|up_first down_second> + eta0 |down_first up_second>).
struct PrepareAtomPair {
  std::size_t first = 0;
  std::size_t second = 1;
  double eta0 = 1.0;
};
struct RamseyZone {
  std::size_t atom = 0;
  RamseySetting setting;
};
struct CavityCrossing {
  std::size_t atom = 0;
  double duration = 0.0;
};
struct FreeFlight {
  double duration = 0.0;
  Subsystems acted_on;
};
struct Detection {
  std::size_t atom = 0;
};

using EventKind = std::variant<PrepareAtomPair, RamseyZone, CavityCrossing, FreeFlight, Detection>;

struct ProtocolEvent {
  EventKind kind;
  double start = 0.0;  // seconds from the first event of the protocol
  std::string label;
};

using EventList = std::vector<ProtocolEvent>;

/// Checks time ordering and that cavity crossings never overlap.
void validate_events(const EventList& events, const HilbertLayout& layout);

EventList shift_events(EventList events, double offset);
double end_time(const EventList& events);

// ---------------------------------------------------------------------------
// Schedules

/// Two-atom generation of a two-photon cat from the vacuum.
///
/// Timeline (seconds, t = 0 when atom 1 crosses the preparing zone):
///   atom 1: zone at 0, flight tau1, cavity T1 = (4m+1) pi / 2g
///   atom 2: zone at T0, flight tau2, cavity T2 = gT2 / g (default 41 pi / 4g)
/// Field gap between the two crossings is T = T0 - tau1 - T1 + tau2.
struct GenerationSchedule {
  double p = 0.5;
  double varphi1 = 0.0;
  double eta0 = 1.0;
  unsigned m = 0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double T0 = 0.0;  // separation of the two zone crossings, >= tau1 + T1
  double gT2 = 0.0; // 0 selects 41 pi / 4
  PhysicalParams params;
  std::size_t first_atom = 0;

  void validate() const;

  double theta1() const;
  double theta2() const;
  double varphi2() const;
  double T1() const;
  double T2() const;
  double field_gap() const;  // T
  double zone_time1() const { return 0.0; }
  double zone_time2() const { return T0; }

  /// Picks T0 so that the field gap equals `gap`.
  GenerationSchedule& set_field_gap(double gap);
};

/// Two probe atoms reading the cat components.
struct DistinctionSchedule {
  double p = 0.5;
  double phi = 0.0;
  unsigned m = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  double Tprime = 0.0;  // atom-1 cavity exit to atom-2 cavity entry
  double gTP1 = 0.0;    // 0 selects 41 pi / 4
  PhysicalParams params;
  std::size_t first_atom = 0;

  void validate() const;

  double TP1() const;
  double TP2() const;
  double theta_d() const;
  double varphi_d1() const;
  double varphi_d2() const;
};

/// Distinction followed by the coherence-decoding zone on each probe.
struct CoherenceSchedule {
  DistinctionSchedule base;
  double t1p = 0.0;
  double t2p = 0.0;
  double gamma = 0.0;

  void validate() const;

  double tau() const;
  double theta_c() const;
  double varphi_c() const;
};

/// Multiplier on every duration set by one atom's velocity (flights and
/// its cavity crossing). Zone settings always keep their nominal values and
/// the waiting gap between consecutive atoms is not scaled.
struct TransitScale {
  double first = 1.0;
  double second = 1.0;
};

EventList build_generation(const GenerationSchedule& s, TransitScale scale = {});
EventList build_distinction(const DistinctionSchedule& s, TransitScale scale = {});
EventList build_coherence(const CoherenceSchedule& s, TransitScale scale = {});

/// Vacuum cavity with every atom down; the first generation event injects the pair.
QuantumState generation_initial_state(const HilbertLayout& layout);

/// Mean phase of the generated cat, phi = -(varphi1 + omega (tau1 + T)).
double generation_phase(const GenerationSchedule& s);
/// gamma = omega (t_R2 - t_R1 - T1), with t_Rj the zone crossing instants.
double generation_gamma(const GenerationSchedule& s);

/// The cat the generation protocol leaves in the cavity. With the JC and
/// Ramsey sign conventions used here the second component carries an
/// extra factor -1, so eta = -eta0 e^{i gamma} = eta0 e^{i (gamma + pi)}.
CatSpec generation_target(const GenerationSchedule& s);
double generation_effective_gamma(const GenerationSchedule& s);

// ---------------------------------------------------------------------------
// Interpretation

struct MeasurementRecord {
  std::size_t atom;
  Level outcome;
  double probability;
  double p_up;
  double p_down;
};

struct RunDiagnostics {
  double norm_drift = 0.0;    // max | ||psi|| - 1 | over the run
  double max_leakage = 0.0;   // max population of the top Fock level
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct RunResult {
  QuantumState final_state;
  std::vector<MeasurementRecord> outcomes;
  RunDiagnostics diagnostics;
};

RunResult run_protocol(const EventList& events, const QuantumState& initial,
                       const PhysicalParams& params, RngStream rng,
                       const Tolerances& tol = {});

/// Applies one non-measurement event.
QuantumState apply_event(const ProtocolEvent& ev, const QuantumState& state,
                         const PhysicalParams& params, const Tolerances& tol = {});

/// One leaf of the measurement tree.
struct Branch {
  std::vector<Level> outcomes;
  double probability = 1.0;
  QuantumState state;
};

/// Follows every measurement outcome deterministically. Leaves whose
/// probability falls below the branch tolerance are dropped.
std::vector<Branch> enumerate_branches(const EventList& events, const QuantumState& initial,
                                       const PhysicalParams& params, const Tolerances& tol = {});

/// Key like "up,down" for an outcome record.
std::string outcome_key(const std::vector<Level>& outcomes);

/// Exact joint distribution of measurement records.
std::map<std::string, double> outcome_distribution(const EventList& events, const QuantumState& initial,
                                                   const PhysicalParams& params,
                                                   const Tolerances& tol = {});

/// Sum of (up,up) and (down,down).
double parallel_probability(const std::map<std::string, double>& dist);

}  // namespace bsc
