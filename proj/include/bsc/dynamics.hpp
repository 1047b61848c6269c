#pragma once

#include "bsc/fockspace.hpp"
#include "bsc/rng.hpp"

namespace bsc {

struct DegenerateBranchError : Error {
  using Error::Error;
};

/// Resonant coupling g and mode frequency omega, both in rad/s.
struct PhysicalParams {
  double g = 1.0;
  double omega = 1.0;

  void validate() const;
  /// Duration with the given pulse area g*t.
  double time_for_area(double gt) const { return gt / g; }

  bool operator==(const PhysicalParams&) const = default;
};

/// Ramsey zone rotation:
///   |up>   -> cos(theta/2)|up> - e^{i phi} sin(theta/2)|down>
///   |down> -> e^{-i phi} sin(theta/2)|up> + cos(theta/2)|down>
struct RamseySetting {
  double theta = 0.0;
  double phi = 0.0;
};

/// Resonant atom-cavity evolution in the interaction picture:
///   |up,n>   -> cos(g sqrt(n+1) t)|up,n> - sin(g sqrt(n+1) t)|down,n+1>
///   |down,n> -> cos(g sqrt(n) t)|down,n> + sin(g sqrt(n) t)|up,n-1>
/// Throws CutoffError when the (up, n_max) sector is populated above
/// `leak_tol`, since its partner |down, n_max+1> is not retained.
QuantumState jc_evolve(const QuantumState& state, std::size_t atom, const PhysicalParams& params,
                       double duration, double leak_tol = NORM_TOL);

QuantumState ramsey_rotate(const QuantumState& state, std::size_t atom, const RamseySetting& setting);

/// Free evolution under omega (a^dag a + sigma_z/2), gauge fixed so |down>
/// carries no phase: |n> picks up e^{-i n omega t} when the cavity is
/// selected, and |up> of each selected atom picks up e^{-i omega t}.
QuantumState free_evolve(const QuantumState& state, const PhysicalParams& params, double duration,
                         const Subsystems& acted_on);

struct BranchProbabilities {
  double up = 0.0;
  double down = 0.0;
};

BranchProbabilities branch_probabilities(const QuantumState& state, std::size_t atom);

/// Projects `atom` onto `level` and renormalizes. Returns the branch
/// probability through `probability`.
QuantumState project_atom(const QuantumState& state, std::size_t atom, Level level,
                          double& probability, double branch_tol = BRANCH_TOL);

struct Measurement {
  Level outcome;
  QuantumState collapsed;
  double probability;
};

/// Born-rule sample of the atom's level; consumes one uniform draw.
Measurement measure_atom(const QuantumState& state, std::size_t atom, RngStream& rng,
                         double branch_tol = BRANCH_TOL);

}  // namespace bsc
