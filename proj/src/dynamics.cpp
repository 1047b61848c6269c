#include "bsc/dynamics.hpp"

#include <bit>
#include <cmath>

namespace bsc {

void PhysicalParams::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw Error("coupling g must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw Error("mode frequency omega must be positive");
}

QuantumState jc_evolve(const QuantumState& state, std::size_t atom, const PhysicalParams& params,
                       double duration, double leak_tol) {
  const HilbertLayout& L = state.layout();
  L.check_atom(atom);
  if (duration < 0.0) throw Error("jc_evolve duration must be non-negative");

  const std::size_t stride = L.atom_states();
  const std::size_t bit = L.atom_bit(atom);
  const std::size_t top = L.fock_cutoff();
  const double gt = params.g * duration;

  double top_weight = 0.0;
  for (std::size_t rest = 0; rest < stride; ++rest) {
    if (rest & bit) top_weight += std::norm(state[top * stride + rest]);
  }
  if (top_weight > leak_tol) {
    throw CutoffError("atom excited with the cavity at the Fock cutoff; raise fock_cutoff");
  }

  QuantumState out = state;
  // Each block {|up,n>, |down,n+1>} rotates by angle g sqrt(n+1) t.
  for (std::size_t rest = 0; rest < stride; ++rest) {
    if (rest & bit) continue;  // enumerate the other atoms with this atom down
    const std::size_t up_off = rest | bit;
    for (std::size_t n = 0; n < top; ++n) {
      const std::size_t iu = n * stride + up_off;
      const std::size_t id = (n + 1) * stride + rest;
      const double angle = gt * std::sqrt(static_cast<double>(n + 1));
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const cplx au = state[iu];
      const cplx ad = state[id];
      out[iu] = c * au + s * ad;
      out[id] = -s * au + c * ad;
    }
  }
  return out;
}

QuantumState ramsey_rotate(const QuantumState& state, std::size_t atom, const RamseySetting& setting) {
  const HilbertLayout& L = state.layout();
  L.check_atom(atom);
  const std::size_t bit = L.atom_bit(atom);
  const double c = std::cos(0.5 * setting.theta);
  const double s = std::sin(0.5 * setting.theta);
  const cplx e_plus = std::polar(1.0, setting.phi);
  const cplx e_minus = std::conj(e_plus);

  QuantumState out = state;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (i & bit) continue;
    const std::size_t iu = i | bit;
    const cplx au = state[iu];
    const cplx ad = state[i];
    out[iu] = c * au + e_minus * s * ad;
    out[i] = -e_plus * s * au + c * ad;
  }
  return out;
}

QuantumState free_evolve(const QuantumState& state, const PhysicalParams& params, double duration,
                         const Subsystems& acted_on) {
  const HilbertLayout& L = state.layout();
  if (duration < 0.0) throw Error("free_evolve duration must be non-negative");
  std::size_t mask = 0;
  for (auto a : acted_on.atoms) {
    L.check_atom(a);
    mask |= L.atom_bit(a);
  }
  const double wt = params.omega * duration;
  QuantumState out = state;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    std::size_t quanta = static_cast<std::size_t>(std::popcount(i & mask));
    if (acted_on.cavity) quanta += L.photons_of(i);
    if (quanta == 0) continue;
    out[i] *= std::polar(1.0, -static_cast<double>(quanta) * wt);
  }
  return out;
}

BranchProbabilities branch_probabilities(const QuantumState& state, std::size_t atom) {
  const HilbertLayout& L = state.layout();
  L.check_atom(atom);
  const std::size_t bit = L.atom_bit(atom);
  BranchProbabilities p;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    (i & bit ? p.up : p.down) += std::norm(state[i]);
  }
  return p;
}

QuantumState project_atom(const QuantumState& state, std::size_t atom, Level level,
                          double& probability, double branch_tol) {
  const auto bp = branch_probabilities(state, atom);
  probability = level == Level::up ? bp.up : bp.down;
  if (probability < branch_tol) {
    throw DegenerateBranchError(std::string("projection onto a branch of probability below ") +
                                "tolerance (atom " + std::to_string(atom) + ", " + to_string(level) + ")");
  }
  const std::size_t bit = state.layout().atom_bit(atom);
  const bool want_up = level == Level::up;
  const double scale = 1.0 / std::sqrt(probability);
  QuantumState out(state.layout());
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (static_cast<bool>(i & bit) == want_up) out[i] = state[i] * scale;
  }
  return out;
}

Measurement measure_atom(const QuantumState& state, std::size_t atom, RngStream& rng,
                         double branch_tol) {
  const auto bp = branch_probabilities(state, atom);
  const double total = bp.up + bp.down;
  const Level outcome = rng.uniform() * total < bp.up ? Level::up : Level::down;
  double prob = 0.0;
  QuantumState collapsed = project_atom(state, atom, outcome, prob, branch_tol);
  return {outcome, std::move(collapsed), prob};
}

}  // namespace bsc
