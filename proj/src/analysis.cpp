#include "bsc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

namespace bsc {

namespace {
constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

double joint_residual(double gT) { return std::max(timing_residual1(gT), timing_residual2(gT)); }

// Dense scan of max(residual1, residual2) over [center - half, center + half]
// followed by a Brent polish inside the best scan cell.
std::pair<double, double> refine(double center, double half, double step) {
  double best_x = center;
  double best_f = joint_residual(center);
  const auto n = static_cast<long>(std::ceil(half / step));
  for (long i = -n; i <= n; ++i) {
    const double x = center + static_cast<double>(i) * step;
    const double f = joint_residual(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  auto [x, f] = boost::math::tools::brent_find_minima(joint_residual, best_x - step, best_x + step,
                                                     std::numeric_limits<double>::digits / 2);
  if (f < best_f) return {x, f};
  return {best_x, best_f};
}
}  // namespace

double timing_residual1(double gT) { return std::abs(std::sin(gT + kPi / 4.0) - 1.0); }
double timing_residual2(double gT) { return std::abs(std::sin(kSqrt2 * gT) - 1.0); }

double generation_fidelity_for_area(double gT) {
  const HilbertLayout layout(HilbertLayout::kDefaultCutoff, 2);
  double worst = 1.0;
  for (int ip = 0; ip <= 10; ++ip) {
    for (double eta0 : {1.0, -1.0}) {
      GenerationSchedule s;
      s.p = 0.1 * ip;
      s.eta0 = eta0;
      s.gT2 = gT;
      s.set_field_gap(0.0);
      const auto r = run_protocol(build_generation(s), generation_initial_state(layout), s.params, RngStream{});
      worst = std::min(worst, cavity_fidelity(r.final_state, generation_target(s)));
    }
  }
  return worst;
}

std::vector<TimingSolution> solve_joint_timing(const TimingSearch& search) {
  if (!(search.gt_max > search.gt_min)) throw Error("timing search range is empty");
  if (!(search.tolerance >= 0.0)) throw Error("timing tolerance must be non-negative");
  if (!(search.refine_step > 0.0)) throw Error("refine_step must be positive");

  std::vector<TimingSolution> out;
  const auto k_lo = static_cast<long>(std::ceil((4.0 * search.gt_min / kPi - 1.0) / 8.0));
  for (long k = std::max(0L, k_lo);; ++k) {
    const double gT = (8.0 * static_cast<double>(k) + 1.0) * kPi / 4.0;
    if (gT > search.gt_max) break;
    if (gT < search.gt_min) continue;
    TimingSolution s;
    s.gT = gT;
    s.residual1 = timing_residual1(gT);
    s.residual2 = timing_residual2(gT);
    if (!(s.residual1 < search.tolerance && s.residual2 < search.tolerance)) continue;
    std::tie(s.refined_gT, s.refined_residual) = refine(gT, kPi / 8.0, search.refine_step);
    s.joint_fidelity = generation_fidelity_for_area(gT);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(),
            [](const TimingSolution& a, const TimingSolution& b) { return a.max_residual() < b.max_residual(); });
  return out;
}

void FeasibilityBudget::validate() const {
  if (!(tau_at > 0.0) || !(tau_cav > 0.0)) throw Error("lifetimes must be positive");
  if (!(max_interaction_time >= 0.0) || !(total_sequence_time >= 0.0)) {
    throw Error("interaction and sequence times must be non-negative");
  }
}

FeasibilityResult feasibility_check(const FeasibilityBudget& b) {
  b.validate();
  FeasibilityResult r;
  const double T = b.max_interaction_time;
  r.pass = b.tau_at > T && b.tau_cav > T;
  r.atom_margin = T > 0.0 ? b.tau_at / T : INFINITY;
  r.cavity_margin = T > 0.0 ? b.tau_cav / T : INFINITY;
  r.sequence_margin = b.total_sequence_time > 0.0 ? b.tau_at / b.total_sequence_time : INFINITY;
  return r;
}

}  // namespace bsc
