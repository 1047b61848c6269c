// Trial-parallel kernels. Every kernel writes trial i into slot i of a
// pre-sized buffer and reduces afterwards in index order, so the OpenMP
// versions are bit-identical to the serial references below them.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "bsc/analysis.hpp"

namespace bsc {

void JitterModel::validate() const {
  if (!(relative_sigma >= 0.0) || !std::isfinite(relative_sigma)) {
    throw Error("relative_sigma must be non-negative");
  }
}

TransitScale JitterModel::draw(RngStream& rng) const {
  auto one = [&] {
    if (relative_sigma == 0.0) return 1.0;
    const double x = distribution == JitterDistribution::uniform ? 2.0 * rng.uniform() - 1.0 : rng.normal();
    return 1.0 + relative_sigma * x;
  };
  const double a = one();
  const double b = one();
  return {a, b};
}

const char* to_string(JitterDistribution d) {
  return d == JitterDistribution::uniform ? "uniform" : "gaussian";
}

JitterDistribution jitter_distribution_from(const std::string& name) {
  if (name == "uniform") return JitterDistribution::uniform;
  if (name == "gaussian") return JitterDistribution::gaussian;
  throw Error("unknown jitter distribution '" + name + "'");
}

namespace {

struct Visitor {
  TransitScale scale;

  TrialMetrics operator()(const GenerationCase& c) const {
    const std::size_t a1 = c.schedule.first_atom;
    const HilbertLayout layout(c.fock_cutoff, a1 + 2);
    const auto r = run_protocol(build_generation(c.schedule, scale), generation_initial_state(layout),
                                c.schedule.params, RngStream{});
    const QuantumState& s = r.final_state;
    double ground = 0.0;
    const std::size_t mask = layout.atom_bit(a1) | layout.atom_bit(a1 + 1);
    for (std::size_t i = 0; i < s.dimension(); ++i) {
      if ((i & mask) == 0) ground += std::norm(s[i]);
    }
    return {scale.first, scale.second, cavity_fidelity(s, generation_target(c.schedule)), ground};
  }

  template <class Case>
  TrialMetrics probe(const Case& c, const EventList& events, std::size_t first_atom) const {
    const HilbertLayout layout(c.fock_cutoff, first_atom + 2);
    const QuantumState initial = cat_state(layout, c.input);
    const PhysicalParams params = params_of(c);
    double vacuum = 0.0;
    std::map<std::string, double> dist;
    for (const auto& b : enumerate_branches(events, initial, params)) {
      dist[outcome_key(b.outcomes)] += b.probability;
      double v = 0.0;
      for (std::size_t s = 0; s < layout.atom_states(); ++s) v += std::norm(b.state[s]);
      vacuum += b.probability * v;
    }
    const double par = parallel_probability(dist);
    return {scale.first, scale.second, vacuum, c.expect_parallel ? par : 1.0 - par};
  }

  static const PhysicalParams& params_of(const DistinctionCase& c) { return c.schedule.params; }
  static const PhysicalParams& params_of(const CoherenceCase& c) { return c.schedule.base.params; }

  TrialMetrics operator()(const DistinctionCase& c) const {
    return probe(c, build_distinction(c.schedule, scale), c.schedule.first_atom);
  }
  TrialMetrics operator()(const CoherenceCase& c) const {
    return probe(c, build_coherence(c.schedule, scale), c.schedule.base.first_atom);
  }
};

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SweepReport finish(const JitterModel& model, std::vector<TrialMetrics> per_trial) {
  SweepReport r;
  r.model = model;
  r.trials = per_trial.size();
  std::vector<double> f, c;
  f.reserve(per_trial.size());
  c.reserve(per_trial.size());
  for (const auto& t : per_trial) {
    f.push_back(t.fidelity);
    c.push_back(t.correctness);
  }
  r.fidelity = summarize(std::move(f));
  r.correctness = summarize(std::move(c));
  r.per_trial = std::move(per_trial);
  return r;
}

}  // namespace

TrialMetrics evaluate_trial(const SweepCase& c, TransitScale scale) {
  return std::visit(Visitor{scale}, c);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw Error("cannot summarize an empty sample");
  Summary s;
  // Mean in index order before sorting keeps it independent of the sort.
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q05 = quantile(values, 0.05);
  s.median = quantile(values, 0.5);
  s.q95 = quantile(values, 0.95);
  return s;
}

SweepReport jitter_sweep_serial(const SweepCase& c, const JitterModel& model, std::size_t trials) {
  model.validate();
  if (trials < 1) throw Error("jitter sweep needs at least one trial");
  const RngStream root(model.seed);
  std::vector<TrialMetrics> out(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    RngStream rng = root.split(i);
    out[i] = evaluate_trial(c, model.draw(rng));
  }
  return finish(model, std::move(out));
}

SweepReport jitter_sweep(const SweepCase& c, const JitterModel& model, std::size_t trials, int workers) {
  model.validate();
  if (trials < 1) throw Error("jitter sweep needs at least one trial");
  const RngStream root(model.seed);
  std::vector<TrialMetrics> out(trials);
  const auto n = static_cast<long>(trials);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      RngStream rng = root.split(static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = evaluate_trial(c, model.draw(rng));
    } catch (...) {
#pragma omp critical(bsc_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return finish(model, std::move(out));
}

double EmpiricalDistribution::frequency(const std::string& key) const {
  const auto it = counts.find(key);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trials);
}

namespace {
std::string sample_once(const EventList& events, const QuantumState& initial, const PhysicalParams& params,
                        RngStream rng) {
  const auto r = run_protocol(events, initial, params, std::move(rng));
  std::vector<Level> rec;
  rec.reserve(r.outcomes.size());
  for (const auto& o : r.outcomes) rec.push_back(o.outcome);
  return outcome_key(rec);
}

EmpiricalDistribution tally(const std::vector<std::string>& keys, std::uint64_t seed) {
  EmpiricalDistribution d;
  d.trials = keys.size();
  d.seed = seed;
  for (const auto& k : keys) ++d.counts[k];
  return d;
}
}  // namespace

EmpiricalDistribution outcome_statistics_serial(const EventList& events, const QuantumState& initial,
                                                const PhysicalParams& params, std::size_t trials,
                                                const RngStream& rng) {
  if (trials < 1) throw Error("outcome statistics need at least one trial");
  std::vector<std::string> keys(trials);
  for (std::size_t i = 0; i < trials; ++i) keys[i] = sample_once(events, initial, params, rng.split(i));
  return tally(keys, rng.seed());
}

EmpiricalDistribution outcome_statistics(const EventList& events, const QuantumState& initial,
                                         const PhysicalParams& params, std::size_t trials,
                                         const RngStream& rng, int workers) {
  if (trials < 1) throw Error("outcome statistics need at least one trial");
  validate_events(events, initial.layout());
  std::vector<std::string> keys(trials);
  const auto n = static_cast<long>(trials);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      keys[static_cast<std::size_t>(i)] =
          sample_once(events, initial, params, rng.split(static_cast<std::uint64_t>(i)));
    } catch (...) {
#pragma omp critical(bsc_stats_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return tally(keys, rng.seed());
}

}  // namespace bsc
