#include "bsc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDefaultLongArea = 41.0 * kPi / 4.0;

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ScheduleError(std::string(name) + " must be a finite non-negative duration");
  }
}

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ScheduleError("p must lie in [0, 1]");
}

// theta with cos(theta/2) = sqrt(p), sin(theta/2) = sqrt(1-p)
double pulse_for(double p) { return 2.0 * std::atan2(std::sqrt(1.0 - p), std::sqrt(p)); }

double quarter_period_area(unsigned m) { return (4.0 * m + 1.0) * kPi / 2.0; }

Subsystems cavity_and(std::initializer_list<std::size_t> atoms) {
  return Subsystems{true, std::vector<std::size_t>(atoms)};
}

}  // namespace

// --- events ----------------------------------------------------------------

void validate_events(const EventList& events, const HilbertLayout& layout) {
  double last_start = -INFINITY;
  double cavity_busy_until = -INFINITY;
  for (const auto& ev : events) {
    if (ev.start < last_start) throw ScheduleError("event '" + ev.label + "' is out of time order");
    last_start = ev.start;
    std::visit(overloaded{
                   [&](const PrepareAtomPair& e) {
                     layout.check_atom(e.first);
                     layout.check_atom(e.second);
                     if (e.first == e.second) throw ScheduleError("pair preparation needs two atoms");
                   },
                   [&](const RamseyZone& e) { layout.check_atom(e.atom); },
                   [&](const CavityCrossing& e) {
                     layout.check_atom(e.atom);
                     require_nonnegative(e.duration, "cavity crossing");
                     // small slack for round-off in accumulated start times
                     if (ev.start + 1e-12 * std::max(1.0, std::abs(ev.start)) < cavity_busy_until) {
                       throw ScheduleError("two atoms inside the cavity at once ('" + ev.label + "')");
                     }
                     cavity_busy_until = ev.start + e.duration;
                   },
                   [&](const FreeFlight& e) {
                     require_nonnegative(e.duration, "free flight");
                     for (auto a : e.acted_on.atoms) layout.check_atom(a);
                   },
                   [&](const Detection& e) { layout.check_atom(e.atom); },
               },
               ev.kind);
  }
}

EventList shift_events(EventList events, double offset) {
  for (auto& ev : events) ev.start += offset;
  return events;
}

double end_time(const EventList& events) {
  double t = 0.0;
  for (const auto& ev : events) {
    double d = 0.0;
    if (auto c = std::get_if<CavityCrossing>(&ev.kind)) d = c->duration;
    if (auto f = std::get_if<FreeFlight>(&ev.kind)) d = f->duration;
    t = std::max(t, ev.start + d);
  }
  return t;
}

// --- generation ------------------------------------------------------------

void GenerationSchedule::validate() const {
  require_probability(p);
  params.validate();
  if (!std::isfinite(varphi1)) throw ScheduleError("varphi1 must be finite");
  if (!std::isfinite(eta0)) throw ScheduleError("eta0 must be finite");
  require_nonnegative(tau1, "tau1");
  require_nonnegative(tau2, "tau2");
  require_nonnegative(gT2, "gT2");
  const double transit = tau1 + T1();
  if (T0 < transit * (1.0 - 1e-12)) {
    throw ScheduleError("T0 is shorter than the atom-1 transit (tau1 + T1): atoms would overlap");
  }
}

double GenerationSchedule::theta1() const { return pulse_for(p); }
double GenerationSchedule::theta2() const { return theta1() + kPi; }
double GenerationSchedule::T1() const { return params.time_for_area(quarter_period_area(m)); }
double GenerationSchedule::T2() const {
  return params.time_for_area(gT2 > 0.0 ? gT2 : kDefaultLongArea);
}
double GenerationSchedule::field_gap() const { return T0 - tau1 - T1() + tau2; }
double GenerationSchedule::varphi2() const {
  return varphi1 + params.omega * (tau1 + field_gap() - tau2);
}

GenerationSchedule& GenerationSchedule::set_field_gap(double gap) {
  T0 = tau1 + T1() + gap - tau2;
  return *this;
}

EventList build_generation(const GenerationSchedule& s, TransitScale scale) {
  s.validate();
  const std::size_t a1 = s.first_atom;
  const std::size_t a2 = s.first_atom + 1;
  const double tau1 = s.tau1 * scale.first;
  const double T1 = s.T1() * scale.first;
  const double tau2 = s.tau2 * scale.second;
  const double T2 = s.T2() * scale.second;
  const double wait = s.field_gap() - s.tau2;  // atom-1 exit to atom-2 zone
  const double t_zone2 = tau1 + T1 + wait;
  EventList ev;
  ev.push_back({PrepareAtomPair{a1, a2, s.eta0}, 0.0, "prepare entangled pair"});
  ev.push_back({RamseyZone{a1, {s.theta1(), s.varphi1}}, 0.0, "atom 1 preparing zone"});
  ev.push_back({FreeFlight{tau1, cavity_and({a1})}, 0.0, "atom 1 flight to cavity"});
  ev.push_back({CavityCrossing{a1, T1}, tau1, "atom 1 cavity"});
  ev.push_back({FreeFlight{wait, cavity_and({a1})}, tau1 + T1, "field gap before atom 2 zone"});
  ev.push_back({RamseyZone{a2, {s.theta2(), s.varphi2()}}, t_zone2, "atom 2 preparing zone"});
  ev.push_back({FreeFlight{tau2, cavity_and({a1, a2})}, t_zone2, "atom 2 flight to cavity"});
  ev.push_back({CavityCrossing{a2, T2}, t_zone2 + tau2, "atom 2 cavity"});
  return ev;
}

QuantumState generation_initial_state(const HilbertLayout& layout) {
  return make_basis_state(layout, 0, std::vector<Level>(layout.atom_count(), Level::down));
}

double generation_phase(const GenerationSchedule& s) {
  return -(s.varphi1 + s.params.omega * (s.tau1 + s.field_gap()));
}

double generation_gamma(const GenerationSchedule& s) {
  return s.params.omega * (s.zone_time2() - s.zone_time1() - s.T1());
}

double generation_effective_gamma(const GenerationSchedule& s) { return generation_gamma(s) + kPi; }

CatSpec generation_target(const GenerationSchedule& s) {
  s.validate();
  return CatSpec{BinomialSpec{2, s.p, generation_phase(s)},
                 s.eta0 * std::polar(1.0, generation_effective_gamma(s))};
}

// --- distinction / coherence -------------------------------------------------

void DistinctionSchedule::validate() const {
  require_probability(p);
  params.validate();
  if (!std::isfinite(phi)) throw ScheduleError("phi must be finite");
  require_nonnegative(t1, "t1");
  require_nonnegative(t2, "t2");
  require_nonnegative(Tprime, "Tprime");
  require_nonnegative(gTP1, "gTP1");
  if (Tprime < t1) {
    throw ScheduleError("Tprime is shorter than t1: probe 2 would enter before probe 1 is read out");
  }
}

double DistinctionSchedule::TP1() const {
  return params.time_for_area(gTP1 > 0.0 ? gTP1 : kDefaultLongArea);
}
double DistinctionSchedule::TP2() const { return params.time_for_area(quarter_period_area(m)); }
double DistinctionSchedule::theta_d() const { return pulse_for(p); }
double DistinctionSchedule::varphi_d1() const { return -phi + params.omega * t1; }
double DistinctionSchedule::varphi_d2() const { return -phi + params.omega * (Tprime + t2); }

EventList build_distinction(const DistinctionSchedule& s, TransitScale scale) {
  s.validate();
  const std::size_t a1 = s.first_atom;
  const std::size_t a2 = s.first_atom + 1;
  const double TP1 = s.TP1() * scale.first;
  const double t1 = s.t1 * scale.first;
  const double TP2 = s.TP2() * scale.second;
  const double t2 = s.t2 * scale.second;
  const double wait = s.Tprime - s.t1;
  const double t_read1 = TP1 + t1;
  const double t_enter2 = t_read1 + wait;
  const double t_read2 = t_enter2 + TP2 + t2;
  EventList ev;
  ev.push_back({CavityCrossing{a1, TP1}, 0.0, "probe 1 cavity"});
  ev.push_back({FreeFlight{t1, cavity_and({a1})}, TP1, "probe 1 flight to decoding zone"});
  ev.push_back({RamseyZone{a1, {s.theta_d(), s.varphi_d1()}}, t_read1, "probe 1 decoding zone"});
  ev.push_back({Detection{a1}, t_read1, "probe 1 detector"});
  ev.push_back({FreeFlight{wait, Subsystems::cavity_only()}, t_read1, "field gap"});
  ev.push_back({CavityCrossing{a2, TP2}, t_enter2, "probe 2 cavity"});
  ev.push_back({FreeFlight{t2, cavity_and({a2})}, t_enter2 + TP2, "probe 2 flight to decoding zone"});
  ev.push_back({RamseyZone{a2, {s.theta_d(), s.varphi_d2()}}, t_read2, "probe 2 decoding zone"});
  ev.push_back({Detection{a2}, t_read2, "probe 2 detector"});
  return ev;
}

void CoherenceSchedule::validate() const {
  base.validate();
  require_nonnegative(t1p, "t1p");
  require_nonnegative(t2p, "t2p");
  if (!std::isfinite(gamma)) throw ScheduleError("gamma must be finite");
  if (base.Tprime < base.t1 + t1p) {
    throw ScheduleError("Tprime is shorter than t1 + t1p: probe 2 would enter before probe 1 is read out");
  }
}

double CoherenceSchedule::tau() const { return base.Tprime + base.t1 + t1p + base.t2 + t2p; }
double CoherenceSchedule::theta_c() const { return kPi / 2.0; }
double CoherenceSchedule::varphi_c() const {
  return 0.5 * (gamma - 2.0 * base.phi + base.params.omega * tau());
}

EventList build_coherence(const CoherenceSchedule& s, TransitScale scale) {
  s.validate();
  const DistinctionSchedule& d = s.base;
  const std::size_t a1 = d.first_atom;
  const std::size_t a2 = d.first_atom + 1;
  const RamseySetting rc{s.theta_c(), s.varphi_c()};
  const double TP1 = d.TP1() * scale.first;
  const double t1 = d.t1 * scale.first;
  const double t1p = s.t1p * scale.first;
  const double TP2 = d.TP2() * scale.second;
  const double t2 = d.t2 * scale.second;
  const double t2p = s.t2p * scale.second;
  const double wait = d.Tprime - d.t1 - s.t1p;
  const double t_rd1 = TP1 + t1;
  const double t_rc1 = t_rd1 + t1p;
  const double t_enter2 = t_rc1 + wait;
  const double t_rd2 = t_enter2 + TP2 + t2;
  const double t_rc2 = t_rd2 + t2p;
  EventList ev;
  ev.push_back({CavityCrossing{a1, TP1}, 0.0, "probe 1 cavity"});
  ev.push_back({FreeFlight{t1, cavity_and({a1})}, TP1, "probe 1 flight to decoding zone"});
  ev.push_back({RamseyZone{a1, {d.theta_d(), d.varphi_d1()}}, t_rd1, "probe 1 decoding zone"});
  ev.push_back({FreeFlight{t1p, cavity_and({a1})}, t_rd1, "probe 1 flight to coherence zone"});
  ev.push_back({RamseyZone{a1, rc}, t_rc1, "probe 1 coherence zone"});
  ev.push_back({Detection{a1}, t_rc1, "probe 1 detector"});
  ev.push_back({FreeFlight{wait, Subsystems::cavity_only()}, t_rc1, "field gap"});
  ev.push_back({CavityCrossing{a2, TP2}, t_enter2, "probe 2 cavity"});
  ev.push_back({FreeFlight{t2, cavity_and({a2})}, t_enter2 + TP2, "probe 2 flight to decoding zone"});
  ev.push_back({RamseyZone{a2, {d.theta_d(), d.varphi_d2()}}, t_rd2, "probe 2 decoding zone"});
  ev.push_back({FreeFlight{t2p, cavity_and({a2})}, t_rd2, "probe 2 flight to coherence zone"});
  ev.push_back({RamseyZone{a2, rc}, t_rc2, "probe 2 coherence zone"});
  ev.push_back({Detection{a2}, t_rc2, "probe 2 detector"});
  return ev;
}

// --- interpreter -------------------------------------------------------------

namespace {

QuantumState prepare_pair(const QuantumState& state, const PrepareAtomPair& e, double tol) {
  const HilbertLayout& L = state.layout();
  const std::size_t b1 = L.atom_bit(e.first);
  const std::size_t b2 = L.atom_bit(e.second);
  const double norm = 1.0 / std::sqrt(1.0 + e.eta0 * e.eta0);
  QuantumState out(L);
  double ground = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (i & (b1 | b2)) continue;
    ground += std::norm(state[i]);
    out[i | b1] += norm * state[i];
    out[i | b2] += norm * e.eta0 * state[i];
  }
  const double n = state.norm();
  if (std::abs(ground - n * n) > tol) {
    throw Error("pair preparation requires both atoms in the ground state");
  }
  return out;
}

}  // namespace

QuantumState apply_event(const ProtocolEvent& ev, const QuantumState& state,
                         const PhysicalParams& params, const Tolerances& tol) {
  return std::visit(
      overloaded{
          [&](const PrepareAtomPair& e) { return prepare_pair(state, e, tol.norm); },
          [&](const RamseyZone& e) { return ramsey_rotate(state, e.atom, e.setting); },
          [&](const CavityCrossing& e) { return jc_evolve(state, e.atom, params, e.duration, tol.leakage); },
          [&](const FreeFlight& e) { return free_evolve(state, params, e.duration, e.acted_on); },
          [&](const Detection&) -> QuantumState {
            throw Error("apply_event cannot perform a measurement");
          },
      },
      ev.kind);
}

RunResult run_protocol(const EventList& events, const QuantumState& initial,
                       const PhysicalParams& params, RngStream rng, const Tolerances& tol) {
  params.validate();
  validate_events(events, initial.layout());
  RunResult r{initial, {}, {}};
  r.diagnostics.seed = rng.seed();
  r.diagnostics.stream = rng.stream_id();
  auto track = [&](const QuantumState& s) {
    r.diagnostics.norm_drift = std::max(r.diagnostics.norm_drift, std::abs(s.norm() - 1.0));
    r.diagnostics.max_leakage = std::max(r.diagnostics.max_leakage, s.top_level_population());
  };
  track(r.final_state);
  for (const auto& ev : events) {
    if (auto d = std::get_if<Detection>(&ev.kind)) {
      const auto bp = branch_probabilities(r.final_state, d->atom);
      Measurement m = measure_atom(r.final_state, d->atom, rng, tol.branch);
      r.outcomes.push_back({d->atom, m.outcome, m.probability, bp.up, bp.down});
      r.final_state = std::move(m.collapsed);
    } else {
      r.final_state = apply_event(ev, r.final_state, params, tol);
    }
    track(r.final_state);
  }
  return r;
}

std::vector<Branch> enumerate_branches(const EventList& events, const QuantumState& initial,
                                       const PhysicalParams& params, const Tolerances& tol) {
  params.validate();
  validate_events(events, initial.layout());
  std::vector<Branch> leaves{Branch{{}, 1.0, initial}};
  for (const auto& ev : events) {
    std::vector<Branch> next;
    next.reserve(leaves.size() * 2);
    for (auto& b : leaves) {
      if (auto d = std::get_if<Detection>(&ev.kind)) {
        const auto bp = branch_probabilities(b.state, d->atom);
        for (Level lvl : {Level::up, Level::down}) {
          const double p = lvl == Level::up ? bp.up : bp.down;
          if (p < tol.branch) continue;
          double pp = 0.0;
          QuantumState s = project_atom(b.state, d->atom, lvl, pp, tol.branch);
          auto outcomes = b.outcomes;
          outcomes.push_back(lvl);
          next.push_back(Branch{std::move(outcomes), b.probability * p, std::move(s)});
        }
      } else {
        b.state = apply_event(ev, b.state, params, tol);
        next.push_back(std::move(b));
      }
    }
    leaves = std::move(next);
  }
  return leaves;
}

std::string outcome_key(const std::vector<Level>& outcomes) {
  std::string k;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (i) k += ',';
    k += to_string(outcomes[i]);
  }
  return k;
}

std::map<std::string, double> outcome_distribution(const EventList& events, const QuantumState& initial,
                                                   const PhysicalParams& params, const Tolerances& tol) {
  std::map<std::string, double> dist;
  for (const auto& b : enumerate_branches(events, initial, params, tol)) {
    dist[outcome_key(b.outcomes)] += b.probability;
  }
  return dist;
}

double parallel_probability(const std::map<std::string, double>& dist) {
  double p = 0.0;
  if (auto it = dist.find("up,up"); it != dist.end()) p += it->second;
  if (auto it = dist.find("down,down"); it != dist.end()) p += it->second;
  return p;
}

}  // namespace bsc
