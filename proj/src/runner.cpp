#include "bsc/runner.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bsc {

using nlohmann::json;

namespace {

constexpr double kScanStep = 0.01;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json cat_json(const CatSpec& c) {
  return {{"N", c.base.N}, {"p", c.base.p}, {"phi", c.base.phi}, {"eta", complex_json(c.eta)}};
}

json diagnostics_json(const RunDiagnostics& d) {
  return {{"norm_drift", d.norm_drift}, {"max_leakage", d.max_leakage}};
}

void check_diagnostics(const RunDiagnostics& d, const Tolerances& tol, const std::string& where,
                       std::vector<std::string>& breaches) {
  if (d.norm_drift > tol.norm) {
    breaches.push_back(where + ": norm drift " + num(d.norm_drift) + " exceeds " + num(tol.norm));
  }
  if (d.max_leakage > tol.leakage) {
    breaches.push_back(where + ": top Fock level population " + num(d.max_leakage) + " exceeds " +
                       num(tol.leakage));
  }
}

double ground_probability(const QuantumState& s, std::size_t a1, std::size_t a2) {
  const auto& L = s.layout();
  const std::size_t mask = L.atom_bit(a1) | L.atom_bit(a2);
  double p = 0.0;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if ((i & mask) == 0) p += std::norm(s[i]);
  }
  return p;
}

/// Longest span any single atom spends between its first and last event.
double longest_atom_transit(const EventList& events) {
  std::map<std::size_t, std::pair<double, double>> span;
  auto touch = [&](std::size_t atom, double begin, double end) {
    auto [it, fresh] = span.try_emplace(atom, begin, end);
    if (!fresh) {
      it->second.first = std::min(it->second.first, begin);
      it->second.second = std::max(it->second.second, end);
    }
  };
  for (const auto& ev : events) {
    std::visit(overloaded{
                   [&](const PrepareAtomPair& e) {
                     touch(e.first, ev.start, ev.start);
                     touch(e.second, ev.start, ev.start);
                   },
                   [&](const RamseyZone& e) { touch(e.atom, ev.start, ev.start); },
                   [&](const CavityCrossing& e) { touch(e.atom, ev.start, ev.start + e.duration); },
                   [&](const FreeFlight& e) {
                     for (auto a : e.acted_on.atoms) touch(a, ev.start, ev.start + e.duration);
                   },
                   [&](const Detection& e) { touch(e.atom, ev.start, ev.start); },
               },
               ev.kind);
  }
  double longest = 0.0;
  for (const auto& [atom, s] : span) longest = std::max(longest, s.second - s.first);
  return longest;
}

struct Probe {
  EventList events;
  QuantumState initial;
  bool expect_parallel;
};

/// Exact and sampled outcome tables for a protocol with detections.
void outcome_section(const Probe& pr, const RunConfig& c, RunOutputs& out, json& section) {
  const auto exact = outcome_distribution(pr.events, pr.initial, c.physics, c.tolerances);
  const RngStream rng(c.seed);
  const auto sampled = outcome_statistics(pr.events, pr.initial, c.physics, c.trials, rng, c.workers);

  const double par = parallel_probability(exact);
  section["parallel_probability"] = par;
  section["antiparallel_probability"] = 1.0 - par;
  section["expected"] = pr.expect_parallel ? "parallel" : "antiparallel";
  section["success_probability"] = pr.expect_parallel ? par : 1.0 - par;

  std::ostringstream csv;
  csv << "outcome,exact_probability,count,frequency,binomial_sigma,z_score\n";
  json rows = json::array();
  double worst_z = 0.0;
  const double n = static_cast<double>(c.trials);
  for (const char* key : {"up,up", "up,down", "down,up", "down,down"}) {
    const auto it = exact.find(key);
    const double p = it == exact.end() ? 0.0 : it->second;
    const auto cit = sampled.counts.find(key);
    const std::size_t count = cit == sampled.counts.end() ? 0 : cit->second;
    const double f = sampled.frequency(key);
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    const double z = sigma > 0.0 ? (f - p) / sigma : (f == p ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, std::abs(z));
    rows.push_back({{"outcome", key}, {"exact", p}, {"count", count}, {"frequency", f}, {"sigma", sigma}});
    csv << key << ',' << num(p) << ',' << count << ',' << num(f) << ',' << num(sigma) << ',' << num(z) << '\n';
  }
  section["outcomes"] = rows;
  section["sampling"] = {{"seed", c.seed}, {"trials", c.trials}, {"max_abs_z", worst_z}};
  out.series["outcomes.csv"] = csv.str();

  // One nominal sampled run for diagnostics.
  const auto one = run_protocol(pr.events, pr.initial, c.physics, rng.split(c.trials), c.tolerances);
  section["diagnostics"] = diagnostics_json(one.diagnostics);
  check_diagnostics(one.diagnostics, c.tolerances, "protocol run", out.breaches);
}

void generation_section(const RunConfig& c, RunOutputs& out, json& section) {
  const GenerationSchedule s = c.generation_schedule();
  const HilbertLayout layout(c.fock_cutoff, 2);
  const EventList events = build_generation(s);
  const auto r = run_protocol(events, generation_initial_state(layout), c.physics, RngStream(c.seed),
                              c.tolerances);
  const CatSpec target = generation_target(s);
  const auto rho = reduced_density(r.final_state, Subsystems::cavity_only());
  section["target"] = cat_json(target);
  section["gamma_formula"] = generation_gamma(s);
  section["gamma_effective"] = generation_effective_gamma(s);
  section["phase"] = generation_phase(s);
  section["cavity_fidelity"] = cavity_fidelity(r.final_state, target);
  section["atoms_ground_probability"] = ground_probability(r.final_state, 0, 1);
  section["cavity_purity"] = purity(rho);
  section["mean_photon_number"] = mean_photon_number(r.final_state);
  const cplx fitted = fit_cat_weight(r.final_state, target.base);
  section["fitted_eta"] = complex_json(fitted);
  // Phase of the fitted weight relative to eta0, and its offset from the formula value.
  const double gamma_fit = std::arg(fitted / s.eta0);
  section["gamma_fitted"] = gamma_fit;
  section["gamma_offset_from_formula"] = std::remainder(gamma_fit - generation_gamma(s), 2.0 * std::numbers::pi);
  section["schedule"] = {{"theta1", s.theta1()}, {"theta2", s.theta2()}, {"varphi1", s.varphi1},
                         {"varphi2", s.varphi2()}, {"T1", s.T1()},         {"T2", s.T2()},
                         {"T0", s.T0},             {"field_gap", s.field_gap()}};
  section["diagnostics"] = diagnostics_json(r.diagnostics);
  check_diagnostics(r.diagnostics, c.tolerances, "generation", out.breaches);
}

/// Coherence probes (atoms 2, 3) reading the cavity the generation leaves.
Probe pipeline_probe(const RunConfig& c, json& section) {
  const GenerationSchedule g = c.generation_schedule();
  const double handoff = c.seconds(c.detection.handoff);
  CoherenceSchedule coh = c.coherence_schedule(2);
  coh.base.p = g.p;
  coh.base.phi = generation_phase(g) - c.physics.omega * handoff;
  coh.gamma = generation_effective_gamma(g);

  EventList events = build_generation(g);
  const double t_gen = end_time(events);
  events.push_back({FreeFlight{handoff, Subsystems::cavity_only()}, t_gen, "handoff"});
  for (auto& ev : shift_events(build_coherence(coh), t_gen + handoff)) events.push_back(std::move(ev));

  section["probe_phase"] = coh.base.phi;
  section["probe_gamma"] = coh.gamma;
  section["handoff"] = handoff;
  const HilbertLayout layout(c.fock_cutoff, 4);
  return {std::move(events), generation_initial_state(layout), g.eta0 > 0.0};
}

std::optional<SweepCase> jitter_case(const RunConfig& c) {
  switch (c.protocol) {
    case ProtocolKind::generate:
    case ProtocolKind::full_pipeline:
      return GenerationCase{c.generation_schedule(), c.fock_cutoff};
    case ProtocolKind::distinguish:
      return DistinctionCase{c.distinction_schedule(), c.input_cat(), true, c.fock_cutoff};
    case ProtocolKind::coherence:
      return CoherenceCase{c.coherence_schedule(), c.input_cat(), c.cat.eta0 > 0.0, c.fock_cutoff};
  }
  return std::nullopt;
}

json summary_json(const Summary& s) {
  return {{"min", s.min}, {"mean", s.mean}, {"q05", s.q05}, {"median", s.median}, {"q95", s.q95}, {"max", s.max}};
}

void jitter_section(const RunConfig& c, RunOutputs& out) {
  const JitterConfig& jc = *c.jitter;
  JitterModel model{jc.relative_sigma, jc.distribution, jc.seed.value_or(c.seed)};
  const auto sweep = jitter_sweep(*jitter_case(c), model, jc.trials, c.workers);
  out.report["jitter"] = {{"relative_sigma", model.relative_sigma},
                          {"distribution", to_string(model.distribution)},
                          {"seed", model.seed},
                          {"trials", sweep.trials},
                          {"fidelity", summary_json(sweep.fidelity)},
                          {"correctness", summary_json(sweep.correctness)}};
  std::ostringstream csv;
  csv << "trial,scale_first,scale_second,fidelity,correctness\n";
  for (std::size_t i = 0; i < sweep.per_trial.size(); ++i) {
    const auto& t = sweep.per_trial[i];
    csv << i << ',' << num(t.scale_first) << ',' << num(t.scale_second) << ',' << num(t.fidelity) << ','
        << num(t.correctness) << '\n';
  }
  out.series["jitter_trials.csv"] = csv.str();
}

EventList main_events(const RunConfig& c) {
  switch (c.protocol) {
    case ProtocolKind::generate: return build_generation(c.generation_schedule());
    case ProtocolKind::distinguish: return build_distinction(c.distinction_schedule());
    case ProtocolKind::coherence: return build_coherence(c.coherence_schedule());
    case ProtocolKind::full_pipeline: {
      json scratch;
      return pipeline_probe(c, scratch).events;
    }
  }
  return {};
}

}  // namespace

json to_json(const TimingSolution& s) {
  return {{"gT", s.gT},
          {"residual1", s.residual1},
          {"residual2", s.residual2},
          {"joint_fidelity", s.joint_fidelity},
          {"refined_gT", s.refined_gT},
          {"refined_residual", s.refined_residual}};
}

json to_json(const FeasibilityResult& r) {
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"pass", r.pass},
          {"atom_margin", finite_or_null(r.atom_margin)},
          {"cavity_margin", finite_or_null(r.cavity_margin)},
          {"sequence_margin", finite_or_null(r.sequence_margin)}};
}

std::string timing_scan_csv(const TimingSearch& search, double step) {
  std::ostringstream csv;
  csv << "gT,residual1,residual2\n";
  const auto n = static_cast<std::size_t>(std::floor((search.gt_max - search.gt_min) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double gT = search.gt_min + static_cast<double>(i) * step;
    csv << num(gT) << ',' << num(timing_residual1(gT)) << ',' << num(timing_residual2(gT)) << '\n';
  }
  return csv.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunOutputs run(const RunConfig& c) {
  RunOutputs out;
  json& rep = out.report;
  rep["format_version"] = kFormatVersion;
  rep["config"] = serialize_config(c);
  rep["protocol"] = to_string(c.protocol);
  rep["seed"] = c.seed;

  switch (c.protocol) {
    case ProtocolKind::generate: {
      json g;
      generation_section(c, out, g);
      rep["generation"] = g;
      break;
    }
    case ProtocolKind::distinguish:
    case ProtocolKind::coherence: {
      const HilbertLayout layout(c.fock_cutoff, 2);
      const bool coh = c.protocol == ProtocolKind::coherence;
      Probe pr{coh ? build_coherence(c.coherence_schedule()) : build_distinction(c.distinction_schedule()),
               cat_state(layout, c.input_cat()), coh ? c.cat.eta0 > 0.0 : true};
      json d;
      d["input"] = cat_json(c.input_cat());
      outcome_section(pr, c, out, d);
      rep[coh ? "coherence" : "distinction"] = d;
      break;
    }
    case ProtocolKind::full_pipeline: {
      json g;
      generation_section(c, out, g);
      rep["generation"] = g;
      json d;
      const Probe pr = pipeline_probe(c, d);
      outcome_section(pr, c, out, d);
      const double par = d["parallel_probability"].get<double>();
      d["sign_detection"] = par >= 0.5 ? "plus" : "minus";
      d["single_shot_probability"] = std::max(par, 1.0 - par);
      rep["pipeline"] = d;
      break;
    }
  }

  const TimingSearch ts{c.timing_search.gt_min, c.timing_search.gt_max, c.timing_search.tolerance,
                        c.timing_search.refine_step};
  json sols = json::array();
  for (const auto& s : solve_joint_timing(ts)) sols.push_back(to_json(s));
  rep["timing"] = {{"search", {{"gt_min", ts.gt_min}, {"gt_max", ts.gt_max}, {"tolerance", ts.tolerance}}},
                   {"solutions", sols}};
  out.series["timing_scan.csv"] = timing_scan_csv(ts, kScanStep);

  const EventList events = main_events(c);
  rep["sequence"] = {{"duration", end_time(events)}, {"longest_atom_transit", longest_atom_transit(events)},
                     {"events", events.size()}};

  if (c.feasibility) {
    FeasibilityBudget b{c.feasibility->tau_at, c.feasibility->tau_cav, end_time(events),
                        longest_atom_transit(events)};
    rep["feasibility"] = to_json(feasibility_check(b));
  }

  if (c.jitter) jitter_section(c, out);

  json files = json::object();
  for (const auto& [name, text] : out.series) files[name] = fnv1a_hex(text);
  rep["series"] = files;
  rep["status"] = out.ok() ? "ok" : "invariant_breach";
  rep["breaches"] = out.breaches;
  return out;
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

void write_outputs(const RunOutputs& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  put("report.json", report_text(out.report));
  for (const auto& [name, text] : out.series) put(name, text);
}

std::vector<std::string> replay_differences(const json& report) {
  if (!report.contains("config")) throw Error("report has no echoed config");
  const RunOutputs again = run(parse_config(report.at("config")));
  std::vector<std::string> diffs;
  if (report_text(again.report) == report_text(report)) return diffs;
  for (auto it = report.begin(); it != report.end(); ++it) {
    if (!again.report.contains(it.key()) || again.report.at(it.key()) != it.value()) diffs.push_back(it.key());
  }
  for (auto it = again.report.begin(); it != again.report.end(); ++it) {
    if (!report.contains(it.key())) diffs.push_back(it.key());
  }
  if (diffs.empty()) diffs.push_back("<formatting>");
  return diffs;
}

}  // namespace bsc
