#include "bsc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bsc {

using nlohmann::json;

const char* to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::generate: return "generate";
    case ProtocolKind::distinguish: return "distinguish";
    case ProtocolKind::coherence: return "coherence";
    case ProtocolKind::full_pipeline: return "full-pipeline";
  }
  return "?";
}

const char* to_string(TimeUnits u) { return u == TimeUnits::seconds ? "seconds" : "gt"; }

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Strict reader over one JSON object: tracks consumed keys so leftovers
/// can be reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key), "must be finite");
    return d;
  }

  double duration(const std::string& key, double fallback) {
    const double d = number(key, fallback);
    if (d < 0.0) throw ConfigError(path(key), "durations must be non-negative");
    return d;
  }

  double positive(const std::string& key, double fallback) {
    const double d = number(key, fallback);
    if (!(d > 0.0)) throw ConfigError(path(key), "must be positive");
    return d;
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
      throw ConfigError(path(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<Section> child(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    return Section(*v, path(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ProtocolKind protocol_from(const std::string& s, const std::string& path) {
  if (s == "generate") return ProtocolKind::generate;
  if (s == "distinguish") return ProtocolKind::distinguish;
  if (s == "coherence") return ProtocolKind::coherence;
  if (s == "full-pipeline") return ProtocolKind::full_pipeline;
  throw ConfigError(path, "unknown protocol '" + s + "' (generate, distinguish, coherence, full-pipeline)");
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return protocol == o.protocol && seed == o.seed && trials == o.trials && workers == o.workers &&
         fock_cutoff == o.fock_cutoff && units == o.units && physics == o.physics && cat == o.cat &&
         generation == o.generation && detection == o.detection && velocity == o.velocity &&
         jitter == o.jitter && feasibility == o.feasibility && timing_search == o.timing_search &&
         tolerances == o.tolerances;
}

double RunConfig::seconds(double value) const {
  return units == TimeUnits::gt ? physics.time_for_area(value) : value;
}

GenerationSchedule RunConfig::generation_schedule() const {
  GenerationSchedule s;
  s.p = cat.p;
  s.eta0 = cat.eta0;
  s.varphi1 = generation.varphi1;
  s.m = generation.m;
  s.params = physics;
  if (velocity) {
    s.tau1 = velocity->ramsey_to_cavity / velocity->v1;
    s.tau2 = velocity->ramsey_to_cavity / velocity->v2;
  } else {
    s.tau1 = seconds(generation.tau1);
    s.tau2 = seconds(generation.tau2);
  }
  s.set_field_gap(seconds(generation.field_gap));
  return s;
}

DistinctionSchedule RunConfig::distinction_schedule(std::size_t first_atom) const {
  DistinctionSchedule s;
  s.p = cat.p;
  s.phi = cat.phi;
  s.m = detection.m;
  s.params = physics;
  s.first_atom = first_atom;
  if (velocity) {
    s.t1 = velocity->cavity_to_decoder / velocity->probe_v1;
    s.t2 = velocity->cavity_to_decoder / velocity->probe_v2;
  } else {
    s.t1 = seconds(detection.t1);
    s.t2 = seconds(detection.t2);
  }
  s.Tprime = seconds(detection.Tprime);
  return s;
}

CoherenceSchedule RunConfig::coherence_schedule(std::size_t first_atom) const {
  CoherenceSchedule s;
  s.base = distinction_schedule(first_atom);
  s.gamma = cat.gamma;
  if (velocity) {
    s.t1p = velocity->decoder_to_coherence / velocity->probe_v1;
    s.t2p = velocity->decoder_to_coherence / velocity->probe_v2;
  } else {
    s.t1p = seconds(detection.t1p);
    s.t2p = seconds(detection.t2p);
  }
  return s;
}

CatSpec RunConfig::input_cat() const {
  return CatSpec{BinomialSpec{2, cat.p, cat.phi}, cat.eta0 * std::polar(1.0, cat.gamma)};
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");

  const auto version = root.unsigned_int("format_version", kFormatVersion);
  if (version != static_cast<std::uint64_t>(kFormatVersion)) {
    throw ConfigError("format_version", "unsupported version " + std::to_string(version));
  }
  if (!root.has("protocol")) throw ConfigError("protocol", "missing required field");
  c.protocol = protocol_from(root.string("protocol", ""), "protocol");
  c.seed = root.unsigned_int("seed", c.seed);
  c.trials = root.unsigned_int("trials", c.trials);
  if (c.trials < 1) throw ConfigError("trials", "must be at least 1");
  c.workers = static_cast<int>(root.unsigned_int("workers", 0));
  c.fock_cutoff = root.unsigned_int("fock_cutoff", c.fock_cutoff);
  if (c.fock_cutoff < 2) throw ConfigError("fock_cutoff", "must be at least 2 for two-photon states");

  const std::string units = root.string("units", "gt");
  if (units == "gt") {
    c.units = TimeUnits::gt;
  } else if (units == "seconds") {
    c.units = TimeUnits::seconds;
  } else {
    throw ConfigError("units", "expected \"gt\" or \"seconds\"");
  }

  if (auto s = root.child("physics")) {
    c.physics.g = s->positive("g", c.physics.g);
    c.physics.omega = s->positive("omega", c.physics.omega);
    s->finish();
  }

  if (auto s = root.child("cat")) {
    c.cat.p = s->number("p", c.cat.p);
    if (!(c.cat.p >= 0.0 && c.cat.p <= 1.0)) throw ConfigError(s->path("p"), "must lie in [0, 1]");
    c.cat.phi = s->number("phi", c.cat.phi);
    c.cat.eta0 = s->number("eta0", c.cat.eta0);
    c.cat.gamma = s->number("gamma", c.cat.gamma);
    s->finish();
  }

  bool explicit_flights = false;
  if (auto s = root.child("generation")) {
    c.generation.varphi1 = s->number("varphi1", 0.0);
    c.generation.m = static_cast<unsigned>(s->unsigned_int("m", 0));
    explicit_flights |= s->has("tau1") || s->has("tau2");
    c.generation.tau1 = s->duration("tau1", 0.0);
    c.generation.tau2 = s->duration("tau2", 0.0);
    c.generation.field_gap = s->duration("field_gap", 0.0);
    s->finish();
  }

  if (auto s = root.child("detection")) {
    c.detection.m = static_cast<unsigned>(s->unsigned_int("m", 0));
    explicit_flights |= s->has("t1") || s->has("t2") || s->has("t1p") || s->has("t2p");
    c.detection.t1 = s->duration("t1", 0.0);
    c.detection.t2 = s->duration("t2", 0.0);
    c.detection.Tprime = s->duration("Tprime", 0.0);
    c.detection.t1p = s->duration("t1p", 0.0);
    c.detection.t2p = s->duration("t2p", 0.0);
    c.detection.handoff = s->duration("handoff", 0.0);
    s->finish();
  }

  if (auto s = root.child("velocity")) {
    if (c.units != TimeUnits::seconds) {
      throw ConfigError("units", "velocity timing produces seconds; set \"units\": \"seconds\"");
    }
    if (explicit_flights) {
      throw ConfigError(root.path("velocity"), "flight durations given both explicitly and via velocities");
    }
    VelocityTiming v;
    v.v1 = s->positive("v1", 1.0);
    v.v2 = s->positive("v2", v.v1);
    v.probe_v1 = s->positive("probe_v1", v.v1);
    v.probe_v2 = s->positive("probe_v2", v.probe_v1);
    v.ramsey_to_cavity = s->duration("ramsey_to_cavity", 0.0);
    v.cavity_to_decoder = s->duration("cavity_to_decoder", 0.0);
    v.decoder_to_coherence = s->duration("decoder_to_coherence", 0.0);
    if (s->has("relative_spread")) {
      const double r = s->number("relative_spread", 0.0);
      if (r < 0.0) throw ConfigError(s->path("relative_spread"), "must be non-negative");
      v.relative_spread = r;
    }
    s->finish();
    c.velocity = v;
  }

  if (auto s = root.child("jitter")) {
    JitterConfig jc;
    const bool has_sigma = s->has("relative_sigma");
    jc.relative_sigma = s->number("relative_sigma", 0.0);
    if (jc.relative_sigma < 0.0) throw ConfigError(s->path("relative_sigma"), "must be non-negative");
    if (c.velocity && c.velocity->relative_spread) {
      if (!has_sigma) {
        jc.relative_sigma = *c.velocity->relative_spread;
      } else if (jc.relative_sigma != *c.velocity->relative_spread) {
        throw ConfigError(s->path("relative_sigma"), "disagrees with velocity.relative_spread");
      }
    }
    try {
      jc.distribution = jitter_distribution_from(s->string("distribution", "uniform"));
    } catch (const Error& e) {
      throw ConfigError(s->path("distribution"), e.what());
    }
    jc.trials = s->unsigned_int("trials", jc.trials);
    if (jc.trials < 1) throw ConfigError(s->path("trials"), "must be at least 1");
    if (s->has("seed")) jc.seed = s->unsigned_int("seed", 0);
    s->finish();
    c.jitter = jc;
  } else if (c.velocity && c.velocity->relative_spread) {
    JitterConfig jc;
    jc.relative_sigma = *c.velocity->relative_spread;
    c.jitter = jc;
  }

  if (auto s = root.child("feasibility")) {
    FeasibilityConfig f;
    if (!s->has("tau_at")) throw ConfigError(s->path("tau_at"), "missing required field");
    if (!s->has("tau_cav")) throw ConfigError(s->path("tau_cav"), "missing required field");
    f.tau_at = s->positive("tau_at", 0.0);
    f.tau_cav = s->positive("tau_cav", 0.0);
    s->finish();
    c.feasibility = f;
  }

  if (auto s = root.child("timing_search")) {
    auto& t = c.timing_search;
    t.gt_min = s->number("gt_min", t.gt_min);
    t.gt_max = s->number("gt_max", t.gt_max);
    if (!(t.gt_max > t.gt_min)) throw ConfigError(s->path("gt_max"), "must exceed gt_min");
    t.tolerance = s->number("tolerance", t.tolerance);
    if (t.tolerance < 0.0) throw ConfigError(s->path("tolerance"), "must be non-negative");
    t.refine_step = s->positive("refine_step", t.refine_step);
    s->finish();
  }

  if (auto s = root.child("tolerances")) {
    c.tolerances.norm = s->positive("norm", c.tolerances.norm);
    c.tolerances.fidelity = s->positive("fidelity", c.tolerances.fidelity);
    c.tolerances.leakage = s->positive("leakage", c.tolerances.leakage);
    c.tolerances.branch = s->positive("branch", c.tolerances.branch);
    s->finish();
  }

  root.finish();

  // Cross-field checks that need the assembled schedules.
  const bool generates = c.protocol == ProtocolKind::generate || c.protocol == ProtocolKind::full_pipeline;
  const bool probes = c.protocol != ProtocolKind::generate;
  if (generates) {
    try {
      c.generation_schedule().validate();
    } catch (const ScheduleError& e) {
      throw ConfigError("generation", e.what());
    }
  }
  if (probes) {
    try {
      if (c.protocol == ProtocolKind::distinguish) {
        c.distinction_schedule().validate();
      } else {
        c.coherence_schedule().validate();
      }
    } catch (const ScheduleError& e) {
      throw ConfigError("detection", e.what());
    }
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json serialize_config(const RunConfig& c) {
  json j;
  j["format_version"] = kFormatVersion;
  j["protocol"] = to_string(c.protocol);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["workers"] = c.workers;
  j["fock_cutoff"] = c.fock_cutoff;
  j["units"] = to_string(c.units);
  j["physics"] = {{"g", c.physics.g}, {"omega", c.physics.omega}};
  j["cat"] = {{"p", c.cat.p}, {"phi", c.cat.phi}, {"eta0", c.cat.eta0}, {"gamma", c.cat.gamma}};
  j["generation"] = {{"varphi1", c.generation.varphi1}, {"m", c.generation.m}, {"field_gap", c.generation.field_gap}};
  j["detection"] = {{"m", c.detection.m}, {"Tprime", c.detection.Tprime}, {"handoff", c.detection.handoff}};
  if (c.velocity) {
    const auto& v = *c.velocity;
    j["velocity"] = {{"v1", v.v1},
                     {"v2", v.v2},
                     {"probe_v1", v.probe_v1},
                     {"probe_v2", v.probe_v2},
                     {"ramsey_to_cavity", v.ramsey_to_cavity},
                     {"cavity_to_decoder", v.cavity_to_decoder},
                     {"decoder_to_coherence", v.decoder_to_coherence}};
    if (v.relative_spread) j["velocity"]["relative_spread"] = *v.relative_spread;
  } else {
    j["generation"]["tau1"] = c.generation.tau1;
    j["generation"]["tau2"] = c.generation.tau2;
    j["detection"]["t1"] = c.detection.t1;
    j["detection"]["t2"] = c.detection.t2;
    j["detection"]["t1p"] = c.detection.t1p;
    j["detection"]["t2p"] = c.detection.t2p;
  }
  if (c.jitter) {
    const auto& jc = *c.jitter;
    j["jitter"] = {{"relative_sigma", jc.relative_sigma},
                   {"distribution", to_string(jc.distribution)},
                   {"trials", jc.trials}};
    if (jc.seed) j["jitter"]["seed"] = *jc.seed;
  }
  if (c.feasibility) {
    j["feasibility"] = {{"tau_at", c.feasibility->tau_at}, {"tau_cav", c.feasibility->tau_cav}};
  }
  const auto& t = c.timing_search;
  j["timing_search"] = {{"gt_min", t.gt_min}, {"gt_max", t.gt_max}, {"tolerance", t.tolerance},
                        {"refine_step", t.refine_step}};
  j["tolerances"] = {{"norm", c.tolerances.norm},
                     {"fidelity", c.tolerances.fidelity},
                     {"leakage", c.tolerances.leakage},
                     {"branch", c.tolerances.branch}};
  return j;
}

}  // namespace bsc
