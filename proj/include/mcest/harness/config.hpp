#ifndef MCEST_HARNESS_CONFIG_HPP
#define MCEST_HARNESS_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcest/channel/params.hpp"
#include "mcest/errors.hpp"
#include "mcest/inference/estimators.hpp"
#include "mcest/inference/mse.hpp"
#include "mcest/inference/problem.hpp"
#include "mcest/simulator/config.hpp"

namespace mcest::harness {

using json = nlohmann::json;
using channel::EnvParams;
using inference::Estimator;
using inference::ObservationMode;
using inference::Unknown;

enum class Kind { cir_curve, signal_overlay, mse_vs_S, min_S_vs_xi, estimate, observe };

inline std::string_view name(Kind k) {
  switch (k) {
    case Kind::cir_curve: return "cir_curve";
    case Kind::signal_overlay: return "signal_overlay";
    case Kind::mse_vs_S: return "mse_vs_S";
    case Kind::min_S_vs_xi: return "min_S_vs_xi";
    case Kind::estimate: return "estimate";
    case Kind::observe: return "observe";
  }
  return "?";
}

inline Kind parse_kind(std::string_view s) {
  for (Kind k : {Kind::cir_curve, Kind::signal_overlay, Kind::mse_vs_S, Kind::min_S_vs_xi, Kind::estimate,
                 Kind::observe})
    if (name(k) == s) return k;
  throw validation_error("unknown experiment kind '" + std::string(s) + "'");
}

/// Run-size presets applied to fields the config leaves out.
enum class Profile { fast, paper };

struct ProfileDefaults {
  int realizations;  ///< overlay ensembles
  int trials;        ///< MSE and S_min studies
};

inline ProfileDefaults defaults_for(Profile p) {
  return p == Profile::fast ? ProfileDefaults{2000, 1000} : ProfileDefaults{2000, 5000};
}

// ---------------------------------------------------------------------------
// Strict JSON access: unknown keys and wrong types are validation errors.

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw validation_error(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw validation_error(where_ + ": missing required field '" + key + "'");
    return convert<T>(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw validation_error(where_ + ": unknown field '" + key + "'");
  }

 private:
  template <class T>
  T convert(const std::string& key) {
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw validation_error("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw validation_error("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw validation_error("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw validation_error("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw validation_error(where_ + ": field '" + key + "' has the wrong type");
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

// ---------------------------------------------------------------------------

inline EnvParams parse_env(const json& j, EnvParams p, const std::string& where) {
  Reader r(j, where);
  p.d1 = r.get("d1", p.d1);
  p.d2 = r.get("d2", p.d2);
  p.v = r.get("v", p.v);
  p.diffusion = r.get("D", p.diffusion);
  p.k = r.get("k", p.k);
  p.mu = r.get("mu", p.mu);
  p.delta = r.get("delta", p.delta);
  p.xi = r.get("xi", p.xi);
  r.finish();
  return p;
}

inline json env_to_json(const EnvParams& p) {
  return {{"d1", p.d1}, {"d2", p.d2}, {"v", p.v}, {"D", p.diffusion}, {"k", p.k},
          {"mu", p.mu}, {"delta", p.delta}, {"xi", p.xi}};
}

inline simulator::SimConfig parse_sim(const json& j, simulator::SimConfig c, const std::string& where) {
  Reader r(j, where);
  c.t_sim = r.get("t_sim", c.t_sim);
  c.t_end = r.get("t_end", c.t_end);
  c.realizations = r.get("realizations", c.realizations);
  c.observation_gap = r.get("observation_gap", c.observation_gap);
  c.crossing_correction = r.get("crossing_correction", c.crossing_correction);
  c.leap_far_particles = r.get("leap_far_particles", c.leap_far_particles);
  r.finish();
  return c;
}

inline json sim_to_json(const simulator::SimConfig& c) {
  return {{"t_sim", c.t_sim},
          {"t_end", c.t_end},
          {"realizations", c.realizations},
          {"observation_gap", c.observation_gap},
          {"crossing_correction", c.crossing_correction},
          {"leap_far_particles", c.leap_far_particles}};
}

/// Time grid given either as a list or as {start, stop, step} (inclusive).
inline std::vector<double> parse_times(const json& j, const std::string& where) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number()) throw validation_error(where + ": times must be numbers");
      out.push_back(x.get<double>());
    }
  } else {
    Reader r(j, where);
    const double start = r.require<double>("start");
    const double stop = r.require<double>("stop");
    const double step = r.require<double>("step");
    r.finish();
    if (!(step > 0.0) || stop < start) throw validation_error(where + ": need step > 0 and stop >= start");
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (n > 1000000) throw validation_error(where + ": grid too large");
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i]) || out[i] < 0.0) throw validation_error(where + ": times must be finite and >= 0");
    if (i > 0 && !(out[i] > out[i - 1])) throw validation_error(where + ": times must be strictly increasing");
  }
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const json& j, const std::string& where, Parse&& parse) {
  if (!j.is_array() || j.empty()) throw validation_error(where + ": expected a non-empty list");
  std::vector<T> out;
  for (const auto& x : j) out.push_back(parse(x));
  return out;
}

/// One labelled environment (overlay parameter sets, S_min variants).
struct ParameterSet {
  std::string label;
  EnvParams env;
};

struct StudyConfig {
  std::vector<Unknown> unknowns{Unknown::d2};
  int trials = 0;  ///< 0: profile default
  std::vector<int> S_grid{1, 2, 5, 10};
  std::vector<double> xi_grid{0.0};
  std::vector<Estimator> estimators{Estimator::de, Estimator::ml_rx1, Estimator::ml_rx2};
  ObservationMode mode = ObservationMode::poisson;
  int max_S = 60;
  std::vector<ParameterSet> variants;  ///< S_min only; empty means the base env
};

/// Estimation of one unknown from an observation file.
struct EstimateConfig {
  Unknown unknown = Unknown::d2;
  double bracket_lo = NAN, bracket_hi = NAN;
  bool noise_known = false;
  std::string observations;  ///< path to (s_index, g1, g2) CSV
};

/// Observation file generation.
struct ObserveConfig {
  int S = 10;
  ObservationMode mode = ObservationMode::poisson;
  double first_window_end = 0.0;  ///< 0: twice the plateau onset
};

struct ExperimentConfig {
  Kind kind = Kind::cir_curve;
  EnvParams env;
  simulator::SimConfig sim;
  std::vector<double> times;
  std::vector<ParameterSet> parameter_sets;
  StudyConfig study;
  EstimateConfig estimate;
  ObserveConfig observe;
  std::uint64_t seed = 1;
  std::string output;  ///< CSV file name inside --out

  json to_json() const;
};

inline std::vector<ParameterSet> parse_parameter_sets(const json& j, const EnvParams& base, const std::string& where) {
  std::vector<ParameterSet> out;
  if (!j.is_array()) throw validation_error(where + ": expected a list");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    Reader r(j[i], w);
    ParameterSet s;
    s.label = r.get<std::string>("label", "set" + std::to_string(i + 1));
    s.env = r.has("env") ? parse_env(r.raw("env"), base, w + ".env") : base;
    r.finish();
    out.push_back(s);
  }
  return out;
}

inline json parameter_sets_to_json(const std::vector<ParameterSet>& sets) {
  json a = json::array();
  for (const auto& s : sets) a.push_back({{"label", s.label}, {"env", env_to_json(s.env)}});
  return a;
}

/// The three overlay parameter sets: (d1, d2, v) = (20, 20, 10), (20, 20, 6), (15, 25, 6), xi = 5.
inline std::vector<ParameterSet> default_overlay_sets(const EnvParams& base) {
  std::vector<ParameterSet> out;
  const double sets[3][3] = {{20.0, 20.0, 10.0}, {20.0, 20.0, 6.0}, {15.0, 25.0, 6.0}};
  for (int i = 0; i < 3; ++i) {
    EnvParams p = base;
    p.d1 = sets[i][0];
    p.d2 = sets[i][1];
    p.v = sets[i][2];
    p.xi = 5.0;
    out.push_back({"set" + std::to_string(i + 1), p});
  }
  return out;
}

inline std::string default_output(Kind k) {
  switch (k) {
    case Kind::cir_curve: return "cir.csv";
    case Kind::signal_overlay: return "overlay.csv";
    case Kind::mse_vs_S: return "mse.csv";
    case Kind::min_S_vs_xi: return "min_s.csv";
    case Kind::estimate: return "estimate.json";
    case Kind::observe: return "observations.csv";
  }
  return "out.csv";
}

/// Parses a config (or the config block of a manifest) for `kind`.
/// Fields left out take their defaults, with run sizes from `profile`.
inline ExperimentConfig parse_config(const json& doc, Kind kind, Profile profile) {
  const json& j = doc.contains("manifest") ? doc.at("config") : doc;
  Reader r(j, "config");
  ExperimentConfig c;
  c.kind = kind;
  if (r.has("kind") && parse_kind(r.require<std::string>("kind")) != kind)
    throw validation_error("config: kind '" + r.require<std::string>("kind") + "' does not match the command");
  r.get<std::string>("kind", "");
  if (r.has("env")) c.env = parse_env(r.raw("env"), c.env, "config.env");
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.output = r.get<std::string>("output", default_output(kind));
  if (c.output.empty() || c.output.find('/') != std::string::npos || c.output.find('\\') != std::string::npos)
    throw validation_error("config: output must be a plain file name");

  const ProfileDefaults pd = defaults_for(profile);
  c.sim.t_end = 6.0;
  c.sim.realizations = pd.realizations;
  if (r.has("sim")) c.sim = parse_sim(r.raw("sim"), c.sim, "config.sim");

  if (r.has("times")) c.times = parse_times(r.raw("times"), "config.times");
  else if (kind == Kind::cir_curve) c.times = parse_times(json{{"start", 0.5}, {"stop", 20.0}, {"step", 0.5}}, "default");
  else if (kind == Kind::signal_overlay)
    c.times = parse_times(json{{"start", 1.0}, {"stop", c.sim.t_end}, {"step", 0.25}}, "default");

  if (r.has("parameter_sets")) c.parameter_sets = parse_parameter_sets(r.raw("parameter_sets"), c.env, "config.parameter_sets");
  else if (kind == Kind::signal_overlay) c.parameter_sets = default_overlay_sets(c.env);

  if (r.has("study")) {
    Reader s(r.raw("study"), "config.study");
    if (s.has("unknowns"))
      c.study.unknowns = parse_list<Unknown>(s.raw("unknowns"), "config.study.unknowns", [](const json& x) {
        if (!x.is_string()) throw validation_error("config.study.unknowns: expected strings");
        return inference::parse_unknown(x.get<std::string>());
      });
    c.study.trials = s.get("trials", 0);
    if (s.has("S"))
      c.study.S_grid = parse_list<int>(s.raw("S"), "config.study.S", [](const json& x) {
        if (!x.is_number_integer()) throw validation_error("config.study.S: expected integers");
        return x.get<int>();
      });
    if (s.has("xi"))
      c.study.xi_grid = parse_list<double>(s.raw("xi"), "config.study.xi", [](const json& x) {
        if (!x.is_number()) throw validation_error("config.study.xi: expected numbers");
        return x.get<double>();
      });
    if (s.has("estimators"))
      c.study.estimators = parse_list<Estimator>(s.raw("estimators"), "config.study.estimators", [](const json& x) {
        if (!x.is_string()) throw validation_error("config.study.estimators: expected strings");
        return inference::parse_estimator(x.get<std::string>());
      });
    c.study.mode = inference::parse_mode(s.get<std::string>("mode", "poisson"));
    c.study.max_S = s.get("max_S", c.study.max_S);
    if (s.has("variants")) c.study.variants = parse_parameter_sets(s.raw("variants"), c.env, "config.study.variants");
    s.finish();
  }
  if (kind == Kind::min_S_vs_xi && !r.has("study")) {
    c.study.unknowns = {Unknown::mu, Unknown::k};
    c.study.xi_grid = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
  }
  if (c.study.trials == 0) c.study.trials = pd.trials;

  if (r.has("estimate")) {
    Reader e(r.raw("estimate"), "config.estimate");
    c.estimate.unknown = inference::parse_unknown(e.require<std::string>("unknown"));
    c.estimate.bracket_lo = e.require<double>("bracket_lo");
    c.estimate.bracket_hi = e.require<double>("bracket_hi");
    c.estimate.noise_known = e.get("noise_known", false);
    c.estimate.observations = e.get<std::string>("observations", "");
    e.finish();
  } else if (kind == Kind::estimate) {
    throw validation_error("config: estimate needs an 'estimate' block with unknown and bracket");
  }

  if (r.has("observe")) {
    Reader o(r.raw("observe"), "config.observe");
    c.observe.S = o.get("S", c.observe.S);
    c.observe.mode = inference::parse_mode(o.get<std::string>("mode", "poisson"));
    c.observe.first_window_end = o.get("first_window_end", 0.0);
    o.finish();
  }
  r.finish();
  return c;
}

inline json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = std::string(name(kind));
  j["env"] = env_to_json(env);
  j["seed"] = seed;
  j["output"] = output;
  j["sim"] = sim_to_json(sim);
  j["times"] = times;
  j["parameter_sets"] = parameter_sets_to_json(parameter_sets);
  json s;
  s["unknowns"] = json::array();
  for (Unknown u : study.unknowns) s["unknowns"].push_back(std::string(inference::name(u)));
  s["trials"] = study.trials;
  s["S"] = study.S_grid;
  s["xi"] = study.xi_grid;
  s["estimators"] = json::array();
  for (Estimator e : study.estimators) s["estimators"].push_back(std::string(inference::name(e)));
  s["mode"] = std::string(inference::name(study.mode));
  s["max_S"] = study.max_S;
  s["variants"] = parameter_sets_to_json(study.variants);
  j["study"] = s;
  if (kind == Kind::estimate)
    j["estimate"] = {{"unknown", std::string(inference::name(estimate.unknown))},
                     {"bracket_lo", estimate.bracket_lo},
                     {"bracket_hi", estimate.bracket_hi},
                     {"noise_known", estimate.noise_known},
                     {"observations", estimate.observations}};
  j["observe"] = {{"S", observe.S},
                  {"mode", std::string(inference::name(observe.mode))},
                  {"first_window_end", observe.first_window_end}};
  return j;
}

}  // namespace mcest::harness

#endif  // MCEST_HARNESS_CONFIG_HPP
