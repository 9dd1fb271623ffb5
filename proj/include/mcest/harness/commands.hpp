#ifndef MCEST_HARNESS_COMMANDS_HPP
#define MCEST_HARNESS_COMMANDS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcest/channel.hpp"
#include "mcest/errors.hpp"
#include "mcest/harness/config.hpp"
#include "mcest/harness/csv.hpp"
#include "mcest/harness/manifest.hpp"
#include "mcest/harness/plateau.hpp"
#include "mcest/inference.hpp"
#include "mcest/parallel.hpp"
#include "mcest/simulator.hpp"

namespace mcest::harness {

using channel::Receiver;

struct OutputFile {
  std::string name;
  std::string bytes;
};

struct CommandResult {
  std::vector<OutputFile> files;
  json summary = json::object();
  json inputs = json::array();
  int exit_code = 0;  ///< 3 when some value could not be computed
};

namespace detail {

inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const non_convergence*>(&e)) return "non_convergence";
  if (dynamic_cast<const tolerance_not_met*>(&e)) return "tolerance_not_met";
  if (dynamic_cast<const numerical_error*>(&e)) return "numerical_error";
  if (dynamic_cast<const domain_error*>(&e)) return "domain_error";
  return "error";
}

// N_j(t), with N_j(0) = 0.
inline double absorbed_or_zero(Receiver j, double t, const EnvParams& p) {
  return t > 0.0 ? channel::expected_absorbed(j, t, p) : 0.0;
}

// Expected count in [t - delta, t]; windows reaching before t = 0 count from 0.
inline double window_count(Receiver j, double t, const EnvParams& p) {
  return t > p.delta ? channel::received_signal(j, t, p) : absorbed_or_zero(j, t, p);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline CommandResult run_cir(const ExperimentConfig& c) {
  const EnvParams& p = c.env;
  p.validate();
  CsvTable table({{"t", CellType::real},
                  {"N1", CellType::real, true},
                  {"N2", CellType::real, true},
                  {"dN1", CellType::real, true},
                  {"dN2", CellType::real, true},
                  {"Ntilde1", CellType::real},
                  {"Ntilde2", CellType::real},
                  {"status", CellType::text}});
  const double nt1 = channel::asymptotic_signal(Receiver::rx1, p);
  const double nt2 = channel::asymptotic_signal(Receiver::rx2, p);
  CommandResult out;
  int failed = 0;
  for (double t : c.times) {
    std::vector<std::string> row{format_real(t)};
    try {
      const double n1 = detail::absorbed_or_zero(Receiver::rx1, t, p);
      const double n2 = detail::absorbed_or_zero(Receiver::rx2, t, p);
      const double d1 = detail::window_count(Receiver::rx1, t, p);
      const double d2 = detail::window_count(Receiver::rx2, t, p);
      for (double x : {n1, n2, d1, d2}) row.push_back(format_real(x));
      row.push_back(format_real(nt1));
      row.push_back(format_real(nt2));
      row.push_back("ok");
    } catch (const numerical_error& e) {
      row.resize(1);
      for (int i = 0; i < 4; ++i) row.emplace_back();
      row.push_back(format_real(nt1));
      row.push_back(format_real(nt2));
      row.push_back(detail::error_kind(e));
      ++failed;
    }
    table.add_row(std::move(row));
  }
  out.files.push_back({c.output, table.render()});
  out.summary = {{"rows", c.times.size()}, {"failed_rows", failed}};
  if (failed) out.exit_code = 3;
  return out;
}

// ---------------------------------------------------------------------------

inline CommandResult run_overlay(const ExperimentConfig& c, unsigned threads) {
  CsvTable table({{"set", CellType::integer},       {"label", CellType::text},
                  {"t", CellType::real},            {"analytic_rx1", CellType::real},
                  {"asymptotic_rx1", CellType::real}, {"mean_rx1", CellType::real},
                  {"se_rx1", CellType::real},       {"z_rx1", CellType::real, true},
                  {"analytic_rx2", CellType::real}, {"asymptotic_rx2", CellType::real},
                  {"mean_rx2", CellType::real},     {"se_rx2", CellType::real},
                  {"z_rx2", CellType::real, true}});
  if (c.parameter_sets.empty()) throw validation_error("overlay: no parameter sets");
  CommandResult out;
  json sets = json::array();
  for (std::size_t s = 0; s < c.parameter_sets.size(); ++s) {
    const EnvParams& p = c.parameter_sets[s].env;
    p.validate();
    simulator::SimConfig cfg = c.sim;
    cfg.seed = derive_seed(c.seed, s);
    const auto curve = simulator::ensemble_curve(p, cfg, c.times, threads);
    const double a1 = channel::asymptotic_signal(Receiver::rx1, p) + p.xi;
    const double a2 = channel::asymptotic_signal(Receiver::rx2, p) + p.xi;
    int points = 0, within = 0;
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      const double t = c.times[i];
      const double e1 = detail::window_count(Receiver::rx1, t, p) + p.xi;
      const double e2 = detail::window_count(Receiver::rx2, t, p) + p.xi;
      const double z1 = curve.se_rx1[i] > 0.0 ? std::abs(e1 - curve.mean_rx1[i]) / curve.se_rx1[i] : NAN;
      const double z2 = curve.se_rx2[i] > 0.0 ? std::abs(e2 - curve.mean_rx2[i]) / curve.se_rx2[i] : NAN;
      for (double z : {z1, z2}) {
        ++points;
        if (z <= 3.0) ++within;
      }
      table.add_row({format_int(static_cast<std::int64_t>(s + 1)), c.parameter_sets[s].label, format_real(t),
                     format_real(e1), format_real(a1), format_real(curve.mean_rx1[i]),
                     format_real(curve.se_rx1[i]), format_real(z1), format_real(e2), format_real(a2),
                     format_real(curve.mean_rx2[i]), format_real(curve.se_rx2[i]), format_real(z2)});
    }
    sets.push_back({{"label", c.parameter_sets[s].label},
                    {"points", points},
                    {"within_3se", within},
                    {"fraction_within_3se", points ? static_cast<double>(within) / points : 1.0}});
  }
  out.files.push_back({c.output, table.render()});
  out.summary = {{"sets", sets}};
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

inline inference::MseStudySpec study_spec(const ExperimentConfig& c, Unknown u, const EnvParams& truth, int S,
                                          std::vector<Estimator> estimators) {
  inference::MseStudySpec spec;
  spec.unknown = u;
  spec.truth = truth;
  spec.trials = c.study.trials;
  spec.S = S;
  spec.estimators = std::move(estimators);
  spec.mode = c.study.mode;
  spec.seed = c.seed;
  spec.sim = c.sim;
  if (spec.mode == ObservationMode::simulator) spec.first_window_end = default_first_window_end(truth);
  return spec;
}

inline bool includes(const std::vector<Estimator>& v, Estimator e) {
  for (Estimator x : v)
    if (x == e) return true;
  return false;
}

}  // namespace detail

inline CommandResult run_mse(const ExperimentConfig& c, unsigned threads) {
  for (int S : c.study.S_grid)
    if (S < 1) throw validation_error("mse: S values must be >= 1");
  CsvTable table({{"unknown", CellType::text},      {"xi", CellType::real},
                  {"S", CellType::integer},         {"crlb_norm", CellType::real},
                  {"mse_de", CellType::real, true}, {"se_de", CellType::real, true},
                  {"mse_rx1", CellType::real, true}, {"se_rx1", CellType::real, true},
                  {"mse_rx2", CellType::real, true}, {"se_rx2", CellType::real, true},
                  {"fail_de", CellType::integer, true}, {"fail_rx1", CellType::integer, true},
                  {"fail_rx2", CellType::integer, true}, {"clamped_rx1", CellType::integer, true},
                  {"clamped_rx2", CellType::integer, true}, {"valid", CellType::integer}});
  CommandResult out;
  int invalid = 0;
  for (Unknown u : c.study.unknowns) {
    for (double xi : c.study.xi_grid) {
      EnvParams truth = c.env;
      truth.xi = xi;
      truth.validate();
      for (int S : c.study.S_grid) {
        const auto res = inference::mse_study(detail::study_spec(c, u, truth, S, c.study.estimators), threads);
        std::vector<std::string> row{std::string(inference::name(u)), format_real(xi), format_int(S),
                                     format_real(inference::normalized_crlb(u, truth, S))};
        bool valid = true;
        std::vector<std::string> fails, clamps;
        for (Estimator e : {Estimator::de, Estimator::ml_rx1, Estimator::ml_rx2}) {
          if (!detail::includes(c.study.estimators, e)) {
            row.emplace_back();
            row.emplace_back();
            fails.emplace_back();
            if (e != Estimator::de) clamps.emplace_back();
            continue;
          }
          const auto& st = res.of(e);
          valid = valid && st.valid;
          row.push_back(format_real(st.nmse));
          row.push_back(format_real(st.nmse_se));
          fails.push_back(format_int(st.failures));
          if (e != Estimator::de) clamps.push_back(format_int(st.clamped));
        }
        row.insert(row.end(), fails.begin(), fails.end());
        row.insert(row.end(), clamps.begin(), clamps.end());
        row.push_back(valid ? "1" : "0");
        if (!valid) ++invalid;
        table.add_row(std::move(row));
      }
    }
  }
  out.files.push_back({c.output, table.render()});
  out.summary = {{"invalid_rows", invalid}};
  if (invalid) out.exit_code = 3;
  return out;
}

// ---------------------------------------------------------------------------

/// Smallest S in [1, max_S] with MSE(DE) < MSE(RX2), or 0 if none.
inline int min_observations(const ExperimentConfig& c, Unknown u, const EnvParams& truth, unsigned threads) {
  for (int S = 1; S <= c.study.max_S; ++S) {
    const auto res =
        inference::mse_study(detail::study_spec(c, u, truth, S, {Estimator::de, Estimator::ml_rx2}), threads);
    if (res.of(Estimator::de).nmse < res.of(Estimator::ml_rx2).nmse) return S;
  }
  return 0;
}

inline CommandResult run_min_s(const ExperimentConfig& c, unsigned threads) {
  if (c.study.max_S < 1) throw validation_error("min-s: max_S must be >= 1");
  std::vector<ParameterSet> variants = c.study.variants;
  const bool labelled = !variants.empty();
  if (!labelled) variants.push_back({"base", c.env});

  Schema schema{{"xi", CellType::real}};
  for (Unknown u : c.study.unknowns)
    for (const auto& v : variants)
      schema.push_back({"smin_" + std::string(inference::name(u)) + (labelled ? "_" + v.label : ""),
                        CellType::integer, true});
  CsvTable table(schema);
  CommandResult out;
  json curves = json::array();
  std::vector<std::vector<std::string>> rows(c.study.xi_grid.size());
  for (std::size_t x = 0; x < c.study.xi_grid.size(); ++x) rows[x].push_back(format_real(c.study.xi_grid[x]));
  for (Unknown u : c.study.unknowns) {
    for (const auto& v : variants) {
      json values = json::array();
      for (std::size_t x = 0; x < c.study.xi_grid.size(); ++x) {
        EnvParams truth = v.env;
        truth.xi = c.study.xi_grid[x];
        truth.validate();
        const int smin = min_observations(c, u, truth, threads);
        rows[x].push_back(smin > 0 ? format_int(smin) : "");
        values.push_back(smin > 0 ? json(smin) : json(nullptr));
      }
      curves.push_back({{"unknown", std::string(inference::name(u))}, {"variant", v.label}, {"s_min", values}});
    }
  }
  for (auto& r : rows) table.add_row(std::move(r));
  out.files.push_back({c.output, table.render()});
  out.summary = {{"xi", c.study.xi_grid}, {"curves", curves}};
  return out;
}

// ---------------------------------------------------------------------------

/// Reads an observation file with columns s_index and g1 and/or g2.
inline inference::ObservationSet read_observations(const std::string& text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw validation_error("observations: empty file");
  const auto& header = records.front();
  int col_s = -1, col_g1 = -1, col_g2 = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "s_index" && col_s < 0) col_s = static_cast<int>(i);
    else if (header[i] == "g1" && col_g1 < 0) col_g1 = static_cast<int>(i);
    else if (header[i] == "g2" && col_g2 < 0) col_g2 = static_cast<int>(i);
    else throw validation_error("observations: unexpected column '" + header[i] + "'");
  }
  if (col_s < 0) throw validation_error("observations: missing column 's_index'");
  if (col_g1 < 0 && col_g2 < 0) throw validation_error("observations: need column g1 and/or g2");

  std::vector<std::int64_t> g1, g2;
  std::string bad;
  int n_bad = 0;
  std::int64_t last_index = 0;
  auto parse_count = [](const std::string& s, std::int64_t& v) {
    return detail::parses_as_integer(s) && (v = std::stoll(s)) >= 0;
  };
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::string why;
    std::int64_t s = 0, a = 0, b = 0;
    if (rec.size() != header.size()) why = "wrong number of fields";
    else if (!detail::parses_as_integer(rec[col_s])) why = "s_index is not an integer";
    else if ((s = std::stoll(rec[col_s])), r > 1 && s <= last_index) why = "s_index not increasing";
    else if (col_g1 >= 0 && !parse_count(rec[col_g1], a)) why = "g1 is not a count";
    else if (col_g2 >= 0 && !parse_count(rec[col_g2], b)) why = "g2 is not a count";
    if (!why.empty()) {
      if (n_bad < 20) bad += " row " + std::to_string(r + 1) + ": " + why + ";";
      ++n_bad;
      continue;
    }
    last_index = s;
    if (col_g1 >= 0) g1.push_back(a);
    if (col_g2 >= 0) g2.push_back(b);
  }
  if (n_bad) throw validation_error("observations: " + std::to_string(n_bad) + " invalid row(s):" + bad);
  if (g1.empty() && g2.empty()) throw validation_error("observations: no data rows");
  if (col_g1 >= 0 && col_g2 >= 0) return inference::ObservationSet::from_pairs(std::move(g1), std::move(g2));
  if (col_g1 >= 0) return inference::ObservationSet::from_single(Receiver::rx1, std::move(g1));
  return inference::ObservationSet::from_single(Receiver::rx2, std::move(g2));
}

namespace detail {

inline json estimate_json(const inference::Estimate& e) {
  return {{"available", true},
          {"value", e.value},
          {"clamped", e.clamped},
          {"iterations", e.iterations},
          {"bracket", {e.bracket_lo, e.bracket_hi}}};
}

inline json unavailable(const std::string& why) { return {{"available", false}, {"reason", why}}; }

}  // namespace detail

/// DE and per-receiver ML estimates from an observation file, with the
/// normalized CRLB of DE at the DE estimate. Without known noise, xi is
/// replaced by the excess of the sample means over the fitted counts.
inline CommandResult run_estimate(const ExperimentConfig& c, const std::string& observations_path) {
  const std::string path = observations_path.empty() ? c.estimate.observations : observations_path;
  if (path.empty()) throw validation_error("estimate: no observation file given");
  const std::string text = read_file(path);
  const auto obs = read_observations(text);

  inference::EstimationProblem prob;
  prob.unknown = c.estimate.unknown;
  prob.known = c.env;
  prob.bracket_lo = c.estimate.bracket_lo;
  prob.bracket_hi = c.estimate.bracket_hi;
  prob.noise_known = c.estimate.noise_known;
  prob.validate();

  CommandResult out;
  out.inputs.push_back({{"path", path}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
  json report;
  report["unknown"] = std::string(inference::name(prob.unknown));
  report["S"] = obs.size();
  report["bracket"] = {prob.bracket_lo, prob.bracket_hi};

  std::optional<double> de_value;
  if (obs.has_difference()) {
    try {
      const auto e = inference::estimate_de(prob, obs);
      report["de"] = detail::estimate_json(e);
      de_value = e.value;
    } catch (const inference::estimation_failure& e) {
      report["de"] = {{"available", true}, {"error", e.what()}, {"best", e.best()}};
      out.exit_code = 3;
    }
  } else {
    report["de"] = detail::unavailable("needs observations from both receivers");
  }
  for (Receiver j : {Receiver::rx1, Receiver::rx2}) {
    const std::string key = j == Receiver::rx1 ? "ml_rx1" : "ml_rx2";
    if (obs.has(j)) report[key] = detail::estimate_json(inference::estimate_ml_rx(j, prob, obs.counts(j)));
    else report[key] = detail::unavailable("receiver not observed");
  }

  if (de_value) {
    EnvParams at = prob.at(*de_value);
    std::string noise_source = "config";
    if (!prob.noise_known) {
      at.xi = 0.0;
      double excess = 0.0;
      for (Receiver j : {Receiver::rx1, Receiver::rx2})
        excess += inference::sample_mean(obs.counts(j)) - channel::asymptotic_signal(j, at);
      at.xi = std::max(0.0, 0.5 * excess);
      noise_source = "estimated";
    }
    try {
      report["crlb_norm"] = inference::normalized_crlb(prob.unknown, at, static_cast<int>(obs.size()));
    } catch (const numerical_error& e) {
      report["crlb_norm"] = nullptr;
      report["crlb_error"] = e.what();
      out.exit_code = 3;
    }
    report["xi_used"] = at.xi;
    report["xi_source"] = noise_source;
  } else {
    report["crlb_norm"] = nullptr;
  }
  out.files.push_back({c.output, report.dump(2) + "\n"});
  return out;
}

// ---------------------------------------------------------------------------

inline CommandResult run_observe(const ExperimentConfig& c) {
  const EnvParams& p = c.env;
  p.validate();
  const auto& o = c.observe;
  if (o.S < 1) throw validation_error("observe: S must be >= 1");
  double first_end = o.first_window_end;
  inference::ObservationSet obs;
  if (o.mode == ObservationMode::poisson) {
    obs = inference::sample_poisson_observations(p, o.S, c.seed);
  } else {
    if (first_end <= 0.0) first_end = default_first_window_end(p);
    obs = inference::sample_simulated_observations(p, c.sim, first_end, o.S, c.seed);
  }
  CsvTable table({{"s_index", CellType::integer}, {"g1", CellType::integer}, {"g2", CellType::integer}});
  for (std::size_t s = 0; s < obs.size(); ++s)
    table.add_row({format_int(static_cast<std::int64_t>(s + 1)), format_int(obs.counts(Receiver::rx1)[s]),
                   format_int(obs.counts(Receiver::rx2)[s])});
  CommandResult out;
  out.files.push_back({c.output, table.render()});
  out.summary = {{"S", o.S}, {"mode", std::string(inference::name(o.mode))}};
  if (o.mode == ObservationMode::simulator) out.summary["first_window_end"] = first_end;
  return out;
}

// ---------------------------------------------------------------------------

inline std::string manifest_path(const std::string& out_dir, const ExperimentConfig& c) {
  const std::string stem = std::filesystem::path(c.output).stem().string();
  return (std::filesystem::path(out_dir) / (stem + ".manifest.json")).string();
}

/// Runs one command, writes its files and a manifest into `out_dir`.
inline RunManifest execute(const std::string& command, const ExperimentConfig& c, const std::string& out_dir,
                           unsigned threads, const std::string& observations_path = "") {
  const auto start = std::chrono::steady_clock::now();
  CommandResult res;
  switch (c.kind) {
    case Kind::cir_curve: res = run_cir(c); break;
    case Kind::signal_overlay: res = run_overlay(c, threads); break;
    case Kind::mse_vs_S: res = run_mse(c, threads); break;
    case Kind::min_S_vs_xi: res = run_min_s(c, threads); break;
    case Kind::estimate: res = run_estimate(c, observations_path); break;
    case Kind::observe: res = run_observe(c); break;
  }
  std::filesystem::create_directories(out_dir);
  RunManifest m;
  m.command = command;
  m.config = c.to_json();
  if (c.kind == Kind::estimate && !observations_path.empty()) m.config["estimate"]["observations"] = observations_path;
  m.seed = c.seed;
  m.threads = threads;
  for (const auto& f : res.files) {
    write_file((std::filesystem::path(out_dir) / f.name).string(), f.bytes);
    m.outputs.push_back({f.name, sha256_hex(f.bytes), f.bytes.size()});
  }
  m.inputs = res.inputs;
  m.summary = res.summary;
  m.exit_code = res.exit_code;
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(manifest_path(out_dir, c), m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace mcest::harness

#endif  // MCEST_HARNESS_COMMANDS_HPP
