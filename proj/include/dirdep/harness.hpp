#pragma once

// Monte Carlo size and power studies.
//
// full_bootstrap: each of N replicates draws a sample, runs a B-permutation
// test for every statistic (all statistics share the replicate's
// permutations) and rejects when p <= alpha.
//
// warp_speed: each replicate contributes its observed statistic and exactly
// one permuted statistic. The N permuted values form a pooled null
// reference; replicate r rejects when
//   (1 + #{j : T*_j >= T_r}) / (N + 1) <= alpha,
// the same tie rule as the permutation p-value.
//
// Replicate r of a scenario with seed s is fully determined by
// derive_seed(s, r) (see rng.hpp), so tables do not depend on the number of
// worker threads.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirdep/csv.hpp"
#include "dirdep/errors.hpp"
#include "dirdep/evaluators.hpp"
#include "dirdep/inference.hpp"
#include "dirdep/model_parser.hpp"
#include "dirdep/parallel.hpp"
#include "dirdep/rng.hpp"
#include "dirdep/samplers.hpp"

namespace dirdep {

enum class CalibrationMode { full_bootstrap, warp_speed };

inline std::string to_string(CalibrationMode m) {
  return m == CalibrationMode::full_bootstrap ? "full_bootstrap" : "warp_speed";
}

inline CalibrationMode parse_mode(std::string_view s) {
  if (s == "full_bootstrap") return CalibrationMode::full_bootstrap;
  if (s == "warp_speed") return CalibrationMode::warp_speed;
  throw ConfigError("mode must be full_bootstrap or warp_speed, got '" + std::string(s) + "'");
}

struct ScenarioConfig {
  std::string label;
  ModelSpec model;
  std::size_t n = 20;
  std::vector<StatisticSpec> statistics;
  double alpha = 0.05;
  std::uint64_t N = 2000;  // Monte Carlo replicates
  std::uint64_t B = 1000;  // permutations per test; unused in warp_speed
  CalibrationMode mode = CalibrationMode::full_bootstrap;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (N < 1) throw ConfigError("N (Monte Carlo replicates) must be >= 1");
    if (mode == CalibrationMode::full_bootstrap && B < 1) throw ConfigError("B must be >= 1");
    if (n < 2) throw ConfigError("sample size n must be >= 2");
    if (statistics.empty()) throw ConfigError("scenario '" + label + "' lists no statistics");
    for (const auto& s : statistics) {
      if (s.kind() == StatisticSpec::Kind::nk) {
        throw ConfigError("two-sample statistic nk is not an independence statistic");
      }
      if ((s.kind() == StatisticSpec::Kind::ccor || s.kind() == StatisticSpec::Kind::trig) &&
          !(model.x_kind().is_circle() && model.y_kind().is_circle())) {
        throw ConfigError("statistic '" + s.id() + "' needs circular-circular data but model " +
                          model.to_string() + " is not toroidal");
      }
    }
  }
};

struct StudyConfig {
  std::string name;
  std::vector<ScenarioConfig> scenarios;
};

struct PowerRow {
  std::string scenario;
  std::string model;
  std::string statistic;  // canonical id
  std::string label;      // column label
  std::size_t n = 0;
  double alpha = 0.05;
  std::uint64_t N = 0;
  std::uint64_t B = 0;
  CalibrationMode mode = CalibrationMode::full_bootstrap;
  std::uint64_t seed = 0;
  std::uint64_t rejections = 0;

  double rate() const { return static_cast<double>(rejections) / static_cast<double>(N); }

  friend bool operator==(const PowerRow&, const PowerRow&) = default;
};

struct PowerTable {
  std::string name;
  std::vector<PowerRow> rows;
  double runtime_seconds = 0.0;  // metadata only; never serialized

  const PowerRow& at(std::string_view scenario, std::string_view statistic_label) const {
    for (const auto& r : rows) {
      if (r.scenario == scenario && r.label == statistic_label) return r;
    }
    throw ConfigError("no row for scenario '" + std::string(scenario) + "' and statistic '" +
                      std::string(statistic_label) + "'");
  }
};

// ---------------------------------------------------------------------------
// Config files (JSON)

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown field '" + where + key + "'");
  }
}

template <class T>
T get_field(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + where + key + "': " + e.what());
  }
}

}  // namespace detail

/// Parses a study config. Top-level keys give defaults for every scenario;
/// each entry of "scenarios" needs "model" and may override any default.
/// A scenario without an explicit seed uses derive_seed(study seed, index).
inline StudyConfig parse_study(const nlohmann::json& doc) {
  using detail::get_field;
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  const std::set<std::string> shared = {"n", "alpha", "N", "B", "mode", "seed", "statistics"};
  std::set<std::string> top = shared;
  top.insert({"name", "description", "scenarios"});
  detail::reject_unknown_keys(doc, top, "");
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array() || doc["scenarios"].empty()) {
    throw ConfigError("field 'scenarios' must be a non-empty array");
  }

  StudyConfig study;
  study.name = doc.contains("name") ? get_field<std::string>(doc, "name", "") : "study";
  const std::uint64_t study_seed =
      doc.contains("seed") ? get_field<std::uint64_t>(doc, "seed", "") : 1;

  for (std::size_t i = 0; i < doc["scenarios"].size(); ++i) {
    const auto& sc = doc["scenarios"][i];
    const std::string where = "scenarios[" + std::to_string(i) + "].";
    if (!sc.is_object()) throw ConfigError("field '" + where.substr(0, where.size() - 1) + "' must be an object");
    std::set<std::string> allowed = shared;
    allowed.insert({"label", "model"});
    detail::reject_unknown_keys(sc, allowed, where);
    if (!sc.contains("model")) throw ConfigError("missing field '" + where + "model'");

    // Scenario value if present, else the study default.
    auto source = [&](const std::string& key) -> const nlohmann::json* {
      if (sc.contains(key)) return &sc;
      if (doc.contains(key)) return &doc;
      return nullptr;
    };
    auto where_of = [&](const std::string& key) { return sc.contains(key) ? where : std::string(); };

    const auto model_text = get_field<std::string>(sc, "model", where);
    ModelSpec model = [&] {
      try {
        return parse_model(model_text);
      } catch (const ConfigError& e) {
        throw ConfigError("field '" + where + "model': " + e.what());
      }
    }();
    ScenarioConfig cfg{.label = sc.contains("label") ? get_field<std::string>(sc, "label", where)
                                                     : model_text,
                       .model = model,
                       .statistics = {}};
    if (auto* o = source("n")) cfg.n = get_field<std::size_t>(*o, "n", where_of("n"));
    if (auto* o = source("alpha")) cfg.alpha = get_field<double>(*o, "alpha", where_of("alpha"));
    if (auto* o = source("N")) cfg.N = get_field<std::uint64_t>(*o, "N", where_of("N"));
    if (auto* o = source("B")) cfg.B = get_field<std::uint64_t>(*o, "B", where_of("B"));
    if (auto* o = source("mode")) {
      try {
        cfg.mode = parse_mode(get_field<std::string>(*o, "mode", where_of("mode")));
      } catch (const ConfigError& e) {
        throw ConfigError("field '" + where_of("mode") + "mode': " + e.what());
      }
    }
    cfg.seed = sc.contains("seed") ? get_field<std::uint64_t>(sc, "seed", where)
                                   : derive_seed(study_seed, i);
    if (auto* o = source("statistics")) {
      const auto ids =
          get_field<std::vector<std::string>>(*o, "statistics", where_of("statistics"));
      for (const auto& id : ids) {
        try {
          cfg.statistics.push_back(StatisticSpec::parse(id));
        } catch (const ConfigError& e) {
          throw ConfigError("field '" + where_of("statistics") + "statistics': " + e.what());
        }
      }
    }
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("scenario " + std::to_string(i) + " ('" + cfg.label + "'): " + e.what());
    }
    study.scenarios.push_back(std::move(cfg));
  }
  return study;
}

inline StudyConfig load_study(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_study(doc);
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

struct ReplicateDraw {
  std::vector<double> observed;
  std::vector<double> permuted;   // warp_speed
  std::vector<unsigned char> rejected;  // full_bootstrap
};

[[noreturn]] inline void rethrow_with_replicate(const ScenarioConfig& cfg, std::uint64_t r) {
  const std::string prefix =
      "scenario '" + cfg.label + "', replicate " + std::to_string(r) + ": ";
  try {
    throw;
  } catch (const SamplerError& e) {
    throw SamplerError(prefix + e.what());
  } catch (const DegenerateMarginal& e) {
    throw DegenerateMarginal(prefix + e.what());
  } catch (const InputError& e) {
    throw InputError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  }
}

inline ReplicateDraw run_replicate(const ScenarioConfig& cfg, std::uint64_t r) {
  try {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, r);
    SampleEngine engine(derive_seed(rep_seed, 0));
    const auto sample = sample_joint(cfg.model, cfg.n, engine);
    const auto evals = make_evaluators(cfg.statistics, sample.x, sample.y);
    const std::uint64_t perm_seed = derive_seed(rep_seed, 1);
    ReplicateDraw out;
    if (cfg.mode == CalibrationMode::full_bootstrap) {
      const auto results =
          permutation_test_battery(std::span<const AnyStatistic>(evals), cfg.B, perm_seed, 1);
      for (const auto& t : results) {
        out.observed.push_back(t.statistic);
        out.rejected.push_back(t.p_value <= cfg.alpha ? 1 : 0);
      }
    } else {
      std::vector<std::size_t> sigma(cfg.n);
      permutation_for_draw(perm_seed, 1, sigma);
      for (const auto& e : evals) {
        out.observed.push_back(e.observed());
        out.permuted.push_back(e.permuted(sigma));
      }
    }
    return out;
  } catch (const Error&) {
    rethrow_with_replicate(cfg, r);
  }
}

}  // namespace detail

/// Rejection counts of every statistic of one scenario.
inline PowerTable run_power_study(const ScenarioConfig& cfg, unsigned jobs = 1) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<detail::ReplicateDraw> draws(cfg.N);
  parallel_for(cfg.N, std::max(1u, jobs),
               [&](std::size_t r) { draws[r] = detail::run_replicate(cfg, r); });

  const std::size_t m = cfg.statistics.size();
  std::vector<std::uint64_t> rejections(m, 0);
  if (cfg.mode == CalibrationMode::full_bootstrap) {
    for (const auto& d : draws) {
      for (std::size_t k = 0; k < m; ++k) rejections[k] += d.rejected[k];
    }
  } else {
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> pool(cfg.N);
      for (std::size_t r = 0; r < cfg.N; ++r) pool[r] = draws[r].permuted[k];
      std::sort(pool.begin(), pool.end());
      for (const auto& d : draws) {
        const auto first_ge = std::lower_bound(pool.begin(), pool.end(), d.observed[k]);
        const auto exceed = static_cast<std::uint64_t>(pool.end() - first_ge);
        if (permutation_p_value(exceed, cfg.N) <= cfg.alpha) ++rejections[k];
      }
    }
  }

  PowerTable table;
  table.name = cfg.label;
  for (std::size_t k = 0; k < m; ++k) {
    table.rows.push_back(PowerRow{cfg.label, cfg.model.to_string(), cfg.statistics[k].id(),
                                  cfg.statistics[k].label(), cfg.n, cfg.alpha, cfg.N,
                                  cfg.mode == CalibrationMode::full_bootstrap ? cfg.B : 0,
                                  cfg.mode, cfg.seed, rejections[k]});
  }
  table.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

inline PowerTable run_study(const StudyConfig& study, unsigned jobs = 1) {
  PowerTable out;
  out.name = study.name;
  for (const auto& sc : study.scenarios) {
    auto t = run_power_study(sc, jobs);
    out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
    out.runtime_seconds += t.runtime_seconds;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

enum class TableFormat { text, csv };

/// Percentage rounded half-up, computed exactly from the counts.
inline std::uint64_t rounded_percent(std::uint64_t rejections, std::uint64_t N) {
  return (200 * rejections + N) / (2 * N);
}

inline constexpr std::string_view kPowerCsvHeader =
    "scenario,model,statistic,label,n,alpha,N,B,mode,seed,rejections,rate";

/// Text: one line per scenario (config order), one column per statistic
/// (config order), rates as integer percentages. CSV: one record per
/// (scenario, statistic) with full-precision rates.
inline std::string emit_table(const PowerTable& t, TableFormat format) {
  if (t.rows.empty()) throw ConfigError("cannot emit an empty power table");
  std::ostringstream os;
  if (format == TableFormat::csv) {
    os << kPowerCsvHeader << '\n';
    for (const auto& r : t.rows) {
      os << csv::quote(r.scenario) << ',' << csv::quote(r.model) << ',' << csv::quote(r.statistic)
         << ',' << csv::quote(r.label) << ',' << r.n << ',' << csv::format_double(r.alpha) << ','
         << r.N << ',' << r.B << ',' << to_string(r.mode) << ',' << r.seed << ','
         << r.rejections << ',' << csv::format_double(r.rate()) << '\n';
    }
    return os.str();
  }

  // Group rows by scenario, keeping first-appearance order.
  std::vector<std::string> scenarios;
  for (const auto& r : t.rows) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
      scenarios.push_back(r.scenario);
    }
  }
  std::size_t label_width = 5;
  for (const auto& s : scenarios) label_width = std::max(label_width, s.size());

  std::vector<std::string> current_header;
  for (const auto& s : scenarios) {
    std::vector<const PowerRow*> rows;
    for (const auto& r : t.rows) {
      if (r.scenario == s) rows.push_back(&r);
    }
    std::vector<std::string> header;
    for (const auto* r : rows) header.push_back(r->label);
    if (header != current_header) {
      os << std::string(label_width, ' ') << "  " << "   n";
      for (const auto& h : header) os << ' ' << std::string(h.size() < 5 ? 5 - h.size() : 0, ' ') << h;
      os << '\n';
      current_header = header;
    }
    os << s << std::string(label_width - s.size(), ' ') << "  ";
    const auto n_str = std::to_string(rows.front()->n);
    os << std::string(n_str.size() < 4 ? 4 - n_str.size() : 0, ' ') << n_str;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto cell = std::to_string(rounded_percent(rows[k]->rejections, rows[k]->N));
      const std::size_t w = std::max<std::size_t>(5, header[k].size());
      os << ' ' << std::string(w > cell.size() ? w - cell.size() : 0, ' ') << cell;
    }
    os << '\n';
  }
  const auto& f = t.rows.front();
  os << "# alpha=" << csv::format_double(f.alpha) << " N=" << f.N << " B=" << f.B
     << " mode=" << to_string(f.mode) << '\n';
  return os.str();
}

/// Parses the CSV produced by emit_table.
inline PowerTable read_power_csv(std::string_view text) {
  PowerTable t;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kPowerCsvHeader) throw InputError("unexpected power table CSV header");
      continue;
    }
    const auto f = csv::split(line);
    if (f.size() != 12) throw InputError("power table CSV line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields");
    PowerRow r;
    r.scenario = f[0];
    r.model = f[1];
    r.statistic = f[2];
    r.label = f[3];
    try {
      r.n = std::stoull(f[4]);
      if (!csv::parse_double(f[5], r.alpha)) throw InputError("alpha");
      r.N = std::stoull(f[6]);
      r.B = std::stoull(f[7]);
      r.mode = parse_mode(f[8]);
      r.seed = std::stoull(f[9]);
      r.rejections = std::stoull(f[10]);
    } catch (const std::exception& e) {
      throw InputError("power table CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace dirdep
