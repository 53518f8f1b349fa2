// dirdep: permutation tests of independence for directional data.
//
//   dirdep test     (--data FILE --x-type T --y-type T | --dataset NAME) [options]
//   dirdep power    --config FILE [--out table.csv] [--text table.txt] [--jobs K]
//   dirdep datasets [--export NAME [--out FILE]]
//
// Exit status: 0 success, 1 data or statistical error, 2 usage or config error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dirdep/dirdep.hpp"

#ifndef DIRDEP_PRESET_DIR
#define DIRDEP_PRESET_DIR ""
#endif

namespace fs = std::filesystem;
using namespace dirdep;

namespace {

struct TestOptions {
  std::string data;
  std::string dataset;
  std::string x_type, y_type;
  std::string x_cols, y_cols;
  std::vector<std::string> stats;
  std::string kernel = "energy:1";
  double lambda = 1.0;
  std::string battery;
  std::uint64_t B = 999;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  bool json = false;
  bool renormalize = false;
};

struct PowerOptions {
  std::string config;
  std::string out;
  std::string text;
  unsigned jobs = 0;
};

struct DatasetOptions {
  std::string export_name;
  std::string out;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = csv::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<StatisticSpec> resolve_statistics(const TestOptions& o) {
  if (!o.battery.empty()) {
    if (!o.stats.empty()) throw ConfigError("--battery and --stat are mutually exclusive");
    if (o.battery == "circular") return circular_battery();
    if (o.battery == "kernel") return kernel_battery();
    throw ConfigError("--battery must be circular or kernel");
  }
  std::vector<StatisticSpec> out;
  const std::vector<std::string> ids = o.stats.empty() ? std::vector<std::string>{"dcor"} : o.stats;
  for (const auto& id : ids) {
    std::string full = id;
    if (id == "dcor" || id == "dcov" || id == "nk") full += ":" + o.kernel;
    if (id == "trig") full += ":" + csv::format_double(o.lambda);
    out.push_back(StatisticSpec::parse(full));
  }
  return out;
}

std::size_t width_of(ColumnType t) { return t == ColumnType::sphere ? 0 : 1; }

// Column assignment: explicit lists win; otherwise X takes the leading
// columns and Y the rest (a spherical variable absorbs all remaining columns,
// two spherical variables split the table in half).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> assign_columns(
    const DataTable& t, const TestOptions& o, ColumnType xt, ColumnType yt) {
  auto lookup = [&](const std::string& list) {
    std::vector<std::size_t> out;
    for (const auto& name : split_list(list)) out.push_back(t.column_index(name));
    return out;
  };
  const std::size_t ncol = t.header.size();
  std::vector<std::size_t> xc = lookup(o.x_cols), yc = lookup(o.y_cols);
  std::set<std::size_t> used(xc.begin(), xc.end());
  used.insert(yc.begin(), yc.end());
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < ncol; ++j) {
    if (!used.contains(j)) free.push_back(j);
  }
  auto take = [&](std::vector<std::size_t>& dst, ColumnType type, std::size_t count) {
    if (count > free.size()) {
      throw ConfigError("not enough columns in the data file for the requested variable types");
    }
    (void)type;
    dst.assign(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(count));
    free.erase(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(count));
  };
  if (xc.empty() && yc.empty()) {
    const std::size_t wx = width_of(xt), wy = width_of(yt);
    if (wx == 0 && wy == 0) {
      if (free.size() % 2 != 0) throw ConfigError("cannot split an odd number of columns between two spherical variables; use --x-cols/--y-cols");
      take(xc, xt, free.size() / 2);
      take(yc, yt, free.size());
    } else if (wx == 0) {
      take(xc, xt, free.size() - wy);
      take(yc, yt, wy);
    } else {
      take(xc, xt, wx);
      take(yc, yt, wy == 0 ? free.size() : wy);
    }
  } else if (xc.empty()) {
    take(xc, xt, width_of(xt) == 0 ? free.size() : 1);
  } else if (yc.empty()) {
    take(yc, yt, width_of(yt) == 0 ? free.size() : 1);
  }
  return {xc, yc};
}

std::string fraction(const TestResult& r) {
  return std::to_string(1 + r.exceed_count) + "/" + std::to_string(r.B + 1);
}

int cmd_test(const TestOptions& o) {
  if (o.data.empty() == o.dataset.empty()) {
    throw ConfigError("give exactly one of --data or --dataset");
  }
  std::optional<DirectionalSample> x, y;
  std::string source;
  if (!o.dataset.empty()) {
    if (!o.x_type.empty() || !o.y_type.empty() || !o.x_cols.empty() || !o.y_cols.empty()) {
      throw ConfigError("--x-type/--y-type/--x-cols/--y-cols apply to --data only");
    }
    const auto& d = find_dataset(o.dataset);
    x = angles_to_sample(d.x());
    y = angles_to_sample(d.y());
    source = std::string(d.name);
  } else {
    if (o.x_type.empty() || o.y_type.empty()) {
      throw ConfigError("--data needs --x-type and --y-type");
    }
    const ColumnType xt = parse_column_type(o.x_type), yt = parse_column_type(o.y_type);
    const auto table = read_data_table(o.data);
    const auto [xc, yc] = assign_columns(table, o, xt, yt);
    x = column_sample(table, xc, xt, o.renormalize);
    y = column_sample(table, yc, yt, o.renormalize);
    source = o.data;
  }
  const auto specs = resolve_statistics(o);
  const unsigned jobs = resolve_jobs(o.jobs);
  const auto results = test_independence(specs, *x, *y, o.B, o.seed, jobs);

  if (o.json) {
    nlohmann::json doc;
    doc["source"] = source;
    doc["n"] = x->size();
    doc["B"] = o.B;
    doc["seed"] = o.seed;
    doc["results"] = nlohmann::json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
      doc["results"].push_back({{"statistic", specs[k].id()},
                                {"label", specs[k].label()},
                                {"value", results[k].statistic},
                                {"p_value", results[k].p_value},
                                {"exceedances", results[k].exceed_count},
                                {"p_fraction", fraction(results[k])}});
    }
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  std::printf("data: %s  n=%zu  B=%llu  seed=%llu\n", source.c_str(), x->size(),
              static_cast<unsigned long long>(o.B), static_cast<unsigned long long>(o.seed));
  std::printf("%-22s %8s %16s  %s\n", "statistic", "label", "value", "p-value");
  for (std::size_t k = 0; k < results.size(); ++k) {
    std::printf("%-22s %8s %16.10g  %.4f (%s)\n", specs[k].id().c_str(), specs[k].label().c_str(),
                results[k].statistic, results[k].p_value, fraction(results[k]).c_str());
  }
  return 0;
}

std::string resolve_config_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (fs::path(path).is_relative()) {
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("DIRDEP_PRESET_DIR")) dirs.emplace_back(env);
    if (std::string(DIRDEP_PRESET_DIR).size() > 0) dirs.emplace_back(DIRDEP_PRESET_DIR);
    for (const auto& d : dirs) {
      const auto candidate = fs::path(d) / path;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  throw ConfigError("config file not found: '" + path + "'");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("error writing '" + path + "'");
}

int cmd_power(const PowerOptions& o) {
  const auto path = resolve_config_path(o.config);
  const auto study = load_study(path);
  const unsigned jobs = resolve_jobs(o.jobs);
  const auto table = run_study(study, jobs);
  const auto text = emit_table(table, TableFormat::text);
  std::cout << "# " << study.name << '\n' << text;
  if (!o.out.empty()) write_file(o.out, emit_table(table, TableFormat::csv));
  if (!o.text.empty()) write_file(o.text, "# " + study.name + '\n' + text);
  std::fprintf(stderr, "config %s: %zu scenarios, jobs=%u, runtime %.2f s\n", path.c_str(),
               study.scenarios.size(), jobs, table.runtime_seconds);
  for (const auto& sc : study.scenarios) {
    std::fprintf(stderr, "  seed %llu  %s\n", static_cast<unsigned long long>(sc.seed),
                 sc.label.c_str());
  }
  return 0;
}

std::string export_csv(const EmbeddedDataset& d) {
  std::string s = std::string(d.x_name) + "," + std::string(d.y_name) + "\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    s += csv::format_double(d.x_degrees[i]) + "," + csv::format_double(d.y_degrees[i]) + "\n";
  }
  return s;
}

int cmd_datasets(const DatasetOptions& o) {
  if (o.export_name.empty()) {
    for (const auto& d : embedded_datasets()) {
      std::printf("%-14s %2zu angle pairs (degrees)  %s\n", std::string(d.name).c_str(), d.size(),
                  std::string(d.description).c_str());
    }
    std::printf("%-14s not embedded; see 'dirdep datasets --export rock'\n", "rock");
    return 0;
  }
  const auto& d = find_dataset(o.export_name);
  const auto content = export_csv(d);
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_file(o.out, content);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permutation tests of independence for circular, spherical and linear data"};
  app.require_subcommand(1);

  TestOptions t;
  auto* test = app.add_subcommand("test", "Test independence of two variables");
  test->add_option("--data", t.data, "Delimited data file with a header row");
  test->add_option("--dataset", t.dataset, "Embedded dataset (bloodpressure, wind)");
  test->add_option("--x-type", t.x_type, "circular-deg, circular-rad, sphere or linear");
  test->add_option("--y-type", t.y_type, "circular-deg, circular-rad, sphere or linear");
  test->add_option("--x-cols", t.x_cols, "Comma-separated column names or 1-based indices");
  test->add_option("--y-cols", t.y_cols, "Comma-separated column names or 1-based indices");
  test->add_option("--stat", t.stats,
                   "dcor, dcov, ccor, trig, nk or a full id such as dcor:energy:0.5 (repeatable)");
  test->add_option("--kernel", t.kernel, "energy:<a>, ratio or log")->capture_default_str();
  test->add_option("--lambda", t.lambda, "Weight parameter of trig")->capture_default_str();
  test->add_option("--battery", t.battery, "circular (11 statistics) or kernel (9)");
  test->add_option("-B,--permutations", t.B, "Number of permutations")->capture_default_str();
  test->add_option("--seed", t.seed, "Master seed")->capture_default_str();
  test->add_option("--jobs", t.jobs, "Worker threads (default: DIRDEP_JOBS or all cores)");
  test->add_flag("--json", t.json, "Machine-readable output");
  test->add_flag("--renormalize", t.renormalize, "Rescale off-sphere rows to unit norm");

  PowerOptions p;
  auto* power = app.add_subcommand("power", "Run a Monte Carlo size/power study");
  power->add_option("--config", p.config, "Study config (JSON); also looked up in DIRDEP_PRESET_DIR")
      ->required();
  power->add_option("--out", p.out, "CSV output file");
  power->add_option("--text", p.text, "Text table output file");
  power->add_option("--jobs", p.jobs, "Worker threads (default: DIRDEP_JOBS or all cores)");

  DatasetOptions d;
  auto* datasets = app.add_subcommand("datasets", "List or export embedded datasets");
  datasets->add_option("--export", d.export_name, "Dataset to export as CSV (degrees)");
  datasets->add_option("--out", d.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (test->parsed()) return cmd_test(t);
    if (power->parsed()) return cmd_power(p);
    if (datasets->parsed()) return cmd_datasets(d);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "dirdep: error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "dirdep: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dirdep: internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
