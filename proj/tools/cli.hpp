#pragma once

// Command-line front end. run() takes the argument list without the program
// name and writes data to `out`, diagnostics to `err`.
// Exit codes: 0 success, 2 bad arguments or input, 1 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "filament/filament.hpp"

namespace filament::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string fixed(double value, int decimals) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << value;
  return s.str();
}

inline std::string shortest(double value) {
  std::ostringstream s;
  s << std::setprecision(15) << value;
  return s.str();
}

inline Regime parse_regime(const std::string& name) {
  if (name == "fixed-m") return Regime::fixed_rows;
  if (name == "growing-m") return Regime::growing_rows;
  throw argument_error("unknown regime '" + name + "' (expected fixed-m or growing-m)");
}

struct RhoArgs {
  std::size_t m = 0;
  std::size_t drift = 1;
  double p = 0.0;
  std::string method = "exact";
  double tol = 1e-10;
  std::size_t trials = 200;
  std::size_t ncols = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

inline void run_rho(const RhoArgs& a, std::ostream& out) {
  RhoValue value;
  if (a.method == "exact") {
    value = exact_rho(a.m, a.drift, a.p, a.tol);
  } else {
    if (!a.seed) throw argument_error("rho --method mc requires --seed");
    value = estimate_rho_mc(a.m, a.drift, a.p, a.ncols, a.trials, *a.seed, a.threads);
  }
  out << a.m << ',' << a.drift << ',' << shortest(a.p) << ',' << fixed(value.rho, 4) << ',' << to_string(value.method)
      << '\n';
}

struct TableArgs {
  std::string mode;
  std::size_t m = 10;
  std::size_t drift = 1;
  std::optional<double> rho;
  double alpha = 1.0;
  double epsilon = 1e-4;
  double delta2 = 1e-4;
  double x_star = normal_quantile(0.9);
};

inline void write_table(const MuTable& table, std::ostream& out) {
  out << 'n';
  for (const auto& label : table.column_labels) out << ',' << label;
  out << '\n';
  for (std::size_t r = 0; r < table.widths.size(); ++r) {
    out << static_cast<unsigned long long>(table.widths[r]);
    for (double cell : table.cells[r]) out << ',' << fixed(cell, table.decimals);
    out << '\n';
  }
}

inline void run_mu_table(const TableArgs& a, std::ostream& out) {
  auto rho = [&] {
    if (a.rho) {
      if (!(*a.rho > 0.0 && *a.rho < 1.0)) throw argument_error("--rho must lie in (0, 1)");
      return *a.rho;
    }
    return exact_rho(a.m, a.drift, normal_sf(a.x_star)).rho;
  };
  const auto m = static_cast<double>(a.m);
  if (a.mode == "power") {
    write_table(power_law_table(rho(), a.alpha, a.epsilon, a.x_star), out);
  } else if (a.mode == "sqrt") {
    write_table(sqrt_length_table(rho(), a.epsilon, a.x_star), out);
  } else if (a.mode == "sqrt-scan") {
    write_table(sqrt_scan_table(m, a.delta2, a.x_star), out);
  } else if (a.mode == "log") {
    write_table(log_length_table(m, a.delta2, a.x_star), out);
  } else {
    throw argument_error("unknown mode '" + a.mode + "' (expected power, sqrt, sqrt-scan or log)");
  }
}

struct DetectArgs {
  std::string input;
  std::size_t drift = 1;
  double x_star = normal_quantile(0.9);
  double epsilon = 1e-4;
  double delta2 = 1e-4;
  std::string regime = "fixed-m";
  std::optional<double> rho;
  std::optional<double> phi;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
  std::size_t phi_trials = 100;
};

inline json chain_json(const std::optional<ChainPath>& chain) {
  if (!chain) return nullptr;
  return {{"start_col", chain->start_col}, {"rows", chain->rows}};
}

inline json finite_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

inline DetectorConfig make_config(std::size_t drift, double x_star, double epsilon, double delta2) {
  DetectorConfig config;
  config.drift = drift;
  config.x_star = x_star;
  config.epsilon = epsilon;
  config.delta2 = delta2;
  return config;
}

inline void run_detect(const DetectArgs& a, std::ostream& out) {
  const auto grid = load_grid(a.input);
  auto config = make_config(a.drift, a.x_star, a.epsilon, a.delta2);
  config.regime = parse_regime(a.regime);
  config.scan_cap = a.cap;
  validate(config);
  if (a.rho) config.rho = RhoValue{*a.rho, grid.rows(), a.drift, config.p(), RhoMethod::supplied};
  if (config.regime == Regime::growing_rows) {
    if (a.phi) {
      config.phi = *a.phi;
    } else {
      if (!a.seed) throw argument_error("detect --regime growing-m needs --phi or --seed to estimate phi");
      config.phi = estimate_phi(config.p(), a.drift, {{grid.rows(), grid.cols()}}, a.phi_trials, *a.seed);
    }
  } else if (a.phi) {
    throw argument_error("--phi applies only to --regime growing-m");
  }
  config = resolve(config, grid.rows());
  const auto result = detect(grid, config);

  json doc;
  doc["reject"] = result.reject_null;
  doc["stage"] = to_string(result.stage);
  doc["l0"] = result.l0_length;
  doc["xs"] = finite_or_null(result.x_star_s);
  doc["scan_evaluated"] = result.x_star_s.has_value();
  doc["thresholds"] = {{"step1", result.thresholds.step1}, {"step2", result.thresholds.step2},
                       {"x_star", result.thresholds.x_star}, {"epsilon", result.thresholds.epsilon},
                       {"delta2", result.thresholds.delta2}, {"scan_cap", result.scan_cap}};
  doc["regime"] = to_string(config.regime);
  if (config.rho) {
    doc["rho"] = {{"value", config.rho->rho}, {"method", to_string(config.rho->method)}};
  } else {
    doc["rho"] = nullptr;
  }
  doc["phi"] = config.phi ? json(*config.phi) : json(nullptr);
  doc["witness"] = chain_json(result.witness);
  out << doc.dump() << '\n';
}

struct FramesArgs {
  std::string dir;
  double l0_alarm = 0.0;
  double scan_alarm = 0.0;
  std::size_t drift = 1;
  double x_star = normal_quantile(0.9);
  std::optional<double> rho;
  std::optional<std::size_t> cap;
  unsigned threads = 0;
};

/// Frame files (.csv or .pgm) in name order.
inline std::vector<fs::path> frame_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw input_error("cannot open directory '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".pgm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

inline std::string scan_field(double xs) { return std::isfinite(xs) ? fixed(xs, 6) : "-inf"; }

inline void run_frames(const FramesArgs& a, std::ostream& out) {
  std::vector<ImageGrid> frames;
  for (const auto& file : frame_files(a.dir)) frames.push_back(load_grid(file));
  auto config = make_config(a.drift, a.x_star, 1e-4, 1e-4);
  config.scan_cap = a.cap;
  if (a.rho && !frames.empty()) {
    config.rho = RhoValue{*a.rho, frames.front().rows(), a.drift, config.p(), RhoMethod::supplied};
  }
  const auto stats = detect_frames(frames, config, a.l0_alarm, a.scan_alarm, a.threads);
  out << "frame,l0,xs,alarm\n";
  for (const auto& s : stats) out << s.index << ',' << s.l0_length << ',' << scan_field(s.x_star_s) << ',' << s.alarm << '\n';
}

/// Reads an experiment description. Keys mirror ExperimentSpec; "seed" is required.
inline ExperimentSpec parse_experiment(const json& doc, std::vector<std::string>& kinds) {
  static const std::vector<std::string> known{"m",     "n",    "C",     "x_star", "epsilon", "delta2",
                                              "length_law", "mu", "trials", "seed", "fixed_chain", "rho",
                                              "phi",   "regime", "U",   "kinds"};
  if (!doc.is_object()) throw argument_error("simulate: spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw argument_error("simulate: unknown spec field '" + key + "'");
    }
  }
  if (!doc.contains("seed")) throw argument_error("simulate: spec must set \"seed\"");
  for (const char* key : {"m", "n", "trials"}) {
    if (!doc.contains(key)) throw argument_error(std::string("simulate: spec must set \"") + key + "\"");
  }
  ExperimentSpec spec;
  spec.m = doc.at("m").get<std::size_t>();
  spec.n = doc.at("n").get<std::size_t>();
  spec.trials = doc.at("trials").get<std::size_t>();
  spec.seed = doc.at("seed").get<std::uint64_t>();
  spec.detector = make_config(doc.value("C", std::size_t{1}), doc.value("x_star", normal_quantile(0.9)),
                              doc.value("epsilon", 1e-4), doc.value("delta2", 1e-4));
  spec.detector.regime = parse_regime(doc.value("regime", std::string("fixed-m")));
  if (doc.contains("phi")) spec.detector.phi = doc.at("phi").get<double>();
  if (doc.contains("U")) spec.detector.scan_cap = doc.at("U").get<std::size_t>();
  if (doc.contains("rho")) {
    spec.detector.rho = RhoValue{doc.at("rho").get<double>(), spec.m, spec.detector.drift, spec.detector.p(),
                                 RhoMethod::supplied};
  }
  spec.mu = doc.value("mu", 0.0);
  spec.fixed_chain = doc.value("fixed_chain", false);
  if (doc.contains("length_law")) {
    const auto& law = doc.at("length_law");
    if (!law.is_object() || !law.contains("kind") || !law.contains("value")) {
      throw argument_error("simulate: length_law must be {\"kind\": ..., \"value\": ...}");
    }
    spec.length_law = parse_length_law(law.at("kind").get<std::string>());
    spec.length_value = law.at("value").get<double>();
  }
  kinds = doc.value("kinds", std::vector<std::string>{"type1", "power"});
  for (const auto& k : kinds) {
    if (k != "type1" && k != "power" && k != "type2") throw argument_error("simulate: unknown kind '" + k + "'");
  }
  return spec;
}

struct SimulateArgs {
  std::string spec_path;
  std::optional<std::string> out_path;
  unsigned threads = 0;
};

inline void run_simulate(const SimulateArgs& a, std::ostream& out) {
  std::ifstream in(a.spec_path);
  if (!in) throw input_error("cannot open '" + a.spec_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw input_error(a.spec_path + ": " + e.what());
  }
  std::vector<std::string> kinds;
  ExperimentSpec spec;
  try {
    spec = parse_experiment(doc, kinds);
  } catch (const json::exception& e) {
    throw argument_error(a.spec_path + ": " + e.what());
  }

  std::ostringstream csv;
  csv << "kind,rate,stderr,trials,m,n,C,x_star,length_law,length_value,mu,seed\n";
  auto row = [&](const ErrorEstimate& e) {
    csv << to_string(e.kind) << ',' << fixed(e.rate, 6) << ',' << fixed(e.std_error, 6) << ',' << e.trials << ','
        << spec.m << ',' << spec.n << ',' << spec.detector.drift << ',' << shortest(spec.detector.x_star) << ','
        << to_string(spec.length_law) << ',' << shortest(spec.length_value) << ',' << shortest(spec.mu) << ','
        << spec.seed << '\n';
  };
  std::optional<ErrorEstimate> power;
  for (const auto& kind : kinds) {
    if (kind == "type1") {
      row(estimate_type1(spec, a.threads));
    } else {
      if (!power) power = estimate_power(spec, a.threads);
      row(kind == "power" ? *power : type2_from_power(*power));
    }
  }
  if (a.out_path) {
    std::ofstream file(*a.out_path);
    if (!file) throw input_error("cannot open '" + *a.out_path + "' for writing");
    file << csv.str();
  } else {
    out << csv.str();
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chain detection in noisy rasters", "filament"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto positive = CLI::PositiveNumber;
  auto probability = CLI::Range(0.0, 1.0);

  RhoArgs rho;
  auto* rho_cmd = app.add_subcommand("rho", "Run-rate constant for an m-row Bernoulli net");
  rho_cmd->add_option("--m", rho.m, "Rows")->required()->check(positive);
  rho_cmd->add_option("--C", rho.drift, "Drift bound")->check(positive);
  rho_cmd->add_option("--p", rho.p, "Significance probability")->required()->check(probability);
  rho_cmd->add_option("--method", rho.method, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  rho_cmd->add_option("--tol", rho.tol, "Power-iteration tolerance")->check(positive);
  rho_cmd->add_option("--trials", rho.trials, "Monte Carlo trials")->check(positive);
  rho_cmd->add_option("--ncols", rho.ncols, "Monte Carlo raster width")->check(CLI::Range(1000ULL, 1ULL << 40));
  rho_cmd->add_option("--seed", rho.seed, "Monte Carlo seed");
  rho_cmd->add_option("--threads", rho.threads, "Worker threads (0 = all cores)");

  TableArgs table;
  auto* table_cmd = app.add_subcommand("mu-table", "Minimum detectable mean tables");
  table_cmd->add_option("--mode", table.mode, "power, sqrt, sqrt-scan or log")
      ->required()
      ->check(CLI::IsMember({"power", "sqrt", "sqrt-scan", "log"}));
  table_cmd->add_option("--m", table.m, "Rows")->check(positive);
  table_cmd->add_option("--C", table.drift, "Drift bound")->check(positive);
  table_cmd->add_option("--rho", table.rho, "Run-rate constant (default: exact value for m, C, x*)");
  table_cmd->add_option("--alpha", table.alpha, "Length exponent for --mode power")->check(CLI::Range(0.0, 1.0));
  table_cmd->add_option("--epsilon", table.epsilon, "Step I slack")->check(positive);
  table_cmd->add_option("--delta2", table.delta2, "Step II slack")->check(positive);
  table_cmd->add_option("--xstar", table.x_star, "Significance threshold");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Two-step test on one raster (CSV or PGM)");
  detect_cmd->add_option("--input", det.input, "Raster file")->required();
  detect_cmd->add_option("--C", det.drift, "Drift bound")->check(positive);
  detect_cmd->add_option("--xstar", det.x_star, "Significance threshold");
  detect_cmd->add_option("--epsilon", det.epsilon, "Step I slack")->check(positive);
  detect_cmd->add_option("--delta2", det.delta2, "Step II slack")->check(positive);
  detect_cmd->add_option("--regime", det.regime, "fixed-m or growing-m")->check(CLI::IsMember({"fixed-m", "growing-m"}));
  detect_cmd->add_option("--rho", det.rho, "Run-rate constant (required when m > 20 in fixed-m)");
  detect_cmd->add_option("--phi", det.phi, "Growing-m rate constant")->check(positive);
  detect_cmd->add_option("--seed", det.seed, "Seed for estimating phi");
  detect_cmd->add_option("--phi-trials", det.phi_trials, "Trials for estimating phi")->check(positive);
  detect_cmd->add_option("--U", det.cap, "Scan length cap")->check(positive);

  FramesArgs frames;
  auto* frames_cmd = app.add_subcommand("frames", "Per-frame statistics and alarms for a directory of rasters");
  frames_cmd->add_option("--dir", frames.dir, "Directory of .csv/.pgm frames")->required();
  frames_cmd->add_option("--l0-alarm", frames.l0_alarm, "Alarm when l0 exceeds this")->required();
  frames_cmd->add_option("--scan-alarm", frames.scan_alarm, "Alarm when X*_s exceeds this")->required();
  frames_cmd->add_option("--C", frames.drift, "Drift bound")->check(positive);
  frames_cmd->add_option("--xstar", frames.x_star, "Significance threshold");
  frames_cmd->add_option("--rho", frames.rho, "Run-rate constant for the scan cap");
  frames_cmd->add_option("--U", frames.cap, "Scan length cap")->check(positive);
  frames_cmd->add_option("--threads", frames.threads, "Worker threads (0 = all cores)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo error rates from a JSON experiment spec");
  sim_cmd->add_option("--spec", sim.spec_path, "Experiment spec (JSON)")->required();
  sim_cmd->add_option("--out", sim.out_path, "Output CSV (default stdout)");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv{"filament"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*rho_cmd) run_rho(rho, out);
    if (*table_cmd) run_mu_table(table, out);
    if (*detect_cmd) run_detect(det, out);
    if (*frames_cmd) run_frames(frames, out);
    if (*sim_cmd) run_simulate(sim, out);
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace filament::cli
