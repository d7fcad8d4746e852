#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ytopo/experiment.hpp"
#include "ytopo/network.hpp"
#include "ytopo/noise.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_anr(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return kInf;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    ytopo::raise(ytopo::ErrorCode::ConfigError, "bad ANR value '" + text + "'");
  }
}

std::vector<ytopo::CablePreset> extra_presets(const std::string& cables_file) {
  if (cables_file.empty()) return {};
  return ytopo::load_cable_presets_file(cables_file);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) ytopo::raise(ytopo::ErrorCode::IoError, "cannot write '" + path + "'");
  out << text;
}

struct GenerateArgs {
  int nodes = 10;
  double max_branch_m = 1400.0;
  double freq_hz = 10e3;
  std::uint64_t seed = 1;
  std::string cable = "lv-underground";
  std::string cables_file;
  std::string output = "-";
  std::string shape = "uniform-attachment";
  ytopo::LoadModel load_model;
};

int run_generate(const GenerateArgs& args) {
  const auto extra = extra_presets(args.cables_file);
  const ytopo::CableRef cable{args.cable, ytopo::find_cable(args.cable, extra)};

  const auto sec = ytopo::secondary_params(cable.params, args.freq_hz);
  if (args.nodes > 1 && args.max_branch_m > sec.wavelength_m / 4.0) {
    ytopo::raise(ytopo::ErrorCode::ConfigError,
                 "max branch exceeds lambda/4 at the given frequency");
  }

  ytopo::Rng rng(args.seed);
  const auto topo =
      ytopo::generate_random_tree(args.nodes, args.max_branch_m, args.load_model, cable,
                                  args.freq_hz, rng, ytopo::tree_shape_from_name(args.shape));
  write_text(args.output, ytopo::topology_to_json(topo) + "\n");
  return 0;
}

struct SimulateArgs {
  std::string topology_file;
  double freq_hz = 10e3;
  std::string anr_db = "inf";
  std::uint64_t seed = 1;
  int average = 1;
  std::string cables_file;
  std::string output = "-";
};

int run_simulate(const SimulateArgs& args) {
  const auto topo = ytopo::load_topology_file(args.topology_file, extra_presets(args.cables_file));
  auto meas = ytopo::all_node_admittances(topo, args.freq_hz);

  const double anr_db = parse_anr(args.anr_db);
  if (args.average < 1) ytopo::raise(ytopo::ErrorCode::ConfigError, "--average must be >= 1");
  if (!std::isinf(anr_db)) {
    ytopo::Rng rng(args.seed);
    for (auto& [id, y] : meas.entries) {
      (void)id;
      ytopo::Complex sum{0.0, 0.0};
      for (int i = 0; i < args.average; ++i) sum += ytopo::perturb_admittance(y, anr_db, rng);
      y = sum / static_cast<double>(args.average);
    }
    // averaging n draws raises the recorded noise ratio accordingly
    meas.anr_db = anr_db + 10.0 * std::log10(static_cast<double>(args.average));
  }

  std::ostringstream csv;
  ytopo::write_measurements_csv(csv, meas);
  write_text(args.output, csv.str());
  return 0;
}

struct DeriveArgs {
  std::string measurements_file;
  std::string loads_file;
  std::string cable = "lv-underground";
  std::string cables_file;
  std::string anr_db;  // empty: use the CSV value
  double kappa = ytopo::kDefaultKappa;
  double threshold_m = 0.0;  // 0: derived from ANR
  std::string output = "-";
  std::string diagnostics_file;
};

int run_derive(const DeriveArgs& args) {
  const auto extra = extra_presets(args.cables_file);
  const auto meas = ytopo::load_measurements_file(args.measurements_file);
  const auto loads_topo = ytopo::load_topology_file(args.loads_file, extra);

  std::map<int, ytopo::LoadAdmittance> loads;
  for (const auto& n : loads_topo.nodes) loads[n.id] = n.load;

  ytopo::CableTable cables;
  cables.uniform = {args.cable, ytopo::find_cable(args.cable, extra)};

  ytopo::DeriveOptions opts;
  opts.kappa = args.kappa;
  if (args.threshold_m > 0.0) opts.threshold_m = args.threshold_m;
  const double anr_db = args.anr_db.empty() ? meas.anr_db : parse_anr(args.anr_db);

  const auto result = ytopo::derive_topology(meas, loads, cables, anr_db, opts);

  write_text(args.output, ytopo::topology_to_json(result.topology) + "\n");
  if (!args.diagnostics_file.empty()) {
    std::ofstream diag(args.diagnostics_file);
    if (!diag) ytopo::raise(ytopo::ErrorCode::IoError, "cannot write diagnostics file");
    ytopo::write_diagnostics_csv(diag, result.diagnostics);
  }

  const bool complete = result.status == ytopo::DerivationStatus::Complete;
  std::cerr << "derivation " << (complete ? "complete" : "interrupted") << ": "
            << result.topology.branches.size() << " branches in " << result.rounds
            << " rounds (threshold " << result.threshold_m << " m)\n";
  return complete ? 0 : 2;
}

struct ExperimentArgs {
  std::string config_file;
  std::string output;
  std::string summary_file;
  std::string band;
  std::string bands_file;
  int threads = -1;
};

void print_band_hints(const ytopo::ExperimentConfig& config, const std::string& band_name,
                      const std::string& bands_file) {
  std::vector<ytopo::AnrBand> extra;
  if (!bands_file.empty()) {
    std::ifstream in(bands_file);
    if (!in) ytopo::raise(ytopo::ErrorCode::IoError, "cannot open '" + bands_file + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    extra = ytopo::parse_anr_bands_json(buf.str());
  }
  const ytopo::AnrBand& band = ytopo::find_anr_band(band_name, extra);
  if (config.max_branch_m > band.max_cable_length_m) {
    std::cerr << "hint: max_branch_m " << config.max_branch_m << " m exceeds the " << band.name
              << " band's typical maximum of " << band.max_cable_length_m << " m\n";
  }
  for (const double freq : config.freqs_hz) {
    if (freq < band.freq_min_hz || freq > band.freq_max_hz) {
      std::cerr << "hint: " << freq << " Hz lies outside the " << band.name << " band\n";
    }
  }
  for (const double anr : config.anr_sweep_db) {
    if (std::isinf(anr)) continue;
    if (anr < band.anr_db_min || anr > band.anr_db_max) {
      std::cerr << "hint: ANR " << anr << " dB is outside the " << band.name
                << " band's typical range\n";
    }
  }
}

int run_experiment_cmd(const ExperimentArgs& args) {
  auto config = ytopo::ExperimentConfig::load_file(args.config_file);
  if (args.threads >= 0) config.threads = args.threads;
  if (!args.band.empty()) print_band_hints(config, args.band, args.bands_file);

  const auto rows = ytopo::run_experiment(config);
  std::ofstream out(args.output);
  if (!out) ytopo::raise(ytopo::ErrorCode::IoError, "cannot write '" + args.output + "'");
  ytopo::write_results_csv(out, rows);

  const auto cells = ytopo::summarize(rows);
  if (!args.summary_file.empty()) {
    std::ofstream sum(args.summary_file);
    if (!sum) ytopo::raise(ytopo::ErrorCode::IoError, "cannot write summary file");
    ytopo::write_summary_csv(sum, cells);
  }
  std::ostringstream table;
  ytopo::write_summary_csv(table, cells);
  std::cerr << table.str();
  return 0;
}

struct CalibrateArgs {
  std::string config_file;
  double kappa_min = 0.5;
  double kappa_max = 64.0;
  int steps = 8;
  int trials = 0;  // 0: keep config value
  std::string output;
};

int run_calibrate(const CalibrateArgs& args) {
  auto config = ytopo::ExperimentConfig::load_file(args.config_file);
  if (args.trials > 0) config.trials_per_cell = args.trials;
  if (!(args.kappa_min > 0.0) || args.kappa_max < args.kappa_min || args.steps < 2) {
    ytopo::raise(ytopo::ErrorCode::ConfigError, "bad kappa grid");
  }

  std::vector<double> kappas;
  for (int i = 0; i < args.steps; ++i) {
    const double t = static_cast<double>(i) / (args.steps - 1);
    kappas.push_back(args.kappa_min * std::pow(args.kappa_max / args.kappa_min, t));
  }

  const auto sweep = ytopo::sweep_kappa(config, kappas);
  std::ostringstream csv;
  csv << "kappa,exact_rate\n";
  for (const auto& point : sweep) {
    csv << point.kappa << ',' << point.exact_rate << '\n';
    std::cerr << "kappa " << point.kappa << ": exact rate " << point.exact_rate << "\n";
  }
  if (!args.output.empty()) write_text(args.output, csv.str());

  std::cout << "recommended kappa: " << ytopo::recommend_kappa(sweep) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wired-network admittance simulator and topology derivation toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random tree topology JSON");
  generate->add_option("--nodes", gen.nodes, "node count")->check(CLI::PositiveNumber);
  generate->add_option("--max-branch", gen.max_branch_m, "max branch length, m");
  generate->add_option("--freq", gen.freq_hz, "frequency for the lambda/4 check, Hz");
  generate->add_option("--seed", gen.seed, "random seed");
  generate->add_option("--cable", gen.cable, "cable preset name");
  generate->add_option("--cables-file", gen.cables_file, "extra cable presets JSON");
  generate->add_option("--shape", gen.shape, "uniform-attachment, path or star");
  generate->add_option("--load-re-min", gen.load_model.re_min, "min Re(Y_L), S");
  generate->add_option("--load-re-max", gen.load_model.re_max, "max Re(Y_L), S");
  generate->add_option("-o,--output", gen.output, "output file, '-' for stdout");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Topology JSON to measurement CSV");
  simulate->add_option("topology", sim.topology_file, "topology JSON")->required();
  simulate->add_option("--freq", sim.freq_hz, "measurement frequency, Hz");
  simulate->add_option("--anr-db", sim.anr_db, "ANR in dB, or 'inf'");
  simulate->add_option("--seed", sim.seed, "noise seed");
  simulate->add_option("--average", sim.average, "average this many draws per node");
  simulate->add_option("--cables-file", sim.cables_file, "extra cable presets JSON");
  simulate->add_option("-o,--output", sim.output, "output file, '-' for stdout");

  DeriveArgs der;
  auto* derive = app.add_subcommand("derive", "Measurement CSV to derived topology JSON");
  derive->add_option("measurements", der.measurements_file, "measurement CSV")->required();
  derive->add_option("--loads", der.loads_file, "topology JSON supplying the node loads")
      ->required();
  derive->add_option("--cable", der.cable, "cable preset name");
  derive->add_option("--cables-file", der.cables_file, "extra cable presets JSON");
  derive->add_option("--anr-db", der.anr_db, "override the CSV ANR (dB or 'inf')");
  derive->add_option("--kappa", der.kappa, "threshold scale");
  derive->add_option("--threshold", der.threshold_m, "explicit |Im(d)| threshold, m");
  derive->add_option("-o,--output", der.output, "derived topology JSON");
  derive->add_option("--diagnostics", der.diagnostics_file, "pairwise diagnostics CSV");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo campaign");
  experiment->add_option("--config", exp.config_file, "experiment config JSON")->required();
  experiment->add_option("-o,--output", exp.output, "results CSV")->required();
  experiment->add_option("--summary", exp.summary_file, "per-cell summary CSV");
  experiment->add_option("--band", exp.band, "print hints against a PLC band (cenelec, fcc, broadband)");
  experiment->add_option("--bands-file", exp.bands_file, "extra band table JSON");
  experiment->add_option("--threads", exp.threads, "worker threads (0: hardware)");

  CalibrateArgs cal;
  auto* calibrate =
      app.add_subcommand("calibrate-threshold", "Sweep kappa and report the best value");
  calibrate->add_option("--config", cal.config_file, "experiment config JSON")->required();
  calibrate->add_option("--kappa-min", cal.kappa_min, "grid start");
  calibrate->add_option("--kappa-max", cal.kappa_max, "grid end");
  calibrate->add_option("--steps", cal.steps, "grid points (log spaced)");
  calibrate->add_option("--trials", cal.trials, "trials per cell override");
  calibrate->add_option("-o,--output", cal.output, "sweep CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (simulate->parsed()) return run_simulate(sim);
    if (derive->parsed()) return run_derive(der);
    if (experiment->parsed()) return run_experiment_cmd(exp);
    if (calibrate->parsed()) return run_calibrate(cal);
  } catch (const ytopo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
