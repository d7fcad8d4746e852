#include "ytopo/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ytopo/network.hpp"
#include "ytopo/noise.hpp"

namespace ytopo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double anr_entry_from_json(const nlohmann::json& v) {
  if (v.is_null()) return kInf;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    raise(ErrorCode::ConfigError, "anr_sweep_db entries must be numbers or \"inf\"");
  }
  return v.get<double>();
}

}  // namespace

void ExperimentConfig::validate(const std::vector<CablePreset>& extra_presets) const {
  if (node_counts.empty() || anr_sweep_db.empty() || freqs_hz.empty()) {
    raise(ErrorCode::ConfigError, "node_counts, anr_sweep_db and freqs_hz must be non-empty");
  }
  for (const int n : node_counts) {
    if (n < 1) raise(ErrorCode::ConfigError, "node counts must be >= 1");
  }
  for (const double anr : anr_sweep_db) {
    if (std::isnan(anr)) raise(ErrorCode::ConfigError, "anr_sweep_db entries must not be NaN");
  }
  if (trials_per_cell < 1) raise(ErrorCode::ConfigError, "trials_per_cell must be >= 1");
  if (!(max_branch_m > 0.0)) raise(ErrorCode::ConfigError, "max_branch_m must be > 0");
  if (!(kappa > 0.0)) raise(ErrorCode::ConfigError, "kappa must be > 0");
  load_model.validate();

  const CableParams& cable = find_cable(cable_preset, extra_presets);
  for (const double freq : freqs_hz) {
    const SecondaryParams sec = secondary_params(cable, freq);
    const double quarter = sec.wavelength_m / 4.0;
    if (max_branch_m > quarter) {
      raise(ErrorCode::ConfigError,
            "max_branch_m " + fmt_double(max_branch_m) + " exceeds lambda/4 = " +
                fmt_double(quarter) + " at " + fmt_double(freq) + " Hz");
    }
  }
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigError, std::string("experiment config JSON: ") + e.what());
  }

  ExperimentConfig config;
  try {
    config.node_counts = doc.at("node_counts").get<std::vector<int>>();
    for (const auto& v : doc.at("anr_sweep_db")) {
      config.anr_sweep_db.push_back(anr_entry_from_json(v));
    }
    config.freqs_hz = doc.at("freqs_hz").get<std::vector<double>>();
    config.max_branch_m = doc.at("max_branch_m").get<double>();
    config.trials_per_cell = doc.at("trials_per_cell").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.cable_preset = doc.at("cable_preset").get<std::string>();
    const auto& lm = doc.at("load_model");
    config.load_model.re_min = lm.at("re_range").at(0).get<double>();
    config.load_model.re_max = lm.at("re_range").at(1).get<double>();
    config.load_model.im_min = lm.at("im_range").at(0).get<double>();
    config.load_model.im_max = lm.at("im_range").at(1).get<double>();
    if (lm.contains("im_scaled_by_re")) {
      config.load_model.im_scaled_by_re = lm.at("im_scaled_by_re").get<bool>();
    }
    if (doc.contains("tree_shape")) {
      config.tree_shape = tree_shape_from_name(doc.at("tree_shape").get<std::string>());
    }
    if (doc.contains("kappa")) config.kappa = doc.at("kappa").get<double>();
    if (doc.contains("measure_runtime")) {
      config.measure_runtime = doc.at("measure_runtime").get<bool>();
    }
    if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigError, std::string("experiment config JSON: ") + e.what());
  }
  return config;
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json doc;
  doc["node_counts"] = node_counts;
  doc["anr_sweep_db"] = nlohmann::json::array();
  for (const double anr : anr_sweep_db) {
    if (std::isinf(anr)) {
      doc["anr_sweep_db"].push_back("inf");
    } else {
      doc["anr_sweep_db"].push_back(anr);
    }
  }
  doc["freqs_hz"] = freqs_hz;
  doc["max_branch_m"] = max_branch_m;
  doc["trials_per_cell"] = trials_per_cell;
  doc["seed"] = seed;
  doc["cable_preset"] = cable_preset;
  doc["load_model"] = {{"re_range", {load_model.re_min, load_model.re_max}},
                       {"im_range", {load_model.im_min, load_model.im_max}},
                       {"im_scaled_by_re", load_model.im_scaled_by_re}};
  doc["tree_shape"] = tree_shape_name(tree_shape);
  doc["kappa"] = kappa;
  doc["measure_runtime"] = measure_runtime;
  doc["threads"] = threads;
  return doc.dump(2);
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

struct TrialTask {
  int n_nodes;
  double anr_db;
  double freq_hz;
  std::uint64_t trial_seed;
};

ExperimentRow run_trial(const TrialTask& task, const ExperimentConfig& config,
                        const CableRef& cable) {
  ExperimentRow row;
  row.n_nodes = task.n_nodes;
  row.anr_db = task.anr_db;
  row.freq_hz = task.freq_hz;
  row.trial_seed = task.trial_seed;
  try {
    Rng rng(task.trial_seed);
    const Topology truth =
        generate_random_tree(task.n_nodes, config.max_branch_m, config.load_model, cable,
                             task.freq_hz, rng, config.tree_shape);
    MeasurementSet meas = all_node_admittances(truth, task.freq_hz);
    meas.anr_db = task.anr_db;
    for (auto& [id, y] : meas.entries) {
      (void)id;
      y = perturb_admittance(y, task.anr_db, rng);
    }

    std::map<int, LoadAdmittance> loads;
    for (const auto& n : truth.nodes) loads[n.id] = n.load;
    CableTable cables;
    cables.uniform = cable;
    DeriveOptions opts;
    opts.kappa = config.kappa;

    const auto t0 = std::chrono::steady_clock::now();
    const DerivationResult derived = derive_topology(meas, loads, cables, task.anr_db, opts);
    const auto t1 = std::chrono::steady_clock::now();

    const TopologyMetrics metrics = compare_topologies(truth, derived);
    row.status = derived.status == DerivationStatus::Complete ? RowStatus::Complete
                                                              : RowStatus::Interrupted;
    row.exact_match = metrics.exact_match;
    row.branch_recall = metrics.branch_recall;
    row.branch_precision = metrics.branch_precision;
    row.max_length_error_m = metrics.max_length_error_m;
    if (config.measure_runtime) {
      row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  } catch (const Error&) {
    row.status = RowStatus::Error;
  }
  return row;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config,
                                          const std::vector<CablePreset>& extra_presets) {
  config.validate(extra_presets);
  const CableRef cable{config.cable_preset, find_cable(config.cable_preset, extra_presets)};

  std::vector<TrialTask> tasks;
  std::uint64_t cell_index = 0;
  for (const int n : config.node_counts) {
    for (const double anr : config.anr_sweep_db) {
      for (const double freq : config.freqs_hz) {
        for (int trial = 0; trial < config.trials_per_cell; ++trial) {
          tasks.push_back({n, anr, freq,
                           stream_seed(config.seed, cell_index,
                                       static_cast<std::uint64_t>(trial))});
        }
        ++cell_index;
      }
    }
  }

  std::vector<ExperimentRow> rows(tasks.size());
  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, tasks.size() == 0 ? 1 : tasks.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      rows[i] = run_trial(tasks[i], config, cable);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

namespace {

const char* status_name(RowStatus status) {
  switch (status) {
    case RowStatus::Complete: return "complete";
    case RowStatus::Interrupted: return "interrupted";
    case RowStatus::Error: return "error";
  }
  return "error";
}

RowStatus status_from_name(const std::string& name) {
  if (name == "complete") return RowStatus::Complete;
  if (name == "interrupted") return RowStatus::Interrupted;
  if (name == "error") return RowStatus::Error;
  raise(ErrorCode::IoError, "unknown status '" + name + "'");
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "n_nodes,anr_db,freq_hz,trial_seed,status,exact_match,branch_recall,"
         "branch_precision,max_length_error_m,runtime_ms\n";
  for (const auto& row : rows) {
    out << row.n_nodes << ',' << fmt_double(row.anr_db) << ',' << fmt_double(row.freq_hz) << ','
        << row.trial_seed << ',' << status_name(row.status) << ',' << (row.exact_match ? 1 : 0)
        << ',' << fmt_double(row.branch_recall) << ',' << fmt_double(row.branch_precision) << ','
        << fmt_double(row.max_length_error_m) << ',' << fmt_double(row.runtime_ms) << '\n';
  }
}

std::vector<ExperimentRow> read_results_csv(std::istream& in) {
  std::vector<ExperimentRow> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!have_header) {
      if (line.rfind("n_nodes", 0) != 0) {
        raise(ErrorCode::IoError, "results CSV must start with the n_nodes header");
      }
      have_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10) raise(ErrorCode::IoError, "results CSV rows need 10 fields");
    ExperimentRow row;
    row.n_nodes = std::stoi(fields[0]);
    row.anr_db = std::stod(fields[1]);
    row.freq_hz = std::stod(fields[2]);
    row.trial_seed = std::stoull(fields[3]);
    row.status = status_from_name(fields[4]);
    row.exact_match = fields[5] == "1";
    row.branch_recall = std::stod(fields[6]);
    row.branch_precision = std::stod(fields[7]);
    row.max_length_error_m = std::stod(fields[8]);
    row.runtime_ms = std::stod(fields[9]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<ExperimentRow>& rows) {
  std::vector<CellSummary> cells;
  const auto find_cell = [&](const ExperimentRow& row) -> CellSummary& {
    for (auto& cell : cells) {
      const bool same_anr =
          cell.anr_db == row.anr_db || (std::isinf(cell.anr_db) && std::isinf(row.anr_db));
      if (cell.n_nodes == row.n_nodes && same_anr && cell.freq_hz == row.freq_hz) return cell;
    }
    cells.push_back({row.n_nodes, row.anr_db, row.freq_hz});
    return cells.back();
  };

  for (const auto& row : rows) {
    CellSummary& cell = find_cell(row);
    ++cell.trials;
    if (row.status == RowStatus::Complete) ++cell.completed;
    if (row.status == RowStatus::Interrupted) {
      ++cell.interrupted;
      cell.mean_recall_interrupted += row.branch_recall;
    }
    if (row.status == RowStatus::Error) ++cell.errors;
    cell.exact_rate += row.exact_match ? 1.0 : 0.0;
    cell.mean_recall += row.branch_recall;
    cell.mean_precision += row.branch_precision;
  }
  for (auto& cell : cells) {
    cell.exact_rate /= cell.trials;
    cell.mean_recall /= cell.trials;
    cell.mean_precision /= cell.trials;
    if (cell.interrupted > 0) cell.mean_recall_interrupted /= cell.interrupted;
  }
  return cells;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "n_nodes,anr_db,freq_hz,trials,completed,interrupted,errors,exact_rate,"
         "mean_recall,mean_precision,mean_recall_interrupted\n";
  for (const auto& cell : cells) {
    out << cell.n_nodes << ',' << fmt_double(cell.anr_db) << ',' << fmt_double(cell.freq_hz)
        << ',' << cell.trials << ',' << cell.completed << ',' << cell.interrupted << ','
        << cell.errors << ',' << fmt_double(cell.exact_rate) << ','
        << fmt_double(cell.mean_recall) << ',' << fmt_double(cell.mean_precision) << ','
        << fmt_double(cell.mean_recall_interrupted) << '\n';
  }
}

std::uint64_t calibration_seed(std::uint64_t master) {
  return splitmix64(master ^ 0xca11b7a7edULL);
}

std::vector<KappaSweepPoint> sweep_kappa(const ExperimentConfig& base,
                                         const std::vector<double>& kappas,
                                         const std::vector<CablePreset>& extra_presets) {
  if (kappas.empty()) raise(ErrorCode::ConfigError, "empty kappa grid");
  std::vector<KappaSweepPoint> sweep;
  for (const double kappa : kappas) {
    ExperimentConfig config = base;
    config.kappa = kappa;
    config.seed = calibration_seed(base.seed);
    config.measure_runtime = false;
    const auto rows = run_experiment(config, extra_presets);
    double exact = 0.0;
    for (const auto& row : rows) exact += row.exact_match ? 1.0 : 0.0;
    sweep.push_back({kappa, rows.empty() ? 0.0 : exact / rows.size()});
  }
  return sweep;
}

double recommend_kappa(const std::vector<KappaSweepPoint>& sweep) {
  if (sweep.empty()) raise(ErrorCode::ConfigError, "empty kappa sweep");
  double best_rate = 0.0;
  for (const auto& point : sweep) best_rate = std::max(best_rate, point.exact_rate);

  // middle of the plateau of near-best rates (robust against both cliffs)
  double lo = 0.0, hi = 0.0;
  bool have = false;
  for (const auto& point : sweep) {
    if (point.exact_rate >= best_rate - 0.01) {
      if (!have) lo = point.kappa;
      hi = point.kappa;
      have = true;
    }
  }
  const double target = std::sqrt(lo * hi);
  double best_kappa = sweep.front().kappa;
  double best_dist = kInf;
  for (const auto& point : sweep) {
    if (point.exact_rate < best_rate - 0.01) continue;
    const double dist = std::abs(std::log(point.kappa / target));
    if (dist < best_dist) {
      best_dist = dist;
      best_kappa = point.kappa;
    }
  }
  return best_kappa;
}

}  // namespace ytopo
