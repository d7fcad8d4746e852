#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ytopo/random_tree.hpp"

namespace ytopo {

/// One Monte Carlo campaign: the cartesian product of node counts, ANR
/// levels and frequencies, trials_per_cell trials each.
struct ExperimentConfig {
  std::vector<int> node_counts;
  std::vector<double> anr_sweep_db;  // +inf entries mean noiseless
  std::vector<double> freqs_hz;
  double max_branch_m = 1400.0;
  int trials_per_cell = 200;
  std::uint64_t seed = 1;
  std::string cable_preset = "lv-underground";
  LoadModel load_model;
  TreeShape tree_shape = TreeShape::UniformAttachment;
  double kappa = kDefaultKappa;
  bool measure_runtime = true;  // off: runtime_ms = 0 for byte-identical reruns
  int threads = 0;              // 0: hardware concurrency

  /// Rejects any cell whose max branch length exceeds lambda/4 (run before
  /// any computation).
  void validate(const std::vector<CablePreset>& extra_presets = {}) const;

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
  static ExperimentConfig load_file(const std::string& path);
};

enum class RowStatus { Complete, Interrupted, Error };

struct ExperimentRow {
  int n_nodes = 0;
  double anr_db = 0.0;
  double freq_hz = 0.0;
  std::uint64_t trial_seed = 0;
  RowStatus status = RowStatus::Error;
  bool exact_match = false;
  double branch_recall = 0.0;
  double branch_precision = 0.0;
  double max_length_error_m = 0.0;
  double runtime_ms = 0.0;
};

/// Runs the whole campaign. Deterministic given (seed, config): per-trial
/// RNG streams depend only on the master seed and the (cell, trial) index,
/// and rows come back in enumeration order regardless of thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config,
                                          const std::vector<CablePreset>& extra_presets = {});

// Results CSV, header fixed:
// n_nodes,anr_db,freq_hz,trial_seed,status,exact_match,branch_recall,branch_precision,max_length_error_m,runtime_ms
void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> read_results_csv(std::istream& in);

struct CellSummary {
  int n_nodes = 0;
  double anr_db = 0.0;
  double freq_hz = 0.0;
  int trials = 0;
  int completed = 0;
  int interrupted = 0;
  int errors = 0;
  double exact_rate = 0.0;
  double mean_recall = 0.0;
  double mean_precision = 0.0;
  double mean_recall_interrupted = 0.0;  // over interrupted trials only
};

std::vector<CellSummary> summarize(const std::vector<ExperimentRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// Exact-match rate sweep over kappa on a calibration campaign whose seeds
/// are disjoint from evaluation runs (master seed remixed with a fixed tag).
struct KappaSweepPoint {
  double kappa = 0.0;
  double exact_rate = 0.0;
};

std::vector<KappaSweepPoint> sweep_kappa(const ExperimentConfig& base,
                                         const std::vector<double>& kappas,
                                         const std::vector<CablePreset>& extra_presets = {});

/// Smallest kappa within 1% of the best exact-match rate in the sweep.
double recommend_kappa(const std::vector<KappaSweepPoint>& sweep);

/// Seed namespace tag for calibration campaigns.
std::uint64_t calibration_seed(std::uint64_t master);

}  // namespace ytopo
