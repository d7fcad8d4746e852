#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ytopo/pair_solver.hpp"
#include "ytopo/topology.hpp"

namespace ytopo {

/// Calibrated threshold scale: thr = kappa * lambda * 10^(-ANR/20).
/// Picked by the calibrate-threshold Monte Carlo sweep over the
/// N x frequency grid at ANR 100 dB (data/calibration.json): exact-match
/// rate plateaus for kappa in [1.4, 2.8]; 1.5 sits on the plateau while
/// keeping the low-frequency advantage at N >= 20.
inline constexpr double kDefaultKappa = 1.5;

/// Floor so the noiseless (ANR = inf) threshold stays positive:
/// thr >= kMinThresholdRel * lambda.
inline constexpr double kMinThresholdRel = 1e-9;

struct DeriveOptions {
  double kappa = kDefaultKappa;
  std::optional<double> threshold_m;  // explicit override, wins over kappa
};

double threshold_for_anr(double anr_db, double wavelength_m, const DeriveOptions& opts = {});

/// Named cable parameters; the derivation records this name on recovered branches.
struct CableRef {
  std::string name;
  CableParams params;
};

/// Cable class of the line attaching each node at the moment it is reduced
/// as a leaf. Uniform networks only set `uniform`.
struct CableTable {
  CableRef uniform;
  std::map<int, CableRef> per_node;

  const CableRef& for_node(int id) const {
    const auto it = per_node.find(id);
    return it == per_node.end() ? uniform : it->second;
  }
};

struct DerivedBranch {
  int leaf = 0;
  int neighbor = 0;
  double length_m = 0.0;
};

/// Mutable state of the reduction: surviving nodes, effective loads with
/// absorbed leaves carried back, and everything recovered so far.
struct DerivationState {
  std::vector<int> gl;                      // active node set, ascending
  std::map<int, Complex> working_loads;     // node -> effective load
  std::vector<DerivedBranch> derived_branches;
  std::set<int> derived_nodes;

  bool active(int id) const;
  void remove_from_gl(int id);
};

enum class DerivationStatus { Complete, Interrupted };

struct PairDiagnostic {
  int leaf = 0;
  int neighbor = 0;
  double re_d = 0.0;
  double im_d = 0.0;
  bool accepted = false;
};

struct DerivationResult {
  Topology topology;  // original loads plus the derived branches and lengths
  DerivationStatus status = DerivationStatus::Interrupted;
  int rounds = 0;
  std::vector<PairDiagnostic> diagnostics;
  double threshold_m = 0.0;
};

/// Algorithm: treat every active node as a candidate leaf, test it against
/// every other active node with the pair solver, accept the argmin-|Im(d)|
/// neighbor under the threshold, then absorb all accepted leaves at the end
/// of the round. Stops when one node remains (Complete) or a round finds no
/// leaf / an accepted residual explodes (Interrupted).
DerivationResult derive_topology(const MeasurementSet& meas,
                                 const std::map<int, LoadAdmittance>& loads,
                                 const CableTable& cables, double anr_db,
                                 const DeriveOptions& opts = {});

/// One reduction step: absorbs the leaf's working load into the neighbor
/// through a line of length d and records the branch.
void reduce_leaf(DerivationState& state, int leaf, int neighbor, double d_m,
                 const SecondaryParams& sec);

struct TopologyMetrics {
  bool exact_match = false;
  double branch_recall = 0.0;
  double branch_precision = 0.0;
  double max_length_error_m = 0.0;  // over branches with both endpoints correct
};

/// exact_match needs identical branch sets (unordered id pairs) and every
/// matched length within 1e-3 relative.
TopologyMetrics compare_topologies(const Topology& truth, const DerivationResult& derived);

// Diagnostics CSV: leaf_id,neighbor_id,re_d,im_d,accepted
void write_diagnostics_csv(std::ostream& out, const std::vector<PairDiagnostic>& diagnostics);

}  // namespace ytopo
