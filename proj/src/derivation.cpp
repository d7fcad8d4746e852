#include "ytopo/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ytopo/line.hpp"

namespace ytopo {

double threshold_for_anr(double anr_db, double wavelength_m, const DeriveOptions& opts) {
  if (!(wavelength_m > 0.0)) raise(ErrorCode::InvalidParameter, "wavelength must be > 0");
  if (opts.threshold_m) {
    if (!(*opts.threshold_m > 0.0)) raise(ErrorCode::InvalidParameter, "threshold must be > 0");
    return *opts.threshold_m;
  }
  if (std::isnan(anr_db)) raise(ErrorCode::InvalidParameter, "anr_db is NaN");
  const double scaled = opts.kappa * wavelength_m * std::pow(10.0, -anr_db / 20.0);
  return std::max(scaled, kMinThresholdRel * wavelength_m);
}

bool DerivationState::active(int id) const {
  return std::binary_search(gl.begin(), gl.end(), id);
}

void DerivationState::remove_from_gl(int id) {
  const auto it = std::lower_bound(gl.begin(), gl.end(), id);
  if (it != gl.end() && *it == id) gl.erase(it);
}

void reduce_leaf(DerivationState& state, int leaf, int neighbor, double d_m,
                 const SecondaryParams& sec) {
  if (!(d_m > 0.0)) raise(ErrorCode::InvalidParameter, "reduction length must be > 0");
  if (!state.active(leaf) || !state.active(neighbor)) {
    raise(ErrorCode::InvalidParameter, "reduce_leaf endpoints must be active");
  }
  state.working_loads[neighbor] += carry_back(state.working_loads.at(leaf), sec, d_m);
  state.remove_from_gl(leaf);
  state.derived_branches.push_back({leaf, neighbor, d_m});
  state.derived_nodes.insert(leaf);
}

namespace {

struct PendingLeaf {
  int leaf;
  int neighbor;
  double d;
  double residual;
};

}  // namespace

DerivationResult derive_topology(const MeasurementSet& meas,
                                 const std::map<int, LoadAdmittance>& loads,
                                 const CableTable& cables, double anr_db,
                                 const DeriveOptions& opts) {
  meas.validate();
  for (const auto& [id, y] : meas.entries) {
    (void)y;
    if (!loads.count(id)) {
      raise(ErrorCode::InvalidParameter, "no load admittance for node " + std::to_string(id));
    }
  }

  // secondary params per node, cached by cable name
  std::map<std::string, SecondaryParams> sec_cache;
  const auto sec_of = [&](int id) -> const SecondaryParams& {
    const CableRef& ref = cables.for_node(id);
    const auto it = sec_cache.find(ref.name);
    if (it != sec_cache.end()) return it->second;
    return sec_cache.emplace(ref.name, secondary_params(ref.params, meas.freq_hz)).first->second;
  };

  const double lambda_ref = secondary_params(cables.uniform.params, meas.freq_hz).wavelength_m;
  const double threshold = threshold_for_anr(anr_db, lambda_ref, opts);

  DerivationState state;
  for (const auto& [id, y] : meas.entries) {
    (void)y;
    state.gl.push_back(id);
    state.working_loads[id] = loads.at(id).y;
  }
  std::sort(state.gl.begin(), state.gl.end());

  DerivationResult result;
  result.threshold_m = threshold;
  bool interrupted = false;

  while (state.gl.size() > 1 && !interrupted) {
    ++result.rounds;

    // Test phase: every active node as candidate leaf against every other
    // active node, using this round's (frozen) working loads.
    std::vector<PendingLeaf> pending;
    for (const int i : state.gl) {
      const SecondaryParams& sec = sec_of(i);
      bool have_best = false;
      PendingLeaf best{i, -1, 0.0, 0.0};
      for (const int k : state.gl) {
        if (k == i) continue;
        const DistancePair pair =
            solve_pair_distance(meas.entries.at(i), meas.entries.at(k),
                                state.working_loads.at(i), sec);
        const AdjacencyVerdict verdict = adjacency_test(pair, threshold, sec.wavelength_m);
        result.diagnostics.push_back(
            {i, k, verdict.d.real(), verdict.d.imag(), verdict.adjacent});
        if (verdict.adjacent && (!have_best || verdict.residual < best.residual)) {
          have_best = true;
          best.neighbor = k;
          best.d = verdict.d_real;
          best.residual = verdict.residual;
        }
      }
      if (have_best) pending.push_back(best);
    }

    // Commit phase: absorb accepted leaves in ascending id order. A pending
    // entry whose neighbor was itself absorbed this round is dropped (its
    // branch, if real, was already recorded from the other side).
    bool committed = false;
    std::set<int> absorbed;
    for (const PendingLeaf& p : pending) {
      if (absorbed.count(p.neighbor) || absorbed.count(p.leaf)) continue;
      if (p.residual > lambda_ref) {  // residual explosion: detection event
        interrupted = true;
        break;
      }
      reduce_leaf(state, p.leaf, p.neighbor, p.d, sec_of(p.leaf));
      absorbed.insert(p.leaf);
      committed = true;
    }
    if (!committed) interrupted = true;  // empty round: detection event
  }

  result.status =
      state.gl.size() == 1 ? DerivationStatus::Complete : DerivationStatus::Interrupted;

  // Assemble the recovered topology over the original loads.
  for (const auto& [id, load] : loads) {
    if (meas.entries.count(id)) result.topology.nodes.push_back({id, load});
  }
  for (const DerivedBranch& br : state.derived_branches) {
    const CableRef& ref = cables.for_node(br.leaf);
    result.topology.branches.push_back({br.leaf, br.neighbor, br.length_m, ref.name});
    result.topology.cables.emplace(ref.name, ref.params);
  }
  return result;
}

TopologyMetrics compare_topologies(const Topology& truth, const DerivationResult& derived) {
  const auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

  std::map<std::pair<int, int>, double> truth_map;
  for (const auto& br : truth.branches) truth_map[key(br.a, br.b)] = br.length_m;
  std::map<std::pair<int, int>, double> derived_map;
  for (const auto& br : derived.topology.branches) derived_map[key(br.a, br.b)] = br.length_m;

  std::size_t matched = 0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  for (const auto& [k, true_len] : truth_map) {
    const auto it = derived_map.find(k);
    if (it == derived_map.end()) continue;
    ++matched;
    const double abs_err = std::abs(it->second - true_len);
    max_abs_err = std::max(max_abs_err, abs_err);
    max_rel_err = std::max(max_rel_err, abs_err / true_len);
  }

  TopologyMetrics metrics;
  metrics.branch_recall = truth_map.empty() ? 1.0 : double(matched) / double(truth_map.size());
  metrics.branch_precision =
      derived_map.empty() ? 1.0 : double(matched) / double(derived_map.size());
  metrics.max_length_error_m = max_abs_err;
  metrics.exact_match = truth_map.size() == derived_map.size() &&
                        matched == truth_map.size() && max_rel_err < 1e-3;
  return metrics;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<PairDiagnostic>& diagnostics) {
  out << "leaf_id,neighbor_id,re_d,im_d,accepted\n";
  char buf[96];
  for (const auto& diag : diagnostics) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", diag.re_d, diag.im_d);
    out << diag.leaf << ',' << diag.neighbor << ',' << buf << ',' << (diag.accepted ? 1 : 0)
        << '\n';
  }
}

}  // namespace ytopo
