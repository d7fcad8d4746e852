#include "ytopo/random_tree.hpp"

#include <cmath>

namespace ytopo {

void LoadModel::validate() const {
  if (!(re_min > 0.0) || !(re_max >= re_min)) {
    raise(ErrorCode::ConfigError, "load model needs 0 < re_min <= re_max");
  }
  if (!(im_max >= im_min)) raise(ErrorCode::ConfigError, "load model needs im_min <= im_max");
}

const char* tree_shape_name(TreeShape shape) {
  switch (shape) {
    case TreeShape::UniformAttachment: return "uniform-attachment";
    case TreeShape::Path: return "path";
    case TreeShape::Star: return "star";
  }
  return "uniform-attachment";
}

TreeShape tree_shape_from_name(const std::string& name) {
  if (name == "uniform-attachment") return TreeShape::UniformAttachment;
  if (name == "path") return TreeShape::Path;
  if (name == "star") return TreeShape::Star;
  raise(ErrorCode::ConfigError, "unknown tree shape '" + name + "'");
}

Topology generate_random_tree(int n_nodes, double max_branch_m, const LoadModel& loads,
                              const CableRef& cable, double freq_hz, Rng& rng,
                              TreeShape shape) {
  if (n_nodes < 1) raise(ErrorCode::ConfigError, "need at least one node");
  if (n_nodes > 1 && !(max_branch_m > 0.0)) {
    raise(ErrorCode::ConfigError, "max branch length must be > 0");
  }
  loads.validate();
  const SecondaryParams sec = secondary_params(cable.params, freq_hz);

  const auto draw_load = [&]() {
    while (true) {
      const double re = rng.uniform(loads.re_min, loads.re_max);
      const double im_draw = rng.uniform(loads.im_min, loads.im_max);
      const Complex y{re, loads.im_scaled_by_re ? re * im_draw : im_draw};
      if (std::abs(y - sec.yc) >= 0.01 * std::abs(sec.yc)) return y;  // near-matched: resample
    }
  };

  const auto parent_of = [&](int i) -> int {
    switch (shape) {
      case TreeShape::Path: return i - 1;
      case TreeShape::Star: return 0;
      case TreeShape::UniformAttachment: break;
    }
    return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i)));
  };

  Topology topo;
  topo.cables[cable.name] = cable.params;
  for (int i = 0; i < n_nodes; ++i) {
    topo.nodes.push_back({i, {draw_load()}});
    if (i == 0) continue;
    const int parent = parent_of(i);
    const double length = rng.uniform(0.05 * max_branch_m, max_branch_m);
    topo.branches.push_back({parent, i, length, cable.name});
  }
  topo.validate();
  return topo;
}

}  // namespace ytopo
