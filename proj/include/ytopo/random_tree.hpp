#pragma once

#include "ytopo/derivation.hpp"
#include "ytopo/rng.hpp"
#include "ytopo/topology.hpp"

namespace ytopo {

/// Random load model. Re(Y_L) ~ U(re_min, re_max) S; when im_scaled_by_re
/// the imaginary part is Re * U(im_min, im_max), otherwise U(im_min, im_max) S.
struct LoadModel {
  double re_min = 1.0 / 600.0;  // 600 ohm resistive
  double re_max = 1.0 / 10.0;   // 10 ohm resistive
  double im_min = -0.5;
  double im_max = 0.5;
  bool im_scaled_by_re = true;

  void validate() const;
};

enum class TreeShape {
  UniformAttachment,  // node i attaches to a uniformly chosen earlier node
  Path,               // chain 0-1-2-...
  Star,               // everything hangs off node 0
};

const char* tree_shape_name(TreeShape shape);
TreeShape tree_shape_from_name(const std::string& name);

/// Random tree with branch lengths U(0.05 * max_branch, max_branch). Loads
/// that land within 1% of the cable's characteristic admittance at freq_hz
/// are resampled (they would make the leaf invisible to the inversion).
Topology generate_random_tree(int n_nodes, double max_branch_m, const LoadModel& loads,
                              const CableRef& cable, double freq_hz, Rng& rng,
                              TreeShape shape = TreeShape::UniformAttachment);

}  // namespace ytopo
