#pragma once

#include "ytopo/topology.hpp"

namespace ytopo {

/// Exact driving-point admittance at one node: its own load plus every
/// incident branch's subtree admittance carried back through that branch.
/// Depth-first recursion away from the node.
Complex node_admittance(const Topology& topo, int node_id, double freq_hz);

/// Admittances at every node, by tree rerooting (two passes, O(N)).
/// Agrees with per-node recursion to better than 1e-12 relative.
MeasurementSet all_node_admittances(const Topology& topo, double freq_hz);

}  // namespace ytopo
