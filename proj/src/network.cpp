#include "ytopo/network.hpp"

#include <limits>
#include <vector>

namespace ytopo {

namespace {

/// Rooted view of the tree with per-cable secondary parameters resolved.
struct RootedTree {
  std::vector<int> order;                 // BFS order, root first
  std::map<int, std::size_t> parent_branch;  // node id -> branch index toward root
  std::map<int, std::vector<std::size_t>> children;  // node id -> child branch indices
  std::map<std::string, SecondaryParams> sec;
  const Topology* topo = nullptr;

  const SecondaryParams& branch_sec(std::size_t bi) const {
    return sec.at(topo->branches[bi].cable);
  }
  int other_end(std::size_t bi, int v) const {
    const auto& br = topo->branches[bi];
    return br.a == v ? br.b : br.a;
  }
};

RootedTree root_tree(const Topology& topo, int root, double freq_hz) {
  RootedTree rt;
  rt.topo = &topo;
  for (const auto& [name, params] : topo.cables) {
    rt.sec.emplace(name, secondary_params(params, freq_hz));
  }

  const auto adj = topo.adjacency();
  std::map<int, bool> visited;
  rt.order.push_back(root);
  visited[root] = true;
  for (std::size_t head = 0; head < rt.order.size(); ++head) {
    const int v = rt.order[head];
    rt.children[v];
    for (const std::size_t bi : adj.at(v)) {
      const int w = rt.other_end(bi, v);
      if (visited[w]) continue;
      visited[w] = true;
      rt.order.push_back(w);
      rt.parent_branch[w] = bi;
      rt.children[v].push_back(bi);
    }
  }
  return rt;
}

/// Subtree admittances looking down from each node, children before parents.
std::map<int, Complex> downward_admittances(const RootedTree& rt,
                                            std::map<std::size_t, Complex>* branch_carry) {
  std::map<int, Complex> down;
  for (auto it = rt.order.rbegin(); it != rt.order.rend(); ++it) {
    const int v = *it;
    Complex y = rt.topo->node(v).load.y;
    for (const std::size_t bi : rt.children.at(v)) {
      const int c = rt.other_end(bi, v);
      const Complex carried =
          carry_back(down.at(c), rt.branch_sec(bi), rt.topo->branches[bi].length_m);
      if (branch_carry) (*branch_carry)[bi] = carried;
      y += carried;
    }
    down[v] = y;
  }
  return down;
}

}  // namespace

Complex node_admittance(const Topology& topo, int node_id, double freq_hz) {
  topo.validate();
  const RootedTree rt = root_tree(topo, node_id, freq_hz);
  return downward_admittances(rt, nullptr).at(node_id);
}

MeasurementSet all_node_admittances(const Topology& topo, double freq_hz) {
  topo.validate();
  const int root = topo.nodes.front().id;
  const RootedTree rt = root_tree(topo, root, freq_hz);

  std::map<std::size_t, Complex> cb_down;  // branch index -> child subtree carried to parent
  const std::map<int, Complex> down = downward_admittances(rt, &cb_down);

  // Top-down pass: admittance entering each node from the parent side.
  std::map<int, Complex> up_contrib;
  up_contrib[root] = Complex{0.0, 0.0};
  for (const int p : rt.order) {
    const auto& child_branches = rt.children.at(p);
    const std::size_t k = child_branches.size();
    if (k == 0) continue;

    // exclude-one sums without subtraction
    std::vector<Complex> prefix(k + 1, Complex{0.0, 0.0});
    std::vector<Complex> suffix(k + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + cb_down.at(child_branches[i]);
    for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + cb_down.at(child_branches[i]);

    const Complex base = rt.topo->node(p).load.y + up_contrib.at(p);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t bi = child_branches[i];
      const int v = rt.other_end(bi, p);
      const Complex rest = base + prefix[i] + suffix[i + 1];
      up_contrib[v] = carry_back(rest, rt.branch_sec(bi), rt.topo->branches[bi].length_m);
    }
  }

  MeasurementSet meas;
  meas.freq_hz = freq_hz;
  meas.anr_db = std::numeric_limits<double>::infinity();
  for (const int v : rt.order) {
    Complex y = topo.node(v).load.y + up_contrib.at(v);
    for (const std::size_t bi : rt.children.at(v)) y += cb_down.at(bi);
    meas.entries[v] = y;
  }
  return meas;
}

}  // namespace ytopo
