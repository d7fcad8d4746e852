#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ytopo/cable.hpp"
#include "ytopo/line.hpp"

namespace ytopo {

struct TopoNode {
  int id = 0;
  LoadAdmittance load;
};

struct TopoBranch {
  int a = 0;
  int b = 0;
  double length_m = 0.0;
  std::string cable;  // key into Topology::cables
};

/// Tree-structured wired network: nodes with loads, branches with lengths
/// and per-branch cable classes. Immutable after validate().
struct Topology {
  std::vector<TopoNode> nodes;
  std::vector<TopoBranch> branches;
  std::map<std::string, CableParams> cables;

  /// Connected, |branches| = |nodes| - 1, no self loops, unique ids,
  /// positive lengths, passive loads, resolvable cable names.
  void validate() const;

  const TopoNode& node(int id) const;
  const CableParams& cable_of(const TopoBranch& branch) const;
  /// node id -> list of indices into `branches`.
  std::map<int, std::vector<std::size_t>> adjacency() const;
};

/// One network-admittance measurement per node, at a single frequency.
struct MeasurementSet {
  double freq_hz = 0.0;
  std::map<int, Complex> entries;  // node id -> Y_i
  double anr_db = 0.0;             // +inf when noiseless

  void validate() const;
};

// Topology interchange JSON:
//   {"nodes":[{"id","load_re","load_im"}],
//    "branches":[{"a","b","length_m","cable"}],
//    "cables":[{"name","R","L","G","C"}]}   (optional; else preset names)
std::string topology_to_json(const Topology& topo);
Topology topology_from_json(const std::string& text,
                            const std::vector<CablePreset>& extra_presets = {});
Topology load_topology_file(const std::string& path,
                            const std::vector<CablePreset>& extra_presets = {});
void save_topology_file(const Topology& topo, const std::string& path);

// MeasurementSet CSV: node_id,y_re,y_im,freq_hz,anr_db
void write_measurements_csv(std::ostream& out, const MeasurementSet& meas);
MeasurementSet read_measurements_csv(std::istream& in);
MeasurementSet load_measurements_file(const std::string& path);
void save_measurements_file(const MeasurementSet& meas, const std::string& path);

}  // namespace ytopo
