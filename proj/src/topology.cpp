#include "ytopo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ytopo {

void Topology::validate() const {
  if (nodes.empty()) raise(ErrorCode::InvalidTopology, "no nodes");

  std::set<int> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) {
      raise(ErrorCode::InvalidTopology, "duplicate node id " + std::to_string(n.id));
    }
    if (!std::isfinite(n.load.y.real()) || !std::isfinite(n.load.y.imag())) {
      raise(ErrorCode::InvalidTopology, "non-finite load at node " + std::to_string(n.id));
    }
    if (n.load.y.real() < 0.0) {
      raise(ErrorCode::InvalidTopology, "active load at node " + std::to_string(n.id));
    }
  }

  if (branches.size() != nodes.size() - 1) {
    raise(ErrorCode::InvalidTopology, "branch count must be node count - 1 (tree)");
  }

  std::set<std::pair<int, int>> seen;
  for (const auto& br : branches) {
    if (br.a == br.b) raise(ErrorCode::InvalidTopology, "self loop at node " + std::to_string(br.a));
    if (!ids.count(br.a) || !ids.count(br.b)) {
      raise(ErrorCode::InvalidTopology, "branch references unknown node");
    }
    if (!(br.length_m > 0.0) || !std::isfinite(br.length_m)) {
      raise(ErrorCode::InvalidTopology, "branch lengths must be positive");
    }
    if (!seen.insert({std::min(br.a, br.b), std::max(br.a, br.b)}).second) {
      raise(ErrorCode::InvalidTopology, "duplicate branch");
    }
    if (!cables.count(br.cable)) {
      raise(ErrorCode::InvalidTopology, "unresolved cable '" + br.cable + "'");
    }
  }
  for (const auto& [name, params] : cables) {
    (void)name;
    params.validate();
  }

  // Connectivity: |branches| = |nodes| - 1 plus connected implies a tree.
  const auto adj = adjacency();
  std::set<int> visited;
  std::vector<int> stack{nodes.front().id};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (!visited.insert(v).second) continue;
    const auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (const std::size_t bi : it->second) {
      const auto& br = branches[bi];
      stack.push_back(br.a == v ? br.b : br.a);
    }
  }
  if (visited.size() != nodes.size()) {
    raise(ErrorCode::InvalidTopology, "graph is not connected");
  }
}

const TopoNode& Topology::node(int id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  raise(ErrorCode::InvalidTopology, "no node with id " + std::to_string(id));
}

const CableParams& Topology::cable_of(const TopoBranch& branch) const {
  const auto it = cables.find(branch.cable);
  if (it == cables.end()) raise(ErrorCode::InvalidTopology, "unresolved cable '" + branch.cable + "'");
  return it->second;
}

std::map<int, std::vector<std::size_t>> Topology::adjacency() const {
  std::map<int, std::vector<std::size_t>> adj;
  for (const auto& n : nodes) adj[n.id];
  for (std::size_t i = 0; i < branches.size(); ++i) {
    adj[branches[i].a].push_back(i);
    adj[branches[i].b].push_back(i);
  }
  return adj;
}

void MeasurementSet::validate() const {
  if (entries.empty()) raise(ErrorCode::InvalidParameter, "empty measurement set");
  if (!(freq_hz > 0.0)) raise(ErrorCode::InvalidParameter, "measurement frequency must be positive");
  for (const auto& [id, y] : entries) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      raise(ErrorCode::InvalidParameter, "non-finite admittance at node " + std::to_string(id));
    }
  }
  if (std::isnan(anr_db)) raise(ErrorCode::InvalidParameter, "anr_db is NaN");
}

// --- JSON ---

std::string topology_to_json(const Topology& topo) {
  nlohmann::json doc;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : topo.nodes) {
    doc["nodes"].push_back(
        {{"id", n.id}, {"load_re", n.load.y.real()}, {"load_im", n.load.y.imag()}});
  }
  doc["branches"] = nlohmann::json::array();
  for (const auto& br : topo.branches) {
    doc["branches"].push_back(
        {{"a", br.a}, {"b", br.b}, {"length_m", br.length_m}, {"cable", br.cable}});
  }
  doc["cables"] = nlohmann::json::array();
  for (const auto& [name, params] : topo.cables) {
    doc["cables"].push_back({{"name", name},
                             {"R", params.resistance_ohm_per_m},
                             {"L", params.inductance_h_per_m},
                             {"G", params.conductance_s_per_m},
                             {"C", params.capacitance_f_per_m}});
  }
  return doc.dump(2);
}

Topology topology_from_json(const std::string& text, const std::vector<CablePreset>& extra_presets) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::IoError, std::string("topology JSON: ") + e.what());
  }

  Topology topo;
  try {
    std::vector<CablePreset> file_presets;
    if (doc.contains("cables")) {
      for (const auto& item : doc["cables"]) {
        CablePreset preset;
        preset.name = item.at("name").get<std::string>();
        preset.params.resistance_ohm_per_m = item.at("R").get<double>();
        preset.params.inductance_h_per_m = item.at("L").get<double>();
        preset.params.conductance_s_per_m = item.at("G").get<double>();
        preset.params.capacitance_f_per_m = item.at("C").get<double>();
        file_presets.push_back(std::move(preset));
      }
    }
    for (const auto& item : doc.at("nodes")) {
      TopoNode n;
      n.id = item.at("id").get<int>();
      n.load.y = {item.at("load_re").get<double>(), item.at("load_im").get<double>()};
      topo.nodes.push_back(n);
    }
    for (const auto& item : doc.at("branches")) {
      TopoBranch br;
      br.a = item.at("a").get<int>();
      br.b = item.at("b").get<int>();
      br.length_m = item.at("length_m").get<double>();
      br.cable = item.at("cable").get<std::string>();
      if (!topo.cables.count(br.cable)) {
        // resolve against the file's cable table first, then user and built-in presets
        std::vector<CablePreset> merged = file_presets;
        merged.insert(merged.end(), extra_presets.begin(), extra_presets.end());
        topo.cables[br.cable] = find_cable(br.cable, merged);
      }
      topo.branches.push_back(std::move(br));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::IoError, std::string("topology JSON: ") + e.what());
  }
  topo.validate();
  return topo;
}

Topology load_topology_file(const std::string& path, const std::vector<CablePreset>& extra_presets) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return topology_from_json(buf.str(), extra_presets);
}

void save_topology_file(const Topology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  out << topology_to_json(topo) << '\n';
}

// --- CSV ---

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    raise(ErrorCode::IoError, std::string("bad ") + what + " value '" + s + "'");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void write_measurements_csv(std::ostream& out, const MeasurementSet& meas) {
  out << "node_id,y_re,y_im,freq_hz,anr_db\n";
  for (const auto& [id, y] : meas.entries) {
    out << id << ',' << fmt_double(y.real()) << ',' << fmt_double(y.imag()) << ','
        << fmt_double(meas.freq_hz) << ',' << fmt_double(meas.anr_db) << '\n';
  }
}

MeasurementSet read_measurements_csv(std::istream& in) {
  MeasurementSet meas;
  meas.anr_db = std::numeric_limits<double>::infinity();
  std::string line;
  bool have_header = false;
  bool have_row = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!have_header) {
      if (line.rfind("node_id", 0) != 0) {
        raise(ErrorCode::IoError, "measurement CSV must start with the node_id header");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) raise(ErrorCode::IoError, "measurement CSV rows need 5 fields");
    const int id = static_cast<int>(parse_double(fields[0], "node_id"));
    const Complex y{parse_double(fields[1], "y_re"), parse_double(fields[2], "y_im")};
    const double freq = parse_double(fields[3], "freq_hz");
    const double anr = parse_double(fields[4], "anr_db");
    if (meas.entries.count(id)) raise(ErrorCode::IoError, "duplicate node_id in measurement CSV");
    if (have_row && freq != meas.freq_hz) {
      raise(ErrorCode::IoError, "measurement CSV mixes frequencies");
    }
    if (have_row && anr != meas.anr_db && !(std::isinf(anr) && std::isinf(meas.anr_db))) {
      raise(ErrorCode::IoError, "measurement CSV mixes ANR values");
    }
    meas.entries[id] = y;
    meas.freq_hz = freq;
    meas.anr_db = anr;
    have_row = true;
  }
  meas.validate();
  return meas;
}

MeasurementSet load_measurements_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_measurements_csv(in);
}

void save_measurements_file(const MeasurementSet& meas, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
  write_measurements_csv(out, meas);
}

}  // namespace ytopo
