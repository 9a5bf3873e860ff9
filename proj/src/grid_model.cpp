#include "gridest/grid_model.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace gridest {

namespace {

using AdjacencyMap = std::map<NodeId, std::vector<std::pair<NodeId, std::size_t>>>;

void check_node_list(const std::vector<NodeId>& nodes) {
  std::unordered_set<std::string> seen;
  for (const auto& n : nodes) {
    if (!seen.insert(n).second) {
      throw TopologyError(TopologyErrc::DuplicateNode,
                          "duplicate node id: " + n);
    }
  }
}

/// Undirected adjacency with line indices; validates endpoint references.
AdjacencyMap build_adjacency(const std::vector<NodeId>& nodes,
                             const std::vector<Line>& lines) {
  std::unordered_set<std::string> known(nodes.begin(), nodes.end());
  AdjacencyMap adj;
  for (const auto& n : nodes) adj[n];
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    if (!known.count(l.parent) || !known.count(l.child)) {
      throw TopologyError(TopologyErrc::UnknownNodeReference,
                          "line " + l.line_id + " references unknown node");
    }
    if (l.parent == l.child) {
      throw TopologyError(TopologyErrc::CycleDetected,
                          "line " + l.line_id + " is a self-loop");
    }
    adj[l.parent].push_back({l.child, i});
    adj[l.child].push_back({l.parent, i});
  }
  return adj;
}

/// BFS from the root over the undirected graph. Returns the node each line
/// index was first reached through, i.e. its root-side endpoint.
std::unordered_map<std::size_t, NodeId> orient_lines(
    const std::vector<NodeId>& nodes, const std::vector<Line>& lines,
    const NodeId& root, const AdjacencyMap& adj) {
  std::unordered_map<std::size_t, NodeId> root_side;
  std::unordered_set<std::string> visited{root};
  std::deque<NodeId> queue{root};
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (const auto& [peer, line_idx] : adj.at(n)) {
      if (root_side.count(line_idx)) continue;  // the line n was reached by
      root_side[line_idx] = n;
      if (!visited.insert(peer).second) {
        throw TopologyError(TopologyErrc::CycleDetected,
                            "cycle through line " + lines[line_idx].line_id);
      }
      queue.push_back(peer);
    }
  }
  if (visited.size() != nodes.size()) {
    throw TopologyError(TopologyErrc::DisconnectedGraph,
                        "graph is not connected from root " + root);
  }
  if (lines.size() + 1 != nodes.size()) {
    throw TopologyError(TopologyErrc::CycleDetected,
                        "line count implies a cycle");
  }
  return root_side;
}

}  // namespace

std::vector<Line> normalize_orientation(const std::vector<NodeId>& nodes,
                                        const std::vector<Line>& lines,
                                        const NodeId& root) {
  check_node_list(nodes);
  if (std::find(nodes.begin(), nodes.end(), root) == nodes.end()) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "root " + root + " is not a listed node");
  }
  AdjacencyMap adj = build_adjacency(nodes, lines);
  auto root_side = orient_lines(nodes, lines, root, adj);
  std::vector<Line> oriented = lines;
  for (std::size_t i = 0; i < oriented.size(); ++i) {
    if (oriented[i].parent != root_side.at(i)) {
      std::swap(oriented[i].parent, oriented[i].child);
    }
  }
  return oriented;
}

void validate_oriented_lines(const std::vector<NodeId>& nodes,
                             const std::vector<Line>& lines,
                             const NodeId& root) {
  std::unordered_map<std::string, int> parent_count;
  for (const auto& n : nodes) parent_count[n] = 0;
  for (const auto& l : lines) {
    auto it = parent_count.find(l.child);
    if (it == parent_count.end()) {
      throw TopologyError(TopologyErrc::UnknownNodeReference,
                          "line " + l.line_id + " references unknown node");
    }
    ++it->second;
  }
  if (parent_count.at(root) != 0) {
    throw TopologyError(TopologyErrc::RootHasParent,
                        "root " + root + " appears as a line child");
  }
  for (const auto& [n, count] : parent_count) {
    if (n == root) continue;
    if (count == 0) {
      throw TopologyError(TopologyErrc::DisconnectedGraph,
                          "node " + n + " has no parent line");
    }
    if (count > 1) {
      throw TopologyError(TopologyErrc::CycleDetected,
                          "node " + n + " has multiple parent lines");
    }
  }
}

GridTopology build_topology(const std::vector<NodeId>& nodes,
                            const std::vector<Line>& lines, const NodeId& root,
                            const std::set<NodeId>& measured) {
  if (nodes.empty()) {
    throw TopologyError(TopologyErrc::UnknownNodeReference, "no nodes given");
  }
  std::vector<Line> oriented = normalize_orientation(nodes, lines, root);
  validate_oriented_lines(nodes, oriented, root);

  std::unordered_set<std::string> known(nodes.begin(), nodes.end());
  for (const auto& m : measured) {
    if (!known.count(m)) {
      throw TopologyError(TopologyErrc::UnknownNodeReference,
                          "measured node " + m + " is not a listed node");
    }
  }

  GridTopology t;
  t.root_ = root;
  t.nodes_ = nodes;
  t.lines_ = std::move(oriented);
  t.measured_ = measured;
  for (const auto& n : nodes) {
    if (!measured.count(n)) t.unmeasured_.insert(n);
    t.children_[n];
  }
  for (const auto& l : t.lines_) {
    t.parent_[l.child] = l.parent;
    t.parent_line_[l.child] = l;
    t.children_[l.parent].push_back(l.child);
    t.line_index_[l.line_id] = l;
  }
  if (t.line_index_.size() != t.lines_.size()) {
    throw TopologyError(TopologyErrc::DuplicateNode,
                        "duplicate line id in line list");
  }
  for (auto& [n, kids] : t.children_) {
    std::sort(kids.begin(), kids.end());
  }
  // Depths via one pass from the root.
  std::deque<NodeId> queue{root};
  t.depth_[root] = 0;
  while (!queue.empty()) {
    NodeId n = queue.front();
    queue.pop_front();
    for (const auto& c : t.children_.at(n)) {
      t.depth_[c] = t.depth_.at(n) + 1;
      queue.push_back(c);
    }
  }
  t.validate();
  return t;
}

bool GridTopology::contains(const NodeId& n) const {
  return depth_.count(n) > 0;
}

bool GridTopology::is_measured(const NodeId& n) const {
  return measured_.count(n) > 0;
}

const std::vector<NodeId>& GridTopology::children(const NodeId& n) const {
  auto it = children_.find(n);
  if (it == children_.end()) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "unknown node " + n);
  }
  return it->second;
}

const NodeId* GridTopology::parent(const NodeId& n) const {
  if (!contains(n)) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "unknown node " + n);
  }
  auto it = parent_.find(n);
  return it == parent_.end() ? nullptr : &it->second;
}

const Line* GridTopology::parent_line(const NodeId& n) const {
  if (!contains(n)) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "unknown node " + n);
  }
  auto it = parent_line_.find(n);
  return it == parent_line_.end() ? nullptr : &it->second;
}

const Line* GridTopology::line_by_id(const std::string& line_id) const {
  auto it = line_index_.find(line_id);
  return it == line_index_.end() ? nullptr : &it->second;
}

int GridTopology::depth(const NodeId& n) const {
  auto it = depth_.find(n);
  if (it == depth_.end()) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "unknown node " + n);
  }
  return it->second;
}

std::vector<NodeId> GridTopology::bottom_up_order(
    const std::set<NodeId>& subset) const {
  std::vector<NodeId> out(subset.begin(), subset.end());
  for (const auto& n : out) {
    if (!contains(n)) {
      throw TopologyError(TopologyErrc::UnknownNodeReference,
                          "unknown node " + n);
    }
  }
  std::sort(out.begin(), out.end(), [this](const NodeId& a, const NodeId& b) {
    int da = depth_.at(a), db = depth_.at(b);
    if (da != db) return da > db;
    return a < b;
  });
  return out;
}

void GridTopology::validate() const {
  if (lines_.size() + 1 != nodes_.size()) {
    throw TopologyError(TopologyErrc::CycleDetected,
                        "|lines| != |nodes| - 1");
  }
  validate_oriented_lines(nodes_, lines_, root_);
  if (depth_.size() != nodes_.size()) {
    throw TopologyError(TopologyErrc::DisconnectedGraph,
                        "not every node is reachable from the root");
  }
  for (const auto& n : nodes_) {
    if (measured_.count(n) + unmeasured_.count(n) != 1) {
      throw TopologyError(TopologyErrc::UnknownNodeReference,
                          "node " + n + " not in exactly one sensor set");
    }
  }
}

TopologyLoadResult load_topology_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        std::string("topology document is not valid JSON: ") +
                            e.what());
  }
  std::vector<std::string> warnings;
  static const std::set<std::string> known_fields{"root", "nodes", "lines",
                                                  "measured"};
  for (const auto& [key, _] : doc.items()) {
    if (!known_fields.count(key)) {
      warnings.push_back("ignoring unknown topology field: " + key);
    }
  }
  std::vector<NodeId> nodes;
  for (const auto& n : doc.at("nodes")) nodes.push_back(n.get<std::string>());
  std::vector<Line> lines;
  for (const auto& l : doc.at("lines")) {
    for (const auto& [key, _] : l.items()) {
      if (key != "id" && key != "from" && key != "to") {
        warnings.push_back("ignoring unknown line field: " + key);
      }
    }
    lines.push_back(Line{l.at("id").get<std::string>(),
                         l.at("from").get<std::string>(),
                         l.at("to").get<std::string>()});
  }
  std::set<NodeId> measured;
  if (doc.contains("measured")) {
    for (const auto& m : doc.at("measured")) {
      measured.insert(m.get<std::string>());
    }
  }
  NodeId root = doc.at("root").get<std::string>();
  return TopologyLoadResult{build_topology(nodes, lines, root, measured),
                            std::move(warnings)};
}

TopologyLoadResult load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw TopologyError(TopologyErrc::UnknownNodeReference,
                        "cannot open topology file " + path);
  }
  return load_topology_json(in);
}

void save_topology_json(const GridTopology& t, std::ostream& out) {
  nlohmann::json doc;
  doc["root"] = t.root();
  doc["nodes"] = t.nodes();
  doc["lines"] = nlohmann::json::array();
  for (const auto& l : t.lines()) {
    doc["lines"].push_back(
        {{"id", l.line_id}, {"from", l.parent}, {"to", l.child}});
  }
  doc["measured"] = t.measured_nodes();
  out << doc.dump(2) << "\n";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::A: return "A";
    case Phase::B: return "B";
    case Phase::C: return "C";
  }
  return "?";
}

std::optional<Phase> phase_from_string(std::string_view s) {
  if (s == "A" || s == "a") return Phase::A;
  if (s == "B" || s == "b") return Phase::B;
  if (s == "C" || s == "c") return Phase::C;
  return std::nullopt;
}

}  // namespace gridest
