#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridest/errors.hpp"
#include "gridest/types.hpp"

namespace gridest {

/// Immutable rooted radial grid. Construction validates radiality
/// (|lines| == |nodes| - 1, connected, acyclic) and normalizes every line so
/// that its parent is the endpoint nearer the root. Safe for concurrent
/// reads once built.
class GridTopology {
 public:
  const NodeId& root() const { return root_; }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Line>& lines() const { return lines_; }
  const std::set<NodeId>& measured_nodes() const { return measured_; }
  const std::set<NodeId>& unmeasured_nodes() const { return unmeasured_; }

  bool contains(const NodeId& n) const;
  bool is_measured(const NodeId& n) const;

  /// Children of n in parent->child orientation; empty for leaves.
  /// Sorted ascending by id.
  const std::vector<NodeId>& children(const NodeId& n) const;

  /// Parent of n, or nullptr for the root.
  const NodeId* parent(const NodeId& n) const;

  /// The line whose child endpoint is n, or nullptr for the root.
  const Line* parent_line(const NodeId& n) const;

  const Line* line_by_id(const std::string& line_id) const;

  /// Edge count from the root; 0 for the root itself.
  int depth(const NodeId& n) const;

  /// Nodes of `subset` ordered so that every node precedes its ancestors.
  /// Nodes of equal depth are ordered ascending by id.
  std::vector<NodeId> bottom_up_order(const std::set<NodeId>& subset) const;

  /// Re-checks all structural invariants; throws TopologyError on violation.
  void validate() const;

  friend GridTopology build_topology(const std::vector<NodeId>& nodes,
                                     const std::vector<Line>& lines,
                                     const NodeId& root,
                                     const std::set<NodeId>& measured);

 private:
  GridTopology() = default;

  NodeId root_;
  std::vector<NodeId> nodes_;
  std::vector<Line> lines_;  // normalized, input order preserved
  std::set<NodeId> measured_;
  std::set<NodeId> unmeasured_;
  std::map<NodeId, NodeId> parent_;
  std::map<NodeId, Line> parent_line_;
  std::map<NodeId, std::vector<NodeId>> children_;
  std::map<NodeId, int> depth_;
  std::map<std::string, Line> line_index_;
};

/// Builds a validated topology. Input line orientation is not trusted:
/// every line is re-oriented away from the root before validation.
GridTopology build_topology(const std::vector<NodeId>& nodes,
                            const std::vector<Line>& lines, const NodeId& root,
                            const std::set<NodeId>& measured);

/// Orientation pass alone: returns the input lines with parent/child swapped
/// wherever the stated child is nearer the root. Idempotent. Throws on
/// structural defects (cycle, disconnection, unknown endpoint).
std::vector<Line> normalize_orientation(const std::vector<NodeId>& nodes,
                                        const std::vector<Line>& lines,
                                        const NodeId& root);

/// Validates an already-oriented line set without re-orienting it: every
/// non-root node must have exactly one parent line, and the root none
/// (RootHasParent otherwise).
void validate_oriented_lines(const std::vector<NodeId>& nodes,
                             const std::vector<Line>& lines,
                             const NodeId& root);

struct TopologyLoadResult {
  GridTopology topology;
  std::vector<std::string> warnings;  // unknown fields, ignored extras
};

/// Reads the JSON topology document: {"root","nodes","lines","measured"}.
/// Unknown fields produce warnings, not errors.
TopologyLoadResult load_topology_json(std::istream& in);
TopologyLoadResult load_topology_file(const std::string& path);

void save_topology_json(const GridTopology& t, std::ostream& out);

}  // namespace gridest
