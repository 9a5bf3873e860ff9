#include "gridest/decomposer.hpp"

#include <set>
#include <stdexcept>

namespace gridest {

const char* to_string(LineCase c) {
  switch (c) {
    case LineCase::Case1: return "1";
    case LineCase::Case2: return "2";
    case LineCase::Case3: return "3";
    case LineCase::Case4: return "4";
  }
  return "?";
}

LineCase classify_by_membership(const GridTopology& t, const Line& line) {
  bool parent_measured = t.is_measured(line.parent);
  bool child_measured = t.is_measured(line.child);
  if (parent_measured && child_measured) return LineCase::Case1;
  if (!parent_measured && child_measured) return LineCase::Case2;
  if (parent_measured && !child_measured) return LineCase::Case3;
  return LineCase::Case4;
}

std::vector<LineClassification> decompose_with_orders(
    const GridTopology& t, const std::vector<NodeId>& measured_order,
    const std::vector<NodeId>& unmeasured_order) {
  std::vector<LineClassification> out;
  out.reserve(t.lines().size());
  std::set<std::string> remaining;
  for (const auto& l : t.lines()) remaining.insert(l.line_id);

  auto process = [&](const std::vector<NodeId>& order, bool measured_pass) {
    for (const auto& j : order) {
      const Line* line = t.parent_line(j);
      if (line == nullptr) continue;  // the root: no connecting line left
      if (!remaining.erase(line->line_id)) continue;
      bool parent_measured = t.is_measured(line->parent);
      LineCase c;
      if (measured_pass) {
        c = parent_measured ? LineCase::Case1 : LineCase::Case2;
      } else {
        c = parent_measured ? LineCase::Case3 : LineCase::Case4;
      }
      if (c != classify_by_membership(t, *line)) {
        throw std::logic_error("traversal disagrees with membership rule on " +
                               line->line_id);
      }
      out.push_back(LineClassification{*line, c});
    }
  };

  process(measured_order, true);
  process(unmeasured_order, false);

  if (!remaining.empty()) {
    throw std::logic_error("decomposition left lines unclassified");
  }
  return out;
}

std::vector<LineClassification> decompose(const GridTopology& t) {
  return decompose_with_orders(t,
                               t.bottom_up_order(t.measured_nodes()),
                               t.bottom_up_order(t.unmeasured_nodes()));
}

CaseMix case_mix(const std::vector<LineClassification>& classifications) {
  CaseMix mix;
  for (const auto& c : classifications) {
    switch (c.line_case) {
      case LineCase::Case1: ++mix.case1; break;
      case LineCase::Case2: ++mix.case2; break;
      case LineCase::Case3: ++mix.case3; break;
      case LineCase::Case4: ++mix.case4; break;
    }
  }
  return mix;
}

}  // namespace gridest
