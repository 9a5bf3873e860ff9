#pragma once

#include <vector>

#include "gridest/grid_model.hpp"
#include "gridest/types.hpp"

namespace gridest {

/// Basic line element, keyed by sensor presence at the endpoints:
///   Case1: parent measured, child measured   (exact estimate)
///   Case2: parent unmeasured, child measured (bounded estimate)
///   Case3: parent measured, child unmeasured (equivalent-load estimate)
///   Case4: neither measured                  (shared estimate)
enum class LineCase : int { Case1 = 1, Case2 = 2, Case3 = 3, Case4 = 4 };

const char* to_string(LineCase c);

struct LineClassification {
  Line line;
  LineCase line_case;
};

/// Classification a line must have given only endpoint membership in the
/// measured set. Single source of truth the traversal is checked against.
LineCase classify_by_membership(const GridTopology& t, const Line& line);

/// Walks the grid bottom-up (measured nodes first, then unmeasured), each
/// non-root node classifying its parent line. Output order follows the
/// traversal; every line appears exactly once.
std::vector<LineClassification> decompose(const GridTopology& t);

/// Same walk with caller-supplied node orders. Both orders must be valid
/// bottom-up sequences (children before ancestors) covering the measured and
/// unmeasured sets respectively; results must not depend on the choice.
std::vector<LineClassification> decompose_with_orders(
    const GridTopology& t, const std::vector<NodeId>& measured_order,
    const std::vector<NodeId>& unmeasured_order);

struct CaseMix {
  int case1 = 0;
  int case2 = 0;
  int case3 = 0;
  int case4 = 0;

  int total() const { return case1 + case2 + case3 + case4; }
  bool all_present() const {
    return case1 > 0 && case2 > 0 && case3 > 0 && case4 > 0;
  }
};

CaseMix case_mix(const std::vector<LineClassification>& classifications);

}  // namespace gridest
