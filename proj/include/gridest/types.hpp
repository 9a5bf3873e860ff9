#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gridest {

/// Opaque node identifier, unique within a topology (e.g. "L09").
using NodeId = std::string;

/// Phases are decoupled channels; nothing in the model couples them.
enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::A, Phase::B, Phase::C};

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

/// Directed line of the radial grid. After normalization the parent is the
/// endpoint nearer the root and power flows parent -> child.
struct Line {
  std::string line_id;
  NodeId parent;
  NodeId child;

  bool operator==(const Line& other) const = default;
};

}  // namespace gridest
