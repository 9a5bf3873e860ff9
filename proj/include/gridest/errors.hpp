#pragma once

#include <stdexcept>
#include <string>

namespace gridest {

enum class TopologyErrc {
  CycleDetected,
  DisconnectedGraph,
  DuplicateNode,
  UnknownNodeReference,
  RootHasParent,
};

class TopologyError : public std::runtime_error {
 public:
  TopologyError(TopologyErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  TopologyErrc code() const { return code_; }

 private:
  TopologyErrc code_;
};

enum class DataErrc {
  UnreadableStream,
  EmptyInput,
  ZeroApparentPower,
  NonPositiveVoltage,
  InsufficientData,
};

class DataError : public std::runtime_error {
 public:
  DataError(DataErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  DataErrc code() const { return code_; }

 private:
  DataErrc code_;
};

enum class EstimationErrc {
  ZeroMeanCurrent,
  InsufficientData,
  ZeroResidualPower,
  NoMeasuredAncestor,
};

class EstimationError : public std::runtime_error {
 public:
  EstimationError(EstimationErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  EstimationErrc code() const { return code_; }

 private:
  EstimationErrc code_;
};

enum class ScenarioErrc {
  InvalidConfig,
  InvalidScenario,
  NonConvergence,
  NonPositiveGeometry,
  SizeExceedsData,
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ScenarioErrc code() const { return code_; }

 private:
  ScenarioErrc code_;
};

}  // namespace gridest
