#pragma once

#include <stdexcept>
#include <string>

namespace etcons {

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iteration failed to converge or a linear system was singular.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition on the inputs does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A standing modelling assumption (spanning tree, stabilizability) fails.
class AssumptionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Time moved backwards for a predictor, message, or cache entry.
class TimeOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A message arrived over an edge that does not exist in the graph.
class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace etcons
