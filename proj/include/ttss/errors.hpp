#pragma once

#include <stdexcept>
#include <string>

namespace ttss {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Mode sizes or ranks of two objects do not fit together.
struct ShapeError : Error {
  using Error::Error;
};

struct NumericalRankError : Error {
  using Error::Error;
};

// Dense materialization above the configured cap.
struct RefusalError : Error {
  using Error::Error;
};

struct ConsistencyError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Inner solve stopped making progress; step is -1 outside time marching.
struct StagnationError : Error {
  StagnationError(const std::string& what, int step_, double residual_)
      : Error(what), step(step_), residual(residual_) {}
  int step;
  double residual;
};

}  // namespace ttss
