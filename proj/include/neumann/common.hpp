#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace neumann {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Point = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

/// Failure categories. The CLI maps Input -> exit 2 and Numerical -> exit 3.
enum class ErrorCategory { Input, Numerical };

enum class ErrorCode {
  InvalidField,
  PointOutsideDomain,
  MalformedInput,
  DegenerateCriticalPoint,
  NewtonDivergence,
  StepBudgetExceeded,
  StagnationWithoutCapture,
  NoSaddles,
  ResolutionTooCoarse,
  EmptyMask,
  LiftFailure,
  ConvergenceFailure,
  NoMatchingEigenvalue,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const {
    switch (code_) {
      case ErrorCode::InvalidField:
      case ErrorCode::PointOutsideDomain:
      case ErrorCode::MalformedInput:
        return ErrorCategory::Input;
      default:
        return ErrorCategory::Numerical;
    }
  }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DegenerateCriticalPoint: return "DegenerateCriticalPoint";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::StagnationWithoutCapture: return "StagnationWithoutCapture";
    case ErrorCode::NoSaddles: return "NoSaddles";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::LiftFailure: return "LiftFailure";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NoMatchingEigenvalue: return "NoMatchingEigenvalue";
  }
  return "Unknown";
}

/// Global worker count used by the parallel-safe operations. 0 means hardware concurrency.
void set_jobs(int jobs);
int jobs();

/// Runs fn(i) for i in [0, n) over a fixed static partition, so results written by index
/// are independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Verbosity from NEUMANN_LOG (0 = quiet, 1 = info, 2 = debug).
int log_level();

template <typename... Args>
void log_info(const Args&... args) {
  if (log_level() >= 1) {
    std::cerr << "[neumann] ";
    (std::cerr << ... << args);
    std::cerr << '\n';
  }
}

template <typename... Args>
void log_debug(const Args&... args) {
  if (log_level() >= 2) {
    std::cerr << "[neumann:debug] ";
    (std::cerr << ... << args);
    std::cerr << '\n';
  }
}

}  // namespace neumann
