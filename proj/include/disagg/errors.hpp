#pragma once

#include <stdexcept>
#include <string>

namespace disagg {

// Agent constraint set is empty: sum of lower bounds exceeds the demand or
// sum of upper bounds falls short of it.
class InfeasibleAgentError : public std::runtime_error {
 public:
  explicit InfeasibleAgentError(const std::string& what) : std::runtime_error(what) {}
};

// Cut extraction found an empty candidate period set: the orbit gap is below
// the numeric floor and the caller has to rerun the projections with a
// tighter convergence tolerance.
class TightenEpsError : public std::runtime_error {
 public:
  explicit TightenEpsError(const std::string& what) : std::runtime_error(what) {}
};

// Safety valve tripped (iterations, halvings or branch-and-bound nodes past
// the configured cap). Carries diagnostics in what().
class IterationCapError : public std::runtime_error {
 public:
  explicit IterationCapError(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent model inputs (aggregate data, parameter recipes, dimensions).
class BuildError : public std::runtime_error {
 public:
  explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

// Simplex could not make progress within its safeguards.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace disagg
