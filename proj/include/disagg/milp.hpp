#pragma once

#include <optional>
#include <vector>

#include "disagg/lp.hpp"

namespace disagg {

struct MilpModel {
  LpModel lp;
  std::vector<std::uint8_t> is_integer;  // per structural column

  int num_integers() const {
    int c = 0;
    for (auto v : is_integer) c += v != 0;
    return c;
  }
};

enum class MilpStatus { Optimal, Infeasible };

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  long nodes = 0;
  long lp_iterations = 0;
};

struct MilpOptions {
  double int_tol = 1e-6;
  long max_nodes = 2000000;
  // Optional integer-variable pattern evaluated first to seed the incumbent
  // (values rounded onto the integer grid, continuous part re-optimized).
  std::optional<std::vector<double>> hint;
};

// Exact branch-and-bound: best-bound node selection, branching on the most
// fractional integer with lowest-index tie-break, child LPs warm-started from
// the parent basis. Terminates with a zero optimality gap.
MilpResult solve_milp_bb(const MilpModel& model, const MilpOptions& opts = {});

}  // namespace disagg
