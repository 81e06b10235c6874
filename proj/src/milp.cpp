#include "disagg/milp.hpp"

#include <cmath>
#include <queue>

#include "disagg/errors.hpp"

namespace disagg {

namespace {

struct Node {
  double bound;
  long id;
  std::vector<std::pair<int, std::pair<double, double>>> fixings;  // (col, (lb, ub))
  Basis basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;                                // FIFO among equal bounds
  }
};

}  // namespace

MilpResult solve_milp_bb(const MilpModel& model, const MilpOptions& opts) {
  MilpResult res;
  LpSolver solver(model.lp);
  const int n = model.lp.num_cols();

  std::vector<int> int_cols;
  for (int j = 0; j < n; ++j)
    if (model.is_integer[j]) int_cols.push_back(j);

  const auto base_lb = model.lp.col_lb;
  const auto base_ub = model.lp.col_ub;
  auto reset_bounds = [&] {
    for (int j : int_cols) solver.set_col_bounds(j, base_lb[j], base_ub[j]);
  };

  double incumbent_obj = kInf;
  std::vector<double> incumbent_x;

  // Seed the incumbent from a hint pattern when one is supplied.
  if (opts.hint && static_cast<int>(opts.hint->size()) == n) {
    bool valid = true;
    for (int j : int_cols) {
      const double v = std::round((*opts.hint)[j]);
      if (v < base_lb[j] - 0.5 || v > base_ub[j] + 0.5) {
        valid = false;
        break;
      }
      solver.set_col_bounds(j, v, v);
    }
    if (valid) {
      const LpResult r = solver.solve();
      res.lp_iterations += r.iterations;
      if (r.status == LpStatus::Optimal) {
        incumbent_obj = r.objective;
        incumbent_x = r.x;
      }
    }
    reset_bounds();
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;

  {
    Node root;
    root.bound = -kInf;
    root.id = next_id++;
    open.push(std::move(root));
  }

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_obj - 1e-9) continue;
    if (++res.nodes > opts.max_nodes)
      throw IterationCapError("solve_milp_bb: node cap exceeded");

    reset_bounds();
    for (const auto& [j, b] : node.fixings) solver.set_col_bounds(j, b.first, b.second);

    const LpResult r = solver.solve(node.basis.empty() ? nullptr : &node.basis);
    res.lp_iterations += r.iterations;
    if (r.status == LpStatus::Infeasible) continue;
    if (r.status == LpStatus::Unbounded) throw NumericalError("solve_milp_bb: unbounded relaxation");
    if (r.objective >= incumbent_obj - 1e-9) continue;

    int branch_col = -1;
    double branch_frac = 0.0, branch_val = 0.0;
    for (int j : int_cols) {
      const double v = r.x[j];
      const double f = std::abs(v - std::round(v));
      if (f > opts.int_tol && f > branch_frac + 1e-12) {
        branch_frac = f;
        branch_col = j;
        branch_val = v;
      }
    }

    if (branch_col < 0) {
      // Integral: new incumbent.
      if (r.objective < incumbent_obj - 1e-12) {
        incumbent_obj = r.objective;
        incumbent_x = r.x;
        for (int j : int_cols) incumbent_x[j] = std::round(incumbent_x[j]);
      }
      continue;
    }

    const double floor_v = std::floor(branch_val);
    for (int side = 0; side < 2; ++side) {
      Node child;
      child.bound = r.objective;
      child.id = next_id++;
      child.fixings = node.fixings;
      if (side == 0)
        child.fixings.emplace_back(branch_col,
                                   std::make_pair(base_lb[branch_col], floor_v));
      else
        child.fixings.emplace_back(branch_col,
                                   std::make_pair(floor_v + 1.0, base_ub[branch_col]));
      child.basis = r.basis;
      if (child.bound < incumbent_obj - 1e-9) open.push(std::move(child));
    }
  }

  if (!incumbent_x.empty()) {
    res.status = MilpStatus::Optimal;
    res.objective = incumbent_obj;
    res.x = std::move(incumbent_x);
  }
  return res;
}

}  // namespace disagg
