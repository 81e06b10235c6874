#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace disagg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear program in row/column form:
//   minimize obj . x + obj_offset
//   s.t.  row_lb <= A x <= row_ub,  col_lb <= x <= col_ub.
struct LpModel {
  struct Row {
    double lb = -kInf;
    double ub = kInf;
    std::vector<std::pair<int, double>> coef;  // (column, value), column-sorted
  };

  std::vector<double> obj, col_lb, col_ub;
  std::vector<Row> rows;
  double obj_offset = 0.0;

  int num_cols() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_col(double lb, double ub, double objective);
  int add_row(double lb, double ub, std::vector<std::pair<int, double>> coef);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum VarStatus : std::uint8_t { AtLower = 0, AtUpper = 1, Basic = 2 };

// Status per variable, structural columns first, then one slack per row.
struct Basis {
  std::vector<std::uint8_t> status;
  bool empty() const { return status.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural columns
  Basis basis;
  long iterations = 0;
};

// Bounded-variable primal simplex. Two phases (composite infeasibility
// minimization, then the true objective), Dantzig pricing with a Bland
// fallback after stalls, product-form eta updates over an LU factorization
// that eliminates slack basics without fill. Deterministic for a fixed
// instance; warm-startable from a previous basis.
class LpSolver {
 public:
  explicit LpSolver(const LpModel& model);

  // Column bound edits for branch-and-bound; the matrix stays fixed.
  void set_col_bounds(int j, double lb, double ub);
  double col_lb(int j) const { return lb_[j]; }
  double col_ub(int j) const { return ub_[j]; }

  LpResult solve(const Basis* warm = nullptr);

 private:
  struct Eta {
    int slot;
    std::vector<double> alpha;
  };

  bool factorize();
  void compute_xb();
  std::vector<double> ftran(std::vector<double> rhs_rows) const;
  std::vector<double> btran(std::vector<double> g_slots) const;
  double nonbasic_value(int j) const;
  double infeasibility() const;
  void install_slack_basis();
  bool install_basis(const Basis& warm);

  int n_ = 0;   // structural columns
  int m_ = 0;   // rows
  int nv_ = 0;  // n + m

  // Column-wise matrix including slack columns (slack j = column n+i, single -1).
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> obj_, lb_, ub_;
  double obj_offset_ = 0.0;

  std::vector<std::uint8_t> vstat_;
  std::vector<int> basic_;  // variable per basis slot
  std::vector<double> xb_;  // value per basis slot

  // Factorization of the basis: slack basics pivot their own row, the
  // remaining dense block over structural basics is LU-factored. The
  // factorization snapshots the variable layout (factor_vars_) because
  // basic_ keeps mutating as etas accumulate on top.
  std::vector<int> factor_vars_;    // variable per slot at factorization time
  std::vector<int> dense_rows_;     // rows handled by the dense block
  std::vector<int> dense_slots_;    // slots (structural basics) in the block
  std::vector<int> row_slack_slot_; // row -> slot of covering slack basic, or -1
  std::vector<int> row_dense_pos_;  // row -> position in dense_rows_, or -1
  std::vector<double> lu_;
  std::vector<int> lu_piv_;
  std::vector<Eta> etas_;
};

}  // namespace disagg
