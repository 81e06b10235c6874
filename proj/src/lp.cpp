#include "disagg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "disagg/errors.hpp"

namespace disagg {

namespace {
const bool kDebug = std::getenv("DISAGG_LP_DEBUG") != nullptr;
constexpr double kPivTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kFeasTol = 1e-9;
constexpr long kIterLimit = 200000;
constexpr int kEtaLimit = 48;
constexpr int kStallLimit = 500;

double feas_tol_for(double bound) { return kFeasTol * std::max(1.0, std::abs(bound)); }
}  // namespace

int LpModel::add_col(double lb, double ub, double objective) {
  obj.push_back(objective);
  col_lb.push_back(lb);
  col_ub.push_back(ub);
  return num_cols() - 1;
}

int LpModel::add_row(double lb, double ub, std::vector<std::pair<int, double>> coef) {
  std::sort(coef.begin(), coef.end());
  rows.push_back(Row{lb, ub, std::move(coef)});
  return num_rows() - 1;
}

LpSolver::LpSolver(const LpModel& model) {
  n_ = model.num_cols();
  m_ = model.num_rows();
  nv_ = n_ + m_;
  obj_ = model.obj;
  obj_offset_ = model.obj_offset;
  lb_ = model.col_lb;
  ub_ = model.col_ub;
  cols_.assign(nv_, {});
  for (int i = 0; i < m_; ++i) {
    const auto& row = model.rows[i];
    for (const auto& [j, v] : row.coef) {
      if (j < 0 || j >= n_) throw BuildError("LpSolver: column index out of range");
      if (v != 0.0) cols_[j].emplace_back(i, v);
    }
    cols_[n_ + i].emplace_back(i, -1.0);
    lb_.push_back(model.rows[i].lb);
    ub_.push_back(model.rows[i].ub);
    obj_.push_back(0.0);
  }
  row_slack_slot_.assign(m_, -1);
  row_dense_pos_.assign(m_, -1);
}

void LpSolver::set_col_bounds(int j, double lb, double ub) {
  lb_[j] = lb;
  ub_[j] = ub;
}

void LpSolver::install_slack_basis() {
  vstat_.assign(nv_, AtLower);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lb_[j]))
      vstat_[j] = AtLower;
    else if (std::isfinite(ub_[j]))
      vstat_[j] = AtUpper;
    else
      vstat_[j] = AtLower;  // free, sits at 0
  }
  basic_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    vstat_[n_ + i] = Basic;
  }
}

bool LpSolver::install_basis(const Basis& warm) {
  if (static_cast<int>(warm.status.size()) != nv_) return false;
  vstat_ = warm.status;
  basic_.clear();
  for (int j = 0; j < nv_; ++j) {
    if (vstat_[j] == Basic) {
      basic_.push_back(j);
    } else if (vstat_[j] == AtLower && !std::isfinite(lb_[j])) {
      vstat_[j] = std::isfinite(ub_[j]) ? AtUpper : AtLower;
    } else if (vstat_[j] == AtUpper && !std::isfinite(ub_[j])) {
      vstat_[j] = std::isfinite(lb_[j]) ? AtLower : AtUpper;
    }
  }
  return static_cast<int>(basic_.size()) == m_;
}

bool LpSolver::factorize() {
  etas_.clear();
  factor_vars_ = basic_;
  std::fill(row_slack_slot_.begin(), row_slack_slot_.end(), -1);
  std::fill(row_dense_pos_.begin(), row_dense_pos_.end(), -1);
  dense_slots_.clear();
  dense_rows_.clear();

  for (int k = 0; k < m_; ++k) {
    const int v = factor_vars_[k];
    if (v >= n_)
      row_slack_slot_[v - n_] = k;
    else
      dense_slots_.push_back(k);
  }
  for (int i = 0; i < m_; ++i)
    if (row_slack_slot_[i] < 0) {
      row_dense_pos_[i] = static_cast<int>(dense_rows_.size());
      dense_rows_.push_back(i);
    }
  const int d = static_cast<int>(dense_rows_.size());
  if (d != static_cast<int>(dense_slots_.size())) return false;

  lu_.assign(static_cast<size_t>(d) * d, 0.0);
  lu_piv_.resize(d);
  for (int b = 0; b < d; ++b) {
    const int var = factor_vars_[dense_slots_[b]];
    for (const auto& [row, val] : cols_[var]) {
      const int pos = row_dense_pos_[row];
      if (pos >= 0) lu_[static_cast<size_t>(pos) * d + b] = val;
    }
  }

  double scale = 1.0;
  for (const double v : lu_) scale = std::max(scale, std::abs(v));
  const double singular_tol = 1e-13 * scale;

  for (int k = 0; k < d; ++k) {
    int piv = k;
    double best = std::abs(lu_[static_cast<size_t>(k) * d + k]);
    for (int i = k + 1; i < d; ++i) {
      const double a = std::abs(lu_[static_cast<size_t>(i) * d + k]);
      if (a > best) {
        best = a;
        piv = i;
      }
    }
    if (best < singular_tol) {
      if (kDebug)
        std::fprintf(stderr, "lp: factorize fail d=%d k=%d best=%.3e scale=%.3e\n", d, k, best, scale);
      return false;
    }
    lu_piv_[k] = piv;
    if (piv != k)
      for (int j = 0; j < d; ++j) std::swap(lu_[static_cast<size_t>(k) * d + j], lu_[static_cast<size_t>(piv) * d + j]);
    const double pivot = lu_[static_cast<size_t>(k) * d + k];
    for (int i = k + 1; i < d; ++i) {
      double& lik = lu_[static_cast<size_t>(i) * d + k];
      if (lik == 0.0) continue;
      lik /= pivot;
      const double f = lik;
      const double* rk = &lu_[static_cast<size_t>(k) * d];
      double* ri = &lu_[static_cast<size_t>(i) * d];
      for (int j = k + 1; j < d; ++j) ri[j] -= f * rk[j];
    }
  }
  return true;
}

std::vector<double> LpSolver::ftran(std::vector<double> rhs_rows) const {
  const int d = static_cast<int>(dense_rows_.size());
  std::vector<double> r(d);
  for (int a = 0; a < d; ++a) r[a] = rhs_rows[dense_rows_[a]];

  for (int k = 0; k < d; ++k)
    if (lu_piv_[k] != k) std::swap(r[k], r[lu_piv_[k]]);
  for (int k = 0; k < d; ++k) {
    const double rk = r[k];
    if (rk == 0.0) continue;
    for (int i = k + 1; i < d; ++i) r[i] -= lu_[static_cast<size_t>(i) * d + k] * rk;
  }
  for (int k = d - 1; k >= 0; --k) {
    double s = r[k];
    const double* row = &lu_[static_cast<size_t>(k) * d];
    for (int j = k + 1; j < d; ++j) s -= row[j] * r[j];
    r[k] = s / row[k];
  }

  std::vector<double> z(m_, 0.0);
  for (int b = 0; b < d; ++b) z[dense_slots_[b]] = r[b];

  // Slack basics: back out their values from the rows they cover.
  std::vector<double> acc(m_, 0.0);
  for (int b = 0; b < d; ++b) {
    const double zb = r[b];
    if (zb == 0.0) continue;
    for (const auto& [row, val] : cols_[factor_vars_[dense_slots_[b]]])
      if (row_slack_slot_[row] >= 0) acc[row] += val * zb;
  }
  for (int i = 0; i < m_; ++i) {
    const int k = row_slack_slot_[i];
    if (k >= 0) z[k] = acc[i] - rhs_rows[i];
  }

  for (const Eta& e : etas_) {
    const double zr = z[e.slot] / e.alpha[e.slot];
    if (zr != 0.0)
      for (int i = 0; i < m_; ++i) z[i] -= e.alpha[i] * zr;
    z[e.slot] = zr;
  }
  return z;
}

std::vector<double> LpSolver::btran(std::vector<double> g_slots) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const Eta& e = *it;
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      if (i != e.slot) s += e.alpha[i] * g_slots[i];
    g_slots[e.slot] = (g_slots[e.slot] - s) / e.alpha[e.slot];
  }

  const int d = static_cast<int>(dense_rows_.size());
  std::vector<double> y(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const int k = row_slack_slot_[i];
    if (k >= 0) y[i] = -g_slots[k];
  }

  std::vector<double> adj(d);
  for (int b = 0; b < d; ++b) {
    double s = g_slots[dense_slots_[b]];
    for (const auto& [row, val] : cols_[factor_vars_[dense_slots_[b]]])
      if (row_slack_slot_[row] >= 0) s -= val * y[row];
    adj[b] = s;
  }

  // Solve D^T v = adj given P D = L U: U^T w = adj, L^T z = w, v = P^T z.
  std::vector<double> w(d);
  for (int k = 0; k < d; ++k) {
    double s = adj[k];
    for (int j = 0; j < k; ++j) s -= lu_[static_cast<size_t>(j) * d + k] * w[j];
    w[k] = s / lu_[static_cast<size_t>(k) * d + k];
  }
  for (int k = d - 1; k >= 0; --k) {
    double s = w[k];
    for (int i = k + 1; i < d; ++i) s -= lu_[static_cast<size_t>(i) * d + k] * w[i];
    w[k] = s;
  }
  for (int k = d - 1; k >= 0; --k)
    if (lu_piv_[k] != k) std::swap(w[k], w[lu_piv_[k]]);

  for (int a = 0; a < d; ++a) y[dense_rows_[a]] = w[a];
  return y;
}

double LpSolver::nonbasic_value(int j) const {
  if (vstat_[j] == AtUpper) return std::isfinite(ub_[j]) ? ub_[j] : 0.0;
  return std::isfinite(lb_[j]) ? lb_[j] : 0.0;
}

void LpSolver::compute_xb() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < nv_; ++j) {
    if (vstat_[j] == Basic) continue;
    const double v = nonbasic_value(j);
    if (v == 0.0) continue;
    for (const auto& [row, val] : cols_[j]) rhs[row] -= val * v;
  }
  xb_ = ftran(std::move(rhs));
}

double LpSolver::infeasibility() const {
  double f = 0.0;
  for (int k = 0; k < m_; ++k) {
    const int v = basic_[k];
    if (xb_[k] < lb_[v]) f += lb_[v] - xb_[k];
    if (xb_[k] > ub_[v]) f += xb_[k] - ub_[v];
  }
  return f;
}

LpResult LpSolver::solve(const Basis* warm) {
  int resets = 0;
  // A failed factorization falls back to the slack basis and re-optimizes.
  auto refactor_or_reset = [&]() -> bool {
    if (factorize()) return true;
    if (++resets > 5) throw NumericalError("LpSolver: repeated singular bases");
    install_slack_basis();
    if (!factorize()) throw NumericalError("LpSolver: slack basis factorization failed");
    return false;
  };

  if (warm == nullptr || warm->empty() || !install_basis(*warm)) install_slack_basis();
  refactor_or_reset();
  compute_xb();

  LpResult res;
  int phase = infeasibility() > kFeasTol * std::max(1.0, static_cast<double>(m_)) ? 1 : 2;
  long iters = 0;
  long stalled = 0;
  bool bland = false;
  int refactor_retries = 0;
  double last_merit = std::numeric_limits<double>::infinity();

  std::vector<double> g(m_), alpha;

  while (true) {
    if (++iters > kIterLimit) throw NumericalError("LpSolver: iteration limit exceeded");

    const double infeas = infeasibility();
    if (phase == 1 && infeas <= kFeasTol * std::max(1.0, static_cast<double>(m_))) {
      phase = 2;
      last_merit = std::numeric_limits<double>::infinity();
      stalled = 0;
      bland = false;
    }

    // Merit for stall detection: infeasibility in phase 1, objective in phase 2.
    double merit;
    if (phase == 1) {
      merit = infeas;
    } else {
      merit = 0.0;
      for (int k = 0; k < m_; ++k) merit += obj_[basic_[k]] * xb_[k];
      for (int j = 0; j < nv_; ++j)
        if (vstat_[j] != Basic) merit += obj_[j] * nonbasic_value(j);
    }
    if (merit < last_merit - 1e-12) {
      last_merit = merit;
      stalled = 0;
      bland = false;
    } else if (++stalled > kStallLimit) {
      bland = true;
    }

    // Pricing.
    for (int k = 0; k < m_; ++k) {
      const int v = basic_[k];
      if (phase == 1) {
        if (xb_[k] < lb_[v] - feas_tol_for(lb_[v]))
          g[k] = -1.0;
        else if (xb_[k] > ub_[v] + feas_tol_for(ub_[v]))
          g[k] = 1.0;
        else
          g[k] = 0.0;
      } else {
        g[k] = obj_[v];
      }
    }
    const std::vector<double> y = btran(g);

    int enter = -1, dir = 0;
    double best_score = bland ? 0.0 : kDualTol;
    for (int j = 0; j < nv_; ++j) {
      if (vstat_[j] == Basic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed, never enters
      double d = (phase == 2 ? obj_[j] : 0.0);
      for (const auto& [row, val] : cols_[j]) d -= y[row] * val;
      const bool is_free = !std::isfinite(lb_[j]) && !std::isfinite(ub_[j]);
      int cand_dir = 0;
      if (vstat_[j] == AtLower || is_free) {
        if (d < -kDualTol) cand_dir = +1;
        if (is_free && d > kDualTol) cand_dir = -1;
      }
      if (vstat_[j] == AtUpper && d > kDualTol) cand_dir = -1;
      if (cand_dir == 0) continue;
      if (bland) {
        enter = j;
        dir = cand_dir;
        break;
      }
      const double score = std::abs(d);
      if (score > best_score) {
        best_score = score;
        enter = j;
        dir = cand_dir;
      }
    }

    if (enter < 0) {
      if (phase == 1) {
        if (infeasibility() <= 1e-7 * std::max(1.0, static_cast<double>(m_))) {
          phase = 2;
          continue;
        }
        res.status = LpStatus::Infeasible;
        break;
      }
      // Optimal: clean up with a fresh factorization and verify.
      if (refactor_retries < 2) {
        ++refactor_retries;
        if (!refactor_or_reset()) {
          compute_xb();
          phase = 1;  // basis was rebuilt from scratch, re-derive the optimum
          continue;
        }
        compute_xb();
        if (infeasibility() > 1e-7 * std::max(1.0, static_cast<double>(m_))) {
          phase = 1;
          continue;
        }
      }
      res.status = LpStatus::Optimal;
      break;
    }

    // Two-pass ratio test: pass 1 finds the tightest tolerance-relaxed
    // limit, pass 2 picks the largest pivot among candidates inside it.
    std::vector<double> rhs(m_, 0.0);
    for (const auto& [row, val] : cols_[enter]) rhs[row] = val;
    alpha = ftran(std::move(rhs));

    const double range = ub_[enter] - lb_[enter];  // may be inf
    struct Cand {
      int slot;
      double lim;
      double pivot;
      int to_stat;
    };
    std::vector<Cand> cands;
    double step_bound = std::isfinite(range) ? range : kInf;

    for (int k = 0; k < m_; ++k) {
      const double rate = -dir * alpha[k];
      if (std::abs(rate) < 1e-11) continue;
      const int v = basic_[k];
      double target;
      int to_stat;
      if (rate > 0) {
        if (phase == 1 && xb_[k] < lb_[v] - feas_tol_for(lb_[v])) {
          target = lb_[v];  // violated below, moving up: blocks at the lower bound
          to_stat = AtLower;
        } else if (phase == 1 && xb_[k] > ub_[v] + feas_tol_for(ub_[v])) {
          continue;  // violated above, moving further up: priced, not blocking
        } else {
          target = ub_[v];
          to_stat = AtUpper;
        }
      } else {
        if (phase == 1 && xb_[k] > ub_[v] + feas_tol_for(ub_[v])) {
          target = ub_[v];
          to_stat = AtUpper;
        } else if (phase == 1 && xb_[k] < lb_[v] - feas_tol_for(lb_[v])) {
          continue;  // violated below, moving further down
        } else {
          target = lb_[v];
          to_stat = AtLower;
        }
      }
      if (!std::isfinite(target)) continue;
      double lim = (target - xb_[k]) / rate;
      if (lim < 0) lim = 0;  // already at/past the bound: degenerate step
      const double tol = 1e-8 * std::max(1.0, std::abs(target));
      step_bound = std::min(step_bound, lim + tol / std::abs(rate));
      cands.push_back({k, lim, alpha[k], to_stat});
    }

    if (!std::isfinite(step_bound)) {
      if (phase == 2) {
        res.status = LpStatus::Unbounded;
        break;
      }
      if (refactor_retries++ < 2 && !etas_.empty()) {
        refactor_or_reset();
        compute_xb();
        phase = 1;
        continue;
      }
      throw NumericalError("LpSolver: unbounded infeasibility direction");
    }

    int leave = -1;
    double step = 0.0, leave_pivot = 0.0;
    int leave_to = AtLower;
    for (const Cand& c : cands) {
      if (c.lim > step_bound) continue;
      const bool better = leave < 0 || (bland ? (c.lim < step - 1e-12 ||
                                                 (c.lim <= step + 1e-12 && basic_[c.slot] < basic_[leave]))
                                              : std::abs(c.pivot) > std::abs(leave_pivot));
      if (better) {
        leave = c.slot;
        step = c.lim;
        leave_pivot = c.pivot;
        leave_to = c.to_stat;
      }
    }

    if (leave < 0 || (std::isfinite(range) && step >= range - 1e-12)) {
      // Bound flip: the entering variable crosses its own range first.
      if (!std::isfinite(range)) throw NumericalError("LpSolver: flip on infinite range");
      for (int k = 0; k < m_; ++k) xb_[k] -= dir * alpha[k] * range;
      vstat_[enter] = vstat_[enter] == AtLower ? AtUpper : AtLower;
      continue;
    }

    if (std::abs(leave_pivot) < kPivTol) {
      // Numerically unusable pivot: refresh the factorization and retry.
      if (refactor_retries++ < 3) {
        if (!refactor_or_reset()) phase = 1;
        compute_xb();
        continue;
      }
      throw NumericalError("LpSolver: pivot below tolerance");
    }

    for (int k = 0; k < m_; ++k) xb_[k] -= dir * alpha[k] * step;
    const double enter_val = nonbasic_value(enter) + dir * step;
    const int leaving_var = basic_[leave];
    vstat_[leaving_var] = static_cast<std::uint8_t>(leave_to);
    vstat_[enter] = Basic;
    basic_[leave] = enter;
    xb_[leave] = enter_val;

    Eta e;
    e.slot = leave;
    e.alpha = alpha;
    etas_.push_back(std::move(e));
    if (static_cast<int>(etas_.size()) >= kEtaLimit) {
      if (!refactor_or_reset()) phase = 1;
      compute_xb();
    }
  }

  res.iterations = iters;
  res.x.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j)
    if (vstat_[j] != Basic) res.x[j] = nonbasic_value(j);
  for (int k = 0; k < m_; ++k)
    if (basic_[k] < n_) res.x[basic_[k]] = xb_[k];
  res.objective = obj_offset_;
  for (int j = 0; j < n_; ++j) res.objective += obj_[j] * res.x[j];
  res.basis.status = vstat_;
  return res;
}

}  // namespace disagg
