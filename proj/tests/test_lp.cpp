#include "disagg/lp.hpp"

#include "disagg/milp.hpp"
#include "test_common.hpp"

using namespace disagg;

static void test_basic_lp() {
  {
    // min -2x - y s.t. x + y <= 1, 0 <= x,y <= 1  ->  (1, 0), objective -2.
    LpModel m;
    m.add_col(0, 1, -2.0);
    m.add_col(0, 1, -1.0);
    m.add_row(-kInf, 1.0, {{0, 1.0}, {1, 1.0}});
    LpSolver s(m);
    const LpResult r = s.solve();
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK_NEAR(r.objective, -2.0, 1e-9);
    CHECK_NEAR(r.x[0], 1.0, 1e-9);
    CHECK_NEAR(r.x[1], 0.0, 1e-9);
  }
  {
    // Equality row: min x + y s.t. x + 2y = 4, 0 <= x,y <= 3  ->  (0, 2).
    LpModel m;
    m.add_col(0, 3, 1.0);
    m.add_col(0, 3, 1.0);
    m.add_row(4.0, 4.0, {{0, 1.0}, {1, 2.0}});
    const LpResult r = LpSolver(m).solve();
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK_NEAR(r.objective, 2.0, 1e-9);
    CHECK_NEAR(r.x[1], 2.0, 1e-9);
  }
  {
    // Infeasible: x + y >= 5 with x,y <= 1.
    LpModel m;
    m.add_col(0, 1, 0.0);
    m.add_col(0, 1, 0.0);
    m.add_row(5.0, kInf, {{0, 1.0}, {1, 1.0}});
    CHECK(LpSolver(m).solve().status == LpStatus::Infeasible);
  }
  {
    // Unbounded: min -x, x >= 0 free above.
    LpModel m;
    m.add_col(0, kInf, -1.0);
    CHECK(LpSolver(m).solve().status == LpStatus::Unbounded);
  }
  {
    // No rows at all: pure bound flips.
    LpModel m;
    m.add_col(0, 5, -3.0);
    m.add_col(-2, 2, 1.0);
    const LpResult r = LpSolver(m).solve();
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK_NEAR(r.objective, -17.0, 1e-9);
  }
}

static void test_negative_lower_bounds_and_ranges() {
  // min x - y s.t. -2 <= x - y (G row), bounds x in [-3, 3], y in [-1, 4].
  LpModel m;
  m.add_col(-3, 3, 1.0);
  m.add_col(-1, 4, -1.0);
  m.add_row(-2.0, kInf, {{0, 1.0}, {1, -1.0}});
  const LpResult r = LpSolver(m).solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK_NEAR(r.x[0] - r.x[1], -2.0, 1e-9);
  CHECK_NEAR(r.objective, -2.0, 1e-9);
}

static void test_warm_start_matches_cold() {
  Rng rng = Rng::seeded(61);
  for (int it = 0; it < 50; ++it) {
    const int n = rng.uniform_int(2, 8), rows = rng.uniform_int(1, 6);
    LpModel m;
    for (int j = 0; j < n; ++j) {
      const double lo = rng.uniform(-5.0, 0.0);
      m.add_col(lo, lo + rng.uniform(0.5, 8.0), rng.uniform(-3.0, 3.0));
    }
    for (int i = 0; i < rows; ++i) {
      std::vector<std::pair<int, double>> coef;
      for (int j = 0; j < n; ++j)
        if (rng.uniform() < 0.6) coef.emplace_back(j, rng.uniform(-2.0, 2.0));
      const double mid = rng.uniform(-4.0, 4.0);
      m.add_row(mid - rng.uniform(0.0, 6.0) - 6.0, mid + rng.uniform(0.0, 6.0), std::move(coef));
    }
    LpSolver s(m);
    const LpResult cold = s.solve();
    if (cold.status != LpStatus::Optimal) continue;

    // Tighten one bound, solve warm and cold; results must agree.
    const int j = rng.uniform_int(0, n - 1);
    const double new_lb = 0.5 * (m.col_lb[j] + cold.x[j]);
    s.set_col_bounds(j, new_lb, m.col_ub[j]);
    const LpResult warm = s.solve(&cold.basis);
    LpModel m2 = m;
    m2.col_lb[j] = new_lb;
    const LpResult cold2 = LpSolver(m2).solve();
    CHECK(warm.status == cold2.status);
    if (warm.status == LpStatus::Optimal) CHECK_NEAR(warm.objective, cold2.objective, 1e-7);
  }
}

static void test_small_milp() {
  // min -(x1+x2+x3) s.t. 2(x1+x2+x3) <= 3, binaries: exactly one can be 1.
  MilpModel m;
  for (int j = 0; j < 3; ++j) m.lp.add_col(0, 1, -1.0);
  m.lp.add_row(-kInf, 3.0, {{0, 2.0}, {1, 2.0}, {2, 2.0}});
  m.is_integer = {1, 1, 1};
  const MilpResult r = solve_milp_bb(m);
  REQUIRE(r.status == MilpStatus::Optimal);
  CHECK_NEAR(r.objective, -1.0, 1e-9);
  CHECK(r.nodes >= 1);
}

static void test_milp_against_enumeration() {
  Rng rng = Rng::seeded(67);
  for (int it = 0; it < 40; ++it) {
    const int nb = rng.uniform_int(1, 6), nc = rng.uniform_int(0, 3), rows = rng.uniform_int(1, 5);
    MilpModel m;
    for (int j = 0; j < nb; ++j) m.lp.add_col(0, 1, rng.uniform(-4.0, 4.0));
    for (int j = 0; j < nc; ++j) m.lp.add_col(0, rng.uniform(0.5, 4.0), rng.uniform(-2.0, 2.0));
    m.is_integer.assign(nb + nc, 0);
    for (int j = 0; j < nb; ++j) m.is_integer[j] = 1;
    for (int i = 0; i < rows; ++i) {
      std::vector<std::pair<int, double>> coef;
      for (int j = 0; j < nb + nc; ++j)
        if (rng.uniform() < 0.7) coef.emplace_back(j, rng.uniform(-2.0, 2.0));
      m.lp.add_row(-kInf, rng.uniform(-1.0, 4.0), std::move(coef));
    }

    const MilpResult bb = solve_milp_bb(m);

    // Exhaustive enumeration over binary assignments, one LP per leaf.
    double best = kInf;
    LpSolver leaf(m.lp);
    for (int mask = 0; mask < (1 << nb); ++mask) {
      for (int j = 0; j < nb; ++j) {
        const double v = (mask >> j) & 1;
        leaf.set_col_bounds(j, v, v);
      }
      const LpResult r = leaf.solve();
      if (r.status == LpStatus::Optimal) best = std::min(best, r.objective);
    }

    if (best == kInf) {
      CHECK(bb.status == MilpStatus::Infeasible);
    } else {
      REQUIRE(bb.status == MilpStatus::Optimal);
      CHECK_NEAR(bb.objective, best, 1e-8);
    }
  }
}

static void run_all() {
  test_basic_lp();
  test_negative_lower_bounds_and_ranges();
  test_warm_start_matches_cold();
  test_small_milp();
  test_milp_against_enumeration();
}

TEST_MAIN("lp")
