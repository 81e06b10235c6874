#include "disagg/instance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "disagg/rng.hpp"

namespace disagg {

void InstanceSpec::validate() const {
  if (n_agents != static_cast<int>(agents.size())) throw BuildError("instance: agent count mismatch");
  params.validate();
  if (params.horizon != horizon) throw BuildError("instance: horizon mismatch");
  for (const auto& a : agents) {
    if (a.periods() != horizon) throw BuildError("instance: agent horizon mismatch");
    a.validate();
  }
}

InstanceSpec generate_instance(int n_agents, std::uint64_t seed) {
  if (n_agents < 2) throw std::invalid_argument("generate_instance: need at least two agents");
  const int T = 24;
  const double kappa = n_agents / 20.0;

  InstanceSpec spec;
  spec.n_agents = n_agents;
  spec.seed = seed;
  spec.horizon = T;
  spec.kappa = kappa;

  spec.params.horizon = T;
  spec.params.theta = {0.0, 70.0 * kappa, 100.0 * kappa, 300.0 * kappa};
  spec.params.marginal_costs = {0.2, 0.4, 0.5};
  spec.params.alpha1 = 4.0;
  spec.params.start_cost = 15.0;
  spec.params.pg_min = 50.0 * kappa;
  spec.params.pg_max = 300.0 * kappa;

  Rng rng = Rng::stream(seed, kStreamInstance);

  spec.params.pv.assign(T, 0.0);
  for (int t = 6; t <= 20; ++t) {  // 1-based daylight window
    const double shape = 50.0 * (1.0 - std::cos((t - 6) * 2.0 * std::numbers::pi / 16.0));
    spec.params.pv[t - 1] = (shape + rng.uniform(0.0, 10.0)) * kappa;
  }

  spec.agents.resize(n_agents);
  for (int n = 0; n < n_agents; ++n) {
    AgentConstraints& a = spec.agents[n];
    a.lower.resize(T);
    a.upper.resize(T);
    for (int t = 0; t < T; ++t) a.lower[t] = rng.uniform(0.0, 10.0);
    for (int t = 0; t < T; ++t) a.upper[t] = a.lower[t] + rng.uniform(0.0, 5.0);
    a.demand = rng.uniform(a.lower_sum(), a.upper_sum());
  }

  spec.validate();
  return spec;
}

}  // namespace disagg
