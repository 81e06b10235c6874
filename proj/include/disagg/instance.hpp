#pragma once

#include <cstdint>
#include <vector>

#include "disagg/master.hpp"
#include "disagg/types.hpp"

namespace disagg {

// A complete benchmark scenario: generator/PV parameters scaled by
// kappa = N/20 plus one constraint set per agent.
struct InstanceSpec {
  int n_agents = 0;
  std::uint64_t seed = 0;
  int horizon = 24;
  double kappa = 1.0;
  MicrogridParams params;
  std::vector<AgentConstraints> agents;

  void validate() const;
};

// Deterministic scenario generator. Scaled recipe:
//   theta = [0,70,100,300]*kappa, costs [0.2,0.4,0.5], pg_min = 50*kappa,
//   pg_max = 300*kappa, alpha1 = 4, start cost 15;
//   pv_t = (50(1 - cos((t-6)*2pi/16)) + U[0,10]) * kappa for t in {6..20}
//   (1-based), 0 otherwise;
//   lower ~ U[0,10], upper = lower + U[0,5], demand ~ U[sum lower, sum upper].
// Draw order: pv noise for t = 6..20, then per agent all lowers, all upper
// offsets, then the demand.
InstanceSpec generate_instance(int n_agents, std::uint64_t seed);

}  // namespace disagg
