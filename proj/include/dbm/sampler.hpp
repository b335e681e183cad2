#pragma once

#include "dbm/model.hpp"
#include "dbm/rng.hpp"
#include "dbm/stats.hpp"

namespace dbm {

/// Persistent negative-phase particles. One counter-based stream per chain,
/// derived from (master_seed, chain index); state is reproducible from the
/// seed and the per-chain draw counters.
struct GibbsChains {
  std::vector<BinaryState> states;
  std::vector<CounterRng> rngs;
  uint64_t master_seed = 0;
  uint64_t steps_taken = 0;

  int chain_count() const { return static_cast<int>(states.size()); }
};

// Chains start i.i.d. Bernoulli(0.5) per unit.
GibbsChains init_chains(const ModelParams& params, int n_chains, uint64_t seed);

// k block-Gibbs iterations per chain: sample every even layer (v, h2, ...)
// given the odd layers, then every odd layer given the even ones. Each unit
// is drawn Bernoulli from its factorized conditional.
void gibbs_step(const ModelParams& params, GibbsChains& chains, int k = 1);

// Monte-Carlo estimate of E_P[-dE/dtheta] from the current binary states.
ParamStats negative_phase_stats(const ModelParams& params,
                                const GibbsChains& chains);

}  // namespace dbm
