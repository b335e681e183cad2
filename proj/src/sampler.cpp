#include "dbm/sampler.hpp"

namespace dbm {

GibbsChains init_chains(const ModelParams& params, int n_chains, uint64_t seed) {
  if (n_chains < 1) throw ConfigError("need at least one chain");
  params.validate();
  GibbsChains chains;
  chains.master_seed = seed;
  chains.states.reserve(n_chains);
  chains.rngs.reserve(n_chains);
  for (int c = 0; c < n_chains; ++c) {
    CounterRng rng(seed, static_cast<uint64_t>(c));
    BinaryState s = BinaryState::zeros(params);
    for (auto& layer : s.layers)
      for (size_t i = 0; i < layer.size(); ++i) layer[i] = rng.bernoulli(0.5);
    chains.states.push_back(std::move(s));
    chains.rngs.push_back(rng);
  }
  return chains;
}

void gibbs_step(const ModelParams& params, GibbsChains& chains, int k) {
  if (k < 1) throw ConfigError("gibbs step count must be >= 1");
  const int L = params.depth();
  for (int c = 0; c < chains.chain_count(); ++c) {
    BinaryState& state = chains.states[c];
    state.check_shape(params);
    CounterRng& rng = chains.rngs[c];
    for (int step = 0; step < k; ++step) {
      for (int parity = 0; parity < 2; ++parity) {
        for (int l = parity; l <= L; l += 2) {
          const Vector p = layer_conditional(params, state, l);
          auto& bits = state.layers[l];
          for (int i = 0; i < p.size(); ++i) bits[i] = rng.bernoulli(p[i]);
        }
      }
    }
  }
  chains.steps_taken += static_cast<uint64_t>(k);
}

ParamStats negative_phase_stats(const ModelParams& params,
                                const GibbsChains& chains) {
  ParamStats stats = ParamStats::zeros(params);
  const int L = params.depth();
  const double n = static_cast<double>(chains.chain_count());
  for (const auto& state : chains.states) {
    std::vector<Vector> layers(L + 1);
    for (int l = 0; l <= L; ++l) layers[l] = state.layer_as_vector(l);
    stats.vis_bias += layers[0];
    for (int l = 0; l < L; ++l) {
      stats.weights[l] += layers[l] * layers[l + 1].transpose();
      stats.hid_bias[l] += layers[l + 1];
    }
  }
  stats *= 1.0 / n;
  return stats;
}

}  // namespace dbm
