#pragma once

#include "dbm/model.hpp"
#include "dbm/stats.hpp"

namespace dbm {

/// Cap on exhaustive enumeration. 2^20 joint states is about a million,
/// which keeps every oracle call under a few seconds.
struct OracleBudget {
  int max_total_units = 20;
};

// log Z by full joint enumeration (log-sum-exp over all binary states).
double log_partition(const ModelParams& params, OracleBudget budget = {});

// Analytic RBM route: marginalize the larger side in closed form so the sum
// has min(2^D, 2^N) terms. Depth-1 models without laterals only.
double log_partition_rbm_analytic(const ModelParams& params);

// sum_t log P(v_t) with the hidden units summed out exactly.
double exact_log_likelihood(const ModelParams& params,
                            const std::vector<std::vector<bool>>& data,
                            OracleBudget budget = {});

// P(h_unit = 1 | v) by marginalizing all other hidden units. `layer` >= 1.
double exact_posterior_marginal(const ModelParams& params,
                                const std::vector<bool>& v, int layer, int unit,
                                OracleBudget budget = {});

// E[-dE/dtheta | v] under the exact posterior (clamped phase).
ParamStats exact_clamped_stats(const ModelParams& params,
                               const std::vector<bool>& v,
                               OracleBudget budget = {});

// E_P[-dE/dtheta] under the full model distribution (unclamped phase).
ParamStats exact_model_stats(const ModelParams& params, OracleBudget budget = {});

// Gradient of sum_t log P(v_t): sum of clamped stats minus T times the
// unclamped stats.
ParamStats exact_gradient(const ModelParams& params,
                          const std::vector<std::vector<bool>>& data,
                          OracleBudget budget = {});

struct BoundGap {
  double bound;     // L(Q_v), evaluated by enumerating the double sum
  double exact_ll;  // log P(v)
  double kl;        // exact_ll - bound = KL(Q_v || posterior), >= 0
};

// Exact evaluation of the variational lower bound for a fully factorized Q
// over the hidden layers. marginals[l] holds the Bernoulli means of hidden
// layer l+1 (length N_{l+1}).
BoundGap exact_bound_gap(const ModelParams& params, const std::vector<bool>& v,
                         const std::vector<Vector>& marginals,
                         OracleBudget budget = {});

}  // namespace dbm
