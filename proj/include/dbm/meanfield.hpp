#pragma once

#include "dbm/model.hpp"
#include "dbm/stats.hpp"

namespace dbm {

/// Fully factorized posterior marginals for a clamped visible minibatch.
/// marginals[l] has shape (batch x N_{l+1}); entries are Bernoulli means.
struct MeanFieldState {
  std::vector<Matrix> marginals;
  int sweep_count = 0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();

  // Marginals of one batch row as per-layer vectors (for the exact oracle).
  std::vector<Vector> row_marginals(int row) const;
};

// All marginals initialized to 0.5.
MeanFieldState mf_init(const ModelParams& params, int batch_size);

// One sequential pass over layers l = 1..L. Each layer update uses the
// freshest neighboring values; records residual = max |new - old|.
// `v_batch` is (batch x D) with 0/1 entries.
void mf_sweep(const ModelParams& params, const Matrix& v_batch,
              MeanFieldState& state);

// Sweeps until residual < tol or max_sweeps reached. Non-convergence is
// reported via the converged flag, not thrown.
MeanFieldState mf_fixed_point(const ModelParams& params, const Matrix& v_batch,
                              double tol = 1e-6, int max_sweeps = 100);

// E_Q[-dE/dtheta] averaged over the batch: outer products of marginals for
// the weights (v itself for the bottom layer), mean activations for biases.
ParamStats positive_phase_stats(const MeanFieldState& state,
                                const Matrix& v_batch);

}  // namespace dbm
