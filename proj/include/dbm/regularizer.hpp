#pragma once

#include "dbm/model.hpp"
#include "dbm/stats.hpp"

namespace dbm {

/// Norm-coupling penalty state: one target norm mu per layer, per-layer
/// strengths alpha, and a spring gamma tying adjacent mu's together.
struct RegularizerState {
  std::vector<double> mu;     // one per weight layer, >= 0
  std::vector<double> alpha;  // one per weight layer, >= 0
  double gamma = 1.0;
  double mu_lr_damping = 1000.0;

  void validate(const ModelParams& params) const;
};

// Euclidean norm of each column (one per upper-layer unit).
Vector column_norms(const Matrix& weights);

// mu initialized to the mean initial column norm of each layer, so the
// penalty starts at (near) zero.
RegularizerState init_regularizer(const ModelParams& params,
                                  std::vector<double> alpha, double gamma,
                                  double mu_lr_damping = 1000.0);

// sum_l alpha_l sum_i (||W(l)_.i|| - mu_l)^2 + gamma sum_l (mu_l - mu_{l+1})^2
double penalty_value(const ModelParams& params, const RegularizerState& reg);

// d penalty / d W. Columns at the origin get a zero gradient (epsilon guard
// on the norm direction). Biases are untouched by the penalty.
ParamStats penalty_grad_weights(const ModelParams& params,
                                const RegularizerState& reg);

// d penalty / d mu_l, including both spring neighbors where present.
std::vector<double> penalty_grad_mu(const ModelParams& params,
                                    const RegularizerState& reg);

}  // namespace dbm
