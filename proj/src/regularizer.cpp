#include "dbm/regularizer.hpp"

namespace dbm {

namespace {
constexpr double kNormGuard = 1e-8;
}

void RegularizerState::validate(const ModelParams& params) const {
  const size_t L = params.weights.size();
  if (mu.size() != L || alpha.size() != L)
    throw ConfigError("regularizer layer count mismatch");
  for (double m : mu)
    if (!(m >= 0.0)) throw ConfigError("mu must be >= 0");
  for (double a : alpha)
    if (!(a >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(mu_lr_damping > 0.0)) throw ConfigError("mu damping must be positive");
}

Vector column_norms(const Matrix& weights) {
  return weights.colwise().norm().transpose();
}

RegularizerState init_regularizer(const ModelParams& params,
                                  std::vector<double> alpha, double gamma,
                                  double mu_lr_damping) {
  RegularizerState reg;
  reg.alpha = std::move(alpha);
  reg.gamma = gamma;
  reg.mu_lr_damping = mu_lr_damping;
  for (const auto& w : params.weights)
    reg.mu.push_back(column_norms(w).mean());
  reg.validate(params);
  return reg;
}

double penalty_value(const ModelParams& params, const RegularizerState& reg) {
  reg.validate(params);
  double value = 0.0;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    const Vector norms = column_norms(params.weights[l]);
    value += reg.alpha[l] * (norms.array() - reg.mu[l]).square().sum();
  }
  for (size_t l = 0; l + 1 < reg.mu.size(); ++l) {
    const double d = reg.mu[l] - reg.mu[l + 1];
    value += reg.gamma * d * d;
  }
  return value;
}

ParamStats penalty_grad_weights(const ModelParams& params,
                                const RegularizerState& reg) {
  reg.validate(params);
  ParamStats grad = ParamStats::zeros(params);
  for (size_t l = 0; l < params.weights.size(); ++l) {
    const Matrix& w = params.weights[l];
    for (int i = 0; i < w.cols(); ++i) {
      const double n = w.col(i).norm();
      grad.weights[l].col(i) =
          2.0 * reg.alpha[l] * (n - reg.mu[l]) / std::max(n, kNormGuard) * w.col(i);
    }
  }
  return grad;
}

std::vector<double> penalty_grad_mu(const ModelParams& params,
                                    const RegularizerState& reg) {
  reg.validate(params);
  const int L = static_cast<int>(reg.mu.size());
  std::vector<double> grad(L, 0.0);
  for (int l = 0; l < L; ++l) {
    const Vector norms = column_norms(params.weights[l]);
    grad[l] = -2.0 * reg.alpha[l] * (norms.array() - reg.mu[l]).sum();
    if (l + 1 < L) grad[l] += 2.0 * reg.gamma * (reg.mu[l] - reg.mu[l + 1]);
    if (l > 0) grad[l] += 2.0 * reg.gamma * (reg.mu[l] - reg.mu[l - 1]);
  }
  return grad;
}

}  // namespace dbm
