#include "dbm/exact.hpp"

#include <cmath>
#include <limits>

namespace dbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_budget(const ModelParams& params, const OracleBudget& budget) {
  if (params.total_units() > budget.max_total_units)
    throw BudgetError("model has " + std::to_string(params.total_units()) +
                      " units, oracle budget is " +
                      std::to_string(budget.max_total_units));
}

// Plain scalar-loop energy, kept independent of the Eigen-backed
// implementations in model.cpp. This is the oracle of record.
double energy_scalar(const ModelParams& p, const BinaryState& s) {
  const int L = p.depth();
  double e = 0.0;
  for (int j = 0; j < p.layer_sizes[0]; ++j)
    if (s.layers[0][j]) e -= p.vis_bias[j];
  for (int l = 0; l < L; ++l) {
    for (int i = 0; i < p.layer_sizes[l + 1]; ++i) {
      if (!s.layers[l + 1][i]) continue;
      e -= p.hid_bias[l][i];
      for (int j = 0; j < p.layer_sizes[l]; ++j)
        if (s.layers[l][j]) e -= p.weights[l](j, i);
    }
  }
  if (p.lateral_vis) {
    const Matrix& u = *p.lateral_vis;
    for (int j = 0; j < p.layer_sizes[0]; ++j)
      for (int j2 = 0; j2 < p.layer_sizes[0]; ++j2)
        if (s.layers[0][j] && s.layers[0][j2]) e -= 0.5 * u(j, j2);
  }
  if (p.lateral_hid) {
    const Matrix& v = *p.lateral_hid;
    for (int i = 0; i < p.layer_sizes[1]; ++i)
      for (int i2 = 0; i2 < p.layer_sizes[1]; ++i2)
        if (s.layers[1][i] && s.layers[1][i2]) e -= 0.5 * v(i, i2);
  }
  return e;
}

// Visit every assignment of the layers in [first_layer, last_layer],
// leaving the other layers of `state` untouched (clamped).
template <typename F>
void enumerate_layers(const ModelParams& params, BinaryState& state,
                      int first_layer, int last_layer, F&& visit) {
  int n = 0;
  for (int l = first_layer; l <= last_layer; ++l) n += params.layer_sizes[l];
  const uint64_t total = uint64_t{1} << n;
  for (uint64_t code = 0; code < total; ++code) {
    uint64_t bits = code;
    for (int l = first_layer; l <= last_layer; ++l) {
      for (int i = 0; i < params.layer_sizes[l]; ++i) {
        state.layers[l][i] = (bits & 1u) != 0;
        bits >>= 1;
      }
    }
    visit(state);
  }
}

}  // namespace

double log_partition(const ModelParams& params, OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  BinaryState s = BinaryState::zeros(params);
  double lse = kNegInf;
  enumerate_layers(params, s, 0, params.depth(), [&](const BinaryState& st) {
    lse = log_add_exp(lse, -energy_scalar(params, st));
  });
  return lse;
}

double log_partition_rbm_analytic(const ModelParams& params) {
  params.validate();
  if (params.depth() != 1 || params.has_laterals())
    throw DimensionError("analytic partition sum requires a plain RBM");
  const int D = params.layer_sizes[0];
  const int N = params.layer_sizes[1];
  // Enumerate the smaller side; marginalize the other in closed form via
  // prod_i (1 + exp(input_i)).
  const bool enumerate_visible = D <= N;
  const int n_enum = enumerate_visible ? D : N;
  double lse = kNegInf;
  for (uint64_t code = 0; code < (uint64_t{1} << n_enum); ++code) {
    Vector x(n_enum);
    for (int i = 0; i < n_enum; ++i) x[i] = (code >> i) & 1u ? 1.0 : 0.0;
    double term;
    if (enumerate_visible) {
      term = params.vis_bias.dot(x);
      const Vector input = params.weights[0].transpose() * x + params.hid_bias[0];
      for (int i = 0; i < N; ++i) term += std::log1p(std::exp(std::min(input[i], 700.0)));
    } else {
      term = params.hid_bias[0].dot(x);
      const Vector input = params.weights[0] * x + params.vis_bias;
      for (int j = 0; j < D; ++j) term += std::log1p(std::exp(std::min(input[j], 700.0)));
    }
    lse = log_add_exp(lse, term);
  }
  return lse;
}

double exact_log_likelihood(const ModelParams& params,
                            const std::vector<std::vector<bool>>& data,
                            OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  const double log_z = log_partition(params, budget);
  double total = 0.0;
  BinaryState s = BinaryState::zeros(params);
  for (const auto& v : data) {
    if (static_cast<int>(v.size()) != params.layer_sizes[0])
      throw DimensionError("data vector length mismatch");
    s.layers[0] = v;
    double lse = kNegInf;
    enumerate_layers(params, s, 1, params.depth(), [&](const BinaryState& st) {
      lse = log_add_exp(lse, -energy_scalar(params, st));
    });
    total += lse - log_z;
  }
  return total;
}

double exact_posterior_marginal(const ModelParams& params,
                                const std::vector<bool>& v, int layer, int unit,
                                OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  if (layer < 1 || layer > params.depth())
    throw DimensionError("posterior marginal needs a hidden layer index");
  if (unit < 0 || unit >= params.layer_sizes[layer])
    throw DimensionError("unit index out of range");
  BinaryState s = BinaryState::zeros(params);
  s.layers[0] = v;
  double lse_all = kNegInf;
  double lse_on = kNegInf;
  enumerate_layers(params, s, 1, params.depth(), [&](const BinaryState& st) {
    const double w = -energy_scalar(params, st);
    lse_all = log_add_exp(lse_all, w);
    if (st.layers[layer][unit]) lse_on = log_add_exp(lse_on, w);
  });
  return std::exp(lse_on - lse_all);
}

namespace {

// Accumulates E[-dE/dtheta] over the states visited by `enumerate`, weighted
// by the Boltzmann factor, normalized at the end.
template <typename Enumerate>
ParamStats expected_stats(const ModelParams& params, Enumerate&& enumerate) {
  // First pass: normalizer.
  double lse = kNegInf;
  enumerate([&](const BinaryState& st) {
    lse = log_add_exp(lse, -energy_scalar(params, st));
  });
  ParamStats acc = ParamStats::zeros(params);
  const int L = params.depth();
  enumerate([&](const BinaryState& st) {
    const double w = std::exp(-energy_scalar(params, st) - lse);
    for (int j = 0; j < params.layer_sizes[0]; ++j)
      if (st.layers[0][j]) acc.vis_bias[j] += w;
    for (int l = 0; l < L; ++l) {
      for (int i = 0; i < params.layer_sizes[l + 1]; ++i) {
        if (!st.layers[l + 1][i]) continue;
        acc.hid_bias[l][i] += w;
        for (int j = 0; j < params.layer_sizes[l]; ++j)
          if (st.layers[l][j]) acc.weights[l](j, i) += w;
      }
    }
  });
  return acc;
}

}  // namespace

ParamStats exact_clamped_stats(const ModelParams& params,
                               const std::vector<bool>& v, OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  if (static_cast<int>(v.size()) != params.layer_sizes[0])
    throw DimensionError("data vector length mismatch");
  BinaryState s = BinaryState::zeros(params);
  s.layers[0] = v;
  return expected_stats(params, [&](auto&& visit) {
    enumerate_layers(params, s, 1, params.depth(), visit);
  });
}

ParamStats exact_model_stats(const ModelParams& params, OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  BinaryState s = BinaryState::zeros(params);
  return expected_stats(params, [&](auto&& visit) {
    enumerate_layers(params, s, 0, params.depth(), visit);
  });
}

ParamStats exact_gradient(const ModelParams& params,
                          const std::vector<std::vector<bool>>& data,
                          OracleBudget budget) {
  ParamStats grad = ParamStats::zeros(params);
  for (const auto& v : data) grad += exact_clamped_stats(params, v, budget);
  ParamStats model = exact_model_stats(params, budget);
  model *= static_cast<double>(data.size());
  grad -= model;
  return grad;
}

BoundGap exact_bound_gap(const ModelParams& params, const std::vector<bool>& v,
                         const std::vector<Vector>& marginals,
                         OracleBudget budget) {
  params.validate();
  check_budget(params, budget);
  const int L = params.depth();
  if (static_cast<int>(marginals.size()) != L)
    throw DimensionError("marginal layer count mismatch");
  for (int l = 0; l < L; ++l) {
    if (marginals[l].size() != params.layer_sizes[l + 1])
      throw DimensionError("marginal length mismatch at layer " + std::to_string(l));
    for (int i = 0; i < marginals[l].size(); ++i) {
      const double q = marginals[l][i];
      if (!(q >= 0.0 && q <= 1.0)) throw DimensionError("marginal outside [0,1]");
    }
  }
  const double log_z = log_partition(params, budget);
  BinaryState s = BinaryState::zeros(params);
  s.layers[0] = v;
  double bound = 0.0;
  double lse = kNegInf;
  enumerate_layers(params, s, 1, L, [&](const BinaryState& st) {
    const double neg_e = -energy_scalar(params, st);
    lse = log_add_exp(lse, neg_e);
    // Q(h) and log Q(h) for this configuration.
    double q = 1.0;
    double log_q = 0.0;
    for (int l = 0; l < L; ++l) {
      for (int i = 0; i < params.layer_sizes[l + 1]; ++i) {
        const double m = marginals[l][i];
        const double p_bit = st.layers[l + 1][i] ? m : 1.0 - m;
        q *= p_bit;
        log_q += std::log(p_bit);
      }
    }
    if (q > 0.0) bound += q * (neg_e - log_z - log_q);
  });
  BoundGap out;
  out.bound = bound;
  out.exact_ll = lse - log_z;
  out.kl = out.exact_ll - out.bound;
  return out;
}

}  // namespace dbm
