#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dbm/errors.hpp"

namespace dbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numerically stable logistic function. Saturates for |x| beyond ~500.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-std::min(x, 500.0)));
  }
  const double e = std::exp(std::max(x, -500.0));
  return e / (1.0 + e);
}

/// Layer-structured parameters for a Boltzmann machine.
///
/// layer_sizes = [D, N1, ..., NL]. weights[l] couples layer l to layer l+1
/// and has shape (size_l x size_{l+1}). Lateral matrices U (visible-visible)
/// and V (hidden-hidden) are optional and only used for general-BM energy
/// evaluation with a single hidden layer; they must be symmetric with zero
/// diagonal.
struct ModelParams {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;   // weights[l]: size_l x size_{l+1}
  Vector vis_bias;               // length D
  std::vector<Vector> hid_bias;  // hid_bias[l]: length size_{l+1}
  std::optional<Matrix> lateral_vis;  // U: D x D
  std::optional<Matrix> lateral_hid;  // V: N x N (depth-1 models only)

  int depth() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int num_visible() const { return layer_sizes.front(); }
  int total_units() const;
  bool has_laterals() const { return lateral_vis.has_value() || lateral_hid.has_value(); }

  static ModelParams zeros(const std::vector<int>& layer_sizes);

  // Throws DimensionError on any shape/invariant violation (asymmetric or
  // nonzero-diagonal laterals, NaN/Inf entries, mismatched shapes).
  void validate() const;
};

/// One joint binary configuration, one bit vector per layer (v := layer 0).
struct BinaryState {
  std::vector<std::vector<bool>> layers;

  static BinaryState zeros(const ModelParams& params);
  Vector layer_as_vector(int layer) const;
  void check_shape(const ModelParams& params) const;
};

// Eq.-1-style general BM energy; requires exactly one hidden layer and
// accepts lateral couplings.
//   E = -1/2 v'Uv - 1/2 h'Vh - v'Wh - b'v - d'h
double energy_bm(const ModelParams& params, const BinaryState& state);

// Chained bipartite energy for a depth-L model (laterals not allowed):
//   E = -sum_l h(l)' W(l) h(l+1) - b'v - sum_l d(l)' h(l)
// For L=1 this is the RBM energy.
double energy_dbm(const ModelParams& params, const BinaryState& state);

// P(unit=1 | everything else) = sigmoid of the unit's total input.
double unit_conditional(const ModelParams& params, const BinaryState& state,
                        int layer, int unit);

// Factorized conditional of a whole layer given its neighbors in `state`.
// Laterals unsupported (the factorization requires bipartite structure).
Vector layer_conditional(const ModelParams& params, const BinaryState& state,
                         int layer);

}  // namespace dbm
