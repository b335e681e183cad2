#pragma once

#include "dbm/model.hpp"

namespace dbm {

/// A value with the same shape as the trainable parameters (weights and
/// biases). Used for sufficient statistics of both phases and for gradients.
struct ParamStats {
  std::vector<Matrix> weights;
  Vector vis_bias;
  std::vector<Vector> hid_bias;

  static ParamStats zeros(const ModelParams& params) {
    ParamStats s;
    for (const auto& w : params.weights) s.weights.emplace_back(Matrix::Zero(w.rows(), w.cols()));
    s.vis_bias = Vector::Zero(params.vis_bias.size());
    for (const auto& d : params.hid_bias) s.hid_bias.emplace_back(Vector::Zero(d.size()));
    return s;
  }

  ParamStats& operator+=(const ParamStats& o) {
    for (size_t l = 0; l < weights.size(); ++l) weights[l] += o.weights[l];
    vis_bias += o.vis_bias;
    for (size_t l = 0; l < hid_bias.size(); ++l) hid_bias[l] += o.hid_bias[l];
    return *this;
  }
  ParamStats& operator-=(const ParamStats& o) {
    for (size_t l = 0; l < weights.size(); ++l) weights[l] -= o.weights[l];
    vis_bias -= o.vis_bias;
    for (size_t l = 0; l < hid_bias.size(); ++l) hid_bias[l] -= o.hid_bias[l];
    return *this;
  }
  ParamStats& operator*=(double c) {
    for (auto& w : weights) w *= c;
    vis_bias *= c;
    for (auto& d : hid_bias) d *= c;
    return *this;
  }

  bool all_finite() const {
    for (const auto& w : weights)
      if (!w.allFinite()) return false;
    if (!vis_bias.allFinite()) return false;
    for (const auto& d : hid_bias)
      if (!d.allFinite()) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& w : weights) m = std::max(m, w.cwiseAbs().maxCoeff());
    m = std::max(m, vis_bias.cwiseAbs().maxCoeff());
    for (const auto& d : hid_bias) m = std::max(m, d.cwiseAbs().maxCoeff());
    return m;
  }
};

}  // namespace dbm
