#include "dbm/model.hpp"

#include <sstream>

namespace dbm {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

int ModelParams::total_units() const {
  int n = 0;
  for (int s : layer_sizes) n += s;
  return n;
}

ModelParams ModelParams::zeros(const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2) throw DimensionError("need at least one hidden layer");
  for (int s : layer_sizes) {
    if (s < 1) throw DimensionError("layer sizes must be positive");
  }
  ModelParams p;
  p.layer_sizes = layer_sizes;
  const int L = p.depth();
  p.weights.reserve(L);
  p.hid_bias.reserve(L);
  for (int l = 0; l < L; ++l) {
    p.weights.emplace_back(Matrix::Zero(layer_sizes[l], layer_sizes[l + 1]));
    p.hid_bias.emplace_back(Vector::Zero(layer_sizes[l + 1]));
  }
  p.vis_bias = Vector::Zero(layer_sizes[0]);
  return p;
}

void ModelParams::validate() const {
  require(layer_sizes.size() >= 2, "need at least one hidden layer");
  const int L = depth();
  require(static_cast<int>(weights.size()) == L, "weight count != depth");
  require(static_cast<int>(hid_bias.size()) == L, "hidden bias count != depth");
  require(vis_bias.size() == layer_sizes[0], "visible bias length mismatch");
  for (int l = 0; l < L; ++l) {
    require(weights[l].rows() == layer_sizes[l] &&
                weights[l].cols() == layer_sizes[l + 1],
            "weight matrix shape mismatch at layer " + std::to_string(l));
    require(hid_bias[l].size() == layer_sizes[l + 1],
            "hidden bias length mismatch at layer " + std::to_string(l));
    require(all_finite(weights[l]) && hid_bias[l].allFinite(),
            "non-finite parameter at layer " + std::to_string(l));
  }
  require(vis_bias.allFinite(), "non-finite visible bias");
  auto check_lateral = [&](const Matrix& m, int size, const char* name) {
    std::ostringstream os;
    os << "lateral " << name;
    require(m.rows() == size && m.cols() == size, os.str() + " shape mismatch");
    require(all_finite(m), os.str() + " has non-finite entries");
    require(m.isApprox(m.transpose(), 0.0), os.str() + " is not symmetric");
    require(m.diagonal().isZero(0.0), os.str() + " has nonzero diagonal");
  };
  if (lateral_vis) check_lateral(*lateral_vis, layer_sizes[0], "U");
  if (lateral_hid) {
    require(L == 1, "hidden lateral V only supported for depth-1 models");
    check_lateral(*lateral_hid, layer_sizes[1], "V");
  }
}

BinaryState BinaryState::zeros(const ModelParams& params) {
  BinaryState s;
  for (int sz : params.layer_sizes) s.layers.emplace_back(sz, false);
  return s;
}

Vector BinaryState::layer_as_vector(int layer) const {
  const auto& bits = layers.at(layer);
  Vector v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) v[i] = bits[i] ? 1.0 : 0.0;
  return v;
}

void BinaryState::check_shape(const ModelParams& params) const {
  if (layers.size() != params.layer_sizes.size())
    throw DimensionError("state layer count mismatch");
  for (size_t l = 0; l < layers.size(); ++l) {
    if (static_cast<int>(layers[l].size()) != params.layer_sizes[l])
      throw DimensionError("state layer " + std::to_string(l) + " size mismatch");
  }
}

double energy_bm(const ModelParams& params, const BinaryState& state) {
  if (params.depth() != 1)
    throw DimensionError("energy_bm requires exactly one hidden layer");
  state.check_shape(params);
  const Vector v = state.layer_as_vector(0);
  const Vector h = state.layer_as_vector(1);
  double e = -v.dot(params.weights[0] * h) - params.vis_bias.dot(v) -
             params.hid_bias[0].dot(h);
  if (params.lateral_vis) e -= 0.5 * v.dot(*params.lateral_vis * v);
  if (params.lateral_hid) e -= 0.5 * h.dot(*params.lateral_hid * h);
  return e;
}

double energy_dbm(const ModelParams& params, const BinaryState& state) {
  if (params.has_laterals())
    throw DimensionError("energy_dbm does not accept lateral couplings");
  state.check_shape(params);
  const int L = params.depth();
  std::vector<Vector> layers(L + 1);
  for (int l = 0; l <= L; ++l) layers[l] = state.layer_as_vector(l);
  double e = -params.vis_bias.dot(layers[0]);
  for (int l = 0; l < L; ++l) {
    e -= layers[l].dot(params.weights[l] * layers[l + 1]);
    e -= params.hid_bias[l].dot(layers[l + 1]);
  }
  return e;
}

double unit_conditional(const ModelParams& params, const BinaryState& state,
                        int layer, int unit) {
  state.check_shape(params);
  const int L = params.depth();
  if (layer < 0 || layer > L) throw DimensionError("layer index out of range");
  if (unit < 0 || unit >= params.layer_sizes[layer])
    throw DimensionError("unit index out of range");
  double input = (layer == 0) ? params.vis_bias[unit] : params.hid_bias[layer - 1][unit];
  if (layer > 0) {
    const Vector below = state.layer_as_vector(layer - 1);
    input += params.weights[layer - 1].col(unit).dot(below);
  }
  if (layer < L) {
    const Vector above = state.layer_as_vector(layer + 1);
    input += params.weights[layer].row(unit).dot(above);
  }
  if (layer == 0 && params.lateral_vis) {
    const Vector v = state.layer_as_vector(0);
    input += params.lateral_vis->row(unit).dot(v);  // zero diagonal excludes self
  }
  if (layer == 1 && params.lateral_hid) {
    const Vector h = state.layer_as_vector(1);
    input += params.lateral_hid->row(unit).dot(h);
  }
  return sigmoid(input);
}

Vector layer_conditional(const ModelParams& params, const BinaryState& state,
                         int layer) {
  if (params.has_laterals())
    throw DimensionError("layer_conditional requires bipartite structure");
  state.check_shape(params);
  const int L = params.depth();
  if (layer < 0 || layer > L) throw DimensionError("layer index out of range");
  Vector input = (layer == 0) ? params.vis_bias : params.hid_bias[layer - 1];
  if (layer > 0)
    input += params.weights[layer - 1].transpose() * state.layer_as_vector(layer - 1);
  if (layer < L)
    input += params.weights[layer] * state.layer_as_vector(layer + 1);
  return input.unaryExpr([](double x) { return sigmoid(x); });
}

}  // namespace dbm
