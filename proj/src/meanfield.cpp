#include "dbm/meanfield.hpp"

namespace dbm {

std::vector<Vector> MeanFieldState::row_marginals(int row) const {
  std::vector<Vector> out;
  out.reserve(marginals.size());
  for (const auto& m : marginals) out.push_back(m.row(row).transpose());
  return out;
}

MeanFieldState mf_init(const ModelParams& params, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  MeanFieldState s;
  for (int l = 0; l < params.depth(); ++l)
    s.marginals.emplace_back(
        Matrix::Constant(batch_size, params.layer_sizes[l + 1], 0.5));
  return s;
}

void mf_sweep(const ModelParams& params, const Matrix& v_batch,
              MeanFieldState& state) {
  if (params.has_laterals())
    throw DimensionError("mean field requires bipartite structure");
  const int L = params.depth();
  if (static_cast<int>(state.marginals.size()) != L)
    throw DimensionError("mean-field state layer count mismatch");
  if (v_batch.cols() != params.layer_sizes[0])
    throw DimensionError("visible batch width mismatch");
  const auto batch = v_batch.rows();
  double residual = 0.0;
  for (int l = 0; l < L; ++l) {
    if (state.marginals[l].rows() != batch)
      throw DimensionError("mean-field batch size mismatch");
    const Matrix& below = (l == 0) ? v_batch : state.marginals[l - 1];
    Matrix input = below * params.weights[l];
    if (l + 1 < L) input += state.marginals[l + 1] * params.weights[l + 1].transpose();
    input.rowwise() += params.hid_bias[l].transpose();
    const Matrix updated = input.unaryExpr([](double x) { return sigmoid(x); });
    residual = std::max(residual,
                        (updated - state.marginals[l]).cwiseAbs().maxCoeff());
    state.marginals[l] = updated;
  }
  state.residual = residual;
  state.sweep_count += 1;
}

MeanFieldState mf_fixed_point(const ModelParams& params, const Matrix& v_batch,
                              double tol, int max_sweeps) {
  if (tol <= 0.0) throw ConfigError("mean-field tolerance must be positive");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  MeanFieldState state = mf_init(params, static_cast<int>(v_batch.rows()));
  for (int i = 0; i < max_sweeps; ++i) {
    mf_sweep(params, v_batch, state);
    if (state.residual < tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

ParamStats positive_phase_stats(const MeanFieldState& state,
                                const Matrix& v_batch) {
  const int L = static_cast<int>(state.marginals.size());
  const double batch = static_cast<double>(v_batch.rows());
  ParamStats stats;
  stats.weights.reserve(L);
  stats.hid_bias.reserve(L);
  for (int l = 0; l < L; ++l) {
    const Matrix& below = (l == 0) ? v_batch : state.marginals[l - 1];
    if (below.rows() != v_batch.rows())
      throw DimensionError("mean-field batch size mismatch");
    stats.weights.emplace_back(below.transpose() * state.marginals[l] / batch);
    stats.hid_bias.emplace_back(state.marginals[l].colwise().mean().transpose());
  }
  stats.vis_bias = v_batch.colwise().mean().transpose();
  return stats;
}

}  // namespace dbm
