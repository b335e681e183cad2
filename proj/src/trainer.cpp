#include "dbm/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dbm/exact.hpp"

namespace dbm {

std::vector<double> TrainingConfig::resolved_alpha() const {
  if (!alpha.empty()) return alpha;
  return std::vector<double>(layer_sizes.size() - 1, 0.1);
}

void TrainingConfig::validate() const {
  if (layer_sizes.size() < 2) throw ConfigError("need at least one hidden layer");
  for (int s : layer_sizes)
    if (s < 1) throw ConfigError("layer sizes must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (n_updates < 1) throw ConfigError("update count must be >= 1");
  if (gibbs_k < 1) throw ConfigError("gibbs_k must be >= 1");
  if (!(mf_tol > 0.0)) throw ConfigError("mf_tol must be positive");
  if (mf_max_sweeps < 1) throw ConfigError("mf_max_sweeps must be >= 1");
  if (!alpha.empty() && alpha.size() != layer_sizes.size() - 1)
    throw ConfigError("alpha count must match weight layer count");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(mu_damping > 0.0)) throw ConfigError("mu damping must be positive");
  if (n_chains < 0) throw ConfigError("chain count must be >= 0");
  if (!(weight_init_std >= 0.0)) throw ConfigError("weight init std must be >= 0");
}

ModelParams init_params(const TrainingConfig& config) {
  config.validate();
  ModelParams params = ModelParams::zeros(config.layer_sizes);
  CounterRng rng(config.seed, 0xae5e1a77ULL);
  for (auto& w : params.weights) {
    for (int j = 0; j < w.rows(); ++j) {
      for (int i = 0; i < w.cols(); ++i) {
        // Box-Muller.
        const double u1 = std::max(rng.uniform(), 1e-300);
        const double u2 = rng.uniform();
        w(j, i) = config.weight_init_std *
                  std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      }
    }
  }
  return params;
}

TrainerState init_trainer(const TrainingConfig& config) {
  TrainerState state;
  state.params = init_params(config);
  state.chains = init_chains(state.params, config.resolved_chains(), config.seed);
  state.reg = init_regularizer(state.params, config.resolved_alpha(), config.gamma,
                               config.mu_damping);
  for (const auto& w : state.params.weights)
    state.init_norms.push_back(column_norms(w));
  return state;
}

namespace {

TrainingMetrics compute_metrics(const TrainerState& state,
                                const TrainingConfig& config, int mf_sweeps,
                                double wall_ms) {
  TrainingMetrics m;
  m.update = state.update_index;
  m.mf_sweeps = mf_sweeps;
  m.wall_ms = wall_ms;
  m.penalty = config.regularizer_enabled
                  ? penalty_value(state.params, state.reg)
                  : 0.0;
  for (size_t l = 0; l < state.params.weights.size(); ++l) {
    const Vector norms = column_norms(state.params.weights[l]);
    LayerMetrics lm;
    lm.layer = static_cast<int>(l) + 1;
    lm.norm_mean = norms.mean();
    lm.norm_var = (norms.array() - lm.norm_mean).square().sum() /
                  static_cast<double>(norms.size());
    lm.norm_min = norms.minCoeff();
    lm.norm_max = norms.maxCoeff();
    for (int i = 0; i < norms.size(); ++i)
      if (norms[i] < 2.0 * state.init_norms[l][i]) lm.dead_count += 1;
    m.layers.push_back(lm);
  }
  return m;
}

}  // namespace

TrainingMetrics train_step(TrainerState& state, const Matrix& batch,
                           const TrainingConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  ModelParams& params = state.params;
  if (batch.cols() != params.layer_sizes[0])
    throw DimensionError("batch width does not match visible layer");

  const MeanFieldState mf =
      mf_fixed_point(params, batch, config.mf_tol, config.mf_max_sweeps);
  ParamStats grad = positive_phase_stats(mf, batch);

  if (config.exhaustive_negative_phase) {
    grad -= exact_model_stats(params);
  } else {
    gibbs_step(params, state.chains, config.gibbs_k);
    grad -= negative_phase_stats(params, state.chains);
  }
  if (config.regularizer_enabled)
    grad -= penalty_grad_weights(params, state.reg);

  if (!grad.all_finite()) {
    std::ostringstream os;
    os << "non-finite gradient at update " << state.update_index
       << "; |w|max=" << params.weights[0].cwiseAbs().maxCoeff();
    throw NumericalError(os.str());
  }

  const double lr = config.learning_rate;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    params.weights[l] += lr * grad.weights[l];
    params.hid_bias[l] += lr * grad.hid_bias[l];
  }
  params.vis_bias += lr * grad.vis_bias;

  if (config.regularizer_enabled) {
    const std::vector<double> mu_grad = penalty_grad_mu(params, state.reg);
    for (size_t l = 0; l < state.reg.mu.size(); ++l)
      state.reg.mu[l] -= lr / state.reg.mu_lr_damping * mu_grad[l];
  }
  state.update_index += 1;

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return compute_metrics(state, config, mf.sweep_count, wall_ms);
}

const char* kMetricsCsvHeader =
    "update,layer,norm_mean,norm_var,norm_min,norm_max,dead_count,penalty,"
    "mf_sweeps,wall_ms";

void append_metrics_csv(std::ostream& os, const TrainingMetrics& m) {
  for (const auto& lm : m.layers) {
    os << m.update << ',' << lm.layer << ',' << lm.norm_mean << ','
       << lm.norm_var << ',' << lm.norm_min << ',' << lm.norm_max << ','
       << lm.dead_count << ',' << m.penalty << ',' << m.mf_sweeps << ','
       << m.wall_ms << '\n';
  }
}

TrainResult train(const BinaryDataset& dataset, const TrainingConfig& config) {
  config.validate();
  if (dataset.count < 1) throw ConfigError("dataset is empty");
  if (config.batch_size > dataset.count)
    throw ConfigError("batch size exceeds dataset size");
  if (dataset.dim != config.layer_sizes[0])
    throw ConfigError("dataset dimension does not match visible layer");

  TrainResult result;
  result.state = init_trainer(config);
  TrainerState& state = result.state;

  std::ofstream metrics_file;
  const bool to_disk = !config.out_dir.empty();
  if (to_disk) {
    std::filesystem::create_directories(config.out_dir);
    metrics_file.open(config.out_dir + "/metrics.csv", std::ios::trunc);
    if (!metrics_file) throw IoError("cannot open metrics.csv for writing");
    metrics_file << kMetricsCsvHeader << '\n';
  }

  int64_t done = 0;
  for (uint64_t epoch = 0; done < config.n_updates; ++epoch) {
    const auto batches =
        minibatches(dataset.count, config.batch_size, config.seed, epoch);
    for (const auto& idx : batches) {
      if (done >= config.n_updates) break;
      const Matrix batch = dataset.batch(idx);
      TrainingMetrics m = train_step(state, batch, config);
      ++done;
      const bool emit = done == 1 || done == config.n_updates ||
                        (config.metrics_every > 0 && done % config.metrics_every == 0);
      if (emit) {
        if (to_disk) append_metrics_csv(metrics_file, m);
        result.metrics.push_back(std::move(m));
      }
      if (to_disk && config.checkpoint_every > 0 &&
          done % config.checkpoint_every == 0) {
        checkpoint_save(state, config,
                        config.out_dir + "/checkpoint_" + std::to_string(done) +
                            ".ckpt");
      }
    }
  }
  if (to_disk) checkpoint_save(state, config, config.out_dir + "/final.ckpt");
  return result;
}

}  // namespace dbm
