#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dbm/data_io.hpp"
#include "dbm/meanfield.hpp"
#include "dbm/model.hpp"
#include "dbm/regularizer.hpp"
#include "dbm/sampler.hpp"

namespace dbm {

struct TrainingConfig {
  std::vector<int> layer_sizes;
  double learning_rate = 1e-2;
  int batch_size = 50;
  int64_t n_updates = 1000000;
  int gibbs_k = 1;
  double mf_tol = 1e-6;
  int mf_max_sweeps = 100;
  std::vector<double> alpha;  // empty -> 0.1 per weight layer
  double gamma = 1.0;
  double mu_damping = 1000.0;
  bool regularizer_enabled = true;
  uint64_t seed = 20120601;
  int n_chains = 0;  // 0 -> batch_size
  int64_t checkpoint_every = 0;  // 0 -> final checkpoint only
  int64_t metrics_every = 100;
  // Replace the persistent chains' statistics by the exact unclamped
  // expectation (oracle budget applies). For small-model validation runs.
  bool exhaustive_negative_phase = false;
  double weight_init_std = 0.01;
  std::string out_dir;  // empty -> nothing written to disk

  std::vector<double> resolved_alpha() const;
  int resolved_chains() const { return n_chains > 0 ? n_chains : batch_size; }
  void validate() const;  // throws ConfigError
};

struct LayerMetrics {
  int layer = 0;  // 1-based weight layer
  double norm_mean = 0, norm_var = 0, norm_min = 0, norm_max = 0;
  int dead_count = 0;  // columns with norm < 2x their initial norm
};

struct TrainingMetrics {
  int64_t update = 0;
  std::vector<LayerMetrics> layers;
  double penalty = 0.0;
  int mf_sweeps = 0;
  double wall_ms = 0.0;
};

/// Everything a training run mutates, bundled so a step (and a checkpoint)
/// can hand it around as one value.
struct TrainerState {
  ModelParams params;
  GibbsChains chains;
  RegularizerState reg;
  std::vector<Vector> init_norms;  // column norms at initialization, per layer
  int64_t update_index = 0;
};

// Gaussian weights (std from config), zero biases, seeded.
ModelParams init_params(const TrainingConfig& config);
TrainerState init_trainer(const TrainingConfig& config);

// One SML update: mean-field positive phase on the clamped batch, k Gibbs
// steps on the persistent chains, gradient ascent on theta (penalty folded
// in when enabled), damped gradient descent on mu.
TrainingMetrics train_step(TrainerState& state, const Matrix& batch,
                           const TrainingConfig& config);

struct TrainResult {
  TrainerState state;
  std::vector<TrainingMetrics> metrics;
};

// Full run over shuffled minibatches; writes metrics CSV and checkpoints
// under config.out_dir when set.
TrainResult train(const BinaryDataset& dataset, const TrainingConfig& config);

extern const char* kMetricsCsvHeader;
void append_metrics_csv(std::ostream& os, const TrainingMetrics& m);

// Checkpoint container format: magic "BFDBM001", length-prefixed header
// fields, little-endian float64 tensors, packed chain bits, CRC-32 trailer.
std::vector<uint8_t> checkpoint_serialize(const TrainerState& state,
                                          const TrainingConfig& config);
struct CheckpointData {
  TrainerState state;
  TrainingConfig config;
};
CheckpointData checkpoint_parse(std::span<const uint8_t> bytes);
void checkpoint_save(const TrainerState& state, const TrainingConfig& config,
                     const std::string& path);
CheckpointData checkpoint_load(const std::string& path);

}  // namespace dbm
