#include <doctest.h>

#include <filesystem>

#include "dbm/exact.hpp"
#include "dbm/trainer.hpp"
#include "testutil.hpp"

using namespace dbm;

namespace {

TrainingConfig small_config(std::vector<int> sizes) {
  TrainingConfig cfg;
  cfg.layer_sizes = std::move(sizes);
  cfg.batch_size = 4;
  cfg.n_updates = 10;
  cfg.metrics_every = 1;
  cfg.seed = 7;
  return cfg;
}

BinaryDataset tiny_dataset(int count, int dim, uint64_t seed) {
  BinaryDataset ds;
  ds.count = count;
  ds.dim = dim;
  ds.image_height = 1;
  ds.image_width = dim;
  CounterRng rng(seed, 0);
  ds.bits.resize(size_t(count) * dim);
  for (auto& b : ds.bits) b = rng.bernoulli(0.5) ? 1 : 0;
  return ds;
}

}  // namespace

TEST_CASE("config validation rejects bad values") {
  TrainingConfig cfg = small_config({4, 3});
  cfg.n_updates = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config({4, 3});
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config({4});
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config({4, 3});
  cfg.alpha = {0.1, 0.1};  // wrong layer count
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zero learning rate leaves parameters bit-identical") {
  TrainingConfig cfg = small_config({4, 3, 2});
  TrainerState state = init_trainer(cfg);
  const ModelParams before = state.params;
  // train_step itself does not gate on the config-level lr > 0 rule.
  TrainingConfig frozen = cfg;
  frozen.learning_rate = 0.0;
  frozen.regularizer_enabled = false;
  Matrix batch = Matrix::Zero(2, 4);
  batch(0, 1) = 1.0;
  train_step(state, batch, frozen);
  for (size_t l = 0; l < before.weights.size(); ++l)
    CHECK((state.params.weights[l].array() == before.weights[l].array()).all());
  CHECK((state.params.vis_bias.array() == before.vis_bias.array()).all());
}

TEST_CASE("exhaustive negative phase reproduces the exact gradient step") {
  TrainingConfig cfg = small_config({4, 3});
  cfg.regularizer_enabled = false;
  cfg.exhaustive_negative_phase = true;
  cfg.learning_rate = 0.5;
  TrainerState state = init_trainer(cfg);
  const ModelParams before = state.params;

  std::vector<std::vector<bool>> data = {testutil::random_bits(4, 1),
                                         testutil::random_bits(4, 2)};
  Matrix batch(2, 4);
  for (int t = 0; t < 2; ++t)
    for (int j = 0; j < 4; ++j) batch(t, j) = data[t][j] ? 1.0 : 0.0;

  train_step(state, batch, cfg);

  // Expected step: lr times the per-example-mean exact gradient.
  ParamStats g = exact_gradient(before, data);
  g *= cfg.learning_rate / 2.0;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(state.params.weights[0](j, i) - before.weights[0](j, i) -
                     g.weights[0](j, i)) < 1e-10);
  CHECK((state.params.vis_bias - before.vis_bias - g.vis_bias)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((state.params.hid_bias[0] - before.hid_bias[0] - g.hid_bias[0])
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("fixed seed training is fully deterministic") {
  const BinaryDataset ds = tiny_dataset(20, 4, 3);
  TrainingConfig cfg = small_config({4, 3, 2});
  cfg.n_updates = 100;
  cfg.metrics_every = 10;
  const TrainResult a = train(ds, cfg);
  const TrainResult b = train(ds, cfg);
  for (size_t l = 0; l < a.state.params.weights.size(); ++l)
    CHECK((a.state.params.weights[l].array() ==
           b.state.params.weights[l].array())
              .all());
  REQUIRE(a.metrics.size() == b.metrics.size());
  for (size_t i = 0; i < a.metrics.size(); ++i)
    CHECK(a.metrics[i].penalty == b.metrics[i].penalty);
}

TEST_CASE("regularizer-only step does not increase the penalty") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const ModelParams p = testutil::random_model({5, 4, 3}, seed, 0.5);
    RegularizerState reg = init_regularizer(p, {0.1, 0.1}, 1.0);
    reg.mu[0] += 0.3;  // knock the targets off balance
    reg.mu[1] -= 0.2;
    const double before = penalty_value(p, reg);
    ModelParams q = p;
    const ParamStats g = penalty_grad_weights(p, reg);
    for (size_t l = 0; l < q.weights.size(); ++l)
      q.weights[l] -= 0.01 * g.weights[l];
    CHECK(penalty_value(q, reg) <= before);
  }
}

TEST_CASE("training a within-budget DBM raises the exact log-likelihood") {
  BinaryDataset ds = tiny_dataset(200, 4, 9);
  // Bias the data so there is structure to learn.
  for (int t = 0; t < ds.count; ++t) {
    ds.bits[size_t(t) * 4 + 0] = ds.bits[size_t(t) * 4 + 1];
    ds.bits[size_t(t) * 4 + 3] = 1 - ds.bits[size_t(t) * 4 + 2];
  }
  TrainingConfig cfg = small_config({4, 3, 2});
  cfg.batch_size = 50;
  cfg.n_updates = 2000;
  cfg.learning_rate = 0.05;
  cfg.regularizer_enabled = true;
  cfg.metrics_every = 500;

  std::vector<std::vector<bool>> data;
  for (int t = 0; t < ds.count; ++t) data.push_back(ds.example(t));

  const TrainerState initial = init_trainer(cfg);
  const double ll_before = exact_log_likelihood(initial.params, data);
  const TrainResult result = train(ds, cfg);
  const double ll_after = exact_log_likelihood(result.state.params, data);
  CHECK(ll_after > ll_before);
}

TEST_CASE("NaN parameters abort the step with a numerical error") {
  TrainingConfig cfg = small_config({4, 3});
  TrainerState state = init_trainer(cfg);
  state.params.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  Matrix batch = Matrix::Zero(2, 4);
  CHECK_THROWS_AS(train_step(state, batch, cfg), NumericalError);
}

TEST_CASE("checkpoint round trip is bit-exact including RNG positions") {
  const BinaryDataset ds = tiny_dataset(20, 4, 5);
  TrainingConfig cfg = small_config({4, 3, 2});
  cfg.n_updates = 25;
  const TrainResult result = train(ds, cfg);

  const auto bytes = checkpoint_serialize(result.state, cfg);
  const CheckpointData loaded = checkpoint_parse(bytes);

  CHECK(checkpoint_serialize(loaded.state, loaded.config) == bytes);
  for (size_t l = 0; l < result.state.params.weights.size(); ++l)
    CHECK((loaded.state.params.weights[l].array() ==
           result.state.params.weights[l].array())
              .all());
  CHECK(loaded.state.update_index == result.state.update_index);
  CHECK(loaded.state.chains.steps_taken == result.state.chains.steps_taken);
  for (int c = 0; c < result.state.chains.chain_count(); ++c) {
    CHECK(loaded.state.chains.rngs[c].counter() ==
          result.state.chains.rngs[c].counter());
    CHECK(loaded.state.chains.rngs[c].key() ==
          result.state.chains.rngs[c].key());
  }

  // Resumed sampling continues identically.
  TrainerState a = result.state;
  TrainerState b = loaded.state;
  gibbs_step(a.params, a.chains, 3);
  gibbs_step(b.params, b.chains, 3);
  for (int c = 0; c < a.chains.chain_count(); ++c)
    for (size_t l = 0; l < a.chains.states[c].layers.size(); ++l)
      CHECK(a.chains.states[c].layers[l] == b.chains.states[c].layers[l]);
}

TEST_CASE("checkpoint failure modes are distinct") {
  TrainingConfig cfg = small_config({4, 3});
  const TrainerState state = init_trainer(cfg);
  auto bytes = checkpoint_serialize(state, cfg);

  // Truncation.
  auto cut = bytes;
  cut.resize(cut.size() / 2);
  CHECK_THROWS_AS(checkpoint_parse(cut), FormatError);

  // Checksum flip in the middle.
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(checkpoint_parse(flipped), ChecksumError);

  // Foreign file.
  std::vector<uint8_t> junk = {'P', 'N', 'G', 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK_THROWS_AS(checkpoint_parse(junk), BadMagicError);

  // Future version: magic prefix right, version digits different.
  auto future = bytes;
  future[7] = '9';
  CHECK_THROWS_AS(checkpoint_parse(future), VersionError);
}

TEST_CASE("checkpoint save/load through the filesystem") {
  TrainingConfig cfg = small_config({4, 3});
  const TrainerState state = init_trainer(cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "dbm_test.ckpt").string();
  checkpoint_save(state, cfg, path);
  const CheckpointData loaded = checkpoint_load(path);
  CHECK(checkpoint_serialize(loaded.state, loaded.config) ==
        checkpoint_serialize(state, cfg));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(checkpoint_load(path), IoError);
}

TEST_CASE("train validates dataset against config before any compute") {
  const BinaryDataset ds = tiny_dataset(10, 4, 1);
  TrainingConfig cfg = small_config({5, 3});  // wrong visible size
  CHECK_THROWS_AS(train(ds, cfg), ConfigError);
  cfg = small_config({4, 3});
  cfg.batch_size = 11;
  CHECK_THROWS_AS(train(ds, cfg), ConfigError);
}

TEST_CASE("metrics stream is monotone in update index") {
  const BinaryDataset ds = tiny_dataset(20, 4, 2);
  TrainingConfig cfg = small_config({4, 3});
  cfg.n_updates = 30;
  cfg.metrics_every = 7;
  const TrainResult result = train(ds, cfg);
  REQUIRE(!result.metrics.empty());
  for (size_t i = 1; i < result.metrics.size(); ++i)
    CHECK(result.metrics[i].update > result.metrics[i - 1].update);
  CHECK(result.metrics.back().update == 30);
}
