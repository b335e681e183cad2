// Command-line driver: train / oracle / report subcommands.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbm/data_io.hpp"
#include "dbm/exact.hpp"
#include "dbm/meanfield.hpp"
#include "dbm/report.hpp"
#include "dbm/rng.hpp"
#include "dbm/trainer.hpp"

namespace {

constexpr const char* kToolVersion = "dbm 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

std::vector<int> parse_layers(const std::string& spec) {
  std::vector<int> sizes;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw dbm::ConfigError("empty layer size in --layers");
    sizes.push_back(std::stoi(tok));
  }
  if (sizes.size() < 2) throw dbm::ConfigError("--layers needs at least two sizes");
  return sizes;
}

std::vector<double> parse_doubles(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

dbm::ModelParams random_model(const std::vector<int>& sizes, uint64_t seed,
                              double scale) {
  dbm::ModelParams p = dbm::ModelParams::zeros(sizes);
  dbm::CounterRng rng(seed, 1);
  auto gauss = [&rng] {
    const double u1 = std::max(rng.uniform(), 1e-300);
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  for (auto& w : p.weights)
    for (int j = 0; j < w.rows(); ++j)
      for (int i = 0; i < w.cols(); ++i) w(j, i) = scale * gauss();
  for (int j = 0; j < p.vis_bias.size(); ++j) p.vis_bias[j] = scale * gauss();
  for (auto& d : p.hid_bias)
    for (int i = 0; i < d.size(); ++i) d[i] = scale * gauss();
  return p;
}

struct TrainArgs {
  std::string data_path;
  std::string layers = "784,500,500";
  double lr = 1e-2;
  int batch = 50;
  int64_t updates = 1000000;
  std::string alpha;
  double gamma = 1.0;
  double mu_damping = 1000.0;
  bool no_reg = false;
  uint64_t seed = 20120601;
  std::string out = "run";
  int gibbs_k = 1;
  int64_t metrics_every = 100;
  int64_t checkpoint_every = 0;
  int64_t dry_run = 0;  // >0: validate full config, run only this many updates
};

int cmd_train(const TrainArgs& args) {
  dbm::TrainingConfig config;
  config.layer_sizes = parse_layers(args.layers);
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.n_updates = args.updates;
  if (!args.alpha.empty()) config.alpha = parse_doubles(args.alpha);
  config.gamma = args.gamma;
  config.mu_damping = args.mu_damping;
  config.regularizer_enabled = !args.no_reg;
  config.seed = args.seed;
  config.gibbs_k = args.gibbs_k;
  config.metrics_every = args.metrics_every;
  config.checkpoint_every = args.checkpoint_every;
  config.out_dir = args.out;
  config.validate();

  const auto raw_bytes = dbm::read_file(args.data_path);
  const auto idx_bytes = dbm::maybe_gunzip(raw_bytes);
  const dbm::BinaryDataset dataset =
      dbm::binarize(dbm::parse_idx_images(idx_bytes));

  std::filesystem::create_directories(config.out_dir);
  nlohmann::json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = {{"layers", config.layer_sizes},
                        {"learning_rate", config.learning_rate},
                        {"batch_size", config.batch_size},
                        {"n_updates", config.n_updates},
                        {"gibbs_k", config.gibbs_k},
                        {"alpha", config.resolved_alpha()},
                        {"gamma", config.gamma},
                        {"mu_damping", config.mu_damping},
                        {"regularizer_enabled", config.regularizer_enabled},
                        {"mf_tol", config.mf_tol},
                        {"mf_max_sweeps", config.mf_max_sweeps},
                        {"metrics_every", config.metrics_every},
                        {"checkpoint_every", config.checkpoint_every},
                        {"dry_run", args.dry_run}};
  manifest["seed"] = config.seed;
  manifest["data"] = {{"path", args.data_path},
                      {"crc32", dbm::crc32_of(raw_bytes)},
                      {"examples", dataset.count}};
  manifest["artifacts"] = {{"metrics", config.out_dir + "/metrics.csv"},
                           {"final_checkpoint", config.out_dir + "/final.ckpt"}};
  {
    std::ofstream mf(config.out_dir + "/manifest.json");
    if (!mf) throw dbm::IoError("cannot write manifest");
    mf << manifest.dump(2) << '\n';
  }

  if (args.dry_run > 0) config.n_updates = args.dry_run;
  const auto result = dbm::train(dataset, config);
  std::cout << "trained " << result.state.update_index << " updates; final penalty "
            << (result.metrics.empty() ? 0.0 : result.metrics.back().penalty)
            << std::endl;
  return kExitOk;
}

struct OracleArgs {
  std::string layers = "4,3,2";
  uint64_t seed = 7;
};

int cmd_oracle(const OracleArgs& args) {
  const auto sizes = parse_layers(args.layers);
  int total = 0;
  for (int s : sizes) total += s;
  dbm::OracleBudget budget;
  if (total > budget.max_total_units) {
    std::cerr << "error: " << total << " units exceed oracle budget of "
              << budget.max_total_units << std::endl;
    return kExitConfig;
  }
  const dbm::ModelParams params = random_model(sizes, args.seed, 0.5);
  bool all_ok = true;
  auto row = [&all_ok](const std::string& name, bool ok, const std::string& info) {
    all_ok = all_ok && ok;
    std::cout << (ok ? "PASS  " : "FAIL  ") << name << "  " << info << std::endl;
  };

  const double log_z = dbm::log_partition(params);
  if (params.depth() == 1) {
    const double analytic = dbm::log_partition_rbm_analytic(params);
    const double rel = std::abs(log_z - analytic) / std::abs(analytic);
    row("partition enum-vs-analytic", rel < 1e-12, "rel.err " + std::to_string(rel));
  } else {
    row("partition finite", std::isfinite(log_z), "log Z " + std::to_string(log_z));
  }

  // Gradient vs central finite differences of the exact log-likelihood.
  std::vector<std::vector<bool>> data;
  dbm::CounterRng rng(args.seed, 99);
  for (int t = 0; t < 3; ++t) {
    std::vector<bool> v(sizes[0]);
    for (int j = 0; j < sizes[0]; ++j) v[j] = rng.bernoulli(0.5);
    data.push_back(v);
  }
  const dbm::ParamStats grad = dbm::exact_gradient(params, data);
  double max_err = 0.0;
  const double h = 1e-5;
  for (size_t l = 0; l < params.weights.size(); ++l) {
    for (int j = 0; j < params.weights[l].rows(); ++j) {
      for (int i = 0; i < params.weights[l].cols(); ++i) {
        dbm::ModelParams plus = params;
        dbm::ModelParams minus = params;
        plus.weights[l](j, i) += h;
        minus.weights[l](j, i) -= h;
        const double fd = (dbm::exact_log_likelihood(plus, data) -
                           dbm::exact_log_likelihood(minus, data)) /
                          (2 * h);
        max_err = std::max(max_err, std::abs(fd - grad.weights[l](j, i)));
      }
    }
  }
  row("gradient vs finite differences", max_err < 1e-6,
      "max abs err " + std::to_string(max_err));

  // Variational bound below the exact likelihood for converged mean field.
  if (params.depth() >= 2) {
    dbm::Matrix vb(1, sizes[0]);
    for (int j = 0; j < sizes[0]; ++j) vb(0, j) = data[0][j] ? 1.0 : 0.0;
    const auto mf = dbm::mf_fixed_point(params, vb);
    const auto gap = dbm::exact_bound_gap(params, data[0], mf.row_marginals(0));
    row("variational bound validity", gap.kl >= -1e-12,
        "kl " + std::to_string(gap.kl));
  }
  return all_ok ? kExitOk : kExitConfig;
}

struct ReportArgs {
  std::string checkpoint;
  int layer = 1;
  int top_k = 20;
  std::string out = "report";
};

int cmd_report(const ReportArgs& args) {
  const auto ckpt = dbm::checkpoint_load(args.checkpoint);
  const dbm::ModelParams& params = ckpt.state.params;
  std::filesystem::create_directories(args.out);
  const dbm::Matrix filters =
      dbm::project_filters(params, args.layer, args.top_k);
  // Guess a square-ish image shape from D; MNIST-sized models get 28x28.
  const int d = static_cast<int>(filters.rows());
  int w = static_cast<int>(std::round(std::sqrt(static_cast<double>(d))));
  while (w > 1 && d % w != 0) --w;
  const int hgt = d / w;
  const int cols = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(filters.cols()))));
  dbm::write_pgm(args.out + "/filters_layer" + std::to_string(args.layer) + ".pgm",
                 dbm::render_tiles(filters, hgt, w, cols));
  const auto reports = dbm::norm_report(params, ckpt.state.init_norms);
  std::ofstream csv(args.out + "/norms.csv");
  if (!csv) throw dbm::IoError("cannot write norms.csv");
  dbm::write_norm_csv(csv, reports);
  std::cout << "wrote " << args.out << "/filters_layer" << args.layer
            << ".pgm and norms.csv" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep Boltzmann machine training toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a DBM with regularized SML");
  train->add_option("--data", train_args.data_path, "IDX image file (optionally gzipped)")
      ->required();
  train->add_option("--layers", train_args.layers, "Comma-separated layer sizes");
  train->add_option("--lr", train_args.lr, "Learning rate");
  train->add_option("--batch", train_args.batch, "Minibatch size");
  train->add_option("--updates", train_args.updates, "Number of parameter updates");
  train->add_option("--alpha", train_args.alpha, "Per-layer penalty strengths");
  train->add_option("--gamma", train_args.gamma, "Adjacent-layer spring strength");
  train->add_option("--mu-damping", train_args.mu_damping, "mu learning-rate divisor");
  train->add_flag("--no-reg", train_args.no_reg, "Disable the norm regularizer");
  train->add_option("--seed", train_args.seed, "Master seed");
  train->add_option("--out", train_args.out, "Output directory");
  train->add_option("--gibbs-k", train_args.gibbs_k, "Gibbs steps per update");
  train->add_option("--metrics-every", train_args.metrics_every, "Metrics interval");
  train->add_option("--checkpoint-every", train_args.checkpoint_every,
                    "Checkpoint interval (0 = final only)");
  train->add_option("--dry-run", train_args.dry_run,
                    "Validate the full config but run only this many updates");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exact-enumeration validation checks");
  oracle->add_option("--layers", oracle_args.layers, "Comma-separated layer sizes");
  oracle->add_option("--seed", oracle_args.seed, "Model seed");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Filter mosaics and norm diagnostics");
  report->add_option("--checkpoint", report_args.checkpoint, "Checkpoint file")
      ->required();
  report->add_option("--layer", report_args.layer, "Layer to visualize");
  report->add_option("--top-k", report_args.top_k, "Connections per projected unit");
  report->add_option("--out", report_args.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const dbm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const dbm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const dbm::FormatError& e) {
    std::cerr << "file format error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const dbm::IoError& e) {
    std::cerr << "I/O error: " << e.what() << std::endl;
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  }
  return kExitConfig;
}
