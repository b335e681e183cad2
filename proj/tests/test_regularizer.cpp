#include <doctest.h>

#include "dbm/regularizer.hpp"
#include "testutil.hpp"

using namespace dbm;

TEST_CASE("column norms: identity, 3-4-5, scalar-loop agreement") {
  CHECK(column_norms(Matrix::Identity(2, 2)).isApprox(Vector::Ones(2), 0.0));
  Matrix col(2, 1);
  col << 3.0, 4.0;
  CHECK(column_norms(col)[0] == doctest::Approx(5.0).epsilon(1e-15));
  CounterRng rng(5, 0);
  Matrix w(5, 4);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 4; ++i) w(j, i) = testutil::gauss(rng);
  const Vector norms = column_norms(w);
  for (int i = 0; i < 4; ++i) {
    double ss = 0.0;
    for (int j = 0; j < 5; ++j) ss += w(j, i) * w(j, i);
    CHECK(std::abs(norms[i] - std::sqrt(ss)) / std::sqrt(ss) < 1e-14);
  }
}

namespace {

RegularizerState make_reg(const ModelParams& p, std::vector<double> mu,
                          std::vector<double> alpha, double gamma) {
  RegularizerState reg;
  reg.mu = std::move(mu);
  reg.alpha = std::move(alpha);
  reg.gamma = gamma;
  reg.validate(p);
  return reg;
}

}  // namespace

TEST_CASE("penalty is zero when norms match mu and mus agree") {
  ModelParams p = ModelParams::zeros({2, 2, 2});
  p.weights[0] = Matrix::Identity(2, 2);
  p.weights[1] = Matrix::Identity(2, 2);
  const auto reg = make_reg(p, {1.0, 1.0}, {0.1, 0.1}, 1.0);
  CHECK(penalty_value(p, reg) == 0.0);
}

TEST_CASE("single-column arithmetic: norm 2, mu 1, alpha 0.1 gives 0.1") {
  ModelParams p = ModelParams::zeros({1, 1});
  p.weights[0](0, 0) = 2.0;
  const auto reg = make_reg(p, {1.0}, {0.1}, 0.0);
  CHECK(penalty_value(p, reg) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("spring term between adjacent mu values") {
  const ModelParams p = ModelParams::zeros({2, 2, 2});
  const auto reg = make_reg(p, {1.0, 3.0}, {0.0, 0.0}, 1.0);
  // Columns are all zero so the alpha terms vanish with alpha 0.
  CHECK(penalty_value(p, reg) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("penalty is nonnegative; zero only at the joint minimum") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const ModelParams p = testutil::random_model({5, 4, 3}, seed);
    const auto reg = make_reg(p, {0.5, 0.7}, {0.1, 0.1}, 1.0);
    CHECK(penalty_value(p, reg) > 0.0);
  }
}

TEST_CASE("weight gradient: zero at matched norm, parallel to the column") {
  ModelParams p = ModelParams::zeros({2, 2});
  p.weights[0] << 3.0, 1.0, 4.0, 2.0;
  const Vector norms = column_norms(p.weights[0]);
  const auto reg = make_reg(p, {norms[0]}, {0.1}, 0.0);
  const ParamStats g = penalty_grad_weights(p, reg);
  CHECK(g.weights[0].col(0).cwiseAbs().maxCoeff() < 1e-15);
  // Column 1 gradient is parallel to column 1.
  const Vector c = p.weights[0].col(1);
  const Vector gc = g.weights[0].col(1);
  const double cross = c[0] * gc[1] - c[1] * gc[0];
  CHECK(std::abs(cross) < 1e-12);
  // Biases untouched.
  CHECK(g.vis_bias.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.hid_bias[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weight gradient matches central finite differences") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const ModelParams p = testutil::random_model({5, 4}, seed + 10, 1.0);
    REQUIRE(column_norms(p.weights[0]).minCoeff() > 1e-3);
    const auto reg = make_reg(p, {1.3}, {0.1}, 0.0);
    const ParamStats g = penalty_grad_weights(p, reg);
    const double h = 1e-6;
    for (int j = 0; j < 5; ++j) {
      for (int i = 0; i < 4; ++i) {
        ModelParams plus = p;
        ModelParams minus = p;
        plus.weights[0](j, i) += h;
        minus.weights[0](j, i) -= h;
        const double fd =
            (penalty_value(plus, reg) - penalty_value(minus, reg)) / (2 * h);
        CHECK(std::abs(fd - g.weights[0](j, i)) < 1e-6);
      }
    }
  }
}

TEST_CASE("zero column produces a zero gradient, not NaN") {
  ModelParams p = ModelParams::zeros({3, 2});
  p.weights[0].col(1) = Vector::Constant(3, 0.5);
  const auto reg = make_reg(p, {1.0}, {0.1}, 0.0);
  const ParamStats g = penalty_grad_weights(p, reg);
  CHECK(g.weights[0].col(0).allFinite());
  CHECK(g.weights[0].col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mu gradient: balance, finite differences, spring coupling") {
  SUBCASE("zero when norms equal mu and springs balance") {
    ModelParams p = ModelParams::zeros({2, 2, 2});
    p.weights[0] = Matrix::Identity(2, 2);
    p.weights[1] = Matrix::Identity(2, 2);
    const auto reg = make_reg(p, {1.0, 1.0}, {0.1, 0.2}, 1.0);
    for (double g : penalty_grad_mu(p, reg)) CHECK(std::abs(g) < 1e-15);
  }
  SUBCASE("finite differences over mu") {
    const ModelParams p = testutil::random_model({4, 3, 3}, 77, 1.0);
    auto reg = make_reg(p, {0.8, 1.4}, {0.1, 0.1}, 1.0);
    const auto grad = penalty_grad_mu(p, reg);
    const double h = 1e-6;
    for (size_t l = 0; l < reg.mu.size(); ++l) {
      auto plus = reg;
      auto minus = reg;
      plus.mu[l] += h;
      minus.mu[l] -= h;
      const double fd = (penalty_value(p, plus) - penalty_value(p, minus)) / (2 * h);
      CHECK(std::abs(fd - grad[l]) < 1e-6);
    }
  }
}

TEST_CASE("scaling a column toward norm mu decreases the penalty") {
  const ModelParams p = testutil::random_model({5, 4}, 99, 1.0);
  const auto reg = make_reg(p, {2.0}, {0.1}, 0.0);
  const double before = penalty_value(p, reg);
  ModelParams q = p;
  // Move column 0 a fraction of the way toward norm mu.
  const double n = q.weights[0].col(0).norm();
  const double target = reg.mu[0];
  q.weights[0].col(0) *= (n + 0.5 * (target - n)) / n;
  CHECK(penalty_value(q, reg) < before);
}

TEST_CASE("init_regularizer targets the mean initial column norm") {
  const ModelParams p = testutil::random_model({5, 4, 3}, 111, 0.01);
  const auto reg = init_regularizer(p, {0.1, 0.1}, 1.0);
  for (size_t l = 0; l < 2; ++l)
    CHECK(reg.mu[l] == doctest::Approx(column_norms(p.weights[l]).mean()));
  // Penalty at initialization is small relative to the norm scale.
  CHECK(penalty_value(p, reg) < 1e-3);
  CHECK_THROWS_AS(init_regularizer(p, {0.1}, 1.0), ConfigError);
}
