#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgcn/oracles.hpp"
#include "cgcn/synthetic.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace cgcn;

namespace {

Dataset tiny(std::size_t n, int classes, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.num_classes = classes;
  for (std::size_t i = 0; i < n; ++i) {
    ds.samples.push_back({ring_graph(3 + i % 4), Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(3 + i % 4), 1),
                          static_cast<int>(rng() % static_cast<std::uint64_t>(classes))});
  }
  return ds;
}

}  // namespace

TEST_CASE("split sizes and determinism") {
  const auto idx = split_indices(10, {0.8, 0.1, 0.1}, 3);
  CHECK(idx[0].size() == 8);
  CHECK(idx[1].size() == 1);
  CHECK(idx[2].size() == 1);
  CHECK(split_indices(10, {0.8, 0.1, 0.1}, 3) == idx);
  std::vector<bool> seen(10, false);
  for (const auto& part : idx)
    for (std::size_t i : part) {
      CHECK_FALSE(seen[i]);
      seen[i] = true;
    }
  CHECK_THROWS(split_indices(10, {1.0, 0.0, 0.0}, 3));
  CHECK_THROWS(split_dataset(tiny(10, 2, 1), {1.0, 0.0, 0.0}, 3));
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.epochs = 0;
  CHECK_THROWS(c.validate());
  c = TrainConfig{};
  c.split = {0.5, 0.2, 0.2};
  CHECK_THROWS(c.validate());
  c = TrainConfig{};
  c.kernels = {KernelSpec::gaussian_rbf(1.0), KernelSpec::gaussian_rbf(1.0), KernelSpec::gaussian_rbf(1.0)};
  CHECK_THROWS(c.validate());
  CHECK_THROWS(train_layerwise(tiny(4, 2, 0), [] {
    TrainConfig z;
    z.epochs = 0;
    return z;
  }()));
}

TEST_CASE("dataset validation") {
  Dataset ds = tiny(4, 2, 0);
  CHECK_NOTHROW(ds.validate());
  ds.samples[0].label = 5;
  CHECK_THROWS(ds.validate());
  ds = tiny(4, 2, 0);
  ds.samples[1].signal = Eigen::MatrixXd::Ones(ds.samples[1].signal.rows(), 2);
  CHECK_THROWS(ds.validate());
}

TEST_CASE("zero filters on balanced labels give ln 2") {
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Random(4, 3);
  const LayerObjective obj(pooled, {0, 1, 0, 1}, Eigen::MatrixXd::Identity(2, 2), true);
  CHECK(obj.value(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2)) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("gradient matches central differences") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd pooled = gaussian_matrix(6, 4, rng);
    const LayerObjective obj(pooled, {0, 1, 2, 0, 1, 2}, gaussian_matrix(3, 3, rng), trial % 2 == 0);
    const Eigen::MatrixXd a = gaussian_matrix(4, 3, rng) * 0.3;
    const Eigen::VectorXd b = gaussian_matrix(3, 1, rng);
    const auto res = obj.evaluate(a, b);
    Eigen::MatrixXd fd(4, 3);
    const double eps = 1e-5;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        Eigen::MatrixXd ap = a, am = a;
        ap(i, j) += eps;
        am(i, j) -= eps;
        fd(i, j) = (obj.value(ap, b) - obj.value(am, b)) / (2 * eps);
      }
    CHECK((res.filter_grad - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff() <= 1e-4);
    if (obj.trains_bias()) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        Eigen::VectorXd bp = b, bm = b;
        bp(j) += eps;
        bm(j) -= eps;
        CHECK(res.bias_grad(j) == doctest::Approx((obj.value(a, bp) - obj.value(a, bm)) / (2 * eps)).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("duplicating every sample leaves objective and gradient unchanged") {
  Rng rng(7);
  const Eigen::MatrixXd pooled = gaussian_matrix(5, 3, rng);
  Eigen::MatrixXd doubled(10, 3);
  doubled << pooled, pooled;
  const std::vector<int> y{0, 1, 1, 0, 1};
  std::vector<int> yy = y;
  yy.insert(yy.end(), y.begin(), y.end());
  const LayerObjective a(pooled, y, Eigen::MatrixXd::Identity(2, 2), true);
  const LayerObjective b(doubled, yy, Eigen::MatrixXd::Identity(2, 2), true);
  const Eigen::MatrixXd f = gaussian_matrix(3, 2, rng);
  const Eigen::VectorXd bias = Eigen::VectorXd::Ones(2);
  const auto ra = a.evaluate(f, bias);
  const auto rb = b.evaluate(f, bias);
  CHECK(ra.value == doctest::Approx(rb.value).epsilon(1e-14));
  CHECK((ra.filter_grad - rb.filter_grad).norm() < 1e-14);
}

TEST_CASE("logistic loss") {
  Eigen::VectorXd s(2);
  s << 0.0, 0.0;
  CHECK(logistic_loss(s, 0) == doctest::Approx(std::log(2.0)));
  s << 1000.0, 0.0;
  CHECK(logistic_loss(s, 0) == doctest::Approx(0.0));
  CHECK(std::isfinite(logistic_loss(s, 1)));
}

TEST_CASE("Lipschitz estimate bounds observed gradient differences") {
  Rng rng(13);
  const LayerObjective obj(gaussian_matrix(8, 4, rng), {0, 1, 0, 1, 1, 0, 0, 1}, Eigen::MatrixXd::Identity(2, 2), true);
  const double lip = obj.lipschitz_estimate();
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = gaussian_matrix(4, 2, rng), b = gaussian_matrix(4, 2, rng);
    const Eigen::VectorXd ba = gaussian_matrix(2, 1, rng), bb = gaussian_matrix(2, 1, rng);
    const auto ga = obj.evaluate(a, ba), gb = obj.evaluate(b, bb);
    const double dg = std::sqrt((ga.filter_grad - gb.filter_grad).squaredNorm() + (ga.bias_grad - gb.bias_grad).squaredNorm());
    const double dx = std::sqrt((a - b).squaredNorm() + (ba - bb).squaredNorm());
    CHECK(dg <= lip * dx * (1 + 1e-9));
  }
}

TEST_CASE("separable ring/path toy reaches training accuracy 1") {
  const Dataset ds = ring_path_toy({6, 8}, {3, 4});
  TrainConfig c;
  c.hidden_widths.clear();
  c.hops = 2;
  c.factorization = FactorizationKind::kExact;
  c.optimizer.kind = OptimizerKind::kProjectedGd;
  c.optimizer.step_size = 0.5;
  c.epochs = 500;
  const TrainResult r = train_layerwise(ds, c);
  CHECK(evaluate(r.model, ds).accuracy == 1.0);
  for (const CgcnLayer& l : r.model.layers) CHECK(nuclear_norm(l.filters) <= l.budget + 1e-6);
}

TEST_CASE("training traces and determinism") {
  const Dataset ds = ring_path_toy({5, 6, 7}, {3, 4, 5});
  TrainConfig c;
  c.hidden_widths = {3};
  c.landmarks = 4;
  c.epochs = 15;
  c.seed = 42;
  const TrainResult a = train_layerwise(ds, c);
  const TrainResult b = train_layerwise(ds, c);
  REQUIRE(a.traces.size() == 2);
  CHECK(a.traces[0].size() == 15);
  CHECK(a.traces == b.traces);
  CHECK(a.model.layers[1].filters == b.model.layers[1].filters);
  CHECK(a.model.hidden_readouts.size() == 1);
}

TEST_CASE("evaluate reports accuracy in [0, 1]") {
  const Dataset ds = ring_path_toy({6, 8}, {3, 4});
  TrainConfig c;
  c.hidden_widths.clear();
  c.epochs = 5;
  CgcnModel model = train_layerwise(ds, c).model;
  const Metrics m = evaluate(model, ds);
  CHECK(m.accuracy >= 0.0);
  CHECK(m.accuracy <= 1.0);
  CHECK(m.mean_loss >= 0.0);

  // A constant model predicts its bias argmax everywhere.
  for (CgcnLayer& l : model.layers) l.filters.setZero();
  model.readout.bias << 1.0, 0.0;
  Dataset single = ds;
  for (Sample& s : single.samples) s.label = 0;
  CHECK(evaluate(model, single).accuracy == 1.0);

  const Dataset noisy = tiny(40, 2, 99);
  std::size_t zeros = 0;
  for (const Sample& s : noisy.samples) zeros += s.label == 0;
  CHECK(evaluate(model, noisy).accuracy == doctest::Approx(double(zeros) / 40.0));
}

TEST_CASE("random initial point lies in the ball") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = random_point_in_ball(5, 3, NuclearBall(2.0), rng);
    CHECK(nuclear_norm(a) <= 2.0 + 1e-9);
  }
}

TEST_CASE("two random initializations reach the same objective") {
  const OracleReport r = init_independence_oracle(17);
  CHECK(r.pass);
  CHECK(r.max_deviation <= 1e-3);
}

TEST_CASE("generalization gap probe is deterministic and vanishes at saturation") {
  TrainConfig c;
  c.hidden_widths.clear();
  c.epochs = 40;
  SyntheticTask task;
  task.population = 120;
  const auto a = generalization_gap_probe(c, task, {30, 120}, {0, 1});
  const auto b = generalization_gap_probe(c, task, {30, 120}, {0, 1});
  REQUIRE(a.size() == 2);
  CHECK(a[0].gap == b[0].gap);
  CHECK(a[1].train_loss == b[1].train_loss);
  CHECK(std::abs(a[1].gap) < 1e-12);
}
