#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgcn/convex_opt.hpp"
#include "cgcn/oracles.hpp"
#include "cgcn/random.hpp"

#include <Eigen/Dense>

using namespace cgcn;

namespace {

Eigen::Vector2d v2(double a, double b) { return {a, b}; }

}  // namespace

TEST_CASE("l1 ball projection examples") {
  CHECK((project_l1_ball(v2(3, 1), 2.0) - v2(2, 0)).norm() < 1e-15);
  CHECK(project_l1_ball(v2(0.5, 0.5), 2.0) == v2(0.5, 0.5));
  CHECK((project_l1_ball(v2(1, 1), 1.0) - v2(0.5, 0.5)).norm() < 1e-15);
  CHECK_THROWS(project_l1_ball(v2(-1, 1), 1.0));
  CHECK_THROWS(project_l1_ball(v2(1, 1), 0.0));
}

TEST_CASE("l1 projection is optimal against a grid") {
  // Every feasible grid point is at least as far from v as the projection.
  const Eigen::Vector2d v(3, 1);
  const Eigen::VectorXd p = project_l1_ball(v, 2.0);
  const double best = (p - v).norm();
  for (int i = 0; i <= 2000; ++i) {
    for (int j = 0; i + j <= 2000; ++j) {
      const Eigen::Vector2d w(i * 1e-3, j * 1e-3);
      CHECK_FALSE((w - v).norm() < best - 1e-12);
    }
  }
}

TEST_CASE("nuclear projection examples") {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  Eigen::Matrix2d expected;
  expected << 2, 0, 0, 0;
  CHECK((project_nuclear(a, NuclearBall(2.0)) - expected).norm() < 1e-12);
  Eigen::MatrixXd inside(2, 3);
  inside << 0.1, 0.2, -0.1, 0.0, 0.3, 0.1;
  CHECK((project_nuclear(inside, NuclearBall(5.0)) - inside).norm() < 1e-10);
  CHECK(project_nuclear(Eigen::MatrixXd::Zero(3, 2), NuclearBall(1.0)).norm() == 0.0);
  CHECK_THROWS(NuclearBall(0.0));
  CHECK_THROWS(NuclearBall(-1.0));
}

TEST_CASE("nuclear projection lands on the ball and matches the brute force") {
  Rng rng(21);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Matrix2d a = gaussian_matrix(2, 2, rng) * 1.5;
    const double r = radius(rng);
    const Eigen::MatrixXd p = project_nuclear(a, NuclearBall(r));
    CHECK(nuclear_norm(p) <= r + 1e-9);
    CHECK((p - Eigen::MatrixXd(brute_force_nuclear_projection(a, r))).cwiseAbs().maxCoeff() <= 2e-3);
  }
}

TEST_CASE("nuclear budget") {
  CHECK(nuclear_budget(1.0, 3, 2, 1) == doctest::Approx(std::sqrt(12.0)));
  CHECK(nuclear_budget(1.0, 1, 1, 0) == 1.0);
  CHECK(nuclear_budget(2.0, 1, 1, 0) == 2.0);
  CHECK_THROWS(nuclear_budget(0.0, 1, 1, 0));
  CHECK_THROWS(nuclear_budget(1.0, 0, 1, 0));
}

TEST_CASE("projected steps") {
  OptimizerSettings gd;
  gd.kind = OptimizerKind::kProjectedGd;
  gd.step_size = 1.0;
  {
    OptimizerState st(gd, 2, 2);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2) * 0.3;
    CHECK(step(st, a, Eigen::MatrixXd::Zero(2, 2), NuclearBall(1.0)) == a);
  }
  {
    OptimizerState st(gd, 2, 2);
    const Eigen::MatrixXd out =
        step(st, Eigen::MatrixXd::Zero(2, 2), -Eigen::MatrixXd::Identity(2, 2), NuclearBall(10.0));
    CHECK((out - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  }
  {
    OptimizerState st(gd, 2, 2);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = -3;
    g(1, 1) = -1;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 2);
    expected(0, 0) = 2;
    CHECK((step(st, Eigen::MatrixXd::Zero(2, 2), g, NuclearBall(2.0)) - expected).norm() < 1e-12);
  }
}

TEST_CASE("adam steps stay in the ball and shape the moments") {
  OptimizerSettings adam;
  adam.step_size = 0.5;
  Rng rng(4);
  OptimizerState st(adam, 4, 3);
  CHECK(st.first_moment.rows() == 4);
  CHECK(st.second_moment.cols() == 3);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 3);
  for (int t = 0; t < 30; ++t) {
    a = step(st, a, gaussian_matrix(4, 3, rng), NuclearBall(1.5));
    CHECK(nuclear_norm(a) <= 1.5 + 1e-6);
  }
  CHECK(st.round == 30);
}

TEST_CASE("first adam step moves every entry by the step size") {
  OptimizerSettings adam;
  adam.step_size = 0.1;
  OptimizerState st(adam, 1, 2);
  Eigen::MatrixXd g(1, 2);
  g << 4.0, -0.01;
  const Eigen::MatrixXd out = step(st, Eigen::MatrixXd::Zero(1, 2), g);
  CHECK(out(0, 0) == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(out(0, 1) == doctest::Approx(0.1).epsilon(1e-4));
}

TEST_CASE("optimizer names") {
  CHECK(parse_optimizer_kind("gd") == OptimizerKind::kProjectedGd);
  CHECK(parse_optimizer_kind("adam") == OptimizerKind::kProjectedAdam);
  CHECK(parse_optimizer_kind(to_string(OptimizerKind::kProjectedGd)) == OptimizerKind::kProjectedGd);
  CHECK_THROWS(parse_optimizer_kind("sgd"));
}

TEST_CASE("plateau schedule halves after patience and respects the floor") {
  PlateauSchedule s(2, 0.5, 0.2);
  double eta = 1.0;
  eta = s.observe(5.0, eta);
  CHECK(eta == 1.0);
  eta = s.observe(5.0, eta);
  CHECK(eta == 1.0);
  eta = s.observe(5.0, eta);
  CHECK(eta == 0.5);
  eta = s.observe(4.0, eta);
  CHECK(eta == 0.5);
  for (int i = 0; i < 20; ++i) eta = s.observe(4.0, eta);
  CHECK(eta == 0.2);
}

TEST_CASE("projection properties on random rectangular matrices") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 6);
    const Eigen::Index c = 1 + static_cast<Eigen::Index>(rng() % 6);
    const NuclearBall ball(0.5 + 0.1 * trial);
    const Eigen::MatrixXd a = gaussian_matrix(r, c, rng) * 2.0;
    const Eigen::MatrixXd b = gaussian_matrix(r, c, rng) * 2.0;
    const Eigen::MatrixXd pa = project_nuclear(a, ball);
    const Eigen::MatrixXd pb = project_nuclear(b, ball);
    CHECK((project_nuclear(pa, ball) - pa).norm() <= 1e-9);
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-9);
    CHECK(nuclear_norm(pa) <= ball.radius + 1e-9);
  }
}
