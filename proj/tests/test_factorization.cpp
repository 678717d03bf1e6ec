#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgcn/factorization.hpp"
#include "cgcn/random.hpp"

#include <Eigen/Dense>

using namespace cgcn;

namespace {

Eigen::MatrixXd unit_rows(Eigen::Index n, Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd z = gaussian_matrix(n, d, rng);
  z.rowwise().normalize();
  return z;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("identity factorizes to an orthogonal square factor") {
  const FactorizedKernel fk = factorize_exact(Eigen::MatrixXd::Identity(3, 3));
  CHECK(fk.q_matrix.cols() == 3);
  CHECK((fk.q_matrix * fk.q_matrix.transpose() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("rank-one all-ones kernel") {
  const FactorizedKernel fk = factorize_exact(Eigen::MatrixXd::Ones(2, 2));
  REQUIRE(fk.q_matrix.cols() == 1);
  CHECK(std::abs(std::abs(fk.q_matrix(0, 0)) - 1.0) < 1e-12);
  CHECK((fk.q_matrix * fk.q_matrix.transpose() - Eigen::MatrixXd::Ones(2, 2)).norm() < 1e-12);
}

TEST_CASE("zero kernel gives an empty factor") {
  const FactorizedKernel fk = factorize_exact(Eigen::MatrixXd::Zero(3, 3));
  CHECK(fk.q_matrix.cols() == 0);
  CHECK(fk.width() == 0);
  CHECK(map_products_to_features(fk, Eigen::VectorXd::Ones(3)).size() == 0);
}

TEST_CASE("non-PSD input is rejected") {
  Eigen::MatrixXd k(2, 2);
  k << 0, 1, 1, 0;
  CHECK_THROWS_AS(factorize_exact(k), std::domain_error);
  Eigen::MatrixXd slightly(2, 2);
  slightly << 1, 0, 0, -1e-12;
  CHECK_NOTHROW(factorize_exact(slightly));
}

TEST_CASE("exact factorization invariants") {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd z = unit_rows(5 + 4 * trial, 4, rng);
    const KernelSpec spec = trial % 2 ? KernelSpec::inverse_polynomial() : KernelSpec::gaussian_rbf(0.5);
    const FactorizedKernel fk = factorize_exact(spec, z);
    const Eigen::MatrixXd k = build_kernel_matrix(spec, z);
    CHECK(rel_err(fk.q_matrix * fk.q_matrix.transpose(), k) <= 1e-8);
    CHECK(fk.width() <= z.rows());
    for (Eigen::Index i = 1; i < fk.pinv.sigma.size(); ++i) CHECK(fk.pinv.sigma(i) <= fk.pinv.sigma(i - 1));
    CHECK(fk.landmark_indices.empty());
    CHECK_FALSE(fk.is_nystrom());
  }
}

TEST_CASE("feature map reproduces training rows of Q") {
  Rng rng(4);
  const Eigen::MatrixXd z = unit_rows(12, 3, rng);
  const FactorizedKernel fk = factorize_exact(KernelSpec::gaussian_rbf(0.2), z);
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Eigen::VectorXd f = map_to_features(fk, z.row(r).transpose());
    CHECK((f - fk.q_matrix.row(r).transpose()).norm() < 1e-6);
  }
  const Eigen::MatrixXd rows = map_rows_to_features(fk, z);
  CHECK((rows - fk.q_matrix).norm() < 1e-6 * std::sqrt(double(z.rows())));
}

TEST_CASE("pseudo-inverse of the identity") {
  const FactorizedKernel fk = factorize_exact(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
  const Eigen::VectorXd out = map_products_to_features(fk, v);
  // Q is orthogonal here, so Q^+ v reproduces Q^T v.
  CHECK((out - fk.q_matrix.transpose() * v).norm() < 1e-12);
  CHECK(out.norm() == doctest::Approx(v.norm()));
}

TEST_CASE("truncated svd drops tiny singular values") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-12;
  const PseudoInverse p = truncated_svd(a);
  CHECK(p.sigma.size() == 1);
  CHECK(p.width() == 3);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(0, 0) = 1.0;
  CHECK((p.matrix() - expected).norm() < 1e-15);
}

TEST_CASE("nystrom with every vector as landmark is exact") {
  Rng rng(9);
  for (Eigen::Index n : {10, 25, 50}) {
    const Eigen::MatrixXd z = unit_rows(n, 5, rng);
    for (KernelSpec spec : {KernelSpec::gaussian_rbf(0.2), KernelSpec::inverse_polynomial()}) {
      const FactorizedKernel fk = nystrom(spec, z, n, 3);
      CHECK(rel_err(fk.q_matrix * fk.q_matrix.transpose(), build_kernel_matrix(spec, z)) <= 1e-6);
    }
  }
}

TEST_CASE("nystrom on identical vectors") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(6, 2);
  z.col(0).setOnes();
  const FactorizedKernel fk = nystrom(KernelSpec::gaussian_rbf(0.2), z, 1, 0);
  CHECK((fk.q_matrix * fk.q_matrix.transpose() - Eigen::MatrixXd::Ones(6, 6)).norm() < 1e-12);
}

TEST_CASE("nystrom is deterministic in the seed") {
  Rng rng(10);
  const Eigen::MatrixXd z = unit_rows(30, 4, rng);
  const auto a = nystrom(KernelSpec::gaussian_rbf(0.2), z, 8, 77);
  const auto b = nystrom(KernelSpec::gaussian_rbf(0.2), z, 8, 77);
  CHECK(a.landmark_indices == b.landmark_indices);
  CHECK(a.q_matrix == b.q_matrix);
  CHECK(a.landmark_indices.size() == 8);
  CHECK(a.anchors.rows() == 8);
  CHECK(a.is_nystrom());
}

TEST_CASE("nystrom landmark count is validated") {
  Rng rng(12);
  const Eigen::MatrixXd z = unit_rows(5, 2, rng);
  CHECK_THROWS(nystrom(KernelSpec::gaussian_rbf(0.2), z, 0, 1));
  CHECK_THROWS(nystrom(KernelSpec::gaussian_rbf(0.2), z, 6, 1));
}
