#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgcn {

/// {A : |A|_* <= radius}
struct NuclearBall {
  double radius = 1.0;

  explicit NuclearBall(double r) : radius(r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("NuclearBall: radius must be positive");
  }
};

/// Euclidean projection of a nonnegative vector onto {w >= 0 : sum(w) <= radius}.
///
/// Vectors already inside are returned unchanged. Otherwise the threshold
/// theta comes from the sorted cumulative-sum rule and w_i = max(v_i - theta, 0).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_l1_ball(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar radius) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(radius > Scalar(0))) throw std::invalid_argument("project_l1_ball: radius must be positive");
  Vector out = v;
  if ((out.array() < Scalar(0)).any()) {
    throw std::invalid_argument("project_l1_ball: entries must be nonnegative");
  }
  if (out.sum() <= radius) return out;

  std::vector<Scalar> sorted(out.data(), out.data() + out.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar cumsum(0);
  Scalar theta(0);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const Scalar candidate = (cumsum - radius) / Scalar(i + 1);
    if (sorted[i] - candidate > Scalar(0)) theta = candidate;
  }
  return (out.array() - theta).cwiseMax(Scalar(0)).matrix();
}

template <typename Derived>
typename Derived::Scalar nuclear_norm(const Eigen::MatrixBase<Derived>& a) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.size() == 0) return typename Derived::Scalar(0);
  Eigen::BDCSVD<Matrix> svd{Matrix(a)};
  return svd.singularValues().sum();
}

/// Euclidean projection onto the nuclear-norm ball: the singular values are
/// projected onto the l1 ball and the factors are kept. Matrices already
/// inside the ball are returned as is.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> project_nuclear(
    const Eigen::MatrixBase<Derived>& a, const NuclearBall& ball) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix m = a;
  if (m.size() == 0) return m;
  if (!m.allFinite()) throw std::domain_error("project_nuclear: non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::domain_error("project_nuclear: SVD failed");
  const auto& sigma = svd.singularValues();
  if (sigma.sum() <= Scalar(ball.radius)) return m;
  const auto shrunk = project_l1_ball(sigma, Scalar(ball.radius));
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

/// Nuclear radius implied by per-column l2 bounds R on the concatenated
/// filters: R * sqrt(f_out * f_in * (hops + 1)).
template <typename Scalar>
Scalar nuclear_budget(Scalar r, Eigen::Index f_in, Eigen::Index f_out, int hops) {
  if (!(r > Scalar(0)) || f_in < 1 || f_out < 1 || hops < 0) {
    throw std::invalid_argument("nuclear_budget: arguments must be positive");
  }
  return r * std::sqrt(Scalar(f_out) * Scalar(f_in) * Scalar(hops + 1));
}

enum class OptimizerKind { kProjectedGd, kProjectedAdam };

std::string_view to_string(OptimizerKind kind);
/// Accepts "gd"/"projected-gd" and "adam"/"projected-adam".
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::kProjectedAdam;
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter optimizer state; owned by a single training loop.
struct OptimizerState {
  OptimizerSettings settings;
  Eigen::MatrixXd first_moment;
  Eigen::MatrixXd second_moment;
  long round = 0;

  OptimizerState() = default;
  OptimizerState(const OptimizerSettings& s, Eigen::Index rows, Eigen::Index cols);
};

/// One projected step: the raw GD or bias-corrected Adam update followed by
/// the projection onto `ball`.
Eigen::MatrixXd step(OptimizerState& state, const Eigen::MatrixXd& a, const Eigen::MatrixXd& grad,
                     const NuclearBall& ball);

/// Same update without a constraint (used for the readout bias).
Eigen::MatrixXd step(OptimizerState& state, const Eigen::MatrixXd& a, const Eigen::MatrixXd& grad);

/// Halves the step size after `patience` epochs without improvement,
/// never going below `min_step`.
class PlateauSchedule {
 public:
  PlateauSchedule(int patience = 20, double factor = 0.5, double min_step = 1e-6)
      : patience_(patience), factor_(factor), min_step_(min_step) {}

  /// Records an epoch objective; returns the (possibly reduced) step size.
  double observe(double objective, double step_size);

 private:
  int patience_;
  double factor_;
  double min_step_;
  double best_ = std::numeric_limits<double>::infinity();
  int stale_ = 0;
};

}  // namespace cgcn
