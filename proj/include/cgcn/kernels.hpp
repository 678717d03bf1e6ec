#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgcn {

enum class KernelKind { kInversePolynomial, kGaussianRbf };

std::string_view to_string(KernelKind kind);
/// Accepts "inverse-polynomial"/"ip" and "gaussian-rbf"/"rbf".
KernelKind parse_kernel_kind(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::kGaussianRbf;
  double gamma = 0.2;  // RBF bandwidth, unused by the inverse-polynomial kernel

  static KernelSpec inverse_polynomial() { return {KernelKind::kInversePolynomial, 0.0}; }
  static KernelSpec gaussian_rbf(double gamma);

  /// Throws unless gamma > 0 for the RBF kernel.
  void validate() const;
};

/// Slack allowed on the unit-ball precondition of the inverse-polynomial kernel.
inline constexpr double kUnitBallSlack = 1e-9;

/// k(z, z2) for the inverse-polynomial kernel 1 / (2 - <z, z2>) or the
/// Gaussian RBF kernel exp(-gamma |z - z2|^2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar eval_kernel(const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& z,
                                      const Eigen::MatrixBase<DerivedB>& z2) {
  using Scalar = typename DerivedA::Scalar;
  if (z.size() != z2.size()) {
    throw std::invalid_argument("eval_kernel: dimension mismatch (" + std::to_string(z.size()) +
                                " vs " + std::to_string(z2.size()) + ")");
  }
  switch (spec.kind) {
    case KernelKind::kInversePolynomial: {
      const Scalar bound = Scalar(1) + Scalar(kUnitBallSlack);
      if (z.squaredNorm() > bound * bound || z2.squaredNorm() > bound * bound) {
        throw std::domain_error("eval_kernel: inverse-polynomial kernel needs inputs in the unit ball");
      }
      Scalar dot(0);
      for (Eigen::Index i = 0; i < z.size(); ++i) dot += z(i) * z2(i);
      return Scalar(1) / (Scalar(2) - dot);
    }
    case KernelKind::kGaussianRbf: {
      Scalar dist2(0);
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const Scalar d = z(i) - z2(i);
        dist2 += d * d;
      }
      return std::exp(-Scalar(spec.gamma) * dist2);
    }
  }
  throw std::invalid_argument("eval_kernel: unknown kernel kind");
}

/// Gram matrix over the rows of `vectors` (N x F). Only the upper triangle is
/// evaluated; the lower one is mirrored so the result is exactly symmetric.
Eigen::MatrixXd build_kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& vectors);

/// Cross-kernel block: entry (p, q) = k(rows.row(p), cols.row(q)).
Eigen::MatrixXd build_cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& rows,
                                   const Eigen::MatrixXd& cols);

/// Vector of kernel products k(z, landmark_p) over the rows of `landmarks`.
Eigen::VectorXd kernel_products_vector(const KernelSpec& spec, const Eigen::VectorXd& z,
                                       const Eigen::MatrixXd& landmarks);

enum class ActivationKind { kPolynomial, kSinusoid, kErf, kSmoothedHinge };

struct Activation {
  ActivationKind kind = ActivationKind::kSinusoid;
  /// Power-series coefficients a_0..a_d, polynomial activations only.
  std::vector<double> coefficients;

  static Activation polynomial(std::vector<double> coefficients);
  /// sigma(t) = t^degree.
  static Activation monomial(int degree);
  static Activation sinusoid() { return {ActivationKind::kSinusoid, {}}; }
  static Activation erf() { return {ActivationKind::kErf, {}}; }
  static Activation smoothed_hinge() { return {ActivationKind::kSmoothedHinge, {}}; }

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

/// Upper bound on the smoothness functional C_sigma(t) that certifies the
/// activation's filters lie in the kernel's RKHS.
///
/// Sinusoid uses the closed-form bounds 2 e^{t^2} (inverse polynomial) and
/// e^{t^2/(4 gamma) + gamma} (RBF). Polynomials sum their finite series
/// exactly. Erf and smoothed hinge sum the convergent Taylor series under
/// the inverse-polynomial kernel and are +inf under the RBF kernel.
double c_sigma_bound(const Activation& act, double t, KernelKind kernel, double gamma);

}  // namespace cgcn
