#include "cgcn/kernels.hpp"

#include <limits>
#include <numbers>

namespace cgcn {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kInversePolynomial: return "inverse-polynomial";
    case KernelKind::kGaussianRbf: return "gaussian-rbf";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "inverse-polynomial" || name == "ip") return KernelKind::kInversePolynomial;
  if (name == "gaussian-rbf" || name == "rbf") return KernelKind::kGaussianRbf;
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec KernelSpec::gaussian_rbf(double gamma) {
  KernelSpec spec{KernelKind::kGaussianRbf, gamma};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::kGaussianRbf && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw std::invalid_argument("KernelSpec: gaussian-rbf needs gamma > 0");
  }
}

Eigen::MatrixXd build_kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& vectors) {
  const Eigen::Index n = vectors.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p; q < n; ++q) {
      k(p, q) = eval_kernel(spec, vectors.row(p), vectors.row(q));
      k(q, p) = k(p, q);
    }
  }
  return k;
}

Eigen::MatrixXd build_cross_kernel(const KernelSpec& spec, const Eigen::MatrixXd& rows,
                                   const Eigen::MatrixXd& cols) {
  if (rows.cols() != cols.cols()) {
    throw std::invalid_argument("build_cross_kernel: dimension mismatch");
  }
  Eigen::MatrixXd k(rows.rows(), cols.rows());
  for (Eigen::Index p = 0; p < rows.rows(); ++p) {
    for (Eigen::Index q = 0; q < cols.rows(); ++q) {
      k(p, q) = eval_kernel(spec, rows.row(p), cols.row(q));
    }
  }
  return k;
}

Eigen::VectorXd kernel_products_vector(const KernelSpec& spec, const Eigen::VectorXd& z,
                                       const Eigen::MatrixXd& landmarks) {
  Eigen::VectorXd v(landmarks.rows());
  if (landmarks.rows() > 0 && landmarks.cols() != z.size()) {
    throw std::invalid_argument("kernel_products_vector: dimension mismatch");
  }
  for (Eigen::Index p = 0; p < landmarks.rows(); ++p) {
    v(p) = eval_kernel(spec, z, landmarks.row(p).transpose());
  }
  return v;
}

Activation Activation::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("Activation: polynomial needs coefficients");
  return {ActivationKind::kPolynomial, std::move(coefficients)};
}

Activation Activation::monomial(int degree) {
  if (degree < 0) throw std::invalid_argument("Activation: negative polynomial degree");
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = 1.0;
  return {ActivationKind::kPolynomial, std::move(c)};
}

namespace {

// log of the kernel weight w_j in C_sigma(t)^2 = sum_j w_j a_j^2 t^{2j}.
long double log_series_weight(KernelKind kernel, long double gamma, int j) {
  if (kernel == KernelKind::kInversePolynomial) {
    return static_cast<long double>(j + 1) * std::log(2.0L);
  }
  return std::lgamma(static_cast<long double>(j) + 1.0L) + 2.0L * gamma -
         static_cast<long double>(j) * std::log(2.0L * gamma);
}

// |a_j| of the Maclaurin series, as a log (or -inf when a_j = 0).
long double log_abs_coefficient(ActivationKind kind, int j) {
  constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
  const long double log_sqrt_pi = 0.5L * std::log(std::numbers::pi_v<long double>);
  if (kind == ActivationKind::kErf) {
    // erf(t) = 2/sqrt(pi) sum_n (-1)^n t^{2n+1} / (n! (2n+1))
    if (j % 2 == 0) return kNegInf;
    const int n = (j - 1) / 2;
    return std::log(2.0L) - log_sqrt_pi - std::lgamma(n + 1.0L) - std::log(2.0L * n + 1.0L);
  }
  // smoothed hinge: 1/(2 sqrt(pi)) + t/2 + 1/sqrt(pi) sum_n (-1)^n t^{2n+2} / (n! (2n+1)(2n+2))
  if (j == 0) return -std::log(2.0L) - log_sqrt_pi;
  if (j == 1) return -std::log(2.0L);
  if (j % 2 == 1) return kNegInf;
  const int n = (j - 2) / 2;
  return -log_sqrt_pi - std::lgamma(n + 1.0L) - std::log(2.0L * n + 1.0L) -
         std::log(2.0L * n + 2.0L);
}

double sum_taylor_series(ActivationKind kind, double t, KernelKind kernel, double gamma) {
  const long double log_t2 = t > 0.0 ? 2.0L * std::log(static_cast<long double>(t))
                                     : -std::numeric_limits<long double>::infinity();
  long double sum = 0.0L;
  for (int j = 0; j < 20000; ++j) {
    const long double log_a = log_abs_coefficient(kind, j);
    if (std::isinf(log_a)) continue;
    const long double log_t_term = j == 0 ? 0.0L : static_cast<long double>(j) * log_t2;
    if (std::isinf(log_t_term)) continue;  // t = 0 kills every j > 0 term
    const long double term =
        std::exp(log_series_weight(kernel, gamma, j) + 2.0L * log_a + log_t_term);
    sum += term;
    if (j > 8 && term < 1e-20L * sum) break;
  }
  return static_cast<double>(std::sqrt(sum));
}

}  // namespace

double c_sigma_bound(const Activation& act, double t, KernelKind kernel, double gamma) {
  if (!(t >= 0.0)) throw std::invalid_argument("c_sigma_bound: t must be nonnegative");
  if (kernel == KernelKind::kGaussianRbf && !(gamma > 0.0)) {
    throw std::invalid_argument("c_sigma_bound: gaussian-rbf needs gamma > 0");
  }
  switch (act.kind) {
    case ActivationKind::kSinusoid:
      if (kernel == KernelKind::kInversePolynomial) return 2.0 * std::exp(t * t);
      return std::exp(t * t / (4.0 * gamma) + gamma);
    case ActivationKind::kPolynomial: {
      long double sum = 0.0L;
      for (std::size_t j = 0; j < act.coefficients.size(); ++j) {
        const long double a = act.coefficients[j];
        if (a == 0.0L) continue;
        const auto jj = static_cast<int>(j);
        sum += std::exp(log_series_weight(kernel, gamma, jj)) * a * a *
               std::pow(static_cast<long double>(t), 2 * jj);
      }
      return static_cast<double>(std::sqrt(sum));
    }
    case ActivationKind::kErf:
    case ActivationKind::kSmoothedHinge:
      if (kernel == KernelKind::kGaussianRbf) return std::numeric_limits<double>::infinity();
      return sum_taylor_series(act.kind, t, kernel, gamma);
  }
  throw std::invalid_argument("c_sigma_bound: unknown activation");
}

}  // namespace cgcn
