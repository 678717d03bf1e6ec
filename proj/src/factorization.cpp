#include "cgcn/factorization.hpp"

#include "cgcn/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <stdexcept>
#include <string>

namespace cgcn {

Eigen::VectorXd PseudoInverse::apply(const Eigen::VectorXd& products) const {
  if (products.size() != u.rows()) {
    throw std::invalid_argument("PseudoInverse::apply: expected " + std::to_string(u.rows()) +
                                " kernel products, got " + std::to_string(products.size()));
  }
  if (width() == 0) return Eigen::VectorXd();
  const Eigen::VectorXd coords = (u.transpose() * products).cwiseQuotient(sigma);
  return v * coords;
}

Eigen::MatrixXd PseudoInverse::matrix() const {
  if (width() == 0) return Eigen::MatrixXd::Zero(0, u.rows());
  return v * sigma.cwiseInverse().asDiagonal() * u.transpose();
}

PseudoInverse truncated_svd(const Eigen::MatrixXd& a, double cutoff) {
  PseudoInverse out;
  out.cutoff = cutoff;
  if (a.size() == 0) {
    out.u.resize(a.rows(), 0);
    out.sigma.resize(0);
    out.v.resize(0, 0);
    return out;
  }
  if (!a.allFinite()) throw std::domain_error("truncated_svd: non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double threshold = s.size() > 0 ? cutoff * s(0) : 0.0;
  while (rank < s.size() && s(rank) > threshold && s(rank) > 0.0) ++rank;
  out.u = svd.matrixU().leftCols(rank);
  out.sigma = s.head(rank);
  // P x P: rows index the factor's columns, columns the retained directions.
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

namespace {

struct SpectralFactor {
  Eigen::MatrixXd vectors;  // columns ordered by decreasing eigenvalue
  Eigen::VectorXd values;
};

SpectralFactor retained_spectrum(const Eigen::MatrixXd& k_matrix) {
  if (k_matrix.rows() != k_matrix.cols()) {
    throw std::invalid_argument("kernel matrix must be square");
  }
  SpectralFactor out;
  if (k_matrix.rows() == 0) {
    out.vectors.resize(0, 0);
    out.values.resize(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_matrix);
  if (eig.info() != Eigen::Success) throw std::domain_error("eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda(lambda.size() - 1);
  if (lambda(0) < -kPsdTolerance * std::max(1.0, std::abs(lambda_max))) {
    throw std::domain_error("kernel matrix is not positive semi-definite (eigenvalue " +
                            std::to_string(lambda(0)) + ")");
  }
  const double threshold = kRankCutoff * lambda_max;
  Eigen::Index rank = 0;
  for (Eigen::Index i = lambda.size() - 1; i >= 0 && lambda(i) > threshold && lambda(i) > 0.0; --i) {
    ++rank;
  }
  out.vectors.resize(k_matrix.rows(), rank);
  out.values.resize(rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    const Eigen::Index src = lambda.size() - 1 - c;
    out.values(c) = lambda(src);
    out.vectors.col(c) = eig.eigenvectors().col(src);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& k_matrix) {
  const SpectralFactor f = retained_spectrum(k_matrix);
  return f.vectors * f.values.cwiseSqrt().asDiagonal();
}

FactorizedKernel factorize_exact(const Eigen::MatrixXd& k_matrix) {
  FactorizedKernel fk;
  fk.q_matrix = psd_factor(k_matrix);
  fk.pinv = truncated_svd(fk.q_matrix);
  return fk;
}

FactorizedKernel factorize_exact(const KernelSpec& spec, const Eigen::MatrixXd& vectors, int hop) {
  spec.validate();
  FactorizedKernel fk = factorize_exact(build_kernel_matrix(spec, vectors));
  fk.spec = spec;
  fk.hop = hop;
  fk.anchors = vectors;
  return fk;
}

FactorizedKernel nystrom(const KernelSpec& spec, const Eigen::MatrixXd& vectors, Eigen::Index landmarks,
                         std::uint64_t seed, int hop) {
  spec.validate();
  const Eigen::Index n = vectors.rows();
  if (landmarks < 1 || landmarks > n) {
    throw std::invalid_argument("nystrom: landmark count " + std::to_string(landmarks) +
                                " outside [1, " + std::to_string(n) + "]");
  }
  Rng rng(seed);
  FactorizedKernel fk;
  fk.spec = spec;
  fk.hop = hop;
  fk.landmark_indices = sample_without_replacement(n, landmarks, rng);

  fk.anchors.resize(landmarks, vectors.cols());
  for (Eigen::Index p = 0; p < landmarks; ++p) {
    fk.anchors.row(p) = vectors.row(fk.landmark_indices[static_cast<std::size_t>(p)]);
  }

  const SpectralFactor f = retained_spectrum(build_kernel_matrix(spec, fk.anchors));
  const Eigen::MatrixXd inv_root = f.vectors * f.values.cwiseSqrt().cwiseInverse().asDiagonal();
  fk.q_matrix = build_cross_kernel(spec, vectors, fk.anchors) * inv_root;

  // The landmark rows of Q form the anchor factor U diag(sqrt(lambda)); its
  // pseudo-inverse maps kernel products against the landmarks to Q's coordinates.
  Eigen::MatrixXd anchor_factor(landmarks, fk.q_matrix.cols());
  for (Eigen::Index p = 0; p < landmarks; ++p) {
    anchor_factor.row(p) = fk.q_matrix.row(fk.landmark_indices[static_cast<std::size_t>(p)]);
  }
  fk.pinv = truncated_svd(anchor_factor);
  return fk;
}

Eigen::VectorXd map_products_to_features(const FactorizedKernel& fk, const Eigen::VectorXd& products) {
  return fk.pinv.apply(products);
}

Eigen::VectorXd map_to_features(const FactorizedKernel& fk, const Eigen::VectorXd& z) {
  if (fk.width() == 0) return Eigen::VectorXd();
  if (z.size() != fk.input_dim()) {
    throw std::invalid_argument("map_to_features: input has dimension " + std::to_string(z.size()) +
                                ", factorization expects " + std::to_string(fk.input_dim()));
  }
  return fk.pinv.apply(kernel_products_vector(fk.spec, z, fk.anchors));
}

Eigen::MatrixXd map_rows_to_features(const FactorizedKernel& fk, const Eigen::MatrixXd& rows) {
  if (fk.width() == 0) return Eigen::MatrixXd::Zero(rows.rows(), 0);
  if (rows.cols() != fk.input_dim()) {
    throw std::invalid_argument("map_rows_to_features: input has dimension " +
                                std::to_string(rows.cols()) + ", factorization expects " +
                                std::to_string(fk.input_dim()));
  }
  const Eigen::MatrixXd products = build_cross_kernel(fk.spec, rows, fk.anchors);
  // rows x P = products * (Q^+)^T
  return ((products * fk.pinv.u) * fk.pinv.sigma.cwiseInverse().asDiagonal()) * fk.pinv.v.transpose();
}

}  // namespace cgcn
