#pragma once

#include "cgcn/kernels.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace cgcn {

/// Relative eigenvalue / singular-value cutoff for rank decisions.
inline constexpr double kRankCutoff = 1e-10;
/// Most negative eigenvalue tolerated in a kernel matrix before it is
/// treated as not positive semi-definite.
inline constexpr double kPsdTolerance = 1e-8;

/// Thin SVD of the anchor factor, kept so Q^+ v can be applied to new
/// kernel-product vectors: Q^+ = V diag(1/sigma) U^T over the retained
/// singular values.
struct PseudoInverse {
  Eigen::MatrixXd u;           // anchors x P
  Eigen::VectorXd sigma;       // P, nonincreasing
  Eigen::MatrixXd v;           // P x P
  double cutoff = kRankCutoff; // relative to sigma(0)

  Eigen::Index width() const { return v.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& products) const;
  Eigen::MatrixXd matrix() const;
};

/// K ~= Q Q^T for one hop of one layer.
///
/// `anchors` are the vectors new inputs are compared against: every training
/// vector for the exact factorization, the sampled landmarks for Nystrom.
/// `q_matrix` is the training factor and is only present on a freshly
/// trained kernel; a deserialized one carries anchors and the pseudo-inverse.
struct FactorizedKernel {
  KernelSpec spec;
  int hop = 0;
  Eigen::MatrixXd q_matrix;
  Eigen::MatrixXd anchors;
  std::vector<Eigen::Index> landmark_indices;  // empty for the exact factorization
  PseudoInverse pinv;

  Eigen::Index width() const { return pinv.width(); }
  Eigen::Index input_dim() const { return anchors.cols(); }
  bool is_nystrom() const { return !landmark_indices.empty(); }
};

/// Thin SVD with the relative cutoff applied: columns whose singular value
/// is at most cutoff * sigma_max are dropped.
PseudoInverse truncated_svd(const Eigen::MatrixXd& a, double cutoff = kRankCutoff);

/// Eigendecomposition-based factor of a PSD matrix: Q = U_r diag(sqrt(lambda_r)).
/// Throws std::domain_error when an eigenvalue falls below -kPsdTolerance.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& k_matrix);

/// Exact factorization of the kernel matrix over the rows of `vectors`.
FactorizedKernel factorize_exact(const KernelSpec& spec, const Eigen::MatrixXd& vectors, int hop = 0);

/// Factorization of a precomputed symmetric kernel matrix; no anchors are
/// attached, so map_to_features needs explicit kernel products.
FactorizedKernel factorize_exact(const Eigen::MatrixXd& k_matrix);

/// Nystrom approximation with `landmarks` rows sampled uniformly without
/// replacement: Q = K_{N,p} U diag(lambda^{-1/2}) from the eigendecomposition
/// of the landmark kernel K_{p,p}. Only the N x p block is evaluated.
FactorizedKernel nystrom(const KernelSpec& spec, const Eigen::MatrixXd& vectors, Eigen::Index landmarks,
                         std::uint64_t seed, int hop = 0);

/// Q^+ v for a vector of kernel products against the anchors.
Eigen::VectorXd map_products_to_features(const FactorizedKernel& fk, const Eigen::VectorXd& products);

/// Q^+ v(z), evaluating the kernel products of z against the anchors.
Eigen::VectorXd map_to_features(const FactorizedKernel& fk, const Eigen::VectorXd& z);

/// Row-wise map_to_features over an n x F block, as an n x P matrix.
Eigen::MatrixXd map_rows_to_features(const FactorizedKernel& fk, const Eigen::MatrixXd& rows);

}  // namespace cgcn
