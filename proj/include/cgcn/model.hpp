#pragma once

#include "cgcn/factorization.hpp"
#include "cgcn/graph.hpp"

#include <Eigen/Core>

#include <vector>

namespace cgcn {

/// Per-hop kernel feature signals Z^k, each n x P_k.
using HopFeatures = std::vector<Eigen::MatrixXd>;

/// One convexified graph-convolution layer.
///
/// `filters` stacks the per-hop filter blocks vertically into a
/// (P_0 + ... + P_K) x F_out matrix; the nuclear-norm budget applies to this
/// concatenated matrix.
struct CgcnLayer {
  std::vector<FactorizedKernel> kernels;  // one per hop 0..K
  Eigen::MatrixXd filters;
  double budget = 1.0;

  int hops() const { return static_cast<int>(kernels.size()) - 1; }
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const { return filters.cols(); }
  Eigen::Index feature_width() const;
  Eigen::Index hop_offset(int k) const;
  Eigen::Index hop_width(int k) const { return kernels.at(static_cast<std::size_t>(k)).width(); }
};

/// Affine map from pooled graph features to class scores.
struct Readout {
  Eigen::MatrixXd weights;  // F x G
  Eigen::VectorXd bias;     // G

  Eigen::VectorXd scores(const Eigen::VectorXd& pooled) const {
    return weights.transpose() * pooled + bias;
  }
};

/// Stacked layers with sum pooling and a final readout.
///
/// Hidden layer l carries the frozen readout used while it was trained; the
/// last layer emits G features and its readout is the identity plus a bias.
struct CgcnModel {
  ShiftKind shift_kind = ShiftKind::kSymNormAdjacency;
  std::vector<CgcnLayer> layers;
  std::vector<Readout> hidden_readouts;
  Readout readout;

  Eigen::Index num_classes() const { return readout.bias.size(); }
  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }
};

/// Concatenates per-hop feature blocks column-wise (n x sum P_k).
Eigen::MatrixXd concat_features(const HopFeatures& features);

/// Step 1 of the layer: normalize the input rows, shift K times, normalize
/// every hop, and map each row through Q^+ of that hop's kernel.
HopFeatures layer_kernel_features(const CgcnLayer& layer, const ShiftOperator& s, const GraphSignal& x);

/// Step 2: X_out = sum_k Z^k A_k.
GraphSignal layer_forward(const CgcnLayer& layer, const HopFeatures& features);

inline Eigen::VectorXd sum_pool(const GraphSignal& x) { return x.colwise().sum().transpose(); }

/// Final-layer node signal for one graph.
GraphSignal model_node_output(const CgcnModel& model, const Graph& graph, const GraphSignal& x);

/// Sum-pooled final-layer representation (the input of the readout).
Eigen::VectorXd model_representation(const CgcnModel& model, const Graph& graph, const GraphSignal& x);

/// Class scores for one graph.
Eigen::VectorXd model_forward(const CgcnModel& model, const Graph& graph, const GraphSignal& x);

}  // namespace cgcn
