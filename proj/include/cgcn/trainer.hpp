#pragma once

#include "cgcn/convex_opt.hpp"
#include "cgcn/model.hpp"
#include "cgcn/random.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cgcn {

struct Sample {
  Graph graph;
  GraphSignal signal;
  int label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 2;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  Eigen::Index feature_dim() const { return samples.empty() ? 0 : samples.front().signal.cols(); }

  /// Labels in [0, num_classes), equal feature dims, signal rows = node counts.
  void validate() const;
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

enum class FactorizationKind { kNystrom, kExact };

inline constexpr int kDefaultBatchSize = 128;

struct TrainConfig {
  /// Widths of the hidden layers; the last layer always emits num_classes
  /// features, so {32} is a two-layer model.
  std::vector<Eigen::Index> hidden_widths{32};
  int hops = 1;
  /// One spec per layer, or a single spec shared by every layer.
  std::vector<KernelSpec> kernels{KernelSpec::gaussian_rbf(0.2)};
  /// Explicit nuclear radii per layer; when empty each layer uses
  /// nuclear_budget(radius, F_in, F_out, hops).
  std::vector<double> budgets;
  double radius = 1.0;
  FactorizationKind factorization = FactorizationKind::kNystrom;
  Eigen::Index landmarks = 32;
  OptimizerSettings optimizer;
  int epochs = 200;
  /// 0 picks mini-batches of kDefaultBatchSize (full batch for smaller sets).
  int batch_size = 0;
  int patience = 20;
  double min_step = 1e-6;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;
  ShiftKind shift_kind = ShiftKind::kSymNormAdjacency;
  /// Start filters from a random point of the ball instead of zero.
  bool random_init = false;

  int num_layers() const { return static_cast<int>(hidden_widths.size()) + 1; }
  const KernelSpec& kernel_for(int layer) const;
  void validate() const;
};

/// Deterministic shuffled (train, val, test) partition.
std::array<Dataset, 3> split_dataset(const Dataset& ds, const std::array<double, 3>& ratios,
                                     std::uint64_t seed);
/// Index form of split_dataset.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const std::array<double, 3>& ratios,
                                                      std::uint64_t seed);

/// Mean multinomial-logistic loss of one layer's filters.
///
/// Sum pooling commutes with the layer's linear map, so each sample enters
/// only through its pooled concatenated features p_j (a row of `pooled`):
///   scores_j = W^T A^T p_j + b,  J = mean_j [logsumexp(scores_j) - scores_j[y_j]].
/// W is the frozen readout (identity for the last layer) and the bias b is
/// trained only for the last layer.
class LayerObjective {
 public:
  struct Result {
    double value = 0.0;
    Eigen::MatrixXd filter_grad;
    Eigen::VectorXd bias_grad;
  };

  LayerObjective(Eigen::MatrixXd pooled, std::vector<int> labels, Eigen::MatrixXd readout_weights,
                 bool train_bias);

  static LayerObjective from_features(const std::vector<HopFeatures>& per_sample,
                                      const std::vector<int>& labels,
                                      const Eigen::MatrixXd& readout_weights, bool train_bias);

  double value(const Eigen::MatrixXd& filters, const Eigen::VectorXd& bias) const;
  Result evaluate(const Eigen::MatrixXd& filters, const Eigen::VectorXd& bias) const;
  LayerObjective subset(const std::vector<Eigen::Index>& rows) const;

  /// Upper estimate of the gradient's Lipschitz constant in (A, b): the
  /// softmax curvature is at most 1/2, times the top eigenvalues of the
  /// pooled Gram matrix and of W W^T, both by power iteration.
  double lipschitz_estimate(int iterations = 500) const;

  Eigen::Index num_samples() const { return pooled_.rows(); }
  Eigen::Index feature_width() const { return pooled_.cols(); }
  Eigen::Index output_dim() const { return readout_.rows(); }
  Eigen::Index num_classes() const { return readout_.cols(); }
  bool trains_bias() const { return train_bias_; }
  const Eigen::MatrixXd& pooled() const { return pooled_; }
  const std::vector<int>& labels() const { return labels_; }
  const Eigen::MatrixXd& readout_weights() const { return readout_; }

 private:
  Eigen::MatrixXd pooled_;
  std::vector<int> labels_;
  Eigen::MatrixXd readout_;
  bool train_bias_;
};

/// Free-function form: objective value and filter gradient at `filters`
/// with a zero bias.
std::pair<double, Eigen::MatrixXd> layer_objective_and_gradient(const Eigen::MatrixXd& filters,
                                                                const std::vector<HopFeatures>& per_sample,
                                                                const std::vector<int>& labels,
                                                                const Readout& readout);

/// Multinomial logistic loss of one score vector.
double logistic_loss(const Eigen::VectorXd& scores, int label);

struct SolveSettings {
  OptimizerSettings optimizer;
  int epochs = 200;
  int batch_size = 0;  // <= 0 or >= m: full batch
  int patience = 20;
  double min_step = 1e-6;
  /// Called after every epoch with (epoch, objective, step size used).
  std::function<void(int, double, double)> on_epoch;
};

struct SolveResult {
  Eigen::MatrixXd filters;
  Eigen::VectorXd bias;
  std::vector<double> trace;  // full objective after every epoch
};

/// Projected first-order minimization of one layer objective over the
/// nuclear ball, starting from (filters, bias).
SolveResult solve_layer(const LayerObjective& objective, const NuclearBall& ball,
                        const SolveSettings& settings, Eigen::MatrixXd filters, Eigen::VectorXd bias,
                        Rng& rng);

struct TrainResult {
  CgcnModel model;
  std::vector<std::vector<double>> traces;  // per layer
};

/// Per-epoch progress callback: (layer, epoch, objective, step size).
using EpochCallback = std::function<void(int, int, double, double)>;

/// Bottom-up training: for each layer build the per-hop factorizations from
/// the layer inputs, assemble kernel features, solve the layer's convex
/// problem and feed its outputs to the next layer. Trains on all of `ds`.
TrainResult train_layerwise(const Dataset& ds, const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

/// Random draw from the ball, used for initialization-independence checks.
Eigen::MatrixXd random_point_in_ball(Eigen::Index rows, Eigen::Index cols, const NuclearBall& ball, Rng& rng);

struct Metrics {
  double accuracy = 0.0;
  double mean_loss = 0.0;
};

Metrics evaluate(const CgcnModel& model, const Dataset& ds);
int predict(const CgcnModel& model, const Sample& sample);

}  // namespace cgcn
