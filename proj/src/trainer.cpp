#include "cgcn/trainer.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cgcn {

void Dataset::validate() const {
  if (num_classes < 1) throw std::invalid_argument("Dataset: num_classes must be positive");
  const Eigen::Index f = feature_dim();
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Sample& s = samples[j];
    if (s.label < 0 || s.label >= num_classes) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(j) + " has label " +
                                  std::to_string(s.label) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
    }
    if (s.signal.cols() != f || f < 1) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(j) + " has feature dim " +
                                  std::to_string(s.signal.cols()) + ", expected " + std::to_string(f));
    }
    if (s.signal.rows() != static_cast<Eigen::Index>(s.graph.num_nodes())) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(j) +
                                  " signal rows do not match its node count");
    }
    if (!s.signal.allFinite()) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(j) + " has non-finite features");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(samples.at(i));
  return out;
}

const KernelSpec& TrainConfig::kernel_for(int layer) const {
  if (kernels.size() == 1) return kernels.front();
  return kernels.at(static_cast<std::size_t>(layer));
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be at least 1");
  if (hops < 0) throw std::invalid_argument("TrainConfig: hops must be nonnegative");
  for (Eigen::Index w : hidden_widths) {
    if (w < 1) throw std::invalid_argument("TrainConfig: hidden widths must be positive");
  }
  if (kernels.empty() || (kernels.size() != 1 && static_cast<int>(kernels.size()) != num_layers())) {
    throw std::invalid_argument("TrainConfig: need one kernel spec or one per layer");
  }
  for (const auto& k : kernels) k.validate();
  if (!budgets.empty() && static_cast<int>(budgets.size()) != num_layers()) {
    throw std::invalid_argument("TrainConfig: need one budget per layer");
  }
  for (double b : budgets) {
    if (!(b > 0.0)) throw std::invalid_argument("TrainConfig: budgets must be positive");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("TrainConfig: radius must be positive");
  if (landmarks < 1) throw std::invalid_argument("TrainConfig: landmark count must be positive");
  if (!(optimizer.step_size > 0.0)) throw std::invalid_argument("TrainConfig: step size must be positive");
  if (batch_size < 0) throw std::invalid_argument("TrainConfig: batch size must be nonnegative");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be positive");
  double total = 0.0;
  for (double r : split) {
    if (!(r > 0.0)) throw std::invalid_argument("TrainConfig: split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("TrainConfig: split ratios must sum to 1");
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const std::array<double, 3>& ratios,
                                                      std::uint64_t seed) {
  double total = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw std::invalid_argument("split_dataset: ratios must be nonnegative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split_dataset: ratios must sum to 1");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {0x5b1d}));
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratios[0] * static_cast<double>(n)));
  const auto n_val = std::min(n - std::min(n, n_train),
                              static_cast<std::size_t>(std::llround(ratios[1] * static_cast<double>(n))));
  std::array<std::vector<std::size_t>, 3> out;
  out[0].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n, n_train)));
  out[1].assign(order.begin() + static_cast<std::ptrdiff_t>(out[0].size()),
                order.begin() + static_cast<std::ptrdiff_t>(out[0].size() + n_val));
  out[2].assign(order.begin() + static_cast<std::ptrdiff_t>(out[0].size() + n_val), order.end());
  static constexpr const char* kNames[] = {"train", "validation", "test"};
  for (std::size_t s = 0; s < 3; ++s) {
    if (out[s].empty()) {
      throw std::invalid_argument(std::string("split_dataset: empty ") + kNames[s] + " split for " +
                                  std::to_string(n) + " samples");
    }
  }
  return out;
}

std::array<Dataset, 3> split_dataset(const Dataset& ds, const std::array<double, 3>& ratios,
                                     std::uint64_t seed) {
  const auto idx = split_indices(ds.size(), ratios, seed);
  return {ds.subset(idx[0]), ds.subset(idx[1]), ds.subset(idx[2])};
}

double logistic_loss(const Eigen::VectorXd& scores, int label) {
  const double top = scores.maxCoeff();
  const double lse = top + std::log((scores.array() - top).exp().sum());
  return lse - scores(label);
}

LayerObjective::LayerObjective(Eigen::MatrixXd pooled, std::vector<int> labels,
                               Eigen::MatrixXd readout_weights, bool train_bias)
    : pooled_(std::move(pooled)),
      labels_(std::move(labels)),
      readout_(std::move(readout_weights)),
      train_bias_(train_bias) {
  if (static_cast<Eigen::Index>(labels_.size()) != pooled_.rows()) {
    throw std::invalid_argument("LayerObjective: " + std::to_string(labels_.size()) + " labels for " +
                                std::to_string(pooled_.rows()) + " samples");
  }
  if (pooled_.rows() == 0) throw std::invalid_argument("LayerObjective: no samples");
  for (int y : labels_) {
    if (y < 0 || y >= readout_.cols()) throw std::invalid_argument("LayerObjective: label out of range");
  }
}

LayerObjective LayerObjective::from_features(const std::vector<HopFeatures>& per_sample,
                                             const std::vector<int>& labels,
                                             const Eigen::MatrixXd& readout_weights, bool train_bias) {
  if (per_sample.empty()) throw std::invalid_argument("LayerObjective: no samples");
  Eigen::Index width = 0;
  for (const auto& hop : per_sample.front()) width += hop.cols();
  Eigen::MatrixXd pooled(static_cast<Eigen::Index>(per_sample.size()), width);
  for (std::size_t j = 0; j < per_sample.size(); ++j) {
    Eigen::Index offset = 0;
    for (const auto& hop : per_sample[j]) {
      if (offset + hop.cols() > width) throw std::invalid_argument("LayerObjective: inconsistent hop widths");
      pooled.row(static_cast<Eigen::Index>(j)).segment(offset, hop.cols()) = hop.colwise().sum();
      offset += hop.cols();
    }
    if (offset != width) throw std::invalid_argument("LayerObjective: inconsistent hop widths");
  }
  return LayerObjective(std::move(pooled), labels, readout_weights, train_bias);
}

double LayerObjective::value(const Eigen::MatrixXd& filters, const Eigen::VectorXd& bias) const {
  const Eigen::MatrixXd scores = (pooled_ * filters) * readout_;
  double total = 0.0;
  for (Eigen::Index j = 0; j < scores.rows(); ++j) {
    Eigen::VectorXd s = scores.row(j).transpose();
    if (bias.size() > 0) s += bias;
    total += logistic_loss(s, labels_[static_cast<std::size_t>(j)]);
  }
  return total / static_cast<double>(scores.rows());
}

LayerObjective::Result LayerObjective::evaluate(const Eigen::MatrixXd& filters,
                                                const Eigen::VectorXd& bias) const {
  if (filters.rows() != pooled_.cols() || filters.cols() != readout_.rows()) {
    throw std::invalid_argument("LayerObjective: filters are " + std::to_string(filters.rows()) + "x" +
                                std::to_string(filters.cols()) + ", expected " +
                                std::to_string(pooled_.cols()) + "x" + std::to_string(readout_.rows()));
  }
  if (bias.size() != 0 && bias.size() != readout_.cols()) {
    throw std::invalid_argument("LayerObjective: bias has the wrong length");
  }
  const auto m = static_cast<double>(pooled_.rows());
  Eigen::MatrixXd scores = (pooled_ * filters) * readout_;
  if (bias.size() > 0) scores.rowwise() += bias.transpose();

  // residual = softmax(scores) - onehot(label), averaged over samples
  Eigen::MatrixXd residual(scores.rows(), scores.cols());
  Result r;
  for (Eigen::Index j = 0; j < scores.rows(); ++j) {
    const int y = labels_[static_cast<std::size_t>(j)];
    const double top = scores.row(j).maxCoeff();
    const Eigen::RowVectorXd e = (scores.row(j).array() - top).exp().matrix();
    const double z = e.sum();
    r.value += top + std::log(z) - scores(j, y);
    residual.row(j) = e / z;
    residual(j, y) -= 1.0;
  }
  r.value /= m;
  residual /= m;
  r.filter_grad = pooled_.transpose() * (residual * readout_.transpose());
  r.bias_grad = train_bias_ ? Eigen::VectorXd(residual.colwise().sum().transpose())
                            : Eigen::VectorXd::Zero(readout_.cols());
  return r;
}

LayerObjective LayerObjective::subset(const std::vector<Eigen::Index>& rows) const {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(rows.size()), pooled_.cols());
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.row(static_cast<Eigen::Index>(i)) = pooled_.row(rows[i]);
    y[i] = labels_[static_cast<std::size_t>(rows[i])];
  }
  return LayerObjective(std::move(p), std::move(y), readout_, train_bias_);
}

namespace {

double top_eigenvalue(const Eigen::MatrixXd& sym, int iterations) {
  if (sym.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(sym.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = sym * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(w);
    v = w / norm;
  }
  return std::max(lambda, (sym * v).norm());
}

}  // namespace

double LayerObjective::lipschitz_estimate(int iterations) const {
  const auto m = static_cast<double>(pooled_.rows());
  Eigen::MatrixXd features = pooled_;
  Eigen::MatrixXd readout = readout_;
  if (train_bias_) {
    // the bias acts like an extra constant feature that feeds scores directly
    features.conservativeResize(Eigen::NoChange, features.cols() + 1);
    features.col(features.cols() - 1).setOnes();
  }
  const double gram = top_eigenvalue(features.transpose() * features / m, iterations);
  const double out = top_eigenvalue(readout * readout.transpose(), iterations);
  return 0.5 * gram * std::max(out, train_bias_ ? 1.0 : 0.0);
}

std::pair<double, Eigen::MatrixXd> layer_objective_and_gradient(const Eigen::MatrixXd& filters,
                                                                const std::vector<HopFeatures>& per_sample,
                                                                const std::vector<int>& labels,
                                                                const Readout& readout) {
  const LayerObjective objective = LayerObjective::from_features(per_sample, labels, readout.weights, false);
  Eigen::VectorXd bias = readout.bias.size() > 0 ? readout.bias : Eigen::VectorXd::Zero(readout.weights.cols());
  // A fixed bias shifts every score; fold it into the objective by evaluating with it.
  LayerObjective::Result r = objective.evaluate(filters, bias);
  return {r.value, std::move(r.filter_grad)};
}

SolveResult solve_layer(const LayerObjective& objective, const NuclearBall& ball,
                        const SolveSettings& settings, Eigen::MatrixXd filters, Eigen::VectorXd bias,
                        Rng& rng) {
  if (settings.epochs < 1) throw std::invalid_argument("solve_layer: epochs must be at least 1");
  if (bias.size() == 0) bias = Eigen::VectorXd::Zero(objective.num_classes());
  filters = project_nuclear(filters, ball);

  OptimizerState filter_state(settings.optimizer, filters.rows(), filters.cols());
  OptimizerState bias_state(settings.optimizer, bias.size(), 1);
  PlateauSchedule schedule(settings.patience, 0.5, settings.min_step);

  const Eigen::Index m = objective.num_samples();
  const bool full_batch = settings.batch_size <= 0 || settings.batch_size >= m;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  auto apply = [&](const LayerObjective& batch) {
    const LayerObjective::Result r = batch.evaluate(filters, bias);
    if (!std::isfinite(r.value)) throw std::runtime_error("solve_layer: non-finite loss");
    filters = step(filter_state, filters, r.filter_grad, ball);
    if (objective.trains_bias()) {
      Eigen::MatrixXd b = bias;
      bias = step(bias_state, b, r.bias_grad).col(0);
    }
  };

  SolveResult out;
  out.trace.reserve(static_cast<std::size_t>(settings.epochs));
  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    if (full_batch) {
      apply(objective);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index start = 0; start < m; start += settings.batch_size) {
        const Eigen::Index stop = std::min<Eigen::Index>(m, start + settings.batch_size);
        apply(objective.subset(std::vector<Eigen::Index>(order.begin() + start, order.begin() + stop)));
      }
    }
    const double value = objective.value(filters, bias);
    if (!std::isfinite(value)) throw std::runtime_error("solve_layer: non-finite loss");
    out.trace.push_back(value);
    if (settings.on_epoch) settings.on_epoch(epoch, value, filter_state.settings.step_size);
    const double eta = schedule.observe(value, filter_state.settings.step_size);
    filter_state.settings.step_size = eta;
    bias_state.settings.step_size = eta;
  }
  out.filters = std::move(filters);
  out.bias = std::move(bias);
  return out;
}

Eigen::MatrixXd random_point_in_ball(Eigen::Index rows, Eigen::Index cols, const NuclearBall& ball, Rng& rng) {
  Eigen::MatrixXd a = gaussian_matrix(rows, cols, rng);
  const double norm = nuclear_norm(a);
  if (norm == 0.0) return a;
  std::uniform_real_distribution<double> scale(0.1, 0.9);
  return a * (scale(rng) * ball.radius / norm);
}

namespace {

Eigen::MatrixXd spherical_readout(Eigen::Index features, Eigen::Index classes, Rng& rng) {
  Eigen::MatrixXd w = gaussian_matrix(features, classes, rng);
  for (Eigen::Index c = 0; c < classes; ++c) {
    const double norm = w.col(c).norm();
    if (norm > 0.0) w.col(c) /= norm;
  }
  return w;
}

std::size_t resolve_batch_size(int configured, std::size_t m) {
  if (configured > 0) return static_cast<std::size_t>(configured);
  return std::min<std::size_t>(m, kDefaultBatchSize);
}

}  // namespace

TrainResult train_layerwise(const Dataset& ds, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  ds.validate();
  if (ds.empty()) throw std::invalid_argument("train_layerwise: empty training set");

  const std::size_t m = ds.size();
  std::vector<ShiftOperator> shifts;
  std::vector<GraphSignal> inputs;
  std::vector<int> labels;
  shifts.reserve(m);
  inputs.reserve(m);
  labels.reserve(m);
  for (const Sample& s : ds.samples) {
    shifts.push_back(build_shift_operator(s.graph, config.shift_kind));
    inputs.push_back(s.signal);
    labels.push_back(s.label);
  }

  TrainResult result;
  result.model.shift_kind = config.shift_kind;
  const int num_layers = config.num_layers();
  const auto classes = static_cast<Eigen::Index>(ds.num_classes);

  for (int l = 0; l < num_layers; ++l) {
    const bool last = l + 1 == num_layers;
    const Eigen::Index f_in = inputs.front().cols();
    const Eigen::Index f_out = last ? classes : config.hidden_widths[static_cast<std::size_t>(l)];
    const KernelSpec& spec = config.kernel_for(l);

    // Per hop, the normalized aggregated rows of every training node, flattened over (node, graph).
    std::vector<Eigen::MatrixXd> hop_rows(static_cast<std::size_t>(config.hops) + 1);
    {
      Eigen::Index total_nodes = 0;
      for (const auto& x : inputs) total_nodes += x.rows();
      for (auto& rows : hop_rows) rows.resize(total_nodes, f_in);
      Eigen::Index offset = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const ShiftStack stack(shifts[j], normalize_rows(inputs[j]), config.hops);
        for (int k = 0; k <= config.hops; ++k) {
          hop_rows[static_cast<std::size_t>(k)].middleRows(offset, inputs[j].rows()) =
              normalize_rows(stack.hop(k));
        }
        offset += inputs[j].rows();
      }
    }

    CgcnLayer layer;
    for (int k = 0; k <= config.hops; ++k) {
      const Eigen::MatrixXd& rows = hop_rows[static_cast<std::size_t>(k)];
      if (rows.rows() == 0) throw std::runtime_error("train_layerwise: training graphs have no nodes");
      FactorizedKernel fk =
          config.factorization == FactorizationKind::kExact
              ? factorize_exact(spec, rows, k)
              : nystrom(spec, rows, std::min<Eigen::Index>(config.landmarks, rows.rows()),
                        derive_seed(config.seed, {static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(k)}),
                        k);
      if (fk.width() == 0) {
        throw std::runtime_error("train_layerwise: degenerate kernel factorization at layer " +
                                 std::to_string(l) + ", hop " + std::to_string(k));
      }
      fk.q_matrix.resize(0, 0);  // features are recomputed through Q^+ below
      layer.kernels.push_back(std::move(fk));
    }
    layer.budget = config.budgets.empty()
                       ? nuclear_budget(config.radius, f_in, f_out, config.hops)
                       : config.budgets[static_cast<std::size_t>(l)];

    std::vector<HopFeatures> features;
    features.reserve(m);
    for (std::size_t j = 0; j < m; ++j) features.push_back(layer_kernel_features(layer, shifts[j], inputs[j]));

    Rng rng(derive_seed(config.seed, {0xa11ce, static_cast<std::uint64_t>(l)}));
    Readout readout;
    if (last) {
      readout.weights = Eigen::MatrixXd::Identity(classes, classes);
      readout.bias = Eigen::VectorXd::Zero(classes);
    } else {
      readout.weights = spherical_readout(f_out, classes, rng);
      readout.bias = Eigen::VectorXd::Zero(classes);
    }

    const LayerObjective objective = LayerObjective::from_features(features, labels, readout.weights, last);
    const NuclearBall ball(layer.budget);
    Eigen::MatrixXd init = config.random_init
                               ? random_point_in_ball(layer.feature_width(), f_out, ball, rng)
                               : Eigen::MatrixXd::Zero(layer.feature_width(), f_out);
    SolveSettings settings;
    settings.optimizer = config.optimizer;
    settings.epochs = config.epochs;
    settings.batch_size = static_cast<int>(resolve_batch_size(config.batch_size, m));
    settings.patience = config.patience;
    settings.min_step = config.min_step;
    if (on_epoch) {
      settings.on_epoch = [&on_epoch, l](int epoch, double value, double eta) { on_epoch(l, epoch, value, eta); };
    }
    SolveResult solved = solve_layer(objective, ball, settings, std::move(init), readout.bias, rng);

    layer.filters = std::move(solved.filters);
    if (last) readout.bias = solved.bias;

    for (std::size_t j = 0; j < m; ++j) inputs[j] = layer_forward(layer, features[j]);

    result.traces.push_back(std::move(solved.trace));
    result.model.layers.push_back(std::move(layer));
    if (last) {
      result.model.readout = std::move(readout);
    } else {
      result.model.hidden_readouts.push_back(std::move(readout));
    }
  }
  return result;
}

Metrics evaluate(const CgcnModel& model, const Dataset& ds) {
  if (ds.empty()) throw std::invalid_argument("evaluate: empty dataset");
  Metrics out;
  std::size_t correct = 0;
  for (const Sample& s : ds.samples) {
    const Eigen::VectorXd scores = model_forward(model, s.graph, s.signal);
    Eigen::Index best = 0;
    scores.maxCoeff(&best);
    if (best == s.label) ++correct;
    out.mean_loss += logistic_loss(scores, s.label);
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  out.mean_loss /= static_cast<double>(ds.size());
  return out;
}

int predict(const CgcnModel& model, const Sample& sample) {
  Eigen::Index best = 0;
  model_forward(model, sample.graph, sample.signal).maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace cgcn
