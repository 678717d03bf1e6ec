#include "cgcn/model.hpp"

#include <stdexcept>
#include <string>

namespace cgcn {

Eigen::Index CgcnLayer::input_dim() const {
  return kernels.empty() ? 0 : kernels.front().input_dim();
}

Eigen::Index CgcnLayer::feature_width() const {
  Eigen::Index total = 0;
  for (const auto& fk : kernels) total += fk.width();
  return total;
}

Eigen::Index CgcnLayer::hop_offset(int k) const {
  Eigen::Index offset = 0;
  for (int h = 0; h < k; ++h) offset += hop_width(h);
  return offset;
}

Eigen::MatrixXd concat_features(const HopFeatures& features) {
  if (features.empty()) return {};
  Eigen::Index width = 0;
  for (const auto& f : features) width += f.cols();
  Eigen::MatrixXd out(features.front().rows(), width);
  Eigen::Index offset = 0;
  for (const auto& f : features) {
    if (f.rows() != out.rows()) throw std::invalid_argument("concat_features: row count mismatch");
    out.middleCols(offset, f.cols()) = f;
    offset += f.cols();
  }
  return out;
}

HopFeatures layer_kernel_features(const CgcnLayer& layer, const ShiftOperator& s, const GraphSignal& x) {
  if (layer.kernels.empty()) throw std::invalid_argument("layer_kernel_features: layer has no kernels");
  if (x.cols() != layer.input_dim()) {
    throw std::invalid_argument("layer_kernel_features: signal has " + std::to_string(x.cols()) +
                                " features, layer expects " + std::to_string(layer.input_dim()));
  }
  const ShiftStack stack(s, normalize_rows(x), layer.hops());
  HopFeatures out;
  out.reserve(layer.kernels.size());
  for (int k = 0; k <= layer.hops(); ++k) {
    out.push_back(map_rows_to_features(layer.kernels[static_cast<std::size_t>(k)],
                                       normalize_rows(stack.hop(k))));
  }
  return out;
}

GraphSignal layer_forward(const CgcnLayer& layer, const HopFeatures& features) {
  if (features.size() != layer.kernels.size()) {
    throw std::invalid_argument("layer_forward: expected " + std::to_string(layer.kernels.size()) +
                                " hop signals, got " + std::to_string(features.size()));
  }
  if (layer.filters.rows() != layer.feature_width()) {
    throw std::invalid_argument("layer_forward: filter rows do not match the kernel widths");
  }
  const Eigen::Index n = features.empty() ? 0 : features.front().rows();
  GraphSignal out = GraphSignal::Zero(n, layer.output_dim());
  for (int k = 0; k <= layer.hops(); ++k) {
    const auto& z = features[static_cast<std::size_t>(k)];
    if (z.cols() != layer.hop_width(k) || z.rows() != n) {
      throw std::invalid_argument("layer_forward: hop " + std::to_string(k) + " signal is " +
                                  std::to_string(z.rows()) + "x" + std::to_string(z.cols()) +
                                  ", expected width " + std::to_string(layer.hop_width(k)));
    }
    out.noalias() += z * layer.filters.middleRows(layer.hop_offset(k), layer.hop_width(k));
  }
  return out;
}

GraphSignal model_node_output(const CgcnModel& model, const Graph& graph, const GraphSignal& x) {
  if (model.layers.empty()) throw std::invalid_argument("model_forward: model has no layers");
  if (x.rows() != static_cast<Eigen::Index>(graph.num_nodes())) {
    throw std::invalid_argument("model_forward: signal rows do not match the node count");
  }
  const ShiftOperator s = build_shift_operator(graph, model.shift_kind);
  GraphSignal h = x;
  for (const CgcnLayer& layer : model.layers) {
    h = layer_forward(layer, layer_kernel_features(layer, s, h));
  }
  return h;
}

Eigen::VectorXd model_representation(const CgcnModel& model, const Graph& graph, const GraphSignal& x) {
  return sum_pool(model_node_output(model, graph, x));
}

Eigen::VectorXd model_forward(const CgcnModel& model, const Graph& graph, const GraphSignal& x) {
  return model.readout.scores(model_representation(model, graph, x));
}

}  // namespace cgcn
