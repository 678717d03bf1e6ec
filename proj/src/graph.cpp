#include "cgcn/graph.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace cgcn {

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, bool undirected)
    : num_nodes_(num_nodes), undirected_(undirected) {
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const Edge& e : edges) {
    if (e.src >= num_nodes || e.dst >= num_nodes) {
      throw std::invalid_argument("Graph: edge (" + std::to_string(e.src) + ", " +
                                  std::to_string(e.dst) + ") out of range for " +
                                  std::to_string(num_nodes) + " nodes");
    }
    if (!std::isfinite(e.weight)) throw std::invalid_argument("Graph: non-finite edge weight");
    const std::pair<std::size_t, std::size_t> key =
        undirected ? std::pair<std::size_t, std::size_t>(std::minmax(e.src, e.dst)) : std::make_pair(e.src, e.dst);
    auto [it, inserted] = merged.emplace(key, e.weight);
    if (!inserted && it->second != e.weight) {
      throw std::invalid_argument("Graph: conflicting weights for edge (" +
                                  std::to_string(e.src) + ", " + std::to_string(e.dst) + ")");
    }
  }
  edges_.reserve(undirected ? 2 * merged.size() : merged.size());
  for (const auto& [key, w] : merged) {
    edges_.push_back({key.first, key.second, w});
    if (undirected && key.first != key.second) edges_.push_back({key.second, key.first, w});
  }
}

std::vector<double> Graph::weighted_degrees() const {
  std::vector<double> deg(num_nodes_, 0.0);
  for (const Edge& e : edges_) deg[e.src] += e.weight;
  return deg;
}

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::kAdjacency: return "adjacency";
    case ShiftKind::kSymNormAdjacency: return "sym-norm-adjacency";
    case ShiftKind::kLaplacian: return "laplacian";
    case ShiftKind::kNormLaplacian: return "norm-laplacian";
  }
  return "unknown";
}

ShiftKind parse_shift_kind(std::string_view name) {
  if (name == "adjacency") return ShiftKind::kAdjacency;
  if (name == "sym-norm-adjacency") return ShiftKind::kSymNormAdjacency;
  if (name == "laplacian") return ShiftKind::kLaplacian;
  if (name == "norm-laplacian") return ShiftKind::kNormLaplacian;
  throw std::invalid_argument("unknown shift kind '" + std::string(name) + "'");
}

ShiftOperator build_shift_operator(const Graph& graph, ShiftKind kind, bool isolated_as_zero) {
  const auto n = static_cast<Eigen::Index>(graph.num_nodes());
  const std::vector<double> deg = graph.weighted_degrees();

  std::vector<double> inv_sqrt(deg.size(), 0.0);
  const bool normalized = kind == ShiftKind::kSymNormAdjacency || kind == ShiftKind::kNormLaplacian;
  if (normalized) {
    for (std::size_t i = 0; i < deg.size(); ++i) {
      if (deg[i] > 0.0) {
        inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
      } else if (!isolated_as_zero) {
        throw std::invalid_argument("build_shift_operator: node " + std::to_string(i) +
                                    " has degree zero under a normalized shift kind");
      } else if (deg[i] < 0.0) {
        throw std::invalid_argument("build_shift_operator: negative degree at node " +
                                    std::to_string(i));
      }
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.edges().size() + deg.size());
  for (const Edge& e : graph.edges()) {
    const auto i = static_cast<Eigen::Index>(e.src);
    const auto j = static_cast<Eigen::Index>(e.dst);
    switch (kind) {
      case ShiftKind::kAdjacency:
        triplets.emplace_back(i, j, e.weight);
        break;
      case ShiftKind::kSymNormAdjacency:
        triplets.emplace_back(i, j, inv_sqrt[e.src] * e.weight * inv_sqrt[e.dst]);
        break;
      case ShiftKind::kLaplacian:
        triplets.emplace_back(i, j, -e.weight);
        break;
      case ShiftKind::kNormLaplacian:
        triplets.emplace_back(i, j, -inv_sqrt[e.src] * e.weight * inv_sqrt[e.dst]);
        break;
    }
  }
  for (std::size_t i = 0; i < deg.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (kind == ShiftKind::kLaplacian && deg[i] != 0.0) triplets.emplace_back(ii, ii, deg[i]);
    if (kind == ShiftKind::kNormLaplacian && deg[i] > 0.0) triplets.emplace_back(ii, ii, 1.0);
  }

  ShiftOperator s;
  s.kind = kind;
  s.matrix.resize(n, n);
  s.matrix.setFromTriplets(triplets.begin(), triplets.end());
  s.matrix.makeCompressed();
  return s;
}

GraphSignal shift_signal(const ShiftOperator& s, const GraphSignal& x, int k) {
  if (k < 0) throw std::invalid_argument("shift_signal: negative hop count");
  if (x.rows() != s.size()) {
    throw std::invalid_argument("shift_signal: signal has " + std::to_string(x.rows()) +
                                " rows but the shift operator is " + std::to_string(s.size()) +
                                "x" + std::to_string(s.size()));
  }
  GraphSignal out = x;
  for (int hop = 0; hop < k; ++hop) {
    GraphSignal next = s.matrix * out;
    out.swap(next);
  }
  return out;
}

ShiftStack::ShiftStack(const ShiftOperator& s, const GraphSignal& x, int hops) {
  if (hops < 0) throw std::invalid_argument("shift_stack: negative hop count");
  shifted_.reserve(static_cast<std::size_t>(hops) + 1);
  shifted_.push_back(shift_signal(s, x, 0));
  for (int k = 1; k <= hops; ++k) shifted_.push_back(s.matrix * shifted_.back());
}

Eigen::MatrixXd ShiftStack::node(Eigen::Index i) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(shifted_.size()), shifted_.front().cols());
  for (std::size_t k = 0; k < shifted_.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = shifted_[k].row(i);
  }
  return out;
}

}  // namespace cgcn
