#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cgcn {

/// Dense n x F node-feature matrix; row i is the feature vector of node i.
using GraphSignal = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

/// Weighted graph with nodes 0..num_nodes-1.
///
/// An undirected graph stores each edge once per direction; the constructor
/// symmetrizes the input list, merging duplicates so that (i,j) and (j,i)
/// carry the same weight.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, std::vector<Edge> edges, bool undirected = true);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool undirected() const { return undirected_; }

  std::vector<double> weighted_degrees() const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  bool undirected_ = true;
};

enum class ShiftKind {
  kAdjacency,
  kSymNormAdjacency,
  kLaplacian,
  kNormLaplacian,
};

std::string_view to_string(ShiftKind kind);
/// Accepts "adjacency", "sym-norm-adjacency", "laplacian", "norm-laplacian".
ShiftKind parse_shift_kind(std::string_view name);

struct ShiftOperator {
  ShiftKind kind = ShiftKind::kSymNormAdjacency;
  SparseMatrix matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Builds the graph shift operator of the requested kind.
///
/// Normalized kinds need a degree for every node. With `isolated_as_zero`
/// a degree-zero node gets a zero D^{-1/2} entry, so its row and column of
/// the normalized adjacency vanish; otherwise such a node is an error.
ShiftOperator build_shift_operator(const Graph& graph,
                                   ShiftKind kind = ShiftKind::kSymNormAdjacency,
                                   bool isolated_as_zero = true);

/// S^k X by k successive sparse products.
GraphSignal shift_signal(const ShiftOperator& s, const GraphSignal& x, int k);

/// Per-node hop stacks: stack(i) row k holds [S^k X]_i for k = 0..K.
class ShiftStack {
 public:
  ShiftStack(const ShiftOperator& s, const GraphSignal& x, int hops);

  int hops() const { return static_cast<int>(shifted_.size()) - 1; }
  Eigen::Index num_nodes() const { return shifted_.front().rows(); }

  /// The whole k-shifted signal S^k X.
  const GraphSignal& hop(int k) const { return shifted_.at(static_cast<std::size_t>(k)); }
  /// (K+1) x F matrix for node i.
  Eigen::MatrixXd node(Eigen::Index i) const;

 private:
  std::vector<GraphSignal> shifted_;
};

inline ShiftStack shift_stack(const ShiftOperator& s, const GraphSignal& x, int hops) {
  return ShiftStack(s, x, hops);
}

/// Rescales every nonzero row to unit l2 norm; zero rows are left alone.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
normalize_rows(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar norm = out.row(i).norm();
    if (norm > Scalar(0)) out.row(i) /= norm;
  }
  return out;
}

}  // namespace cgcn
