#pragma once

#include "cgcn/trainer.hpp"

#include <cstdint>
#include <vector>

namespace cgcn {

Graph ring_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph star_graph(std::size_t leaves);

/// Rings (label 1) against paths (label 0), one constant feature per node.
Dataset ring_path_toy(const std::vector<std::size_t>& ring_sizes, const std::vector<std::size_t>& path_sizes);

/// Finite population of random graphs for the two-class separable task:
/// random trees with a few extra edges, node features drawn around a
/// class-dependent direction.
struct SyntheticTask {
  std::size_t population = 800;
  std::size_t min_nodes = 6;
  std::size_t max_nodes = 12;
  Eigen::Index feature_dim = 3;
  double noise = 1.0;
  std::uint64_t seed = 7;
};

Dataset make_population(const SyntheticTask& task);

struct GapRow {
  std::size_t m = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double gap = 0.0;
};

/// For each m, trains on m samples drawn from the task population (one draw
/// per seed) and compares the training loss with the loss over the whole
/// population. Rows are averaged over `seeds`.
std::vector<GapRow> generalization_gap_probe(const TrainConfig& config, const SyntheticTask& task,
                                             const std::vector<std::size_t>& m_values,
                                             const std::vector<std::uint64_t>& seeds);

}  // namespace cgcn
