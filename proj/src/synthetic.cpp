#include "cgcn/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

namespace cgcn {

Graph ring_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n && n > 1; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(n, std::move(edges));
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return Graph(n, std::move(edges));
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, i, 1.0});
  return Graph(leaves + 1, std::move(edges));
}

Dataset ring_path_toy(const std::vector<std::size_t>& ring_sizes, const std::vector<std::size_t>& path_sizes) {
  Dataset ds;
  ds.num_classes = 2;
  for (std::size_t n : ring_sizes) ds.samples.push_back({ring_graph(n), GraphSignal::Ones(static_cast<Eigen::Index>(n), 1), 1});
  for (std::size_t n : path_sizes) ds.samples.push_back({path_graph(n), GraphSignal::Ones(static_cast<Eigen::Index>(n), 1), 0});
  return ds;
}

Dataset make_population(const SyntheticTask& task) {
  if (task.min_nodes < 2 || task.max_nodes < task.min_nodes || task.feature_dim < 2) {
    throw std::invalid_argument("make_population: invalid task");
  }
  Rng rng(task.seed);
  std::uniform_int_distribution<std::size_t> size_dist(task.min_nodes, task.max_nodes);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  ds.num_classes = 2;
  for (std::size_t j = 0; j < task.population; ++j) {
    const int label = static_cast<int>(j % 2);
    const std::size_t n = size_dist(rng);
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> parent(0, i - 1);
      edges.push_back({parent(rng), i, 1.0});
    }
    for (int extra = 0; extra < 2; ++extra) {
      std::uniform_int_distribution<std::size_t> node(0, n - 1);
      const std::size_t a = node(rng);
      const std::size_t b = node(rng);
      if (a != b) edges.push_back({a, b, 1.0});
    }
    // Drop duplicates the random extras may have created.
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      return std::minmax(x.src, x.dst) < std::minmax(y.src, y.dst);
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& x, const Edge& y) {
                              return std::minmax(x.src, x.dst) == std::minmax(y.src, y.dst);
                            }),
                edges.end());

    GraphSignal x(static_cast<Eigen::Index>(n), task.feature_dim);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index f = 0; f < x.cols(); ++f) x(i, f) = task.noise * normal(rng);
      x(i, label) += 1.0;
    }
    ds.samples.push_back({Graph(n, std::move(edges)), std::move(x), label});
  }
  return ds;
}

std::vector<GapRow> generalization_gap_probe(const TrainConfig& config, const SyntheticTask& task,
                                             const std::vector<std::size_t>& m_values,
                                             const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("generalization_gap_probe: no seeds");
  for (std::size_t i = 1; i < m_values.size(); ++i) {
    if (m_values[i] <= m_values[i - 1]) {
      throw std::invalid_argument("generalization_gap_probe: m values must be increasing");
    }
  }
  const Dataset population = make_population(task);
  std::vector<GapRow> rows;
  for (std::size_t m : m_values) {
    if (m < 1 || m > population.size()) throw std::invalid_argument("generalization_gap_probe: m out of range");
    GapRow row;
    row.m = m;
    for (std::uint64_t seed : seeds) {
      Rng rng(derive_seed(seed, {0x9a9, m}));
      std::vector<Eigen::Index> picked = sample_without_replacement(
          static_cast<Eigen::Index>(population.size()), static_cast<Eigen::Index>(m), rng);
      std::vector<std::size_t> indices(picked.begin(), picked.end());
      const Dataset train = population.subset(indices);
      TrainConfig cfg = config;
      cfg.seed = derive_seed(seed, {m});
      const CgcnModel model = train_layerwise(train, cfg).model;
      const double train_loss = evaluate(model, train).mean_loss;
      const double test_loss = evaluate(model, population).mean_loss;
      row.train_loss += train_loss;
      row.test_loss += test_loss;
    }
    const auto s = static_cast<double>(seeds.size());
    row.train_loss /= s;
    row.test_loss /= s;
    row.gap = row.test_loss - row.train_loss;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cgcn
