#include "cgcn/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>

namespace cgcn {
namespace {

namespace fs = std::filesystem;

struct Table {
  fs::path path;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
};

double parse_field(std::string_view field, const fs::path& path, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(path.string(), line, "non-numeric field '" + std::string(field) + "'");
  }
  return value;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "missing file");
  Table t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_field(rest.substr(0, comma), path, lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(lineno);
  }
  return t;
}

long as_index(double v, const Table& t, std::size_t row) {
  const auto i = static_cast<long>(v);
  if (static_cast<double>(i) != v) throw ParseError(t.path.string(), t.line_numbers[row], "expected an integer");
  return i;
}

void expect_columns(const Table& t, std::size_t row, std::size_t cols) {
  if (t.rows[row].size() != cols) {
    throw ParseError(t.path.string(), t.line_numbers[row],
                     "expected " + std::to_string(cols) + " field(s), found " + std::to_string(t.rows[row].size()));
  }
}

fs::path file_for(const fs::path& dir, const std::string& name, const char* suffix) {
  return dir / (name + "_" + suffix + ".txt");
}

}  // namespace

std::string_view to_string(FeatureSource source) {
  switch (source) {
    case FeatureSource::kNodeAttributes: return "node-attributes";
    case FeatureSource::kOneHotNodeLabels: return "one-hot-node-labels";
    case FeatureSource::kConstantOnes: return "constant-ones";
  }
  return "unknown";
}

Dataset load_tudataset(const fs::path& dir, const std::string& name, DatasetManifest* manifest) {
  const Table indicator = read_table(file_for(dir, name, "graph_indicator"));
  const Table graph_labels = read_table(file_for(dir, name, "graph_labels"));
  const Table adjacency = read_table(file_for(dir, name, "A"));

  const std::size_t num_graphs = graph_labels.rows.size();
  if (num_graphs == 0) throw ParseError(graph_labels.path.string(), 0, "no graph labels");
  const std::size_t num_nodes = indicator.rows.size();

  // Global node -> (graph, local id); local ids follow file order.
  std::vector<std::size_t> graph_of(num_nodes);
  std::vector<std::size_t> local_of(num_nodes);
  std::vector<std::size_t> sizes(num_graphs, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    expect_columns(indicator, i, 1);
    const long g = as_index(indicator.rows[i][0], indicator, i);
    if (g < 1 || static_cast<std::size_t>(g) > num_graphs) {
      throw ParseError(indicator.path.string(), indicator.line_numbers[i],
                       "graph id " + std::to_string(g) + " outside 1.." + std::to_string(num_graphs));
    }
    graph_of[i] = static_cast<std::size_t>(g - 1);
    local_of[i] = sizes[graph_of[i]]++;
  }
  for (std::size_t g = 0; g < num_graphs; ++g) {
    if (sizes[g] == 0) {
      throw ParseError(indicator.path.string(), 0, "graph " + std::to_string(g + 1) + " has no nodes");
    }
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  for (std::size_t r = 0; r < adjacency.rows.size(); ++r) {
    expect_columns(adjacency, r, 2);
    const long a = as_index(adjacency.rows[r][0], adjacency, r);
    const long b = as_index(adjacency.rows[r][1], adjacency, r);
    for (long v : {a, b}) {
      if (v < 1 || static_cast<std::size_t>(v) > num_nodes) {
        throw ParseError(adjacency.path.string(), adjacency.line_numbers[r],
                         "dangling node index " + std::to_string(v));
      }
    }
    const auto ia = static_cast<std::size_t>(a - 1);
    const auto ib = static_cast<std::size_t>(b - 1);
    if (graph_of[ia] != graph_of[ib]) {
      throw ParseError(adjacency.path.string(), adjacency.line_numbers[r], "edge joins two different graphs");
    }
    edges[graph_of[ia]].push_back({local_of[ia], local_of[ib], 1.0});
  }

  std::map<long, int> label_map;
  std::vector<long> raw_labels(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    expect_columns(graph_labels, g, 1);
    raw_labels[g] = as_index(graph_labels.rows[g][0], graph_labels, g);
    label_map.emplace(raw_labels[g], 0);
  }
  int next = 0;
  for (auto& [raw, mapped] : label_map) mapped = next++;

  // Node features: attributes, else one-hot labels, else a constant.
  FeatureSource source = FeatureSource::kConstantOnes;
  Eigen::MatrixXd features;
  const fs::path attr_path = file_for(dir, name, "node_attributes");
  const fs::path node_label_path = file_for(dir, name, "node_labels");
  if (fs::exists(attr_path)) {
    const Table attrs = read_table(attr_path);
    if (attrs.rows.size() != num_nodes) {
      throw ParseError(attr_path.string(), attrs.rows.size(),
                       "expected " + std::to_string(num_nodes) + " rows, found " + std::to_string(attrs.rows.size()));
    }
    const std::size_t width = attrs.rows.front().size();
    features.resize(static_cast<Eigen::Index>(num_nodes), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < num_nodes; ++i) {
      expect_columns(attrs, i, width);
      for (std::size_t f = 0; f < width; ++f) {
        features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = attrs.rows[i][f];
      }
    }
    source = FeatureSource::kNodeAttributes;
  } else if (fs::exists(node_label_path)) {
    const Table labels = read_table(node_label_path);
    if (labels.rows.size() != num_nodes) {
      throw ParseError(node_label_path.string(), labels.rows.size(),
                       "expected " + std::to_string(num_nodes) + " rows, found " + std::to_string(labels.rows.size()));
    }
    std::map<long, Eigen::Index> slot;
    std::vector<long> raw(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) {
      expect_columns(labels, i, 1);
      raw[i] = as_index(labels.rows[i][0], labels, i);
      slot.emplace(raw[i], 0);
    }
    Eigen::Index s = 0;
    for (auto& [value, index] : slot) index = s++;
    features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes), s);
    for (std::size_t i = 0; i < num_nodes; ++i) features(static_cast<Eigen::Index>(i), slot[raw[i]]) = 1.0;
    source = FeatureSource::kOneHotNodeLabels;
  } else {
    features = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(num_nodes), 1);
  }

  Dataset ds;
  ds.num_classes = next;
  ds.samples.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.samples[g].signal.resize(static_cast<Eigen::Index>(sizes[g]), features.cols());
    ds.samples[g].label = label_map[raw_labels[g]];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    ds.samples[graph_of[i]].signal.row(static_cast<Eigen::Index>(local_of[i])) =
        features.row(static_cast<Eigen::Index>(i));
  }
  std::size_t undirected_edges = 0;
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.samples[g].graph = Graph(sizes[g], std::move(edges[g]));
    for (const Edge& e : ds.samples[g].graph.edges()) undirected_edges += e.src <= e.dst ? 1 : 0;
  }

  if (manifest != nullptr) {
    manifest->name = name;
    manifest->directory = dir;
    manifest->graphs = num_graphs;
    manifest->nodes = num_nodes;
    manifest->edges = undirected_edges;
    manifest->classes = next;
    manifest->features = source;
  }
  return ds;
}

void write_tudataset(const Dataset& ds, const fs::path& dir, const std::string& name) {
  ds.validate();
  fs::create_directories(dir);
  std::ofstream a(file_for(dir, name, "A"));
  std::ofstream ind(file_for(dir, name, "graph_indicator"));
  std::ofstream lab(file_for(dir, name, "graph_labels"));
  std::ofstream attr(file_for(dir, name, "node_attributes"));
  if (!a || !ind || !lab || !attr) throw std::runtime_error("write_tudataset: cannot write into " + dir.string());
  char buf[64];
  std::size_t offset = 0;
  for (std::size_t g = 0; g < ds.size(); ++g) {
    const Sample& s = ds.samples[g];
    for (const Edge& e : s.graph.edges()) {
      a << offset + e.src + 1 << ", " << offset + e.dst + 1 << "\n";
    }
    for (Eigen::Index i = 0; i < s.signal.rows(); ++i) {
      ind << g + 1 << "\n";
      for (Eigen::Index f = 0; f < s.signal.cols(); ++f) {
        std::snprintf(buf, sizeof buf, "%.17g", s.signal(i, f));
        attr << (f > 0 ? ", " : "") << buf;
      }
      attr << "\n";
    }
    lab << s.label << "\n";
    offset += s.graph.num_nodes();
  }
}

}  // namespace cgcn
