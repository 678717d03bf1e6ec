#include "cgcn/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace cgcn {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("'" + text + "' is not a valid number");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

TrainConfig parse_config(std::istream& in, const std::string& source) {
  TrainConfig cfg;
  std::vector<std::string> kernel_names;
  std::vector<double> gammas;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (auto [it, fresh] = seen.emplace(key, lineno); !fresh) {
      throw ParseError(source, lineno, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(it->second) + ")");
    }
    try {
      if (key == "hidden_widths") {
        cfg.hidden_widths.clear();
        if (value != "none") {
          for (const auto& item : split_list(value)) cfg.hidden_widths.push_back(parse_number<Eigen::Index>(item));
        }
      } else if (key == "hops") {
        cfg.hops = parse_number<int>(value);
      } else if (key == "kernel") {
        kernel_names = split_list(value);
      } else if (key == "gamma") {
        for (const auto& item : split_list(value)) gammas.push_back(parse_number<double>(item));
      } else if (key == "radius") {
        cfg.radius = parse_number<double>(value);
      } else if (key == "budgets") {
        cfg.budgets.clear();
        for (const auto& item : split_list(value)) cfg.budgets.push_back(parse_number<double>(item));
      } else if (key == "factorization") {
        if (value == "nystrom") {
          cfg.factorization = FactorizationKind::kNystrom;
        } else if (value == "exact") {
          cfg.factorization = FactorizationKind::kExact;
        } else {
          throw std::invalid_argument("factorization must be 'nystrom' or 'exact'");
        }
      } else if (key == "landmarks") {
        cfg.landmarks = parse_number<Eigen::Index>(value);
      } else if (key == "optimizer") {
        cfg.optimizer.kind = parse_optimizer_kind(value);
      } else if (key == "learning_rate") {
        cfg.optimizer.step_size = parse_number<double>(value);
      } else if (key == "beta1") {
        cfg.optimizer.beta1 = parse_number<double>(value);
      } else if (key == "beta2") {
        cfg.optimizer.beta2 = parse_number<double>(value);
      } else if (key == "epsilon") {
        cfg.optimizer.epsilon = parse_number<double>(value);
      } else if (key == "epochs") {
        cfg.epochs = parse_number<int>(value);
      } else if (key == "batch_size") {
        cfg.batch_size = parse_number<int>(value);
      } else if (key == "patience") {
        cfg.patience = parse_number<int>(value);
      } else if (key == "min_learning_rate") {
        cfg.min_step = parse_number<double>(value);
      } else if (key == "split") {
        const auto parts = split_list(value);
        if (parts.size() != 3) throw std::invalid_argument("split needs three ratios");
        for (std::size_t i = 0; i < 3; ++i) cfg.split[i] = parse_number<double>(parts[i]);
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value);
      } else if (key == "shift") {
        cfg.shift_kind = parse_shift_kind(value);
      } else if (key == "random_init") {
        cfg.random_init = parse_bool(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, lineno, e.what());
    }
  }

  if (!kernel_names.empty() || !gammas.empty()) {
    const std::size_t count = std::max<std::size_t>({kernel_names.size(), gammas.size(), 1});
    if ((kernel_names.size() > 1 && kernel_names.size() != count) || (gammas.size() > 1 && gammas.size() != count)) {
      throw ParseError(source, lineno, "kernel and gamma lists have different lengths");
    }
    cfg.kernels.clear();
    for (std::size_t i = 0; i < count; ++i) {
      KernelSpec spec;
      spec.kind = kernel_names.empty() ? KernelKind::kGaussianRbf
                                       : parse_kernel_kind(kernel_names[kernel_names.size() == 1 ? 0 : i]);
      spec.gamma = gammas.empty() ? 0.2 : gammas[gammas.size() == 1 ? 0 : i];
      if (spec.kind == KernelKind::kInversePolynomial) spec.gamma = 0.0;
      cfg.kernels.push_back(spec);
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ParseError(source, lineno, e.what());
  }
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

std::string format_config(const TrainConfig& c) {
  auto join = [](const auto& items, auto&& fmt) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += ",";
      out += fmt(item);
    }
    return out;
  };
  std::ostringstream os;
  os << "hidden_widths = "
     << (c.hidden_widths.empty() ? std::string("none")
                                 : join(c.hidden_widths, [](Eigen::Index w) { return std::to_string(w); }))
     << "\n";
  os << "hops = " << c.hops << "\n";
  os << "kernel = " << join(c.kernels, [](const KernelSpec& k) { return std::string(to_string(k.kind)); }) << "\n";
  os << "gamma = " << join(c.kernels, [](const KernelSpec& k) { return format_double(k.gamma); }) << "\n";
  os << "radius = " << format_double(c.radius) << "\n";
  if (!c.budgets.empty()) os << "budgets = " << join(c.budgets, format_double) << "\n";
  os << "factorization = " << (c.factorization == FactorizationKind::kExact ? "exact" : "nystrom") << "\n";
  os << "landmarks = " << c.landmarks << "\n";
  os << "optimizer = " << to_string(c.optimizer.kind) << "\n";
  os << "learning_rate = " << format_double(c.optimizer.step_size) << "\n";
  os << "beta1 = " << format_double(c.optimizer.beta1) << "\n";
  os << "beta2 = " << format_double(c.optimizer.beta2) << "\n";
  os << "epsilon = " << format_double(c.optimizer.epsilon) << "\n";
  os << "epochs = " << c.epochs << "\n";
  os << "batch_size = " << c.batch_size << "\n";
  os << "patience = " << c.patience << "\n";
  os << "min_learning_rate = " << format_double(c.min_step) << "\n";
  os << "split = " << join(c.split, format_double) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "shift = " << to_string(c.shift_kind) << "\n";
  os << "random_init = " << (c.random_init ? "true" : "false") << "\n";
  return os.str();
}

std::string config_help() {
  return R"(Config file: one `key = value` per line, '#' starts a comment.
  hidden_widths      int list   widths of the hidden layers, or `none` (default 32)
  hops               int        hop count K per layer (default 1)
  kernel             name list  gaussian-rbf | inverse-polynomial, one or per layer (default gaussian-rbf)
  gamma              real list  RBF bandwidth, one or per layer (default 0.2)
  radius             real       column-norm bound R behind the default budgets (default 1)
  budgets            real list  explicit nuclear radius per layer (default from radius)
  factorization      name       nystrom | exact (default nystrom)
  landmarks          int        Nystrom landmark count P (default 32)
  optimizer          name       projected-adam | projected-gd (default projected-adam)
  learning_rate      real       initial step size (default 0.001)
  beta1, beta2       real       Adam moment decay (defaults 0.9, 0.999)
  epsilon            real       Adam denominator guard (default 1e-8)
  epochs             int        epochs per layer, at least 1 (default 200)
  batch_size         int        0 = batches of 128, full batch for fewer graphs (default 0)
  patience           int        epochs without improvement before halving the step (default 20)
  min_learning_rate  real       floor of the step size (default 1e-6)
  split              3 reals    train,validation,test ratios (default 0.8,0.1,0.1)
  seed               uint       master seed (default 0)
  shift              name       adjacency | sym-norm-adjacency | laplacian | norm-laplacian
  random_init        bool       start filters at a random point of the ball (default false)
)";
}

}  // namespace cgcn
