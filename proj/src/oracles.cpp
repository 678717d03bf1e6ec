#include "cgcn/oracles.hpp"

#include "cgcn/convex_opt.hpp"
#include "cgcn/factorization.hpp"
#include "cgcn/random.hpp"
#include "cgcn/synthetic.hpp"
#include "cgcn/trainer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace cgcn {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd random_in_ball(Eigen::Index dim, double max_norm, Rng& rng) {
  Eigen::VectorXd z = gaussian_matrix(dim, 1, rng).col(0);
  std::uniform_real_distribution<double> radius(0.0, max_norm);
  return z.normalized() * radius(rng);
}

Eigen::MatrixXd random_unit_rows(Eigen::Index n, Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXd z = gaussian_matrix(n, dim, rng);
  for (Eigen::Index i = 0; i < n; ++i) z.row(i).normalize();
  return z;
}

// Kernel entries from scalar arithmetic only.
double scalar_kernel(KernelKind kind, double gamma, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double dot = 0.0;
  double dist2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a(i) * b(i);
    dist2 += (a(i) - b(i)) * (a(i) - b(i));
  }
  return kind == KernelKind::kInversePolynomial ? 1.0 / (2.0 - dot) : std::exp(-gamma * dist2);
}

Eigen::MatrixXd scalar_kernel_matrix(KernelKind kind, double gamma, const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd k(rows.rows(), rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.rows(); ++j) {
      k(i, j) = scalar_kernel(kind, gamma, rows.row(i).transpose(), rows.row(j).transpose());
    }
  }
  return k;
}

// Multinomial logistic loss mean_j [lse(W^T A^T p_j + b) - score_y], explicit loops.
double reference_loss(const Eigen::MatrixXd& pooled, const std::vector<int>& labels, const Eigen::MatrixXd& w,
                      const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < pooled.rows(); ++j) {
    std::vector<double> scores(static_cast<std::size_t>(w.cols()), 0.0);
    for (Eigen::Index g = 0; g < w.cols(); ++g) {
      double s = b.size() > 0 ? b(g) : 0.0;
      for (Eigen::Index f = 0; f < w.rows(); ++f) {
        double h = 0.0;
        for (Eigen::Index p = 0; p < pooled.cols(); ++p) h += pooled(j, p) * a(p, f);
        s += w(f, g) * h;
      }
      scores[static_cast<std::size_t>(g)] = s;
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - top);
    total += top + std::log(z) - scores[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
  }
  return total / static_cast<double>(pooled.rows());
}

struct RandomObjective {
  Eigen::MatrixXd pooled;
  std::vector<int> labels;
  Eigen::MatrixXd readout;
  bool train_bias = false;
};

RandomObjective random_objective(Rng& rng) {
  std::uniform_int_distribution<int> small(2, 6);
  std::bernoulli_distribution coin(0.5);
  RandomObjective r;
  const Eigen::Index m = small(rng) + 2;
  const Eigen::Index width = small(rng);
  const Eigen::Index classes = std::uniform_int_distribution<int>(2, 4)(rng);
  r.train_bias = coin(rng);
  const Eigen::Index out = r.train_bias ? classes : small(rng);
  r.pooled = gaussian_matrix(m, width, rng);
  r.readout = r.train_bias ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(classes, classes))
                           : gaussian_matrix(out, classes, rng);
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
  for (Eigen::Index j = 0; j < m; ++j) r.labels.push_back(label(rng));
  return r;
}

double singular_sum(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().sum();
}

double relative_error(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact) {
  return (approx - exact).norm() / exact.norm();
}

// Closest point to (x, y) in the diamond |s1| + |s2| <= r, by checking the
// interior and each of the four edges.
std::array<double, 2> closest_in_diamond(double x, double y, double r) {
  if (std::abs(x) + std::abs(y) <= r) return {x, y};
  const std::array<std::array<double, 2>, 4> corners = {{{r, 0}, {0, r}, {-r, 0}, {0, -r}}};
  std::array<double, 2> best{};
  double best_d = INFINITY;
  for (std::size_t e = 0; e < 4; ++e) {
    const auto& p = corners[e];
    const auto& q = corners[(e + 1) % 4];
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    const double t = std::clamp(((x - p[0]) * dx + (y - p[1]) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    const double cx = p[0] + t * dx, cy = p[1] + t * dy;
    const double d = (cx - x) * (cx - x) + (cy - y) * (cy - y);
    if (d < best_d) {
      best_d = d;
      best = {cx, cy};
    }
  }
  return best;
}

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Every 2x2 matrix is R(theta) diag(s1, s2) R(phi)^T with signed s and its
// nuclear norm is |s1| + |s2|. For fixed angles the best s is the diamond
// point closest to the diagonal of R(theta)^T A R(phi).
struct AngleCandidate {
  double theta;
  double phi;
  double cost;
  Eigen::Matrix2d x;
};

AngleCandidate best_for_angles(const Eigen::Matrix2d& a, double radius, double theta, double phi) {
  const Eigen::Matrix2d rt = rotation(theta), rp = rotation(phi);
  const Eigen::Matrix2d b = rt.transpose() * a * rp;
  const auto s = closest_in_diamond(b(0, 0), b(1, 1), radius);
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
  d(0, 0) = s[0];
  d(1, 1) = s[1];
  const Eigen::Matrix2d x = rt * d * rp.transpose();
  return {theta, phi, (x - a).squaredNorm(), x};
}

}  // namespace

OracleReport make_report(std::string name, std::size_t cases, double max_deviation, double tolerance) {
  OracleReport r;
  r.name = std::move(name);
  r.cases = cases;
  r.max_deviation = max_deviation;
  r.tolerance = tolerance;
  r.pass = max_deviation <= tolerance;
  return r;
}

double mercer_series_ip(const Eigen::VectorXd& z, const Eigen::VectorXd& z2, int terms) {
  double dot = 0.0;
  for (Eigen::Index i = 0; i < std::min(z.size(), z2.size()); ++i) dot += z(i) * z2(i);
  double sum = 0.0;
  double weight = 0.5;
  double power = 1.0;
  for (int j = 0; j < terms; ++j) {
    sum += weight * power;
    weight *= 0.5;
    power *= dot;
  }
  return sum;
}

Eigen::Matrix2d brute_force_nuclear_projection(const Eigen::Matrix2d& a, double radius) {
  static constexpr std::size_t kKeep = 16;
  auto keep_best = [](std::vector<AngleCandidate>& pts) {
    const std::size_t n = std::min(pts.size(), kKeep);
    std::partial_sort(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n), pts.end(),
                      [](const AngleCandidate& x, const AngleCandidate& y) { return x.cost < y.cost; });
    pts.resize(n);
  };

  // Coarse pass at one degree over both angles, then refine around the best
  // candidates with a halving step until it is below 1e-4.
  const int steps = 360;
  double h = kTwoPi / steps;
  std::vector<AngleCandidate> best;
  for (int i = 0; i < steps; ++i) {
    for (int j = 0; j < steps; ++j) best.push_back(best_for_angles(a, radius, i * h, j * h));
    keep_best(best);
  }
  while (h > 1e-4) {
    h *= 0.5;
    std::vector<AngleCandidate> next = best;
    for (const AngleCandidate& c : best) {
      for (int i = -3; i <= 3; ++i) {
        for (int j = -3; j <= 3; ++j) next.push_back(best_for_angles(a, radius, c.theta + i * h, c.phi + j * h));
      }
    }
    keep_best(next);
    best = std::move(next);
  }
  return best.front().x;
}

double psd_check(const Eigen::MatrixXd& k) {
  if (k.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

ProjectionFn default_projection() {
  return [](const Eigen::MatrixXd& a, double radius) { return project_nuclear(a, NuclearBall(radius)); };
}

OracleReport mercer_oracle(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Index dim = std::uniform_int_distribution<int>(1, 6)(rng);
    Eigen::VectorXd z = random_in_ball(dim, 0.9, rng);
    Eigen::VectorXd z2 = random_in_ball(dim, 0.9, rng);
    if (c == 0) z = z2 = z.normalized() * 0.9;  // the slowest-converging pair
    const double series = mercer_series_ip(z, z2, 60);
    worst = std::max(worst, std::abs(series - eval_kernel(KernelSpec::inverse_polynomial(), z, z2)));
  }
  return make_report("mercer-series", cases, worst, 1e-6);
}

OracleReport projection_oracle(const ProjectionFn& project, std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  std::uniform_real_distribution<double> radius(0.3, 3.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Matrix2d a = gaussian_matrix(2, 2, rng) * 1.5;
    const double r = radius(rng);
    const Eigen::Matrix2d expected = brute_force_nuclear_projection(a, r);
    const Eigen::MatrixXd got = project(a, r);
    if (got.rows() != 2 || got.cols() != 2) return make_report("projection-brute-force", c + 1, INFINITY, 2e-3);
    worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
  }
  return make_report("projection-brute-force", cases, worst, 2e-3);
}

OracleReport projection_property_oracle(const ProjectionFn& project, std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> radius(0.2, 4.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Index rows = dim(rng), cols = dim(rng);
    const double r = radius(rng);
    const Eigen::MatrixXd a = gaussian_matrix(rows, cols, rng) * 2.0;
    const Eigen::MatrixXd b = gaussian_matrix(rows, cols, rng) * 2.0;
    const Eigen::MatrixXd pa = project(a, r);
    const Eigen::MatrixXd pb = project(b, r);
    worst = std::max(worst, (project(pa, r) - pa).cwiseAbs().maxCoeff());
    worst = std::max(worst, (pa - pb).norm() - (a - b).norm());
    worst = std::max(worst, singular_sum(pa) - r);
  }
  return make_report("projection-properties", cases, worst, 1e-9);
}

OracleReport psd_sweep_oracle(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  std::uniform_int_distribution<int> count(2, 20);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> gamma(0.05, 5.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::MatrixXd z = random_unit_rows(count(rng), dim(rng), rng);
    const KernelSpec spec = c % 2 == 0 ? KernelSpec::inverse_polynomial() : KernelSpec::gaussian_rbf(gamma(rng));
    const Eigen::MatrixXd k = build_kernel_matrix(spec, z);
    worst = std::max(worst, (k - scalar_kernel_matrix(spec.kind, spec.gamma, z)).cwiseAbs().maxCoeff());
    worst = std::max(worst, -psd_check(k));
  }
  return make_report("psd-sweep", cases, worst, 1e-8);
}

OracleReport gradient_oracle(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  const double eps = 1e-5;
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const RandomObjective r = random_objective(rng);
    const LayerObjective objective(r.pooled, r.labels, r.readout, r.train_bias);
    const Eigen::MatrixXd a = gaussian_matrix(r.pooled.cols(), r.readout.rows(), rng) * 0.5;
    const Eigen::VectorXd b = r.train_bias ? Eigen::VectorXd(gaussian_matrix(r.readout.cols(), 1, rng).col(0))
                                           : Eigen::VectorXd::Zero(r.readout.cols());
    const LayerObjective::Result got = objective.evaluate(a, b);

    Eigen::MatrixXd fd(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        Eigen::MatrixXd plus = a, minus = a;
        plus(i, j) += eps;
        minus(i, j) -= eps;
        fd(i, j) = (reference_loss(r.pooled, r.labels, r.readout, plus, b) -
                    reference_loss(r.pooled, r.labels, r.readout, minus, b)) / (2 * eps);
      }
    }
    double scale = fd.cwiseAbs().maxCoeff();
    double err = (got.filter_grad - fd).cwiseAbs().maxCoeff();
    if (r.train_bias) {
      Eigen::VectorXd fdb(b.size());
      for (Eigen::Index g = 0; g < b.size(); ++g) {
        Eigen::VectorXd plus = b, minus = b;
        plus(g) += eps;
        minus(g) -= eps;
        fdb(g) = (reference_loss(r.pooled, r.labels, r.readout, a, plus) -
                  reference_loss(r.pooled, r.labels, r.readout, a, minus)) / (2 * eps);
      }
      scale = std::max(scale, fdb.cwiseAbs().maxCoeff());
      err = std::max(err, (got.bias_grad - fdb).cwiseAbs().maxCoeff());
    }
    worst = std::max(worst, err / std::max(scale, 1e-12));
    worst = std::max(worst, std::abs(got.value - reference_loss(r.pooled, r.labels, r.readout, a, b)));
  }
  return make_report("gradient-finite-difference", cases, worst, 1e-4);
}

OracleReport convexity_oracle(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const RandomObjective r = random_objective(rng);
    const LayerObjective objective(r.pooled, r.labels, r.readout, r.train_bias);
    const Eigen::Index rows = r.pooled.cols(), cols = r.readout.rows(), g = r.readout.cols();
    const Eigen::MatrixXd a = gaussian_matrix(rows, cols, rng) * 2.0;
    const Eigen::MatrixXd b = gaussian_matrix(rows, cols, rng) * 2.0;
    const Eigen::VectorXd ba = r.train_bias ? Eigen::VectorXd(gaussian_matrix(g, 1, rng).col(0)) : Eigen::VectorXd::Zero(g);
    const Eigen::VectorXd bb = r.train_bias ? Eigen::VectorXd(gaussian_matrix(g, 1, rng).col(0)) : Eigen::VectorXd::Zero(g);
    const double lambda = unit(rng);
    const double mixed = objective.value(lambda * a + (1 - lambda) * b, lambda * ba + (1 - lambda) * bb);
    const double chord = lambda * objective.value(a, ba) + (1 - lambda) * objective.value(b, bb);
    worst = std::max(worst, mixed - chord);
  }
  return make_report("convexity-probe", cases, worst, 1e-9);
}

OracleReport budget_bound_oracle(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_int_distribution<int> hops(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = -INFINITY;
  for (std::size_t c = 0; c < cases; ++c) {
    const Eigen::Index f_in = dim(rng), f_out = dim(rng);
    const int k = hops(rng);
    const double r = 0.1 + 3.0 * unit(rng);
    // rank at most f_in, and every hop-block column has norm at most r
    // (on the sphere for half the draws)
    Eigen::MatrixXd a = gaussian_matrix((k + 1) * f_in, f_in, rng) * gaussian_matrix(f_in, f_out, rng);
    for (Eigen::Index f = 0; f < f_out; ++f) {
      double longest = 0.0;
      for (int hop = 0; hop <= k; ++hop) longest = std::max(longest, a.block(hop * f_in, f, f_in, 1).norm());
      a.col(f) *= (c % 2 == 0 ? r : r * unit(rng)) / longest;
    }
    const double bound = r * std::sqrt(static_cast<double>(f_out * f_in * (k + 1)));
    worst = std::max(worst, singular_sum(a) - bound);
    worst = std::max(worst, std::abs(nuclear_budget(r, f_in, f_out, k) - bound));
  }
  return make_report("budget-bound-sampling", cases, std::max(worst, 0.0), 1e-9);
}

OracleReport init_independence_oracle(std::uint64_t seed) {
  // Overlapping sizes keep the optimum finite; on separable data the loss
  // only decays towards its infimum and two runs never meet.
  const Dataset toy = ring_path_toy({4, 6, 8}, {3, 4, 6});
  TrainConfig config;
  config.hidden_widths.clear();
  config.hops = 1;
  config.factorization = FactorizationKind::kExact;
  config.optimizer.kind = OptimizerKind::kProjectedGd;
  config.optimizer.step_size = 0.02;
  config.epochs = 10000;
  config.patience = 10000;
  config.random_init = true;
  std::array<double, 2> finals{};
  for (std::size_t run = 0; run < 2; ++run) {
    config.seed = derive_seed(seed, {run + 1});
    finals[run] = train_layerwise(toy, config).traces.back().back();
  }
  const double rel = std::abs(finals[0] - finals[1]) / std::max({std::abs(finals[0]), std::abs(finals[1]), 1e-12});
  return make_report("init-independence", 2, rel, 1e-3);
}

OracleReport nystrom_monotonicity_oracle(std::uint64_t seed) {
  const std::array<Eigen::Index, 4> landmarks = {5, 10, 20, 40};
  const KernelSpec spec = KernelSpec::gaussian_rbf(1.0);
  const int seeds = 10;
  Rng rng(seed);
  const Eigen::MatrixXd z = random_unit_rows(40, 8, rng);
  const Eigen::MatrixXd k = scalar_kernel_matrix(spec.kind, spec.gamma, z);
  std::array<double, 4> mean{};
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    for (int s = 0; s < seeds; ++s) {
      const FactorizedKernel fk = nystrom(spec, z, landmarks[i], derive_seed(seed, {static_cast<std::uint64_t>(s)}));
      mean[i] += relative_error(fk.q_matrix * fk.q_matrix.transpose(), k) / seeds;
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < mean.size(); ++i) worst = std::max(worst, mean[i] - mean[i - 1]);
  return make_report("nystrom-monotonicity", landmarks.size() * seeds, worst, 0.0);
}

OracleReport nystrom_full_rank_oracle(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  std::size_t cases = 0;
  for (KernelSpec spec : {KernelSpec::gaussian_rbf(1.0), KernelSpec::inverse_polynomial()}) {
    for (Eigen::Index n : {10, 25, 50}) {
      const Eigen::MatrixXd z = random_unit_rows(n, 6, rng);
      const Eigen::MatrixXd k = scalar_kernel_matrix(spec.kind, spec.gamma, z);
      const FactorizedKernel fk = nystrom(spec, z, n, derive_seed(seed, {static_cast<std::uint64_t>(n)}));
      worst = std::max(worst, relative_error(fk.q_matrix * fk.q_matrix.transpose(), k));
      ++cases;
    }
  }
  return make_report("nystrom-full-rank", cases, worst, 1e-6);
}

OracleReport exact_factorization_oracle(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  std::size_t cases = 0;
  for (KernelSpec spec : {KernelSpec::gaussian_rbf(0.2), KernelSpec::gaussian_rbf(2.0), KernelSpec::inverse_polynomial()}) {
    for (Eigen::Index n : {5, 20, 50}) {
      const Eigen::MatrixXd z = random_unit_rows(n, 4, rng);
      const Eigen::MatrixXd k = scalar_kernel_matrix(spec.kind, spec.gamma, z);
      const FactorizedKernel fk = factorize_exact(spec, z);
      worst = std::max(worst, relative_error(fk.q_matrix * fk.q_matrix.transpose(), k));
      ++cases;
    }
  }
  return make_report("exact-factorization", cases, worst, 1e-8);
}

OracleReport worked_examples_oracle() {
  double worst = 0.0;
  std::size_t cases = 0;
  auto check = [&](const Eigen::MatrixXd& got, const Eigen::MatrixXd& expected) {
    ++cases;
    if (got.rows() != expected.rows() || got.cols() != expected.cols()) {
      worst = INFINITY;
      return;
    }
    worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
  };
  auto scalar = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };

  // Triangle, symmetric normalization with degree 2: off-diagonal 1/2.
  {
    const Graph tri(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    Eigen::MatrixXd expected = Eigen::MatrixXd::Constant(3, 3, 0.5);
    expected.diagonal().setZero();
    check(Eigen::MatrixXd(build_shift_operator(tri, ShiftKind::kSymNormAdjacency).matrix), expected);
  }
  // Path 0-1-2 under the adjacency.
  {
    const ShiftOperator s = build_shift_operator(path_graph(3), ShiftKind::kAdjacency);
    const Eigen::MatrixXd x = (Eigen::MatrixXd(3, 1) << 1, 0, 0).finished();
    check(shift_signal(s, x, 1), (Eigen::MatrixXd(3, 1) << 0, 1, 0).finished());
    check(shift_signal(s, x, 2), (Eigen::MatrixXd(3, 1) << 1, 0, 1).finished());
    check(ShiftStack(s, x, 2).node(0), (Eigen::MatrixXd(3, 1) << 1, 0, 1).finished());
  }
  // Star with three leaves: the center sees itself, then the sum of its neighbours.
  {
    const ShiftOperator s = build_shift_operator(star_graph(3), ShiftKind::kAdjacency);
    check(ShiftStack(s, Eigen::MatrixXd::Ones(4, 1), 1).node(0), (Eigen::MatrixXd(2, 1) << 1, 3).finished());
  }
  // Kernels.
  {
    const Eigen::Vector2d e0(1, 0), e1(0, 1);
    check(scalar(eval_kernel(KernelSpec::gaussian_rbf(0.2), e0, e1)), scalar(std::exp(-0.4)));
    Eigen::MatrixXd expected = Eigen::MatrixXd::Constant(3, 3, 0.5);
    expected.diagonal().setOnes();
    check(build_kernel_matrix(KernelSpec::inverse_polynomial(), Eigen::MatrixXd::Identity(3, 3)), expected);
    check(kernel_products_vector(KernelSpec::inverse_polynomial(), e0, Eigen::MatrixXd::Identity(2, 2)),
          Eigen::Vector2d(1.0, 0.5));
    check(scalar(c_sigma_bound(Activation::sinusoid(), 1.0, KernelKind::kGaussianRbf, 0.25)),
          scalar(std::exp(1.25)));
  }
  // Rank-one factorization of [[1,1],[1,1]].
  {
    const FactorizedKernel fk = factorize_exact(Eigen::MatrixXd::Ones(2, 2));
    check(scalar(static_cast<double>(fk.q_matrix.cols())), scalar(1.0));
    check(fk.q_matrix * fk.q_matrix.transpose(), Eigen::MatrixXd::Ones(2, 2));
  }
  // A training vector maps onto its own row of Q; K = 0 layer features equal Q.
  {
    Rng rng(11);
    const Eigen::MatrixXd z = random_unit_rows(12, 3, rng);
    const FactorizedKernel fk = factorize_exact(KernelSpec::gaussian_rbf(0.7), z);
    check(map_to_features(fk, z.row(4).transpose()).transpose(), fk.q_matrix.row(4));
    check(map_rows_to_features(fk, z), fk.q_matrix);
  }
  // l1 and nuclear projections, budget formula, projected GD steps.
  {
    check(project_l1_ball(Eigen::Vector2d(3, 1), 2.0), Eigen::Vector2d(2, 0));
    check(project_l1_ball(Eigen::Vector2d(1, 1), 1.0), Eigen::Vector2d(0.5, 0.5));
    const Eigen::Matrix2d d31 = Eigen::Vector2d(3, 1).asDiagonal();
    const Eigen::Matrix2d d20 = Eigen::Vector2d(2, 0).asDiagonal();
    check(project_nuclear(d31, NuclearBall(2.0)), d20);
    check(scalar(nuclear_budget(1.0, 3, 2, 1)), scalar(std::sqrt(12.0)));
    OptimizerSettings gd;
    gd.kind = OptimizerKind::kProjectedGd;
    gd.step_size = 1.0;
    OptimizerState s1(gd, 2, 2);
    check(step(s1, Eigen::MatrixXd::Zero(2, 2), -Eigen::MatrixXd::Identity(2, 2), NuclearBall(10.0)),
          Eigen::MatrixXd::Identity(2, 2));
    OptimizerState s2(gd, 2, 2);
    check(step(s2, Eigen::MatrixXd::Zero(2, 2), -d31, NuclearBall(2.0)), d20);
  }
  // Sum pooling is additive over disconnected copies.
  {
    SyntheticTask task;
    task.population = 24;
    const Dataset ds = make_population(task);
    TrainConfig config;
    config.hidden_widths = {4};
    config.landmarks = 8;
    config.epochs = 5;
    const CgcnModel model = train_layerwise(ds, config).model;
    const Sample& s = ds.samples.front();
    const auto n = s.graph.num_nodes();
    std::vector<Edge> edges = s.graph.edges();
    for (const Edge& e : s.graph.edges()) edges.push_back({e.src + n, e.dst + n, e.weight});
    Eigen::MatrixXd x2(2 * s.signal.rows(), s.signal.cols());
    x2 << s.signal, s.signal;
    const Eigen::VectorXd once = model_representation(model, s.graph, s.signal);
    check(model_representation(model, Graph(2 * n, edges), x2), 2.0 * once);
  }
  return make_report("worked-examples", cases, worst, 1e-6);
}

std::vector<OracleReport> run_all(std::uint64_t seed) {
  std::vector<OracleReport> reports;
  const ProjectionFn project = default_projection();
  reports.push_back(mercer_oracle(derive_seed(seed, {1})));
  reports.push_back(projection_oracle(project, derive_seed(seed, {2})));
  reports.push_back(projection_property_oracle(project, derive_seed(seed, {3})));
  reports.push_back(psd_sweep_oracle(derive_seed(seed, {4})));
  reports.push_back(gradient_oracle(derive_seed(seed, {5})));
  reports.push_back(convexity_oracle(derive_seed(seed, {6})));
  reports.push_back(budget_bound_oracle(derive_seed(seed, {7})));
  reports.push_back(init_independence_oracle(derive_seed(seed, {8})));
  reports.push_back(nystrom_monotonicity_oracle(derive_seed(seed, {9})));
  reports.push_back(nystrom_full_rank_oracle(derive_seed(seed, {10})));
  reports.push_back(exact_factorization_oracle(derive_seed(seed, {11})));
  reports.push_back(worked_examples_oracle());
  std::sort(reports.begin(), reports.end(),
            [](const OracleReport& a, const OracleReport& b) { return a.name < b.name; });
  return reports;
}

std::string format_report(const OracleReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s cases=%zu max_dev=%.3e tol=%.1e", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.cases, r.max_deviation, r.tolerance);
  return buf;
}

void write_summary(const std::vector<OracleReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file '" + path.string() + "'");
  char buf[64];
  for (const OracleReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%.17g", r.max_deviation);
    out << r.name << "," << (r.pass ? "true" : "false") << "," << buf << "\n";
  }
}

}  // namespace cgcn
