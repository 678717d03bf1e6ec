#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace cgcn {

struct OracleReport {
  std::string name;
  std::size_t cases = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Report with pass set to (max_deviation <= tolerance); NaN deviations fail.
OracleReport make_report(std::string name, std::size_t cases, double max_deviation, double tolerance);

/// sum_{j < terms} 2^{-(j+1)} <z, z2>^j.
double mercer_series_ip(const Eigen::VectorXd& z, const Eigen::VectorXd& z2, int terms);

/// Closest point to `a` among matrices R(theta) diag(s1, s2) R(phi)^T with
/// |s1| + |s2| <= radius. The two angles are searched on a one-degree grid
/// refined below 1e-4; for fixed angles the best (s1, s2) is found by plain
/// point-to-segment geometry.
Eigen::Matrix2d brute_force_nuclear_projection(const Eigen::Matrix2d& a, double radius);

/// Smallest eigenvalue of a symmetric matrix.
double psd_check(const Eigen::MatrixXd& k);

using ProjectionFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, double)>;

// Individual suites. Each builds its own inputs from `seed`.
OracleReport mercer_oracle(std::uint64_t seed, std::size_t cases = 100);
OracleReport projection_oracle(const ProjectionFn& project, std::uint64_t seed, std::size_t cases = 50);
/// Idempotence and non-expansiveness on random rectangular matrices.
OracleReport projection_property_oracle(const ProjectionFn& project, std::uint64_t seed, std::size_t cases = 50);
OracleReport psd_sweep_oracle(std::uint64_t seed, std::size_t cases = 100);
OracleReport gradient_oracle(std::uint64_t seed, std::size_t cases = 20);
OracleReport convexity_oracle(std::uint64_t seed, std::size_t cases = 100);
OracleReport budget_bound_oracle(std::uint64_t seed, std::size_t cases = 200);
OracleReport init_independence_oracle(std::uint64_t seed);
/// Largest increase of the mean relative Nystrom error between consecutive
/// landmark counts {5, 10, 20, 40} over 10 seeds on a fixed set of 40 vectors.
OracleReport nystrom_monotonicity_oracle(std::uint64_t seed);
/// Relative Nystrom error with every vector used as a landmark.
OracleReport nystrom_full_rank_oracle(std::uint64_t seed);
/// Relative reconstruction error of the exact factorization.
OracleReport exact_factorization_oracle(std::uint64_t seed);
/// Small hand-checkable cases, each recomputed from scalar arithmetic.
OracleReport worked_examples_oracle();

ProjectionFn default_projection();

/// Every suite with fixed seeds derived from `seed`, sorted by name.
std::vector<OracleReport> run_all(std::uint64_t seed = 0);

/// "PASS name cases=.. max_dev=.. tol=.."
std::string format_report(const OracleReport& report);

/// One "name,pass,max_deviation" line per report.
void write_summary(const std::vector<OracleReport>& reports, const std::filesystem::path& path);

}  // namespace cgcn
