#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgcn/convex_opt.hpp"
#include "cgcn/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace cgcn;

TEST_CASE("report passes iff the deviation is within tolerance") {
  CHECK(make_report("a", 1, 1e-3, 1e-3).pass);
  CHECK_FALSE(make_report("a", 1, 2e-3, 1e-3).pass);
  CHECK_FALSE(make_report("a", 1, std::numeric_limits<double>::quiet_NaN(), 1.0).pass);
}

TEST_CASE("brute-force projection examples") {
  Eigen::Matrix2d a;
  a << 3, 0, 0, 1;
  Eigen::Matrix2d expected;
  expected << 2, 0, 0, 0;
  CHECK((brute_force_nuclear_projection(a, 2.0) - expected).cwiseAbs().maxCoeff() <= 2e-3);
  CHECK(brute_force_nuclear_projection(Eigen::Matrix2d::Zero(), 1.0).cwiseAbs().maxCoeff() <= 1e-3);
  Eigen::Matrix2d inside;
  inside << 0.2, -0.1, 0.05, 0.3;
  CHECK((brute_force_nuclear_projection(inside, 2.0) - inside).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("psd check") {
  CHECK(psd_check(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(std::abs(psd_check(Eigen::MatrixXd::Ones(2, 2))) < 1e-15);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 0, 1, 1, 0;
  CHECK(psd_check(indefinite) == doctest::Approx(-1.0));
}

TEST_CASE("every oracle passes at a fixed seed") {
  const auto reports = run_all(0);
  CHECK(reports.size() == 12);
  for (const OracleReport& r : reports) {
    INFO(format_report(r));
    CHECK(r.pass);
    CHECK(r.cases > 0);
  }
}

TEST_CASE("oracle reports are reproducible") {
  const OracleReport a = projection_oracle(default_projection(), 5);
  const OracleReport b = projection_oracle(default_projection(), 5);
  CHECK(a.max_deviation == b.max_deviation);
  CHECK(psd_sweep_oracle(2).max_deviation == psd_sweep_oracle(2).max_deviation);
  CHECK(gradient_oracle(3).max_deviation == gradient_oracle(3).max_deviation);
}

TEST_CASE("a perturbed projection is caught") {
  const ProjectionFn corrupted = [](const Eigen::MatrixXd& a, double r) {
    Eigen::MatrixXd p = project_nuclear(a, NuclearBall(r));
    p.array() += 0.1;
    return p;
  };
  CHECK_FALSE(projection_oracle(corrupted, 0).pass);
  CHECK_FALSE(projection_property_oracle(corrupted, 0).pass);
  CHECK(projection_oracle(default_projection(), 0).pass);
}

TEST_CASE("summary file lists each report") {
  const auto path = std::filesystem::temp_directory_path() / "cgcn_oracle_summary.csv";
  write_summary({make_report("x", 3, 0.5, 1.0), make_report("y", 1, 2.0, 1.0)}, path);
  std::ifstream in(path);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1.rfind("x,true,", 0) == 0);
  CHECK(l2.rfind("y,false,", 0) == 0);
  CHECK(format_report(make_report("x", 3, 0.5, 1.0)).rfind("PASS x cases=3", 0) == 0);
}
