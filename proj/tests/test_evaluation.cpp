#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tgp/errors.hpp"
#include "tgp/evaluation.hpp"

using tgp::EvalConfig;
using tgp::EvalReport;
using tgp::KdeBaseline;

TEST_CASE("distances agree with hand-computed CDF pairs") {
  Eigen::VectorXd f(4), g(4), grid(4);
  f << 0.0, 0.2, 0.7, 1.0;
  g << 0.0, 0.5, 0.8, 1.0;
  grid << 0.0, 1.0, 2.0, 4.0;
  CHECK(tgp::ks_distance(f, g) == doctest::Approx(0.3));
  // trapezoid over |f-g| = {0, .3, .1, 0}
  CHECK(tgp::wasserstein_distance(f, g, grid) ==
        doctest::Approx(0.5 * 0.3 + 0.5 * 0.4 + 0.1));
  CHECK(tgp::ks_distance(f, f) == 0.0);
}

TEST_CASE("matching distributions score near zero in every direction") {
  Eigen::VectorXd mu(2);
  mu << 0.5, -0.5;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.8;
  oracle::Normals rng(3);
  const Eigen::MatrixXd data = oracle::gaussian_rows(rng, 20000, mu, sigma);

  tgp::EvalDensity density{tgp::BaseMeasure(mu, sigma),
                           {},
                           [](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
                             return Eigen::VectorXd::Zero(rows.rows()).eval();
                           },
                           {}};
  EvalConfig config;
  config.n_directions = 25;
  config.grid_points = 2000;
  config.n_samples = 30000;
  config.seed = 4;
  const EvalReport report = tgp::random_projection_eval(density, data, config);
  CHECK(report.median_ks < 0.02);
  CHECK(report.mean_ks < 0.03);
  CHECK(report.median_wd < 0.05);
  for (int i = 0; i < config.n_directions; ++i)
    CHECK(report.directions.row(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("mismatched distributions are flagged") {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  oracle::Normals rng(8);
  Eigen::MatrixXd data = oracle::gaussian_rows(rng, 5000, mu, sigma);
  data.array() += 2.0;  // shifted data vs centered density
  tgp::EvalDensity density{tgp::BaseMeasure(mu, sigma),
                           {},
                           [](const Eigen::Ref<const Eigen::MatrixXd>& rows) {
                             return Eigen::VectorXd::Zero(rows.rows()).eval();
                           },
                           {}};
  EvalConfig config;
  config.n_directions = 10;
  config.grid_points = 500;
  config.n_samples = 5000;
  const EvalReport report = tgp::random_projection_eval(density, data, config);
  CHECK(report.median_ks > 0.5);
}

TEST_CASE("exact KDE evaluates the mean Gaussian kernel") {
  oracle::Normals rng(5);
  const Eigen::MatrixXd data = rng.matrix(30, 2);
  const double gamma = 0.6;
  const KdeBaseline kde(data, gamma);
  const Eigen::VectorXd x = rng.vector(2);
  double expected = 0.0;
  for (int i = 0; i < data.rows(); ++i)
    expected += std::exp(-(x - data.row(i).transpose()).squaredNorm() /
                         (2.0 * gamma * gamma));
  expected /= data.rows();
  CHECK(kde.density(x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_FALSE(kde.rff_mode());
}

TEST_CASE("feature-space KDE approximates the exact one and clamps negatives") {
  oracle::Normals rng(6);
  const Eigen::MatrixXd data = rng.matrix(200, 2);
  const double gamma = 0.8;
  const KdeBaseline exact(data, gamma);
  const tgp::RffBasis basis = tgp::RffBasis::sample(2, 3000, gamma, 31);
  const KdeBaseline rff(data, gamma, basis);
  CHECK(rff.rff_mode());

  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd x = rng.vector(2);
    worst = std::max(worst, std::abs(rff.density(x) - exact.density(x)));
  }
  CHECK(worst < 0.06);

  // Far from the data the approximation oscillates around zero, so the
  // clamp counter must move once negatives appear.
  Eigen::MatrixXd far = rng.matrix(400, 2);
  far.array() *= 10.0;
  rff.density_block(far);
  CHECK(rff.clamped_count() > 0);
}

TEST_CASE("kde baselines plug into the projection evaluation") {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  oracle::Normals rng(9);
  const Eigen::MatrixXd data = oracle::gaussian_rows(rng, 4000, mu, sigma);
  const KdeBaseline kde(data, 0.5);
  EvalConfig config;
  config.n_directions = 8;
  config.grid_points = 800;
  config.n_samples = 20000;
  const EvalReport report =
      tgp::random_projection_eval(kde.as_eval_density(), data, config);
  CHECK(report.median_ks < 0.05);
}

TEST_CASE("report files carry every record and the summary") {
  EvalReport report;
  report.directions.resize(2, 2);
  report.directions << 1.0, 0.0, 0.0, 1.0;
  report.ks.resize(2);
  report.ks << 0.125, 0.25;
  report.wd.resize(2);
  report.wd << 0.5, 1.5;
  report.median_ks = 0.1875;
  report.mean_ks = 0.1875;
  report.median_wd = 1.0;
  report.mean_wd = 1.0;
  report.config.n_directions = 2;

  const std::string path = "/tmp/tgp_test_report.txt";
  tgp::write_report(report, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "tgp-eval-report 1");
  int direction_lines = 0;
  bool summary_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("direction ", 0) == 0) {
      ++direction_lines;
      std::istringstream fields(line);
      std::string word;
      int index;
      double ks;
      fields >> word >> index >> word >> ks;
      CHECK(ks == doctest::Approx(report.ks(index)));
    }
    if (line.rfind("summary ", 0) == 0) {
      summary_seen = true;
      CHECK(line.find("median_ks 0.1875") != std::string::npos);
    }
  }
  std::remove(path.c_str());
  CHECK(direction_lines == 2);
  CHECK(summary_seen);
}
