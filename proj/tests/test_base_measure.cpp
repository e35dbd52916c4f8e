#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tgp/base_measure.hpp"
#include "tgp/errors.hpp"

using tgp::BaseMeasure;

namespace {

double gaussian_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                            const Eigen::MatrixXd& sigma) {
  const int d = static_cast<int>(mu.size());
  const Eigen::MatrixXd inv = sigma.inverse();
  const double quad = (x - mu).dot(inv * (x - mu));
  return -0.5 * (d * std::log(2.0 * M_PI) + std::log(sigma.determinant()) +
                 quad);
}

}  // namespace

TEST_CASE("log density matches the textbook formula") {
  Eigen::VectorXd mu(2);
  mu << 0.5, -1.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.3, 0.3, 1.0;
  const BaseMeasure base(mu, sigma);
  oracle::Normals rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = rng.vector(2);
    for (double s : {0.0, 0.7}) {
      const Eigen::MatrixXd cov =
          sigma + s * s * Eigen::MatrixXd::Identity(2, 2);
      CHECK(base.log_density(x, s) ==
            doctest::Approx(gaussian_log_density(x, mu, cov)).epsilon(1e-12));
    }
  }
}

TEST_CASE("smoothed factorization satisfies the inverse and Cholesky contracts") {
  Eigen::VectorXd mu(3);
  mu << 1.0, 2.0, 3.0;
  Eigen::MatrixXd sigma(3, 3);
  sigma << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  const BaseMeasure base(mu, sigma);
  for (double s : {0.0, 0.25, 1.5}) {
    const auto f = base.smoothed(s);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK((f.covariance * f.inverse - eye).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.chol_lower * f.chol_lower.transpose() - f.covariance)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(f.log_det ==
          doctest::Approx(std::log(f.covariance.determinant())).epsilon(1e-10));
  }
}

TEST_CASE("asymmetric or indefinite covariances are refused") {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(BaseMeasure(mu, asym), tgp::ConfigError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(BaseMeasure(mu, indef), tgp::NumericalError);
}

TEST_CASE("empirical base reproduces sample moments") {
  oracle::Normals rng(4);
  Eigen::MatrixXd rows = rng.matrix(200, 2);
  rows.col(1) *= 3.0;
  const BaseMeasure base = tgp::empirical_base(rows);
  const Eigen::VectorXd mean = rows.colwise().mean();
  CHECK((base.mu() - mean).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd centered = rows.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / (200.0 - 1.0);
  CHECK((base.sigma() - cov).cwiseAbs().maxCoeff() < 1e-12);
}
