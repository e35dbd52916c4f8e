#include <doctest.h>

#include "oracles.hpp"
#include "tgp/errors.hpp"
#include "tgp/sampling.hpp"

using tgp::BaseMeasure;
using tgp::RffBasis;
using tgp::TgpModel;
using tgp::WeightedSampleSet;

namespace {

TgpModel make_model(const Eigen::VectorXd& theta, std::uint64_t seed) {
  const int d = 2;
  const RffBasis basis =
      RffBasis::sample(d, static_cast<int>(theta.size()), 1.0, seed);
  Eigen::VectorXd mu(d);
  mu << 1.0, -2.0;
  Eigen::MatrixXd sigma(d, d);
  sigma << 1.4, 0.2, 0.2, 0.9;
  tgp::ModelMeta meta;
  meta.algorithm = "fd";
  meta.sigma_grid = {0.0};
  return TgpModel(basis, BaseMeasure(mu, sigma), theta, meta);
}

}  // namespace

TEST_CASE("zero tilt reduces to plain base sampling with flat weights") {
  const TgpModel model = make_model(Eigen::VectorXd::Zero(8), 3);
  const WeightedSampleSet set = tgp::draw_weighted(model, 40000, 11);
  CHECK((set.weights.array() - set.weights(0)).abs().maxCoeff() < 1e-12);
  CHECK(set.effective_sample_size() == doctest::Approx(40000.0));
  const Eigen::VectorXd mean = set.points.colwise().mean();
  CHECK((mean - model.base().mu()).cwiseAbs().maxCoeff() < 0.05);
  CHECK(set.normalizer_estimate() == doctest::Approx(1.0));
}

TEST_CASE("weights equal the tilt factor at each point") {
  oracle::Normals rng(7);
  const TgpModel model = make_model(0.4 * rng.vector(8), 5);
  const WeightedSampleSet set = tgp::draw_weighted(model, 200, 2);
  for (int i = 0; i < 200; i += 37) {
    const double log_w =
        std::log(set.weights(i)) + set.log_weight_offset;
    const double tilt =
        model.log_tilt_block(set.points.row(i))(0);
    CHECK(log_w == doctest::Approx(tilt).epsilon(1e-10));
  }
  CHECK(set.normalized().sum() == doctest::Approx(1.0));
}

TEST_CASE("sampling is deterministic in the seed") {
  oracle::Normals rng(9);
  const TgpModel model = make_model(0.2 * rng.vector(8), 6);
  const WeightedSampleSet a = tgp::draw_weighted(model, 500, 42);
  const WeightedSampleSet b = tgp::draw_weighted(model, 500, 42);
  const WeightedSampleSet c = tgp::draw_weighted(model, 500, 43);
  CHECK(a.points == b.points);
  CHECK(a.weights == b.weights);
  CHECK(a.points != c.points);
  CHECK(tgp::resample(a, 50, 1) == tgp::resample(b, 50, 1));
}

TEST_CASE("resampling follows the weights") {
  WeightedSampleSet set;
  set.points.resize(3, 1);
  set.points << 0.0, 1.0, 2.0;
  set.weights.resize(3);
  set.weights << 0.0, 1.0, 3.0;
  const Eigen::MatrixXd out = tgp::resample(set, 40000, 9);
  int count[3] = {0, 0, 0};
  for (int i = 0; i < out.rows(); ++i) ++count[static_cast<int>(out(i, 0))];
  CHECK(count[0] == 0);
  CHECK(std::abs(count[1] / 40000.0 - 0.25) < 0.01);
  CHECK(std::abs(count[2] / 40000.0 - 0.75) < 0.01);
}

TEST_CASE("projection CDFs are monotone, normalized and exact on point masses") {
  WeightedSampleSet set;
  set.points.resize(4, 2);
  set.points << -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0;
  set.weights.resize(4);
  set.weights << 1.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd v(2);
  v << 1.0, 0.0;
  Eigen::VectorXd grid(5);
  grid << -2.0, -0.5, 0.5, 1.5, 3.0;
  const Eigen::VectorXd cdf = tgp::weighted_marginal_cdf(set, v, grid);
  CHECK(cdf(0) == 0.0);
  CHECK(cdf(1) == doctest::Approx(0.25));
  CHECK(cdf(2) == doctest::Approx(0.5));
  CHECK(cdf(3) == doctest::Approx(0.75));
  CHECK(cdf(4) == doctest::Approx(1.0));
  const Eigen::VectorXd emp = tgp::empirical_marginal_cdf(set.points, v, grid);
  CHECK((cdf - emp).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::VectorXd not_unit(2);
  not_unit << 1.0, 1.0;
  CHECK_THROWS_AS(tgp::weighted_marginal_cdf(set, not_unit, grid),
                  tgp::ConfigError);
  Eigen::VectorXd unsorted(3);
  unsorted << 0.0, -1.0, 1.0;
  CHECK_THROWS_AS(tgp::empirical_marginal_cdf(set.points, v, unsorted),
                  tgp::ConfigError);
}

TEST_CASE("normalizer estimate integrates the tilt against the base") {
  // For theta with one active feature, int phi-tilt * N(x) dx has a
  // closed form via the cosine moment generating function.
  const int s_count = 4;
  const RffBasis basis = RffBasis::sample(1, s_count, 1.0, 12);
  BaseMeasure base(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(s_count);
  theta(2) = 0.3;
  tgp::ModelMeta meta;
  meta.algorithm = "fd";
  meta.sigma_grid = {0.0};
  const TgpModel model(basis, std::move(base), theta, meta);
  const WeightedSampleSet set = tgp::draw_weighted(model, 400000, 3);

  oracle::Normals rng(5);
  double ref = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(1);
    x(0) = rng();
    ref += std::exp(theta(2) * oracle::feature(basis.frequencies(),
                                               basis.phases(), 1.0, x, 2));
  }
  ref /= n;
  CHECK(std::abs(set.normalizer_estimate() - ref) < 5e-3);
}
