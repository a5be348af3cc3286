#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "wafergp/error.hpp"
#include "wafergp/gpr.hpp"
#include "wafergp/rng.hpp"

using namespace wafergp;

namespace {

/// Distinct random grid points, coordinates in [0, side).
Eigen::MatrixX2d random_points(Rng& rng, int m, int side) {
  std::set<std::pair<int, int>> seen;
  Eigen::MatrixX2d pts(m, 2);
  int placed = 0;
  while (placed < m) {
    const int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(side)));
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(side)));
    if (!seen.insert({x, y}).second) continue;
    pts(placed, 0) = x;
    pts(placed, 1) = y;
    ++placed;
  }
  return pts;
}

/// Draws values from the GP prior at `hp` via an independent Cholesky.
Eigen::VectorXd gp_draw(Rng& rng, const Eigen::MatrixX2d& pts, const Hyperparams<>& hp) {
  const int m = static_cast<int>(pts.rows());
  Eigen::MatrixXd k = kernel_matrix(pts, hp);
  k.diagonal().array() += 1e-10;
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = rng.normal();
  return llt.matrixL() * z;
}

/// LML restated with generic dense algebra (LU inverse + determinant), no
/// Cholesky anywhere: the independent oracle.
double lml_oracle(const Eigen::MatrixX2d& pts, const Eigen::VectorXd& v,
                  const Hyperparams<>& hp) {
  const int m = static_cast<int>(v.size());
  Eigen::MatrixXd a = kernel_matrix(pts, hp);
  a.diagonal().array() += hp.noise_variance;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  return -0.5 * v.dot(lu.solve(v)) - 0.5 * std::log(lu.determinant()) -
         0.5 * m * std::log(2.0 * M_PI);
}

}  // namespace

TEST_CASE("rbf kernel closed-form values") {
  const Hyperparams<> hp{5.0, 2.0, 0.0};
  Eigen::Vector2d a(0.0, 0.0), b(3.0, 4.0);  // squared distance 25
  CHECK(rbf_kernel(a, b, hp) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-15));
  CHECK(rbf_kernel(a, a, hp) == doctest::Approx(2.0));

  // distance^2 = 2 l^2 gives exactly e^-1
  const Hyperparams<> unit{1.0, 1.0, 0.0};
  Eigen::Vector2d c(std::sqrt(2.0), 0.0);
  CHECK(rbf_kernel(a, c, unit) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("rbf kernel is symmetric") {
  Rng rng(3);
  const Hyperparams<> hp{2.5, 1.7, 0.0};
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector2d a(rng.uniform01() * 10, rng.uniform01() * 10);
    Eigen::Vector2d b(rng.uniform01() * 10, rng.uniform01() * 10);
    CHECK(rbf_kernel(a, b, hp) == doctest::Approx(rbf_kernel(b, a, hp)).epsilon(1e-15));
  }
}

TEST_CASE("kernel matrix matches an entry-wise loop") {
  Rng rng(7);
  const Eigen::MatrixX2d pts = random_points(rng, 5, 20);
  const Hyperparams<> hp{3.0, 1.3, 0.0};
  const Eigen::MatrixXd k = kernel_matrix(pts, hp);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double expect = rbf_kernel(pts.row(i), pts.row(j), hp);
      CHECK(std::abs(k(i, j) - expect) < 1e-15);
    }
  }
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("kernel matrix of one point is [sigma_f^2]") {
  Eigen::MatrixX2d pts(1, 2);
  pts << 4, 9;
  const Eigen::MatrixXd k = kernel_matrix(pts, Hyperparams<>{2.0, 3.5, 0.0});
  REQUIRE(k.rows() == 1);
  CHECK(k(0, 0) == doctest::Approx(3.5));
}

TEST_CASE("duplicated points give equal kernel rows") {
  Eigen::MatrixX2d pts(3, 2);
  pts << 1, 1, 1, 1, 5, 5;
  const Eigen::MatrixXd k = kernel_matrix(pts, Hyperparams<>{2.0, 1.0, 0.0});
  CHECK((k.row(0) - k.row(1)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("cholesky jitter rescues a rank-deficient matrix") {
  Eigen::MatrixX2d pts(3, 2);
  pts << 1, 1, 1, 1, 5, 5;  // duplicate row makes K singular
  Eigen::MatrixXd k = kernel_matrix(pts, Hyperparams<>{2.0, 1.0, 0.0});
  Eigen::LLT<Eigen::MatrixXd> llt;
  const double jitter = cholesky_with_jitter(k, llt, 1e-10);
  CHECK(jitter > 0.0);
  CHECK(jitter <= 1e-6);
  Eigen::MatrixXd boosted = k;
  boosted.diagonal().array() += jitter;
  const Eigen::MatrixXd recon =
      Eigen::MatrixXd(llt.matrixL()) * Eigen::MatrixXd(llt.matrixL()).transpose();
  CHECK((recon - boosted).norm() / boosted.norm() < 1e-8);
}

TEST_CASE("log marginal likelihood matches an LU-based oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(rng.below(15));
    const Eigen::MatrixX2d pts = random_points(rng, m, 30);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    const Hyperparams<> hp{1.0 + 4.0 * rng.uniform01(), 0.5 + rng.uniform01(),
                           0.05 + 0.2 * rng.uniform01()};
    const double expect = lml_oracle(pts, v, hp);
    const double got = log_marginal_likelihood(pts, v, hp).value;
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("lml rejects a single observation") {
  Eigen::MatrixX2d pts(1, 2);
  pts << 0, 0;
  Eigen::VectorXd v(1);
  v << 1.0;
  CHECK_THROWS_AS(log_marginal_likelihood(pts, v, Hyperparams<>{1, 1, 0.1}), Error);
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(13);
  const double step = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 20;
    const Eigen::MatrixX2d pts = random_points(rng, m, 25);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    const Hyperparams<> hp{1.5 + 3.0 * rng.uniform01(), 0.4 + rng.uniform01(),
                           0.02 + 0.1 * rng.uniform01()};
    const Eigen::MatrixXd d2 = squared_distance_matrix(pts);
    const LmlResult<> at = log_marginal_likelihood_from_distances(d2, v, hp);

    Eigen::Vector3d theta(std::log(hp.length_scale), std::log(hp.signal_variance),
                          std::log(hp.noise_variance));
    for (int dim = 0; dim < 3; ++dim) {
      auto value_at = [&](double delta) {
        Eigen::Vector3d t = theta;
        t(dim) += delta;
        const Hyperparams<> h{std::exp(t(0)), std::exp(t(1)), std::exp(t(2))};
        return log_marginal_likelihood_from_distances(d2, v, h, 1e-10, false).value;
      };
      const double fd = (value_at(step) - value_at(-step)) / (2 * step);
      const double scale = std::max({std::abs(fd), std::abs(at.grad_log(dim)), 1e-8});
      CHECK(std::abs(fd - at.grad_log(dim)) / scale < 1e-4);
    }
  }
}

TEST_CASE("shrinking signal variance sinks the likelihood") {
  Rng rng(17);
  const Eigen::MatrixX2d pts = random_points(rng, 15, 20);
  Eigen::VectorXd v(15);
  for (int i = 0; i < 15; ++i) v(i) = rng.normal();

  double prev = 0.0;
  bool first = true;
  for (double sf2 = 1.0; sf2 > 1e-10; sf2 *= 0.1) {
    const Hyperparams<> hp{2.0, sf2, 1e-8};
    const double lml = log_marginal_likelihood(pts, v, hp).value;
    if (!first) CHECK(lml < prev);
    prev = lml;
    first = false;
  }
}

TEST_CASE("near-interpolation at tiny noise") {
  Rng rng(19);
  const Hyperparams<> truth{2.0, 1.0, 0.0};
  const Eigen::MatrixX2d pts = random_points(rng, 40, 40);
  const Eigen::VectorXd v = gp_draw(rng, pts, truth);
  const Model<> model = make_model(pts, v, Hyperparams<>{2.0, 1.0, 1e-10});
  const Eigen::VectorXd pred = predict_mean(model, pts);
  CHECK((pred - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("far queries fall back to the prior mean") {
  Eigen::MatrixX2d pts(3, 2);
  pts << 0, 0, 1, 0, 0, 1;
  Eigen::VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  const Model<> model = make_model(pts, v, Hyperparams<>{1.0, 1.0, 1e-6});
  Eigen::MatrixX2d far(1, 2);
  far << 200, 200;
  CHECK(std::abs(predict_mean(model, far)(0)) < 1e-6);
}

TEST_CASE("single-point prediction has a closed form") {
  Eigen::MatrixX2d pts(1, 2);
  pts << 0, 0;
  Eigen::VectorXd v(1);
  v << 1.7;
  const double l = 2.0;
  const Model<> model = make_model(pts, v, Hyperparams<>{l, 1.0, 0.0});
  Eigen::MatrixX2d q(1, 2);
  q << 3, 0;  // distance 3
  const double expect = std::exp(-9.0 / (2.0 * l * l)) * 1.7;
  CHECK(predict_mean(model, q)(0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("predict_mean matches a full-pivot LU oracle") {
  Rng rng(23);
  const Eigen::MatrixX2d pts = random_points(rng, 25, 30);
  Eigen::VectorXd v(25);
  for (int i = 0; i < 25; ++i) v(i) = rng.normal();
  const Hyperparams<> hp{3.0, 1.2, 0.05};
  const Model<> model = make_model(pts, v, hp);
  const Eigen::MatrixX2d q = random_points(rng, 10, 30);

  Eigen::MatrixXd a = kernel_matrix(pts, hp);
  a.diagonal().array() += hp.noise_variance;
  const Eigen::VectorXd alpha = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(v);
  const Eigen::VectorXd expect = cross_kernel_matrix(pts, q, hp).transpose() * alpha;

  const Eigen::VectorXd got = predict_mean(model, q);
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("prediction is linear in the training values") {
  Rng rng(29);
  const Eigen::MatrixX2d pts = random_points(rng, 12, 15);
  Eigen::VectorXd v(12);
  for (int i = 0; i < 12; ++i) v(i) = rng.normal();
  const Hyperparams<> hp{2.0, 1.0, 0.01};
  const Eigen::MatrixX2d q = random_points(rng, 6, 15);
  const Eigen::VectorXd one = predict_mean(make_model(pts, v, hp), q);
  const Eigen::VectorXd two = predict_mean(make_model(pts, Eigen::VectorXd(2 * v), hp), q);
  CHECK((two - 2 * one).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("permuting training points leaves predictions unchanged") {
  Rng rng(31);
  const int m = 18;
  const Eigen::MatrixX2d pts = random_points(rng, m, 20);
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v(i) = rng.normal();
  const Hyperparams<> hp{2.5, 1.0, 0.05};
  const Eigen::MatrixX2d q = random_points(rng, 7, 20);

  const std::vector<int> perm = rng.permutation(m);
  Eigen::MatrixX2d pts_p(m, 2);
  Eigen::VectorXd v_p(m);
  for (int i = 0; i < m; ++i) {
    pts_p.row(i) = pts.row(perm[static_cast<std::size_t>(i)]);
    v_p(i) = v(perm[static_cast<std::size_t>(i)]);
  }
  const Eigen::VectorXd a = predict_mean(make_model(pts, v, hp), q);
  const Eigen::VectorXd b = predict_mean(make_model(pts_p, v_p, hp), q);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("model cholesky reconstructs K plus noise") {
  Rng rng(37);
  const Eigen::MatrixX2d pts = random_points(rng, 20, 25);
  const Eigen::VectorXd v = gp_draw(rng, pts, Hyperparams<>{3.0, 1.0, 0.0});
  const Model<> model = make_model(pts, v, Hyperparams<>{3.0, 1.0, 1e-4});
  Eigen::MatrixXd expect = kernel_matrix(pts, model.hyperparams);
  expect.diagonal().array() += model.hyperparams.noise_variance;
  const Eigen::MatrixXd recon = model.chol_lower * model.chol_lower.transpose();
  CHECK((recon - expect).norm() / expect.norm() < 1e-8);
}

TEST_CASE("fit recovers the length scale from GP data") {
  Rng rng(41);
  const Hyperparams<> truth{5.0, 1.0, 0.0};
  const Eigen::MatrixX2d pts = random_points(rng, 100, 20);
  Eigen::VectorXd v = gp_draw(rng, pts, truth);
  for (int i = 0; i < v.size(); ++i) v(i) += 0.03 * rng.normal();
  v.array() -= v.mean();

  const Model<> model = fit(pts, v, FitConfig<>{});
  CHECK(model.hyperparams.length_scale >= 2.5);
  CHECK(model.hyperparams.length_scale <= 10.0);
}

TEST_CASE("fit is deterministic") {
  Rng rng(43);
  const Eigen::MatrixX2d pts = random_points(rng, 30, 15);
  Eigen::VectorXd v = gp_draw(rng, pts, Hyperparams<>{3.0, 1.0, 0.0});
  v.array() -= v.mean();
  const Model<> a = fit(pts, v, FitConfig<>{});
  const Model<> b = fit(pts, v, FitConfig<>{});
  CHECK(a.hyperparams.length_scale == b.hyperparams.length_scale);
  CHECK(a.hyperparams.signal_variance == b.hyperparams.signal_variance);
  CHECK(a.hyperparams.noise_variance == b.hyperparams.noise_variance);
  CHECK(a.log_marginal == b.log_marginal);
}

TEST_CASE("fit rejects degenerate inputs") {
  Eigen::MatrixX2d one(1, 2);
  one << 0, 0;
  Eigen::VectorXd v1(1);
  v1 << 1.0;
  CHECK_THROWS_AS(fit(one, v1, FitConfig<>{}), Error);

  Eigen::MatrixX2d same(3, 2);
  same << 2, 2, 2, 2, 2, 2;
  Eigen::VectorXd v3(3);
  v3 << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit(same, v3, FitConfig<>{}), Error);
}

TEST_CASE("predict_variance is non-negative and shrinks at train points") {
  Rng rng(47);
  const Eigen::MatrixX2d pts = random_points(rng, 20, 20);
  const Eigen::VectorXd v = gp_draw(rng, pts, Hyperparams<>{3.0, 1.0, 0.0});
  const Model<> model = make_model(pts, v, Hyperparams<>{3.0, 1.0, 1e-8});
  const Eigen::VectorXd at_train = predict_variance(model, pts);
  CHECK(at_train.minCoeff() >= 0.0);
  CHECK(at_train.maxCoeff() < 1e-4);

  Eigen::MatrixX2d far(1, 2);
  far << 500, 500;
  CHECK(predict_variance(model, far)(0) == doctest::Approx(1.0).epsilon(1e-9));
}
