#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "wafergp/error.hpp"

namespace wafergp {

/// RBF kernel parameters plus observation noise. All three live on a log
/// scale inside the optimizer; here they are plain positive reals.
template <typename Scalar = double>
struct Hyperparams {
  Scalar length_scale = Scalar(1);     ///< l, in grid units
  Scalar signal_variance = Scalar(1);  ///< sigma_f^2
  Scalar noise_variance = Scalar(1e-6);  ///< sigma_n^2

  bool valid() const {
    return std::isfinite(length_scale) && length_scale > Scalar(0) &&
           std::isfinite(signal_variance) && signal_variance > Scalar(0) &&
           std::isfinite(noise_variance) && noise_variance >= Scalar(0);
  }
};

/// Maximum-likelihood fitting controls. One restart per length-scale
/// multiplier; the multiplier scales the coordinate extent of the training
/// set to produce the initial l.
template <typename Scalar = double>
struct FitConfig {
  std::vector<Scalar> length_scale_multipliers{Scalar(0.05), Scalar(0.1), Scalar(0.3)};
  int max_iterations = 200;
  Scalar tolerance = Scalar(1e-6);       ///< stop when the LML gain drops below this
  Scalar jitter_floor = Scalar(1e-10);   ///< smallest diagonal boost / smallest sigma_n^2
  Scalar initial_noise_fraction = Scalar(0.05);  ///< sigma_n^2 start, as a share of var(v)

  int restarts() const { return static_cast<int>(length_scale_multipliers.size()); }
};

/// sigma_f^2 * exp(-|a-b|^2 / (2 l^2)) for two coordinate vectors.
template <typename DerivedA, typename DerivedB, typename Scalar>
Scalar rbf_kernel(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                  const Hyperparams<Scalar>& hp) {
  const Scalar d2 = (a.derived() - b.derived()).squaredNorm();
  return hp.signal_variance *
         std::exp(-d2 / (Scalar(2) * hp.length_scale * hp.length_scale));
}

/// Pairwise squared Euclidean distances of the rows of `points` (M x 2).
/// Hyperparameter-independent, so callers fitting in a loop compute it once.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
squared_distance_matrix(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto& p = points.derived();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sq = p.rowwise().squaredNorm();
  Matrix d2 = (-2 * p * p.transpose()).rowwise() + sq.transpose();
  d2.colwise() += sq;
  return d2.cwiseMax(Scalar(0));
}

/// Kernel matrix from a precomputed squared-distance matrix.
template <typename Derived, typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kernel_from_squared_distances(
    const Eigen::MatrixBase<Derived>& d2, const Hyperparams<Scalar>& hp) {
  const Scalar inv = Scalar(1) / (Scalar(2) * hp.length_scale * hp.length_scale);
  return hp.signal_variance * (-d2.derived().array() * inv).exp().matrix();
}

/// K with K(i,j) = rbf_kernel(p_i, p_j, hp); symmetric, diagonal sigma_f^2.
template <typename Derived, typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kernel_matrix(
    const Eigen::MatrixBase<Derived>& points, const Hyperparams<Scalar>& hp) {
  return kernel_from_squared_distances(squared_distance_matrix(points), hp);
}

/// Rectangular kernel block between two point sets: (i, j) entry couples
/// row i of `a` with row j of `b`.
template <typename DerivedA, typename DerivedB, typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cross_kernel_matrix(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    const Hyperparams<Scalar>& hp) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sa = a.derived().rowwise().squaredNorm();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sb = b.derived().rowwise().squaredNorm();
  Matrix d2 = (-2 * a.derived() * b.derived().transpose()).rowwise() + sb.transpose();
  d2.colwise() += sa;
  const Scalar inv = Scalar(1) / (Scalar(2) * hp.length_scale * hp.length_scale);
  return hp.signal_variance * (-d2.cwiseMax(Scalar(0)).array() * inv).exp().matrix();
}

/// Cholesky of K + sigma_n^2 I with escalating diagonal jitter: starts at
/// `jitter_floor`, multiplies by 10 up to 1e-6, then gives up. Returns the
/// jitter actually added (0 when the factorization succeeds untouched).
template <typename Scalar>
Scalar cholesky_with_jitter(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& llt,
    Scalar jitter_floor = Scalar(1e-10)) {
  llt.compute(a);
  if (llt.info() == Eigen::Success) return Scalar(0);
  for (Scalar jitter = jitter_floor; jitter <= Scalar(1e-6) * Scalar(1.0000001);
       jitter *= Scalar(10)) {
    auto boosted = a;
    boosted.diagonal().array() += jitter;
    llt.compute(boosted);
    if (llt.info() == Eigen::Success) return jitter;
  }
  throw Error("cholesky-failure",
              "kernel matrix is not positive definite even with 1e-6 jitter");
}

template <typename Scalar = double>
struct LmlResult {
  Scalar value = Scalar(0);
  /// Gradient with respect to (log l, log sigma_f^2, log sigma_n^2).
  Eigen::Matrix<Scalar, 3, 1> grad_log = Eigen::Matrix<Scalar, 3, 1>::Zero();
  Scalar jitter_added = Scalar(0);
};

/// Log marginal likelihood of zero-mean observations under the RBF GP,
///   -1/2 v' (K + s_n^2 I)^-1 v - 1/2 log det(K + s_n^2 I) - M/2 log 2 pi,
/// with the analytic gradient in log-parameter space. `d2` is the training
/// squared-distance matrix. Values are expected to be standardized (the
/// zero-mean prior is exact only then).
template <typename Scalar>
LmlResult<Scalar> log_marginal_likelihood_from_distances(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& d2,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values, const Hyperparams<Scalar>& hp,
    Scalar jitter_floor = Scalar(1e-10), bool want_gradient = true) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index m = values.size();
  if (m < 2) {
    throw Error("too-few-samples", "log marginal likelihood needs at least 2 observations");
  }
  if (!hp.valid()) {
    throw Error("invalid-hyperparams", "hyperparameters must be positive and finite");
  }

  const Matrix k = kernel_from_squared_distances(d2, hp);
  Matrix a = k;
  a.diagonal().array() += hp.noise_variance;

  Eigen::LLT<Matrix> llt;
  LmlResult<Scalar> out;
  out.jitter_added = cholesky_with_jitter(a, llt, jitter_floor);

  const Vector alpha = llt.solve(values);
  const Scalar log_det =
      Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
  out.value = Scalar(-0.5) * values.dot(alpha) - Scalar(0.5) * log_det -
              Scalar(0.5) * static_cast<Scalar>(m) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);

  if (want_gradient) {
    // d LML / d theta = 1/2 tr((alpha alpha' - A^-1) dA/dtheta)
    const Matrix a_inv = llt.solve(Matrix::Identity(m, m));
    const Matrix w = alpha * alpha.transpose() - a_inv;
    const Scalar inv_l2 = Scalar(1) / (hp.length_scale * hp.length_scale);
    out.grad_log(0) =
        Scalar(0.5) * inv_l2 * w.cwiseProduct(k.cwiseProduct(d2)).sum();
    out.grad_log(1) = Scalar(0.5) * w.cwiseProduct(k).sum();
    out.grad_log(2) =
        Scalar(0.5) * (hp.noise_variance + out.jitter_added) * w.trace();
  }
  return out;
}

/// Convenience entry over raw coordinates.
template <typename Derived, typename Scalar>
LmlResult<Scalar> log_marginal_likelihood(
    const Eigen::MatrixBase<Derived>& points,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values, const Hyperparams<Scalar>& hp,
    Scalar jitter_floor = Scalar(1e-10)) {
  return log_marginal_likelihood_from_distances<Scalar>(
      squared_distance_matrix(points), values, hp, jitter_floor);
}

/// Fitted regression state: training inputs, hyperparameters, the lower
/// Cholesky factor L of (K + sigma_n^2 I), and the weight vector solving
/// (K + sigma_n^2 I) w = v. Immutable once built; safe to share.
template <typename Scalar = double>
struct Model {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> train_points;
  Hyperparams<Scalar> hyperparams;  ///< noise_variance includes any jitter added
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> chol_lower;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  Scalar log_marginal = Scalar(0);
};

/// Builds the predictive state for fixed hyperparameters. Jitter added to
/// rescue the factorization is folded into the stored noise_variance so the
/// Cholesky factor always reconstructs K + noise_variance I.
template <typename Derived, typename Scalar>
Model<Scalar> make_model(const Eigen::MatrixBase<Derived>& points,
                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values,
                         const Hyperparams<Scalar>& hp,
                         Scalar jitter_floor = Scalar(1e-10)) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  if (points.rows() != values.size()) {
    throw Error("shape-mismatch", "points and values disagree on length");
  }
  if (!hp.valid()) {
    throw Error("invalid-hyperparams", "hyperparameters must be positive and finite");
  }

  Model<Scalar> model;
  model.train_points = points.derived().template cast<Scalar>();

  const Matrix d2 = squared_distance_matrix(model.train_points);
  Matrix a = kernel_from_squared_distances(d2, hp);
  a.diagonal().array() += hp.noise_variance;

  Eigen::LLT<Matrix> llt;
  const Scalar jitter = cholesky_with_jitter(a, llt, jitter_floor);

  model.hyperparams = hp;
  model.hyperparams.noise_variance += jitter;
  if (jitter > Scalar(0)) {
    a.diagonal().array() += jitter;
    llt.compute(a);
  }
  model.chol_lower = llt.matrixL();
  model.weights = llt.solve(values);

  const Eigen::Index m = values.size();
  const Scalar log_det = Scalar(2) * model.chol_lower.diagonal().array().log().sum();
  model.log_marginal = Scalar(-0.5) * values.dot(model.weights) - Scalar(0.5) * log_det -
                       Scalar(0.5) * static_cast<Scalar>(m) *
                           std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  return model;
}

/// Predictive mean k_*' (K + sigma_n^2 I)^-1 v at each query row.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> predict_mean(
    const Model<Scalar>& model, const Eigen::MatrixBase<Derived>& queries) {
  const auto k_star =
      cross_kernel_matrix(model.train_points, queries, model.hyperparams);
  return k_star.transpose() * model.weights;
}

/// Latent predictive variance sigma_f^2 - |L^-1 k_*|^2, clamped at zero.
/// Unused by the RMSD pipeline; provided for downstream work.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> predict_variance(
    const Model<Scalar>& model, const Eigen::MatrixBase<Derived>& queries) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix k_star = cross_kernel_matrix(model.train_points, queries, model.hyperparams);
  const Matrix solved =
      model.chol_lower.template triangularView<Eigen::Lower>().solve(k_star);
  return (Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(queries.rows(),
                                                             model.hyperparams.signal_variance) -
          solved.colwise().squaredNorm().transpose())
      .cwiseMax(Scalar(0));
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> clamp_log_params(Eigen::Matrix<Scalar, 3, 1> t, Scalar extent,
                                             Scalar jitter_floor) {
  const Scalar log_l_lo = std::log(Scalar(1e-3) * extent);
  const Scalar log_l_hi = std::log(Scalar(1e3) * extent);
  t(0) = std::clamp(t(0), log_l_lo, log_l_hi);
  t(1) = std::clamp(t(1), std::log(Scalar(1e-12)), std::log(Scalar(1e12)));
  t(2) = std::clamp(t(2), std::log(jitter_floor), std::log(Scalar(1e6)));
  return t;
}

}  // namespace detail

/// Maximum marginal likelihood fit: gradient ascent with backtracking line
/// search in log-parameter space, restarted from each configured initial
/// length scale; the restart with the best LML wins. Deterministic: no
/// randomness anywhere in the optimization.
template <typename Derived, typename Scalar>
Model<Scalar> fit(const Eigen::MatrixBase<Derived>& points,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& values,
                  const FitConfig<Scalar>& cfg = {}) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

  const Eigen::Index m = points.rows();
  if (m < 2 || values.size() != m) {
    throw Error("too-few-samples", "fit needs at least 2 training points");
  }
  if (cfg.restarts() < 1) {
    throw Error("invalid-config", "fit needs at least one restart");
  }

  const Matrix pts = points.derived().template cast<Scalar>();
  const Scalar extent_x = pts.col(0).maxCoeff() - pts.col(0).minCoeff();
  const Scalar extent_y = pts.col(1).maxCoeff() - pts.col(1).minCoeff();
  const Scalar extent = std::max(extent_x, extent_y);
  if (!(extent > Scalar(0))) {
    throw Error("degenerate-points", "training points are all identical");
  }

  const Matrix d2 = squared_distance_matrix(pts);
  const Scalar mean_v = values.mean();
  const Scalar var_v = std::max(
      (values.array() - mean_v).square().sum() / static_cast<Scalar>(m), Scalar(1e-12));

  const auto unpack = [](const Vector3& t) {
    return Hyperparams<Scalar>{std::exp(t(0)), std::exp(t(1)), std::exp(t(2))};
  };
  const auto objective = [&](const Vector3& t, bool grad) {
    return log_marginal_likelihood_from_distances<Scalar>(d2, values, unpack(t),
                                                          cfg.jitter_floor, grad);
  };

  bool have_best = false;
  Vector3 best_theta = Vector3::Zero();
  Scalar best_value = -std::numeric_limits<Scalar>::infinity();

  for (const Scalar multiplier : cfg.length_scale_multipliers) {
    Vector3 theta;
    theta << std::log(std::max(multiplier * extent, Scalar(1e-6))), std::log(var_v),
        std::log(std::max(cfg.initial_noise_fraction * var_v, cfg.jitter_floor));
    theta = detail::clamp_log_params(theta, extent, cfg.jitter_floor);

    LmlResult<Scalar> cur;
    try {
      cur = objective(theta, true);
    } catch (const Error&) {
      continue;  // this restart starts ill-conditioned; try the next one
    }

    Scalar step = Scalar(0.1);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
      const Scalar grad_norm = cur.grad_log.template lpNorm<Eigen::Infinity>();
      if (grad_norm < Scalar(1e-7)) break;

      // Armijo backtracking; the first trial step caps the log-space move at
      // 1. Trials skip the gradient (it costs an extra matrix inverse); the
      // accepted point is then re-evaluated with it.
      Scalar t = std::min(step, Scalar(1) / grad_norm);
      bool accepted = false;
      LmlResult<Scalar> next;
      Vector3 theta_next;
      while (t > Scalar(1e-14)) {
        theta_next = detail::clamp_log_params(
            Vector3(theta + t * cur.grad_log), extent, cfg.jitter_floor);
        try {
          next = objective(theta_next, false);
        } catch (const Error&) {
          t *= Scalar(0.5);
          continue;
        }
        if (next.value > cur.value + Scalar(1e-4) * t * cur.grad_log.squaredNorm()) {
          accepted = true;
          break;
        }
        t *= Scalar(0.5);
      }
      if (!accepted) break;

      const Scalar gain = next.value - cur.value;
      theta = theta_next;
      cur = objective(theta, true);
      step = std::min(t * Scalar(2), Scalar(1));
      if (gain < cfg.tolerance * (Scalar(1) + std::abs(cur.value))) break;
    }

    if (cur.value > best_value) {
      best_value = cur.value;
      best_theta = theta;
      have_best = true;
    }
  }

  if (!have_best) {
    throw Error("cholesky-failure", "every restart failed to factorize the kernel matrix");
  }
  return make_model(pts, values, unpack(best_theta), cfg.jitter_floor);
}

}  // namespace wafergp
