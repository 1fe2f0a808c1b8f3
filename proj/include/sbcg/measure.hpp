#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbcg/rng.hpp"
#include "sbcg/schedule.hpp"

namespace sbcg {

// Finite-atom target measure. Weights are normalized at construction.
struct EmpiricalMeasure {
  Eigen::MatrixXd atoms;    // n x d
  Eigen::VectorXd weights;  // n, sums to 1

  explicit EmpiricalMeasure(Eigen::MatrixXd atom_rows, Eigen::VectorXd w = {})
      : atoms(std::move(atom_rows)) {
    const Eigen::Index n = atoms.rows();
    if (n < 1) throw std::invalid_argument("EmpiricalMeasure: needs at least one atom");
    if (w.size() == 0) {
      weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    } else {
      if (w.size() != n) throw std::invalid_argument("EmpiricalMeasure: weight count mismatch");
      if ((w.array() < 0.0).any()) throw std::invalid_argument("EmpiricalMeasure: negative weight");
      const double total = w.sum();
      if (!(total > 0.0)) throw std::invalid_argument("EmpiricalMeasure: weights sum to zero");
      weights = w / total;
    }
  }

  Eigen::Index size() const { return atoms.rows(); }
  Eigen::Index dim() const { return atoms.cols(); }

  // Uniform atom subsample, for cheaper drift evaluation on large measures.
  EmpiricalMeasure subsample(Eigen::Index max_atoms, Rng& rng) const {
    if (max_atoms >= size()) return *this;
    Eigen::MatrixXd picked(max_atoms, dim());
    for (Eigen::Index i = 0; i < max_atoms; ++i)
      picked.row(i) = atoms.row(static_cast<Eigen::Index>(rng.next_below(size())));
    return EmpiricalMeasure(std::move(picked));
  }
};

namespace detail {

// Log-weights are exponentiated with max subtraction; terms more than 60 nats
// below the max are flushed to zero.
constexpr double kLogWeightFloor = -60.0;

struct DriftCoefs {
  double prior_inv_two_var;  // 1/(2 var0) multiplying ||x1 - shrink0 a||^2
  double like_inv_two_var;   // 1/(2 vart) multiplying ||x1 - shrink x||^2
  double shrink0;            // tau (VP) or 1 (VE)
  double shrink;             // xi (VP) or 1 (VE)
  double coef;               // scalar in front of the weighted average
};

inline DriftCoefs drift_coefs(const Schedule& s, double t) {
  require_interior_time(t, "analytic_drift");
  DriftCoefs c;
  if (s.kind == SdeKind::VE) {
    const double a0 = alpha_at(s, 0.0), a1 = alpha_at(s, 1.0);
    const double span0 = a1 - a0;
    const double spant = a1 - alpha_at(s, t);
    c.prior_inv_two_var = 1.0 / (2.0 * span0);
    c.like_inv_two_var = 1.0 / (2.0 * spant);
    c.shrink0 = 1.0;
    c.shrink = 1.0;
    c.coef = alpha_prime_at(s, t) / spant;
  } else {
    const VpCoefficients v = vp_coefficients(s, t);
    c.prior_inv_two_var = 1.0 / (2.0 * v.sigma1_sq);
    c.like_inv_two_var = 1.0 / (2.0 * v.sigma2_sq);
    c.shrink0 = v.tau;
    c.shrink = v.xi;
    c.coef = beta_at(s, t) * v.xi / v.sigma2_sq;
  }
  return c;
}

}  // namespace detail

// Softmax weights over atoms for the bridge drift at (x, t): the i-th
// log-weight is ||x1_i - shrink0 a||^2/(2 var0) - ||x1_i - shrink x||^2/(2 vart)
// plus the atom's log measure weight.
inline Eigen::VectorXd drift_softmax_weights(const Eigen::VectorXd& x, double t,
                                             const EmpiricalMeasure& m, const Schedule& s,
                                             const Eigen::VectorXd& a) {
  if (x.size() != m.dim() || a.size() != m.dim())
    throw std::invalid_argument("drift_softmax_weights: dimension mismatch");
  const detail::DriftCoefs c = detail::drift_coefs(s, t);
  const Eigen::Index n = m.size();
  Eigen::VectorXd logf(n);
  const Eigen::VectorXd pulled0 = c.shrink0 * a;
  const Eigen::VectorXd pulled = c.shrink * x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d0 = (m.atoms.row(i).transpose() - pulled0).squaredNorm();
    const double dt = (m.atoms.row(i).transpose() - pulled).squaredNorm();
    logf(i) = d0 * c.prior_inv_two_var - dt * c.like_inv_two_var + std::log(m.weights(i));
  }
  const double top = logf.maxCoeff();
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rel = logf(i) - top;
    w(i) = rel < detail::kLogWeightFloor ? 0.0 : std::exp(rel);
  }
  w /= w.sum();
  return w;
}

namespace detail {

inline Eigen::VectorXd analytic_drift(const Eigen::VectorXd& x, double t,
                                      const EmpiricalMeasure& m, const Schedule& s,
                                      const Eigen::VectorXd& a) {
  const DriftCoefs c = drift_coefs(s, t);
  const Eigen::VectorXd w = drift_softmax_weights(x, t, m, s, a);
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(m.dim());
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (w(i) != 0.0) avg += w(i) * m.atoms.row(i).transpose();
  return c.coef * (avg - c.shrink * x);
}

}  // namespace detail

// Closed-form bridge drift toward an empirical target, VE reference.
inline Eigen::VectorXd analytic_drift_ve(const Eigen::VectorXd& x, double t,
                                         const EmpiricalMeasure& m, const Schedule& s,
                                         const Eigen::VectorXd& a) {
  detail::require_ve(s, "analytic_drift_ve");
  return detail::analytic_drift(x, t, m, s, a);
}

// Same for the VP reference.
inline Eigen::VectorXd analytic_drift_vp(const Eigen::VectorXd& x, double t,
                                         const EmpiricalMeasure& m, const Schedule& s,
                                         const Eigen::VectorXd& a) {
  detail::require_vp(s, "analytic_drift_vp");
  return detail::analytic_drift(x, t, m, s, a);
}

// Batched evaluation over rows of X (B x d) at a common time. Distances go
// through a GEMM, which is what makes many-atom measures (image classes)
// tractable; agrees with the row-at-a-time path to roundoff.
inline Eigen::MatrixXd analytic_drift_batch(const Eigen::MatrixXd& X, double t,
                                            const EmpiricalMeasure& m, const Schedule& s,
                                            const Eigen::VectorXd& a) {
  if (X.cols() != m.dim() || a.size() != m.dim())
    throw std::invalid_argument("analytic_drift_batch: dimension mismatch");
  const detail::DriftCoefs c = detail::drift_coefs(s, t);
  const Eigen::Index n = m.size(), B = X.rows();

  Eigen::VectorXd prior(n);  // per-atom terms that do not depend on x
  const Eigen::VectorXd pulled0 = c.shrink0 * a;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d0 = (m.atoms.row(i).transpose() - pulled0).squaredNorm();
    prior(i) = d0 * c.prior_inv_two_var + std::log(m.weights(i));
  }
  const Eigen::VectorXd atom_sq = m.atoms.rowwise().squaredNorm();

  const Eigen::MatrixXd Y = c.shrink * X;                  // B x d
  const Eigen::MatrixXd cross = m.atoms * Y.transpose();   // n x B
  const Eigen::VectorXd y_sq = Y.rowwise().squaredNorm();  // B

  Eigen::MatrixXd W(n, B);
  for (Eigen::Index p = 0; p < B; ++p) {
    Eigen::VectorXd logf =
        prior - c.like_inv_two_var * (atom_sq.array() - 2.0 * cross.col(p).array() + y_sq(p)).matrix();
    const double top = logf.maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double rel = logf(i) - top;
      W(i, p) = rel < detail::kLogWeightFloor ? 0.0 : std::exp(rel);
    }
    W.col(p) /= W.col(p).sum();
  }
  Eigen::MatrixXd avg = W.transpose() * m.atoms;  // B x d
  return c.coef * (avg - Y);
}

}  // namespace sbcg
