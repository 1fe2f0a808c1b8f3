#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbcg {

// Reference SDEs the bridge is measured against:
//   VE:  dx = sqrt(alpha'(t)) dw
//   VP:  dx = -1/2 beta(t) x dt + sqrt(beta(t)) dw
// alpha and the running integral of beta are closed-form for every supported
// descriptor; nothing here integrates numerically.
enum class SdeKind { VE, VP };

struct AlphaFn {
  enum class Kind { Linear, ConstantRate };
  Kind kind = Kind::Linear;
  double rate = 1.0;  // ConstantRate: alpha(t) = rate * t
};

struct BetaFn {
  enum class Kind { Constant, LinearRamp, Identity };
  Kind kind = Kind::Identity;
  double value = 1.0;  // Constant
  double min = 1.0;    // LinearRamp endpoints
  double max = 10.0;
};

struct Schedule {
  SdeKind kind = SdeKind::VE;
  AlphaFn alpha;
  BetaFn beta;

  static Schedule ve_linear() { return {SdeKind::VE, {AlphaFn::Kind::Linear, 1.0}, {}}; }
  static Schedule ve_rate(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("ve_rate: rate must be positive");
    return {SdeKind::VE, {AlphaFn::Kind::ConstantRate, c}, {}};
  }
  static Schedule vp_constant(double b) {
    if (!(b > 0.0)) throw std::invalid_argument("vp_constant: beta must be positive");
    return {SdeKind::VP, {}, {BetaFn::Kind::Constant, b, 0, 0}};
  }
  static Schedule vp_linear_ramp(double lo, double hi) {
    if (lo < 0.0 || hi < 0.0 || lo + hi <= 0.0)
      throw std::invalid_argument("vp_linear_ramp: beta must be nonnegative with positive integral");
    return {SdeKind::VP, {}, {BetaFn::Kind::LinearRamp, 0, lo, hi}};
  }
  static Schedule vp_identity() { return {SdeKind::VP, {}, {BetaFn::Kind::Identity, 0, 0, 0}}; }
};

namespace detail {
inline void require_ve(const Schedule& s, const char* op) {
  if (s.kind != SdeKind::VE)
    throw std::invalid_argument(std::string(op) + ": schedule kind must be VE");
}
inline void require_vp(const Schedule& s, const char* op) {
  if (s.kind != SdeKind::VP)
    throw std::invalid_argument(std::string(op) + ": schedule kind must be VP");
}
inline void require_unit_time(double t, const char* op) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument(std::string(op) + ": t outside [0,1]");
}
inline void require_interior_time(double t, const char* op) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error(std::string(op) + ": t=" + std::to_string(t) +
                            " is a degenerate endpoint; stay inside the truncated interval");
}
}  // namespace detail

inline double alpha_at(const Schedule& s, double t) {
  detail::require_ve(s, "alpha_at");
  detail::require_unit_time(t, "alpha_at");
  switch (s.alpha.kind) {
    case AlphaFn::Kind::Linear: return t;
    case AlphaFn::Kind::ConstantRate: return s.alpha.rate * t;
  }
  throw std::logic_error("alpha_at: unreachable");
}

inline double alpha_prime_at(const Schedule& s, double t) {
  detail::require_ve(s, "alpha_prime_at");
  detail::require_unit_time(t, "alpha_prime_at");
  switch (s.alpha.kind) {
    case AlphaFn::Kind::Linear: return 1.0;
    case AlphaFn::Kind::ConstantRate: return s.alpha.rate;
  }
  throw std::logic_error("alpha_prime_at: unreachable");
}

inline double beta_at(const Schedule& s, double t) {
  detail::require_vp(s, "beta_at");
  detail::require_unit_time(t, "beta_at");
  switch (s.beta.kind) {
    case BetaFn::Kind::Constant: return s.beta.value;
    case BetaFn::Kind::LinearRamp: return s.beta.min + (s.beta.max - s.beta.min) * t;
    case BetaFn::Kind::Identity: return t;
  }
  throw std::logic_error("beta_at: unreachable");
}

// Closed-form integral of beta over [t0, t1].
inline double beta_integral(const Schedule& s, double t0, double t1) {
  detail::require_vp(s, "beta_integral");
  detail::require_unit_time(t0, "beta_integral");
  detail::require_unit_time(t1, "beta_integral");
  if (t0 > t1) throw std::invalid_argument("beta_integral: t0 > t1");
  switch (s.beta.kind) {
    case BetaFn::Kind::Constant:
      return s.beta.value * (t1 - t0);
    case BetaFn::Kind::LinearRamp:
      return (t1 - t0) * (s.beta.min + 0.5 * (s.beta.max - s.beta.min) * (t1 + t0));
    case BetaFn::Kind::Identity:
      return 0.5 * (t1 - t0) * (t1 + t0);
  }
  throw std::logic_error("beta_integral: unreachable");
}

// VP coefficient bundle at a fixed interior time:
//   xi  = exp(-1/2 int_t^1 beta),  tau = exp(-1/2 int_0^1 beta)
//   sigma1^2 = 1 - tau^2, sigma2^2 = 1 - xi^2,
//   sigma^2 = (1/sigma2^2 - 1/sigma1^2)^-1
struct VpCoefficients {
  double sigma1_sq = 0;
  double sigma2_sq = 0;
  double sigma_sq = 0;
  double xi = 0;
  double tau = 0;
};

inline VpCoefficients vp_coefficients(const Schedule& s, double t) {
  detail::require_vp(s, "vp_coefficients");
  detail::require_interior_time(t, "vp_coefficients");
  const double b_0t = beta_integral(s, 0.0, t);
  const double b_t1 = beta_integral(s, t, 1.0);
  VpCoefficients c;
  c.xi = std::exp(-0.5 * b_t1);
  c.tau = std::exp(-0.5 * (b_0t + b_t1));
  c.sigma1_sq = -std::expm1(-(b_0t + b_t1));  // 1 - tau^2
  c.sigma2_sq = -std::expm1(-b_t1);           // 1 - xi^2
  // xi^2 - tau^2 = sigma1^2 - sigma2^2, written to avoid cancellation near t=0.
  const double diff = std::exp(-b_t1) * (-std::expm1(-b_0t));
  c.sigma_sq = c.sigma1_sq * c.sigma2_sq / diff;
  return c;
}

// Gaussian law of the bridge state at time t given the endpoint x1 (isotropic;
// variance is a scalar). Sampling: mean + sqrt(variance) * eta.
struct PerturbKernel {
  Eigen::VectorXd mean;
  double variance = 0;
};

inline PerturbKernel perturb_kernel(const Schedule& s, double t, const Eigen::VectorXd& x1,
                                    const Eigen::VectorXd& a) {
  detail::require_interior_time(t, "perturb_kernel");
  if (x1.size() != a.size())
    throw std::invalid_argument("perturb_kernel: x1 and a dimensions differ");
  PerturbKernel k;
  if (s.kind == SdeKind::VE) {
    const double a0 = alpha_at(s, 0.0), a1 = alpha_at(s, 1.0), at = alpha_at(s, t);
    const double span = a1 - a0;
    k.mean = ((at - a0) / span) * x1 + ((a1 - at) / span) * a;
    k.variance = (at - a0) * (a1 - at) / span;
  } else {
    const double b_0t = beta_integral(s, 0.0, t);
    const double b_t1 = beta_integral(s, t, 1.0);
    const double xi = std::exp(-0.5 * b_t1);
    const double tau = std::exp(-0.5 * (b_0t + b_t1));
    const double s1 = -std::expm1(-(b_0t + b_t1));
    const double s2 = -std::expm1(-b_t1);
    const double diff = std::exp(-b_t1) * (-std::expm1(-b_0t));  // xi^2 - tau^2
    // Same quantities as vp_coefficients, with sigma^2 folded in analytically:
    // mean = sigma2^2/(xi sigma^2) x1 + tau sigma2^2/(xi sigma1^2) a
    //      = diff/(xi s1) x1 + tau s2/(xi s1) a
    k.mean = (diff / (xi * s1)) * x1 + (tau * s2 / (xi * s1)) * a;
    k.variance = s2 * diff / (xi * xi * s1);
  }
  return k;
}

// Regression label of the drift-matching loss: the closed-form bridge drift
// evaluated at a perturbed state.
//   VE: alpha'(t)/(alpha(1)-alpha(t)) (x1 - xt)
//   VP: beta(t) xi/(1-xi^2) (x1 - xi xt)
inline Eigen::VectorXd drift_target(const Schedule& s, double t, const Eigen::VectorXd& x1,
                                    const Eigen::VectorXd& xt) {
  detail::require_interior_time(t, "drift_target");
  if (x1.size() != xt.size())
    throw std::invalid_argument("drift_target: x1 and xt dimensions differ");
  if (s.kind == SdeKind::VE) {
    const double coef = alpha_prime_at(s, t) / (alpha_at(s, 1.0) - alpha_at(s, t));
    return coef * (x1 - xt);
  }
  const double b_t1 = beta_integral(s, t, 1.0);
  const double xi = std::exp(-0.5 * b_t1);
  const double s2 = -std::expm1(-b_t1);
  const double coef = beta_at(s, t) * xi / s2;
  return coef * (x1 - xi * xt);
}

// Integrator-facing pieces of the reference SDE.
inline double diffusion_at(const Schedule& s, double t) {
  return s.kind == SdeKind::VE ? std::sqrt(alpha_prime_at(s, t)) : std::sqrt(beta_at(s, t));
}

inline std::string to_string(SdeKind k) { return k == SdeKind::VE ? "ve" : "vp"; }

// Plain-text config grammar: sde.kind = ve|vp, sde.alpha = linear|rate:<c>,
// sde.beta_min / sde.beta_max floats (min == max selects a constant beta,
// 0 -> 1 the identity ramp beta(t) = t).
inline std::string alpha_to_config(const AlphaFn& a) {
  return a.kind == AlphaFn::Kind::Linear ? "linear" : "rate:" + std::to_string(a.rate);
}

inline Schedule schedule_from_config(const std::string& kind, const std::string& alpha,
                                     double beta_min, double beta_max) {
  if (kind == "ve") {
    if (alpha == "linear") return Schedule::ve_linear();
    if (alpha.rfind("rate:", 0) == 0) return Schedule::ve_rate(std::stod(alpha.substr(5)));
    throw std::invalid_argument("sde.alpha: expected 'linear' or 'rate:<c>', got '" + alpha + "'");
  }
  if (kind == "vp") {
    if (beta_min == beta_max) return Schedule::vp_constant(beta_min);
    if (beta_min == 0.0 && beta_max == 1.0) return Schedule::vp_identity();
    return Schedule::vp_linear_ramp(beta_min, beta_max);
  }
  throw std::invalid_argument("sde.kind: expected 've' or 'vp', got '" + kind + "'");
}

}  // namespace sbcg
