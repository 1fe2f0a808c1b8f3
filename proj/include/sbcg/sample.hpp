#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sbcg/measure.hpp"
#include "sbcg/net.hpp"
#include "sbcg/rng.hpp"
#include "sbcg/schedule.hpp"

namespace sbcg {

// Drift sources for the generative SDE: a trained network u(x, z, t), or the
// closed-form empirical-measure drift (which ignores z; the measure already
// encodes the conditioning, e.g. a per-class atom subset).
struct NetworkDrift {
  MlpParams params;
};
struct AnalyticDrift {
  EmpiricalMeasure measure;
};
using DriftSource = std::variant<NetworkDrift, AnalyticDrift>;

struct SampleConfig {
  int steps = 100;
  double epsilon = 1e-3;
  Schedule schedule;
  Eigen::VectorXd anchor;
  std::uint64_t seed = 0;
  DriftSource drift = NetworkDrift{};
  int threads = 1;
  Eigen::Index block_rows = 16384;  // internal batching granularity

  double step_size() const { return (1.0 - 2.0 * epsilon) / steps; }

  void validate() const {
    if (steps < 1) throw std::invalid_argument("SampleConfig: steps must be >= 1");
    if (!(epsilon >= 0.0 && epsilon < 0.5))
      throw std::invalid_argument("SampleConfig: epsilon must lie in [0, 0.5)");
    if (anchor.size() == 0) throw std::invalid_argument("SampleConfig: anchor not set");
    if (threads < 1) throw std::invalid_argument("SampleConfig: threads must be >= 1");
  }
};

struct SamplePath {
  Eigen::VectorXd times;   // eps + k h, k = 0..K
  Eigen::MatrixXd states;  // (K+1) x d_x, states.row(0) = anchor
  Eigen::VectorXd terminal;
};

// Stream used for the path at (z_index, replicate); sample_many and
// single-path integration agree because both derive noise from here.
inline Rng path_rng(const SampleConfig& cfg, std::uint64_t z_index, std::uint64_t replicate) {
  return Rng(cfg.seed).split(z_index).split(replicate);
}

namespace detail {

inline Eigen::Index drift_dim(const DriftSource& d) {
  if (const auto* net = std::get_if<NetworkDrift>(&d)) return net->params.spec.d_x;
  return std::get<AnalyticDrift>(d).measure.dim();
}

inline Eigen::VectorXd eval_drift(const DriftSource& d, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& z, double t, const Schedule& s,
                                  const Eigen::VectorXd& a) {
  if (const auto* net = std::get_if<NetworkDrift>(&d)) return forward(net->params, x, z, t);
  const auto& m = std::get<AnalyticDrift>(d).measure;
  return s.kind == SdeKind::VE ? analytic_drift_ve(x, t, m, s, a)
                               : analytic_drift_vp(x, t, m, s, a);
}

inline Eigen::MatrixXd eval_drift_batch(const DriftSource& d, const Eigen::MatrixXd& X,
                                        const Eigen::MatrixXd& Z, double t, const Schedule& s,
                                        const Eigen::VectorXd& a) {
  if (const auto* net = std::get_if<NetworkDrift>(&d)) {
    const Eigen::VectorXd tv = Eigen::VectorXd::Constant(X.rows(), t);
    return forward_batch(net->params, X, Z, tv);
  }
  return analytic_drift_batch(X, t, std::get<AnalyticDrift>(d).measure, s, a);
}

}  // namespace detail

// Explicit first-order integration of the conditional SDE from the anchor:
//   x_{k+1} = x_k + h [b(x_k, t_k) + u(x_k, z, t_k)] + sqrt(h) sigma(t_k) eta_k
// with b == 0, sigma = sqrt(alpha') (VE) or b = -beta x / 2, sigma = sqrt(beta)
// (VP); all coefficients at the left endpoint.
inline SamplePath euler_maruyama(const Eigen::VectorXd& z, const SampleConfig& cfg, Rng& rng) {
  cfg.validate();
  const Eigen::Index d_x = cfg.anchor.size();
  if (detail::drift_dim(cfg.drift) != d_x)
    throw std::invalid_argument("euler_maruyama: drift source dimension mismatch");
  if (const auto* net = std::get_if<NetworkDrift>(&cfg.drift))
    if (net->params.spec.d_z != z.size())
      throw std::invalid_argument("euler_maruyama: condition dimension mismatch");

  const int K = cfg.steps;
  const double h = cfg.step_size();
  const double sqrt_h = std::sqrt(h);
  const bool vp = cfg.schedule.kind == SdeKind::VP;

  SamplePath path;
  path.times.resize(K + 1);
  path.states.resize(K + 1, d_x);
  Eigen::VectorXd x = cfg.anchor;
  path.times(0) = cfg.epsilon;
  path.states.row(0) = x.transpose();

  for (int k = 0; k < K; ++k) {
    const double tk = cfg.epsilon + k * h;
    Eigen::VectorXd drift = detail::eval_drift(cfg.drift, x, z, tk, cfg.schedule, cfg.anchor);
    if (vp) drift -= 0.5 * beta_at(cfg.schedule, tk) * x;
    const double sigma = diffusion_at(cfg.schedule, tk);
    for (Eigen::Index c = 0; c < d_x; ++c)
      x(c) += h * drift(c) + sqrt_h * sigma * rng.normal();
    if (!x.allFinite())
      throw std::runtime_error("euler_maruyama: non-finite state at step " + std::to_string(k));
    path.times(k + 1) = cfg.epsilon + (k + 1) * h;
    path.states.row(k + 1) = x.transpose();
  }
  path.terminal = x;
  return path;
}

// Terminal samples for every (z, replicate) pair, rows grouped by z. Paths are
// integrated in row blocks with batched drift evaluation; each path consumes
// its own derived noise stream, so results do not depend on blocking or
// thread count and match euler_maruyama path-for-path.
inline Eigen::MatrixXd sample_many(const std::vector<Eigen::VectorXd>& z_list, int per_z,
                                   const SampleConfig& cfg) {
  cfg.validate();
  if (per_z < 1) throw std::invalid_argument("sample_many: per_z must be >= 1");
  if (z_list.empty()) throw std::invalid_argument("sample_many: no conditions given");
  const Eigen::Index d_x = cfg.anchor.size();
  if (detail::drift_dim(cfg.drift) != d_x)
    throw std::invalid_argument("sample_many: drift source dimension mismatch");
  const Eigen::Index d_z = z_list.front().size();
  for (const auto& z : z_list)
    if (z.size() != d_z) throw std::invalid_argument("sample_many: ragged condition list");
  if (const auto* net = std::get_if<NetworkDrift>(&cfg.drift))
    if (net->params.spec.d_z != d_z)
      throw std::invalid_argument("sample_many: condition dimension mismatch");

  const Eigen::Index total = static_cast<Eigen::Index>(z_list.size()) * per_z;
  Eigen::MatrixXd terminals(total, d_x);

  const int K = cfg.steps;
  const double h = cfg.step_size();
  const double sqrt_h = std::sqrt(h);
  const bool vp = cfg.schedule.kind == SdeKind::VP;

  auto run_block = [&](Eigen::Index begin, Eigen::Index count) {
    Eigen::MatrixXd S = cfg.anchor.transpose().replicate(count, 1);
    Eigen::MatrixXd Z(count, d_z);
    std::vector<Rng> streams;
    streams.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index row = begin + r;
      const std::uint64_t zi = static_cast<std::uint64_t>(row / per_z);
      const std::uint64_t rep = static_cast<std::uint64_t>(row % per_z);
      Z.row(r) = z_list[static_cast<std::size_t>(zi)].transpose();
      streams.push_back(path_rng(cfg, zi, rep));
    }
    for (int k = 0; k < K; ++k) {
      const double tk = cfg.epsilon + k * h;
      Eigen::MatrixXd drift = detail::eval_drift_batch(cfg.drift, S, Z, tk, cfg.schedule, cfg.anchor);
      if (vp) drift -= 0.5 * beta_at(cfg.schedule, tk) * S;
      const double sigma = diffusion_at(cfg.schedule, tk);
      for (Eigen::Index r = 0; r < count; ++r)
        for (Eigen::Index c = 0; c < d_x; ++c)
          S(r, c) += h * drift(r, c) + sqrt_h * sigma * streams[static_cast<std::size_t>(r)].normal();
      if (!S.allFinite()) {
        for (Eigen::Index r = 0; r < count; ++r)
          if (!S.row(r).allFinite()) {
            const Eigen::Index row = begin + r;
            throw std::runtime_error("sample_many: non-finite state at step " +
                                     std::to_string(k) + " (z index " +
                                     std::to_string(row / per_z) + ", replicate " +
                                     std::to_string(row % per_z) + ")");
          }
      }
    }
    terminals.middleRows(begin, count) = S;
  };

  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  for (Eigen::Index begin = 0; begin < total; begin += cfg.block_rows)
    blocks.emplace_back(begin, std::min(cfg.block_rows, total - begin));

  if (cfg.threads <= 1 || blocks.size() == 1) {
    for (const auto& [begin, count] : blocks) run_block(begin, count);
    return terminals;
  }

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.threads));
  const int nthreads = cfg.threads;
  for (int w = 0; w < nthreads; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < blocks.size();
             i += static_cast<std::size_t>(nthreads))
          run_block(blocks[i].first, blocks[i].second);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return terminals;
}

}  // namespace sbcg
