#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbcg/dataset.hpp"
#include "sbcg/io.hpp"
#include "sbcg/net.hpp"
#include "sbcg/rng.hpp"
#include "sbcg/schedule.hpp"

namespace sbcg {

struct TrainConfig {
  long iterations = 20000;
  int batch_size = 256;
  int t_samples = 1;  // perturbed (t, x_t) pairs per drawn data row
  double epsilon = 1e-3;
  Schedule schedule;
  Eigen::VectorXd anchor;  // start point a; empty means the origin
  std::uint64_t seed = 0;
  AdamHyper adam;
  long checkpoint_every = 0;
  std::string checkpoint_prefix;

  void validate() const {
    if (iterations < 0) throw std::invalid_argument("TrainConfig: negative iteration count");
    if (batch_size < 1 || t_samples < 1)
      throw std::invalid_argument("TrainConfig: batch_size and t_samples must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 0.5))
      throw std::invalid_argument("TrainConfig: epsilon must lie in (0, 0.5)");
  }
};

// One regression batch: rows pair a data draw (x1, z) with an independent
// time t in [eps, 1-eps], a Gaussian bridge state xt, and the closed-form
// drift label.
struct Minibatch {
  Eigen::MatrixXd x1, z;
  Eigen::VectorXd t;
  Eigen::MatrixXd xt, target;
  Eigen::Index rows() const { return x1.rows(); }
};

inline Minibatch make_batch(const Dataset& data, const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.n() < 1) throw std::invalid_argument("make_batch: empty dataset");
  const Eigen::Index d_x = data.d_x(), d_z = data.d_z();
  const Eigen::VectorXd anchor =
      cfg.anchor.size() ? cfg.anchor : Eigen::VectorXd::Zero(d_x);
  if (anchor.size() != d_x) throw std::invalid_argument("make_batch: anchor dimension mismatch");

  const Eigen::Index B = static_cast<Eigen::Index>(cfg.batch_size) * cfg.t_samples;
  Minibatch b;
  b.x1.resize(B, d_x);
  b.z.resize(B, d_z);
  b.t.resize(B);
  b.xt.resize(B, d_x);
  b.target.resize(B, d_x);

  Eigen::Index r = 0;
  for (int i = 0; i < cfg.batch_size; ++i) {
    const Eigen::Index row =
        static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(data.n())));
    const Eigen::VectorXd x1 = data.x.row(row).transpose();
    for (int j = 0; j < cfg.t_samples; ++j, ++r) {
      const double t = cfg.epsilon + (1.0 - 2.0 * cfg.epsilon) * rng.uniform();
      const PerturbKernel k = perturb_kernel(cfg.schedule, t, x1, anchor);
      const double sd = std::sqrt(k.variance);
      Eigen::VectorXd xt(d_x);
      for (Eigen::Index c = 0; c < d_x; ++c) xt(c) = k.mean(c) + sd * rng.normal();
      b.x1.row(r) = x1.transpose();
      b.z.row(r) = data.z.row(row);
      b.t(r) = t;
      b.xt.row(r) = xt.transpose();
      b.target.row(r) = drift_target(cfg.schedule, t, x1, xt).transpose();
    }
  }
  return b;
}

struct TrainResult {
  MlpParams params;
  std::vector<double> loss_trace;
};

// Called with the loss evaluated at the pre-update parameters.
using TrainObserver =
    std::function<void(long iter, const Minibatch&, double loss, const MlpParams&)>;

namespace detail {

inline std::string batch_summary(const Minibatch& b) {
  std::ostringstream os;
  os << "rows=" << b.rows() << " t in [" << b.t.minCoeff() << ", " << b.t.maxCoeff() << "]"
     << " |x1|max=" << b.x1.cwiseAbs().maxCoeff() << " |xt|max=" << b.xt.cwiseAbs().maxCoeff()
     << " |target|max=" << b.target.cwiseAbs().maxCoeff();
  return os.str();
}

}  // namespace detail

// Stochastic minimization of the drift-matching loss; fresh (t, x_t) draws
// every iteration. Deterministic given (spec.init_seed, cfg.seed).
inline TrainResult train(const Dataset& data, const MlpSpec& spec, const TrainConfig& cfg,
                         const TrainObserver& observer = {}) {
  cfg.validate();
  spec.validate();
  if (spec.d_x != data.d_x() || spec.d_z != data.d_z())
    throw std::invalid_argument("train: dataset dimensions do not match network spec");

  TrainResult out;
  out.params = init_params(spec);
  AdamState adam = AdamState::zeros_like(out.params, cfg.adam);
  Rng rng = Rng(cfg.seed).split(0x747261696eULL);
  Gradients grads;
  out.loss_trace.reserve(static_cast<std::size_t>(cfg.iterations));

  for (long iter = 1; iter <= cfg.iterations; ++iter) {
    const Minibatch batch = make_batch(data, cfg, rng);
    const double loss =
        loss_and_grad(out.params, batch.xt, batch.z, batch.t, batch.target, grads);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(iter) +
                               "; " + detail::batch_summary(batch));
    if (observer) observer(iter, batch, loss, out.params);
    adam_step(out.params, grads, adam);
    out.loss_trace.push_back(loss);
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_prefix.empty() &&
        iter % cfg.checkpoint_every == 0) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_%08ld.ckpt", iter);
      save_checkpoint(cfg.checkpoint_prefix + suffix, out.params);
    }
  }
  return out;
}

inline void write_loss_trace_csv(const std::string& path, const std::vector<double>& trace) {
  std::ostringstream os;
  os << "iter,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << (i + 1) << "," << format_double(trace[i]) << "\n";
  atomic_write_file(path, os.str());
}

}  // namespace sbcg
