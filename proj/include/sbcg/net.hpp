#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbcg/rng.hpp"

namespace sbcg {

enum class Activation { ReLU, SELU };

// Standard SELU constants.
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

// Drift-field network u(x, z, t): input is [x, z, time features], output has
// the dimension of x with a linear head. Time enters as the raw scalar by
// default; `sinusoidal_time` swaps in a small sin/cos feature stack.
struct MlpSpec {
  int d_x = 1;
  int d_z = 1;
  std::vector<int> hidden = {32, 64, 64, 32};
  Activation activation = Activation::ReLU;
  bool sinusoidal_time = false;
  std::uint64_t init_seed = 0;

  int time_feature_dim() const { return sinusoidal_time ? 9 : 1; }
  int input_dim() const { return d_x + d_z + time_feature_dim(); }

  void validate() const {
    if (d_x < 1 || d_z < 0) throw std::invalid_argument("MlpSpec: bad dimensions");
    if (hidden.empty()) throw std::invalid_argument("MlpSpec: at least one hidden layer required");
    for (int w : hidden)
      if (w < 1) throw std::invalid_argument("MlpSpec: hidden widths must be positive");
  }
};

struct MlpParams {
  MlpSpec spec;
  std::vector<Eigen::MatrixXd> weights;  // layer l: in_l x out_l
  std::vector<Eigen::VectorXd> biases;

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
      n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
    return n;
  }
};

// Gradient set and Adam moments share the parameter shapes.
struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step = 0;
  AdamHyper hyper;

  static AdamState zeros_like(const MlpParams& p, AdamHyper h = {}) {
    AdamState s;
    s.hyper = h;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      s.m_w.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
      s.v_w.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
      s.m_b.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
      s.v_b.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
    }
    return s;
  }
};

namespace detail {

inline std::vector<int> layer_widths(const MlpSpec& spec) {
  std::vector<int> w;
  w.push_back(spec.input_dim());
  for (int h : spec.hidden) w.push_back(h);
  w.push_back(spec.d_x);
  return w;
}

inline double activate(Activation a, double v) {
  if (a == Activation::ReLU) return v > 0.0 ? v : 0.0;
  return v > 0.0 ? kSeluLambda * v : kSeluLambda * kSeluAlpha * std::expm1(v);
}

inline double activate_deriv(Activation a, double pre) {
  if (a == Activation::ReLU) return pre > 0.0 ? 1.0 : 0.0;
  return pre > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(pre);
}

inline void fill_time_features(const MlpSpec& spec, double t, double* dst) {
  dst[0] = t;
  if (!spec.sinusoidal_time) return;
  for (int k = 0; k < 4; ++k) {
    const double w = std::numbers::pi * static_cast<double>(1 << k) * t;
    dst[1 + 2 * k] = std::sin(w);
    dst[2 + 2 * k] = std::cos(w);
  }
}

inline Eigen::MatrixXd assemble_input(const MlpSpec& spec, const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& z, const Eigen::VectorXd& t) {
  if (x.cols() != spec.d_x || z.cols() != spec.d_z)
    throw std::invalid_argument("mlp: input dimension mismatch");
  if (x.rows() != z.rows() || x.rows() != t.size())
    throw std::invalid_argument("mlp: batch row mismatch");
  const Eigen::Index B = x.rows();
  Eigen::MatrixXd in(B, spec.input_dim());
  in.leftCols(spec.d_x) = x;
  in.middleCols(spec.d_x, spec.d_z) = z;
  std::vector<double> tf(static_cast<std::size_t>(spec.time_feature_dim()));
  for (Eigen::Index r = 0; r < B; ++r) {
    fill_time_features(spec, t(r), tf.data());
    for (int c = 0; c < spec.time_feature_dim(); ++c) in(r, spec.d_x + spec.d_z + c) = tf[c];
  }
  return in;
}

}  // namespace detail

// Fan-in-scaled Gaussian weights (He for ReLU, LeCun for SELU), zero biases;
// fully determined by spec.init_seed.
inline MlpParams init_params(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  p.spec = spec;
  Rng rng(spec.init_seed);
  const std::vector<int> widths = detail::layer_widths(spec);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l], fan_out = widths[l + 1];
    const double gain = spec.activation == Activation::ReLU ? 2.0 : 1.0;
    const double stddev = std::sqrt(gain / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = stddev * rng.normal();
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return p;
}

// Batched forward pass; rows are independent samples.
inline Eigen::MatrixXd forward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& z, const Eigen::VectorXd& t) {
  Eigen::MatrixXd h = detail::assemble_input(p.spec, x, z, t);
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd pre = (h * p.weights[l]).rowwise() + p.biases[l].transpose();
    if (l + 1 == layers) {
      h = std::move(pre);  // linear output head
    } else {
      h = pre.unaryExpr([&](double v) { return detail::activate(p.spec.activation, v); });
    }
  }
  return h;
}

inline Eigen::VectorXd forward(const MlpParams& p, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& z, double t) {
  Eigen::MatrixXd xm = x.transpose();
  Eigen::MatrixXd zm = z.transpose();
  Eigen::VectorXd tv = Eigen::VectorXd::Constant(1, t);
  return forward_batch(p, xm, zm, tv).row(0);
}

// Mean over the batch of the squared residual norm, with reverse-mode
// gradients for every parameter. `target` rows must be finite.
inline double loss_and_grad(const MlpParams& p, const Eigen::MatrixXd& xt,
                            const Eigen::MatrixXd& z, const Eigen::VectorXd& t,
                            const Eigen::MatrixXd& target, Gradients& grads) {
  if (!target.allFinite()) {
    throw std::runtime_error(
        "loss_and_grad: non-finite regression target (batch rejected); rows=" +
        std::to_string(target.rows()));
  }
  if (target.rows() != xt.rows() || target.cols() != p.spec.d_x)
    throw std::invalid_argument("loss_and_grad: target shape mismatch");

  const std::size_t layers = p.weights.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);  // acts[l] feeds layer l
  std::vector<Eigen::MatrixXd> pres(layers);
  acts[0] = detail::assemble_input(p.spec, xt, z, t);
  for (std::size_t l = 0; l < layers; ++l) {
    pres[l] = (acts[l] * p.weights[l]).rowwise() + p.biases[l].transpose();
    if (l + 1 == layers)
      acts[l + 1] = pres[l];
    else
      acts[l + 1] = pres[l].unaryExpr([&](double v) { return detail::activate(p.spec.activation, v); });
  }

  const double B = static_cast<double>(xt.rows());
  const Eigen::MatrixXd residual = acts[layers] - target;
  const double loss = residual.squaredNorm() / B;

  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Eigen::MatrixXd delta = (2.0 / B) * residual;  // d loss / d pre (output layer)
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l] = acts[l].transpose() * delta;
    grads.biases[l] = delta.colwise().sum();
    if (l > 0) {
      Eigen::MatrixXd dh = delta * p.weights[l].transpose();
      delta = dh.cwiseProduct(pres[l - 1].unaryExpr(
          [&](double v) { return detail::activate_deriv(p.spec.activation, v); }));
    }
  }
  return loss;
}

// Standard Adam update with bias correction.
inline void adam_step(MlpParams& p, const Gradients& g, AdamState& s) {
  if (g.weights.size() != p.weights.size())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  s.step += 1;
  const AdamHyper& h = s.hyper;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(s.step));
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    s.m_w[l] = h.beta1 * s.m_w[l] + (1.0 - h.beta1) * g.weights[l];
    s.v_w[l] = h.beta2 * s.v_w[l] + (1.0 - h.beta2) * g.weights[l].cwiseProduct(g.weights[l]);
    p.weights[l].array() -=
        h.lr * (s.m_w[l].array() / c1) / ((s.v_w[l].array() / c2).sqrt() + h.eps);
    s.m_b[l] = h.beta1 * s.m_b[l] + (1.0 - h.beta1) * g.biases[l];
    s.v_b[l] = h.beta2 * s.v_b[l] + (1.0 - h.beta2) * g.biases[l].cwiseProduct(g.biases[l]);
    p.biases[l].array() -=
        h.lr * (s.m_b[l].array() / c1) / ((s.v_b[l].array() / c2).sqrt() + h.eps);
  }
}

// ---- checkpoint container ----------------------------------------------
// Little-endian binary: magic "SBCG", u32 version, spec fields, then the flat
// parameter array in layer order (weights column-major, then bias).

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated payload");
  return v;
}

}  // namespace detail

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void save_checkpoint(std::ostream& os, const MlpParams& p) {
  os.write("SBCG", 4);
  detail::put<std::uint32_t>(os, kCheckpointVersion);
  detail::put<std::int32_t>(os, p.spec.d_x);
  detail::put<std::int32_t>(os, p.spec.d_z);
  detail::put<std::int32_t>(os, static_cast<std::int32_t>(p.spec.hidden.size()));
  for (int h : p.spec.hidden) detail::put<std::int32_t>(os, h);
  detail::put<std::uint8_t>(os, p.spec.activation == Activation::ReLU ? 0 : 1);
  detail::put<std::uint8_t>(os, p.spec.sinusoidal_time ? 1 : 0);
  detail::put<std::uint64_t>(os, p.spec.init_seed);
  detail::put<std::uint64_t>(os, p.scalar_count());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    os.write(reinterpret_cast<const char*>(p.weights[l].data()),
             static_cast<std::streamsize>(sizeof(double) * p.weights[l].size()));
    os.write(reinterpret_cast<const char*>(p.biases[l].data()),
             static_cast<std::streamsize>(sizeof(double) * p.biases[l].size()));
  }
}

inline void save_checkpoint(const std::string& path, const MlpParams& p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  save_checkpoint(os, p);
  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

inline MlpParams load_checkpoint(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SBCG", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const auto version = detail::take<std::uint32_t>(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  MlpSpec spec;
  spec.d_x = detail::take<std::int32_t>(is);
  spec.d_z = detail::take<std::int32_t>(is);
  const auto n_hidden = detail::take<std::int32_t>(is);
  if (n_hidden < 1 || n_hidden > 1024) throw std::runtime_error("checkpoint: bad layer count");
  spec.hidden.resize(static_cast<std::size_t>(n_hidden));
  for (auto& h : spec.hidden) h = detail::take<std::int32_t>(is);
  spec.activation = detail::take<std::uint8_t>(is) == 0 ? Activation::ReLU : Activation::SELU;
  spec.sinusoidal_time = detail::take<std::uint8_t>(is) != 0;
  spec.init_seed = detail::take<std::uint64_t>(is);
  spec.validate();

  MlpParams p = init_params(spec);  // allocates the right shapes
  const auto expect = detail::take<std::uint64_t>(is);
  if (expect != p.scalar_count()) throw std::runtime_error("checkpoint: parameter count mismatch");
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    is.read(reinterpret_cast<char*>(p.weights[l].data()),
            static_cast<std::streamsize>(sizeof(double) * p.weights[l].size()));
    is.read(reinterpret_cast<char*>(p.biases[l].data()),
            static_cast<std::streamsize>(sizeof(double) * p.biases[l].size()));
    if (!is) throw std::runtime_error("checkpoint: truncated payload");
  }
  return p;
}

inline MlpParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  return load_checkpoint(is);
}

}  // namespace sbcg
