#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbcg/csv.hpp"
#include "sbcg/idx.hpp"
#include "sbcg/rng.hpp"

namespace sbcg {

// Column-wise affine transform fitted on a training split. Columns flagged as
// non-continuous (one-hot encodings) pass through unchanged.
struct Normalizer {
  Eigen::VectorXd x_mean, x_std, z_mean, z_std;

  bool empty() const { return x_mean.size() == 0 && z_mean.size() == 0; }

  Eigen::MatrixXd apply_x(Eigen::MatrixXd v) const {
    if (empty()) return v;
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      v.col(c) = (v.col(c).array() - x_mean(c)) / x_std(c);
    return v;
  }
  Eigen::MatrixXd apply_z(Eigen::MatrixXd v) const {
    if (empty()) return v;
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      v.col(c) = (v.col(c).array() - z_mean(c)) / z_std(c);
    return v;
  }
  Eigen::MatrixXd invert_x(Eigen::MatrixXd v) const {
    if (empty()) return v;
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      v.col(c) = v.col(c).array() * x_std(c) + x_mean(c);
    return v;
  }
  Eigen::MatrixXd invert_z(Eigen::MatrixXd v) const {
    if (empty()) return v;
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      v.col(c) = v.col(c).array() * z_std(c) + z_mean(c);
    return v;
  }
};

// Paired (x, z) samples plus column metadata. `norm` records the transform the
// stored values already carry (empty means raw).
struct Dataset {
  Eigen::MatrixXd x;  // n x d_x
  Eigen::MatrixXd z;  // n x d_z
  std::vector<std::string> x_names, z_names;
  std::vector<bool> z_continuous;  // false for one-hot columns
  Normalizer norm;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d_x() const { return x.cols(); }
  Eigen::Index d_z() const { return z.cols(); }

  void validate() const {
    if (x.rows() != z.rows()) throw std::invalid_argument("Dataset: row count mismatch");
    if (!z_continuous.empty() && static_cast<Eigen::Index>(z_continuous.size()) != z.cols())
      throw std::invalid_argument("Dataset: z_continuous size mismatch");
  }
};

// Ground-truth conditional law of scalar responses, used by the evaluation
// protocols. cdf/density may be absent where no closed form is provided.
struct TrueConditional {
  std::function<double(const Eigen::VectorXd&)> mean_fn;
  std::function<double(const Eigen::VectorXd&)> std_fn;
  std::function<double(double, const Eigen::VectorXd&)> cdf_fn;
  std::function<double(double, const Eigen::VectorXd&)> density_fn;
};

struct GeneratedData {
  Dataset data;
  TrueConditional truth;
};

namespace detail {

inline double normal_cdf_raw(double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }

inline double normal_pdf_raw(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

// Composite Simpson on a fixed grid; n must be even.
template <typename F>
double simpson(F f, double a, double b, int n = 800) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline Dataset make_scalar_dataset(Eigen::MatrixXd x, Eigen::MatrixXd z,
                                   std::vector<std::string> xn, std::vector<std::string> zn) {
  Dataset d;
  d.x = std::move(x);
  d.z = std::move(z);
  d.x_names = std::move(xn);
  d.z_names = std::move(zn);
  d.z_continuous.assign(static_cast<std::size_t>(d.z.cols()), true);
  return d;
}

}  // namespace detail

// ---- synthetic benchmarks -------------------------------------------------

struct GammaNoise {
  // Unit-shape gamma is exponential; `scale` is its mean. When
  // `rate_parameterization` is set, 0.3 is read as a rate instead.
  double parameter = 0.3;
  bool rate_parameterization = false;
  double scale() const { return rate_parameterization ? 1.0 / parameter : parameter; }
};

// Scalar-response, scalar-condition benchmarks with z uniform on [-3, 3]:
//   1: x = tanh(z) + e,  e ~ exponential(scale 0.3)
//   2: x = tanh(z + e),  e ~ N(0, 0.05)   (0.05 is the variance)
//   3: x = e tanh(z),    e ~ exponential(scale 0.3)
inline GeneratedData gen_example_1_2_3(int which, long n, std::uint64_t seed,
                                       GammaNoise gamma = {}) {
  if (which < 1 || which > 3) throw std::invalid_argument("gen_example_1_2_3: which must be 1..3");
  if (n < 1) throw std::invalid_argument("gen_example_1_2_3: n must be positive");
  const double theta = gamma.scale();
  const double noise_sd = std::sqrt(0.05);
  Rng rng = Rng(seed).split(static_cast<std::uint64_t>(which));
  Eigen::MatrixXd x(n, 1), z(n, 1);
  for (long i = 0; i < n; ++i) {
    const double zi = -3.0 + 6.0 * rng.uniform();
    double xi = 0;
    switch (which) {
      case 1: xi = std::tanh(zi) - theta * std::log(rng.uniform_pos()); break;
      case 2: xi = std::tanh(zi + noise_sd * rng.normal()); break;
      case 3: xi = -theta * std::log(rng.uniform_pos()) * std::tanh(zi); break;
    }
    z(i, 0) = zi;
    x(i, 0) = xi;
  }
  GeneratedData out;
  out.data = detail::make_scalar_dataset(std::move(x), std::move(z), {"x"}, {"z"});

  TrueConditional& tc = out.truth;
  if (which == 1) {
    tc.mean_fn = [theta](const Eigen::VectorXd& zv) { return std::tanh(zv(0)) + theta; };
    tc.std_fn = [theta](const Eigen::VectorXd&) { return theta; };
    tc.cdf_fn = [theta](double xx, const Eigen::VectorXd& zv) {
      const double m = std::tanh(zv(0));
      return xx <= m ? 0.0 : -std::expm1(-(xx - m) / theta);
    };
    tc.density_fn = [theta](double xx, const Eigen::VectorXd& zv) {
      const double m = std::tanh(zv(0));
      return xx < m ? 0.0 : std::exp(-(xx - m) / theta) / theta;
    };
  } else if (which == 2) {
    auto cond_moments = [noise_sd](double zi) {
      // tanh maps the Gaussian through a change of variables; integrate.
      const double lo = -8.0 * noise_sd, hi = 8.0 * noise_sd;
      auto m1 = detail::simpson(
          [&](double e) {
            return std::tanh(zi + e) * detail::normal_pdf_raw(e / noise_sd) / noise_sd;
          },
          lo, hi);
      auto m2 = detail::simpson(
          [&](double e) {
            const double v = std::tanh(zi + e);
            return v * v * detail::normal_pdf_raw(e / noise_sd) / noise_sd;
          },
          lo, hi);
      return std::pair<double, double>(m1, std::sqrt(std::max(0.0, m2 - m1 * m1)));
    };
    tc.mean_fn = [cond_moments](const Eigen::VectorXd& zv) { return cond_moments(zv(0)).first; };
    tc.std_fn = [cond_moments](const Eigen::VectorXd& zv) { return cond_moments(zv(0)).second; };
    tc.cdf_fn = [noise_sd](double xx, const Eigen::VectorXd& zv) {
      if (xx <= -1.0) return 0.0;
      if (xx >= 1.0) return 1.0;
      return detail::normal_cdf_raw((std::atanh(xx) - zv(0)) / noise_sd);
    };
    tc.density_fn = [noise_sd](double xx, const Eigen::VectorXd& zv) {
      if (xx <= -1.0 || xx >= 1.0) return 0.0;
      const double u = (std::atanh(xx) - zv(0)) / noise_sd;
      return detail::normal_pdf_raw(u) / (noise_sd * (1.0 - xx * xx));
    };
  } else {
    tc.mean_fn = [theta](const Eigen::VectorXd& zv) { return theta * std::tanh(zv(0)); };
    tc.std_fn = [theta](const Eigen::VectorXd& zv) { return theta * std::abs(std::tanh(zv(0))); };
    tc.cdf_fn = [theta](double xx, const Eigen::VectorXd& zv) {
      const double c = std::tanh(zv(0));
      if (c == 0.0) return xx >= 0.0 ? 1.0 : 0.0;  // point mass at zero
      if (c > 0.0) return xx <= 0.0 ? 0.0 : -std::expm1(-xx / (theta * c));
      return xx >= 0.0 ? 1.0 : std::exp(-xx / (theta * c));
    };
    tc.density_fn = [theta](double xx, const Eigen::VectorXd& zv) {
      const double c = std::tanh(zv(0));
      if (c == 0.0) return 0.0;  // degenerate; no density
      if (xx / c < 0.0) return 0.0;
      return std::exp(-xx / (theta * c)) / (theta * std::abs(c));
    };
  }
  return out;
}

// Five-covariate and mixture benchmarks:
//   4: x = z1^2 + exp(z2 + 0.25 z3) + cos(z4 + z5) + e,            e ~ N(0,1)
//   5: x = z1^2 + exp(z2 + 0.25 z3) + z4 - z5 + s(z) e,            s = 0.5 + 0.5 z2^2 + 0.5 z5^2
//   6: x = +/- Y + 0.25 e (equal-probability sign),  Y ~ N(0,1) is the condition
inline GeneratedData gen_example_4_5_6(int which, long n, std::uint64_t seed) {
  if (which < 4 || which > 6) throw std::invalid_argument("gen_example_4_5_6: which must be 4..6");
  if (n < 1) throw std::invalid_argument("gen_example_4_5_6: n must be positive");
  Rng rng = Rng(seed).split(static_cast<std::uint64_t>(which));
  GeneratedData out;
  TrueConditional& tc = out.truth;

  if (which == 6) {
    Eigen::MatrixXd x(n, 1), z(n, 1);
    for (long i = 0; i < n; ++i) {
      const double y = rng.normal();
      const double u = rng.uniform();
      const double e = rng.normal();
      x(i, 0) = (u <= 0.5 ? -y : y) + 0.25 * e;
      z(i, 0) = y;
    }
    out.data = detail::make_scalar_dataset(std::move(x), std::move(z), {"x"}, {"y"});
    tc.mean_fn = [](const Eigen::VectorXd&) { return 0.0; };
    tc.std_fn = [](const Eigen::VectorXd& zv) {
      return std::sqrt(zv(0) * zv(0) + 0.0625);
    };
    tc.cdf_fn = [](double xx, const Eigen::VectorXd& zv) {
      const double y = zv(0);
      return 0.5 * detail::normal_cdf_raw((xx + y) / 0.25) +
             0.5 * detail::normal_cdf_raw((xx - y) / 0.25);
    };
    tc.density_fn = [](double xx, const Eigen::VectorXd& zv) {
      const double y = zv(0);
      return 0.5 * detail::normal_pdf_raw((xx + y) / 0.25) / 0.25 +
             0.5 * detail::normal_pdf_raw((xx - y) / 0.25) / 0.25;
    };
    return out;
  }

  auto mean45 = [which](const Eigen::VectorXd& zv) {
    const double base = zv(0) * zv(0) + std::exp(zv(1) + 0.25 * zv(2));
    return which == 4 ? base + std::cos(zv(3) + zv(4)) : base + zv(3) - zv(4);
  };
  auto std45 = [which](const Eigen::VectorXd& zv) {
    return which == 4 ? 1.0 : 0.5 + 0.5 * zv(1) * zv(1) + 0.5 * zv(4) * zv(4);
  };

  Eigen::MatrixXd x(n, 1), z(n, 5);
  Eigen::VectorXd zi(5);
  for (long i = 0; i < n; ++i) {
    for (int c = 0; c < 5; ++c) zi(c) = rng.normal();
    const double e = rng.normal();
    x(i, 0) = mean45(zi) + std45(zi) * e;
    z.row(i) = zi.transpose();
  }
  out.data = detail::make_scalar_dataset(std::move(x), std::move(z), {"x"},
                                         {"z1", "z2", "z3", "z4", "z5"});
  tc.mean_fn = mean45;
  tc.std_fn = std45;
  tc.cdf_fn = [mean45, std45](double xx, const Eigen::VectorXd& zv) {
    return detail::normal_cdf_raw((xx - mean45(zv)) / std45(zv));
  };
  tc.density_fn = [mean45, std45](double xx, const Eigen::VectorXd& zv) {
    const double s = std45(zv);
    return detail::normal_pdf_raw((xx - mean45(zv)) / s) / s;
  };
  return out;
}

// ---- 2-D toy densities ------------------------------------------------

enum class ToyShape { Checkerboard, Moons, Pinwheel, Swissroll };

inline ToyShape toy_shape_from_string(const std::string& s) {
  if (s == "checkerboard") return ToyShape::Checkerboard;
  if (s == "moons") return ToyShape::Moons;
  if (s == "pinwheel") return ToyShape::Pinwheel;
  if (s == "swissroll") return ToyShape::Swissroll;
  throw std::invalid_argument("unknown toy shape '" + s + "'");
}

// Noise-free swissroll curve parameterized by angle; exposed so the radial
// monotonicity of the construction is checkable.
inline Eigen::Vector2d swissroll_curve(double angle) {
  return Eigen::Vector2d(angle * std::cos(angle), angle * std::sin(angle)) / 5.0;
}

// The usual quartet of planar densities, scaled to roughly [-4,4]^2. The
// horizontal coordinate is the response x, the vertical one the condition z.
inline Dataset gen_toy2d(ToyShape shape, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_toy2d: n must be positive");
  Rng rng = Rng(seed).split(0x703264ULL);
  Eigen::MatrixXd x(n, 1), z(n, 1);
  for (long i = 0; i < n; ++i) {
    double h = 0, v = 0;
    switch (shape) {
      case ToyShape::Checkerboard: {
        const double u1 = rng.uniform() * 4.0 - 2.0;
        const double u2 = rng.uniform() - static_cast<double>(rng.next_below(2)) * 2.0;
        const double parity = static_cast<double>(((static_cast<long>(std::floor(u1)) % 2) + 2) % 2);
        h = 2.0 * u1;
        v = 2.0 * (u2 + parity);
        break;
      }
      case ToyShape::Moons: {
        const bool first = rng.uniform() < 0.5;
        const double th = std::numbers::pi * rng.uniform();
        double rx = first ? std::cos(th) : 1.0 - std::cos(th);
        double ry = first ? std::sin(th) : 0.5 - std::sin(th);
        rx += 0.1 * rng.normal();
        ry += 0.1 * rng.normal();
        h = 2.0 * rx - 1.0;
        v = 2.0 * ry - 0.2;
        break;
      }
      case ToyShape::Pinwheel: {
        const double radial = 1.0 + 0.3 * rng.normal();
        const double tangential = 0.1 * rng.normal();
        const auto arm = rng.next_below(5);
        const double ang =
            static_cast<double>(arm) * 2.0 * std::numbers::pi / 5.0 + 0.25 * std::exp(radial);
        const double c = std::cos(ang), s = std::sin(ang);
        h = 2.0 * (radial * c + tangential * s);
        v = 2.0 * (-radial * s + tangential * c);
        break;
      }
      case ToyShape::Swissroll: {
        const double ang = 1.5 * std::numbers::pi * (1.0 + 2.0 * rng.uniform());
        const Eigen::Vector2d p = swissroll_curve(ang);
        h = p(0) + rng.normal() / 5.0;
        v = p(1) + rng.normal() / 5.0;
        break;
      }
    }
    x(i, 0) = h;
    z(i, 0) = v;
  }
  return detail::make_scalar_dataset(std::move(x), std::move(z), {"x"}, {"z"});
}

// ---- ingest ----------------------------------------------------------

// Numeric target + mixed numeric/categorical features. Categorical feature
// columns (any non-numeric cell) are one-hot encoded over their sorted level
// set; the expanded columns are named <col>=<level>.
inline Dataset load_csv(const std::string& path, const std::string& target_column,
                        const std::vector<std::string>& feature_columns) {
  const CsvTable table = read_csv(path);
  const std::size_t target_idx = table.column_index(target_column);
  std::vector<std::size_t> feat_idx;
  for (const auto& name : feature_columns) feat_idx.push_back(table.column_index(name));

  const std::size_t n = table.rows.size();
  std::vector<bool> categorical(feat_idx.size(), false);
  std::vector<std::map<std::string, int>> levels(feat_idx.size());
  for (std::size_t f = 0; f < feat_idx.size(); ++f) {
    for (std::size_t r = 0; r < n; ++r)
      if (!csv_cell_is_numeric(table.rows[r][feat_idx[f]])) {
        categorical[f] = true;
        break;
      }
    if (categorical[f]) {
      for (std::size_t r = 0; r < n; ++r) levels[f].emplace(table.rows[r][feat_idx[f]], 0);
      int next = 0;
      for (auto& kv : levels[f]) kv.second = next++;
    }
  }

  Eigen::Index d_z = 0;
  std::vector<std::string> z_names;
  std::vector<bool> z_continuous;
  for (std::size_t f = 0; f < feat_idx.size(); ++f) {
    if (categorical[f]) {
      for (const auto& kv : levels[f]) {
        z_names.push_back(feature_columns[f] + "=" + kv.first);
        z_continuous.push_back(false);
      }
      d_z += static_cast<Eigen::Index>(levels[f].size());
    } else {
      z_names.push_back(feature_columns[f]);
      z_continuous.push_back(true);
      d_z += 1;
    }
  }

  Dataset d;
  d.x.resize(static_cast<Eigen::Index>(n), 1);
  d.z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d_z);
  for (std::size_t r = 0; r < n; ++r) {
    d.x(static_cast<Eigen::Index>(r), 0) =
        parse_csv_double(table.rows[r][target_idx], r + 2, target_idx + 1);
    Eigen::Index col = 0;
    for (std::size_t f = 0; f < feat_idx.size(); ++f) {
      if (categorical[f]) {
        const auto it = levels[f].find(table.rows[r][feat_idx[f]]);
        d.z(static_cast<Eigen::Index>(r), col + it->second) = 1.0;
        col += static_cast<Eigen::Index>(levels[f].size());
      } else {
        d.z(static_cast<Eigen::Index>(r), col) =
            parse_csv_double(table.rows[r][feat_idx[f]], r + 2, feat_idx[f] + 1);
        col += 1;
      }
    }
  }
  d.x_names = {target_column};
  d.z_names = std::move(z_names);
  d.z_continuous = std::move(z_continuous);
  return d;
}

// Observed region of an image for the inpainting task. Names describe how
// much of the image is given.
enum class InpaintMask { LowerRightQuarter, RightHalf, ThreeQuarters };

inline InpaintMask inpaint_mask_from_string(const std::string& s) {
  if (s == "quarter") return InpaintMask::LowerRightQuarter;
  if (s == "half") return InpaintMask::RightHalf;
  if (s == "threequarters") return InpaintMask::ThreeQuarters;
  throw std::invalid_argument("unknown inpaint mask '" + s + "' (quarter|half|threequarters)");
}

// Index partition of a rows x cols image into (observed, missing) pixel sets.
inline std::pair<std::vector<int>, std::vector<int>> inpaint_partition(InpaintMask mask, int rows,
                                                                       int cols) {
  std::vector<int> observed, missing;
  const int r2 = rows / 2, c2 = cols / 2;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      bool given = false;
      switch (mask) {
        case InpaintMask::LowerRightQuarter: given = r >= r2 && c >= c2; break;
        case InpaintMask::RightHalf: given = c >= c2; break;
        case InpaintMask::ThreeQuarters: given = !(r < r2 && c < c2); break;
      }
      (given ? observed : missing).push_back(r * cols + c);
    }
  return {observed, missing};
}

enum class IdxMode { LabelConditional, Inpaint };

// IDX image/label pair -> dataset. Pixels are scaled to [0,1]. In label mode
// x is the flat image and z the one-hot label; in inpaint mode the pixel set
// is partitioned into response (missing) and condition (observed).
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                        IdxMode mode = IdxMode::LabelConditional,
                        InpaintMask mask = InpaintMask::RightHalf) {
  const IdxImages img = read_idx_images(images_path);
  const IdxLabels lab = read_idx_labels(labels_path);
  if (img.count != lab.count)
    throw std::runtime_error("idx: image/label count mismatch (" + std::to_string(img.count) +
                             " vs " + std::to_string(lab.count) + ")");
  const int d = img.rows * img.cols;
  const Eigen::Index n = img.count;

  Dataset out;
  if (mode == IdxMode::LabelConditional) {
    out.x.resize(n, d);
    out.z = Eigen::MatrixXd::Zero(n, 10);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int p = 0; p < d; ++p)
        out.x(i, p) = static_cast<double>(img.pixels[std::size_t(i) * d + p]) / 255.0;
      const int label = lab.labels[static_cast<std::size_t>(i)];
      if (label < 0 || label > 9) throw std::runtime_error("idx: label out of range 0..9");
      out.z(i, label) = 1.0;
    }
    for (int p = 0; p < d; ++p) out.x_names.push_back("px" + std::to_string(p));
    for (int c = 0; c < 10; ++c) out.z_names.push_back("label=" + std::to_string(c));
    out.z_continuous.assign(10, false);
  } else {
    const auto [observed, missing] = inpaint_partition(mask, img.rows, img.cols);
    out.x.resize(n, static_cast<Eigen::Index>(missing.size()));
    out.z.resize(n, static_cast<Eigen::Index>(observed.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint8_t* row = img.pixels.data() + std::size_t(i) * d;
      for (std::size_t p = 0; p < missing.size(); ++p)
        out.x(i, static_cast<Eigen::Index>(p)) = static_cast<double>(row[missing[p]]) / 255.0;
      for (std::size_t p = 0; p < observed.size(); ++p)
        out.z(i, static_cast<Eigen::Index>(p)) = static_cast<double>(row[observed[p]]) / 255.0;
    }
    for (int p : missing) out.x_names.push_back("px" + std::to_string(p));
    for (int p : observed) out.z_names.push_back("px" + std::to_string(p));
    out.z_continuous.assign(observed.size(), true);
  }
  return out;
}

// ---- splits and normalization -----------------------------------------

inline std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction,
                                         std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must lie in (0,1)");
  d.validate();
  const Eigen::Index n = d.n();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng(seed).split(0x73706c69ULL);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(i) + 1))]);

  const Eigen::Index k = static_cast<Eigen::Index>(
      std::floor(train_fraction * static_cast<double>(n)));
  auto take = [&](Eigen::Index begin, Eigen::Index count) {
    Dataset out;
    out.x.resize(count, d.d_x());
    out.z.resize(count, d.d_z());
    for (Eigen::Index i = 0; i < count; ++i) {
      out.x.row(i) = d.x.row(perm[static_cast<std::size_t>(begin + i)]);
      out.z.row(i) = d.z.row(perm[static_cast<std::size_t>(begin + i)]);
    }
    out.x_names = d.x_names;
    out.z_names = d.z_names;
    out.z_continuous = d.z_continuous;
    out.norm = d.norm;
    return out;
  };
  return {take(0, k), take(k, n - k)};
}

// Column statistics from a training split; one-hot z columns get an identity
// transform, as does any column with (near) zero spread.
inline Normalizer fit_normalizer(const Dataset& train) {
  train.validate();
  Normalizer nm;
  const double n = static_cast<double>(train.n());
  nm.x_mean = train.x.colwise().mean();
  nm.z_mean = train.z.colwise().mean();
  nm.x_std.resize(train.d_x());
  nm.z_std.resize(train.d_z());
  for (Eigen::Index c = 0; c < train.d_x(); ++c) {
    const double var = (train.x.col(c).array() - nm.x_mean(c)).square().sum() / (n - 1.0);
    nm.x_std(c) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  for (Eigen::Index c = 0; c < train.d_z(); ++c) {
    const bool continuous = train.z_continuous.empty() || train.z_continuous[std::size_t(c)];
    if (!continuous) {
      nm.z_mean(c) = 0.0;
      nm.z_std(c) = 1.0;
      continue;
    }
    const double var = (train.z.col(c).array() - nm.z_mean(c)).square().sum() / (n - 1.0);
    nm.z_std(c) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return nm;
}

inline Dataset apply_normalizer(const Dataset& d, const Normalizer& nm) {
  Dataset out = d;
  out.x = nm.apply_x(d.x);
  out.z = nm.apply_z(d.z);
  out.norm = nm;
  return out;
}

inline Dataset denormalize(const Dataset& d) {
  Dataset out = d;
  out.x = d.norm.invert_x(d.x);
  out.z = d.norm.invert_z(d.z);
  out.norm = Normalizer{};
  return out;
}

}  // namespace sbcg
