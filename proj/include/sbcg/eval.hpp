#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbcg/io.hpp"

namespace sbcg {

inline double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }

inline double normal_pdf(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Newton step, good to ~1e-13 over (0,1). No external dependency.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  x -= (normal_cdf(x) - p) / normal_pdf(x);
  return x;
}

// Per-group sample mean and (n-1)-denominator standard deviation; rows are
// grouped in consecutive runs of `per_group`.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> conditional_moments(
    const Eigen::MatrixXd& samples, Eigen::Index per_group) {
  if (per_group < 2) throw std::invalid_argument("conditional_moments: need >= 2 samples per group");
  if (samples.rows() % per_group != 0)
    throw std::invalid_argument("conditional_moments: rows not a multiple of group size");
  const Eigen::Index groups = samples.rows() / per_group;
  Eigen::MatrixXd means(groups, samples.cols()), stds(groups, samples.cols());
  for (Eigen::Index g = 0; g < groups; ++g) {
    const auto block = samples.middleRows(g * per_group, per_group);
    means.row(g) = block.colwise().mean();
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      const double var = (block.col(c).array() - means(g, c)).square().sum() /
                         static_cast<double>(per_group - 1);
      stds(g, c) = std::sqrt(var);
    }
  }
  return {means, stds};
}

inline double mse_against_truth(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("mse_against_truth: length mismatch");
  return (estimate - truth).squaredNorm() / static_cast<double>(estimate.size());
}

// Fraction of rows with lo <= truth <= hi. Any inverted interval is a
// construction bug upstream and is rejected.
inline double coverage_rate(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            const Eigen::VectorXd& truth) {
  if (lo.size() != hi.size() || lo.size() != truth.size())
    throw std::invalid_argument("coverage_rate: length mismatch");
  long inside = 0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo(i) > hi(i))
      throw std::invalid_argument("coverage_rate: interval with lo > hi at row " +
                                  std::to_string(i));
    if (lo(i) <= truth(i) && truth(i) <= hi(i)) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(lo.size());
}

// Sup-norm distance between the empirical CDF of `samples` and `cdf`. The
// probe must be a genuine CDF: nondecreasing with values in [0,1] along the
// sorted sample.
inline double ks_statistic(const Eigen::VectorXd& samples,
                           const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw std::invalid_argument("ks_statistic: need at least 100 samples");
  std::vector<double> xs(samples.data(), samples.data() + samples.size());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0, prev = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    if (!(f >= 0.0 && f <= 1.0) || f < prev - 1e-12)
      throw std::invalid_argument("ks_statistic: non-monotone CDF probe");
    prev = f;
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Equal-width density histogram as CSV text: bin_left,bin_right,density.
inline std::string histogram_csv(const Eigen::VectorXd& samples, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram_csv: bins must be positive");
  if (samples.size() < 1) throw std::invalid_argument("histogram_csv: no samples");
  double lo = samples.minCoeff(), hi = samples.maxCoeff();
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    int b = static_cast<int>((samples(i) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  std::ostringstream os;
  os << "bin_left,bin_right,density\n";
  for (int b = 0; b < bins; ++b) {
    const double density = static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                           (static_cast<double>(samples.size()) * width);
    os << format_double(lo + b * width) << "," << format_double(lo + (b + 1) * width) << ","
       << format_double(density) << "\n";
  }
  return os.str();
}

inline void histogram_export(const Eigen::VectorXd& samples, int bins, const std::string& path) {
  atomic_write_file(path, histogram_csv(samples, bins));
}

// Aggregated evaluation quantities; which fields are populated depends on the
// experiment family.
struct EvalReport {
  double mse1 = std::numeric_limits<double>::quiet_NaN();
  double mse2 = std::numeric_limits<double>::quiet_NaN();
  double mse1_stderr = std::numeric_limits<double>::quiet_NaN();
  double mse2_stderr = std::numeric_limits<double>::quiet_NaN();
  std::map<double, double> coverage;                    // alpha -> rate
  std::vector<std::pair<std::string, double>> ks;       // probe label -> statistic
  std::vector<std::pair<std::string, double>> metrics;  // auxiliary named values
  long sample_count = 0;
  std::uint64_t seed = 0;

  std::string to_json() const {
    std::ostringstream os;
    os << "{\n";
    os << "  \"sample_count\": " << sample_count << ",\n";
    os << "  \"seed\": " << seed;
    if (std::isfinite(mse1)) {
      os << ",\n  \"mse_mean\": " << format_double(mse1);
      if (std::isfinite(mse1_stderr)) os << ",\n  \"mse_mean_stderr\": " << format_double(mse1_stderr);
    }
    if (std::isfinite(mse2)) {
      os << ",\n  \"mse_std\": " << format_double(mse2);
      if (std::isfinite(mse2_stderr)) os << ",\n  \"mse_std_stderr\": " << format_double(mse2_stderr);
    }
    if (!coverage.empty()) {
      os << ",\n  \"coverage\": {";
      bool first = true;
      for (const auto& [alpha, rate] : coverage) {
        os << (first ? "" : ", ") << "\"" << format_double(alpha) << "\": " << format_double(rate);
        first = false;
      }
      os << "}";
    }
    if (!ks.empty()) {
      os << ",\n  \"ks\": {";
      bool first = true;
      for (const auto& [label, stat] : ks) {
        os << (first ? "" : ", ") << "\"" << label << "\": " << format_double(stat);
        first = false;
      }
      os << "}";
    }
    if (!metrics.empty()) {
      os << ",\n  \"metrics\": {";
      bool first = true;
      for (const auto& [label, value] : metrics) {
        os << (first ? "" : ", ") << "\"" << label << "\": " << format_double(value);
        first = false;
      }
      os << "}";
    }
    os << "\n}\n";
    return os.str();
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "metric,key,value\n";
    if (std::isfinite(mse1)) os << "mse_mean,," << format_double(mse1) << "\n";
    if (std::isfinite(mse2)) os << "mse_std,," << format_double(mse2) << "\n";
    for (const auto& [alpha, rate] : coverage)
      os << "coverage," << format_double(alpha) << "," << format_double(rate) << "\n";
    for (const auto& [label, stat] : ks) os << "ks," << label << "," << format_double(stat) << "\n";
    for (const auto& [label, value] : metrics)
      os << "metric," << label << "," << format_double(value) << "\n";
    return os.str();
  }
};

}  // namespace sbcg
