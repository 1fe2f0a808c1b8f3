#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sbcg/sample.hpp"

using namespace sbcg;
using Catch::Approx;

namespace {

// Network with all-zero weights: u == 0, any (d_x, d_z).
MlpParams zero_net(int d_x, int d_z) {
  MlpSpec spec;
  spec.d_x = d_x;
  spec.d_z = d_z;
  spec.hidden = {4};
  spec.init_seed = 0;
  MlpParams p = init_params(spec);
  for (auto& w : p.weights) w.setZero();
  return p;
}

SampleConfig drift_free_config(Schedule s, int steps, double eps, std::uint64_t seed) {
  SampleConfig cfg;
  cfg.steps = steps;
  cfg.epsilon = eps;
  cfg.schedule = s;
  cfg.anchor = Eigen::VectorXd::Zero(1);
  cfg.seed = seed;
  cfg.drift = NetworkDrift{zero_net(1, 1)};
  return cfg;
}

const Eigen::VectorXd kZ = Eigen::VectorXd::Zero(1);

}  // namespace

TEST_CASE("time grid is exact", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 100, 1e-3, 1);
  Rng rng = path_rng(cfg, 0, 0);
  const SamplePath p = euler_maruyama(kZ, cfg, rng);
  REQUIRE(p.times.size() == 101);
  CHECK(p.times(0) == Approx(1e-3).margin(1e-15));
  CHECK(std::abs(p.times(100) - (1.0 - 1e-3)) <= 1e-12);
  CHECK(p.states.row(0).isZero());
  CHECK(p.terminal(0) == p.states(100, 0));
}

TEST_CASE("single step unrolls exactly", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 1, 0.0, 9);
  Rng rng = path_rng(cfg, 0, 0);
  const SamplePath p = euler_maruyama(kZ, cfg, rng);
  Rng replay = path_rng(cfg, 0, 0);
  const double eta = replay.normal();
  CHECK(p.terminal(0) == Approx(std::sqrt(1.0) * eta).epsilon(1e-15));
}

TEST_CASE("drift-free ve terminals are standard normal", "[sample]") {
  // With u == 0, a = 0, eps = 0, the unit-rate schedule transports exactly
  // N(0, 1) regardless of step count.
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 50, 0.0, 31);
  std::vector<Eigen::VectorXd> zs{kZ};
  const int n = 20000;
  const Eigen::MatrixXd terminals = sample_many(zs, n, cfg);
  const double mean = terminals.col(0).mean();
  const double var = (terminals.col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var > 0.96);
  CHECK(var < 1.04);
}

TEST_CASE("drift-free vp terminals follow the ou transition law", "[sample][integration]") {
  // From x0, u == 0, beta == 1: x(T) ~ N(x0 e^{-T/2}, 1 - e^{-T}) with
  // T = 1 - 2 eps, up to O(h) discretization bias.
  const double eps = 1e-3;
  const double x0 = 1.5;
  SampleConfig cfg = drift_free_config(Schedule::vp_constant(1.0), 1000, eps, 77);
  cfg.anchor = Eigen::VectorXd::Constant(1, x0);
  const int n = 100000;
  const Eigen::MatrixXd terminals = sample_many({kZ}, n, cfg);
  const double horizon = 1.0 - 2.0 * eps;
  const double want_mean = x0 * std::exp(-0.5 * horizon);
  const double want_var = 1.0 - std::exp(-horizon);
  const double mean = terminals.col(0).mean();
  const double var = (terminals.col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean - want_mean) <= 4.0 * std::sqrt(want_var / n) + 2e-3);
  CHECK(var == Approx(want_var).epsilon(0.03));
}

TEST_CASE("single-atom analytic drift concentrates on the atom", "[sample][integration]") {
  // The one-atom bridge pins the terminal near the atom; shrinking eps
  // shrinks the terminal spread.
  Eigen::MatrixXd atom(1, 1);
  atom << 2.0;
  auto run = [&](double eps, int steps) {
    SampleConfig cfg;
    cfg.steps = steps;
    cfg.epsilon = eps;
    cfg.schedule = Schedule::ve_linear();
    cfg.anchor = Eigen::VectorXd::Zero(1);
    cfg.seed = 5;
    cfg.drift = AnalyticDrift{EmpiricalMeasure(atom)};
    const Eigen::MatrixXd t = sample_many({kZ}, 4000, cfg);
    const double mean = t.col(0).mean();
    const double sd = std::sqrt((t.col(0).array() - mean).square().sum() / (t.rows() - 1));
    return std::pair<double, double>(mean, sd);
  };
  const auto [mean200, sd200] = run(1e-3, 200);
  // Terminal law of the discretized one-atom bridge: centered on the atom
  // with spread on the order of sqrt(h + eps).
  CHECK(std::abs(mean200 - 2.0) <= 2.0 * 0.05 + 3.0 * sd200);
  CHECK(sd200 < 0.12);
  const auto [mean_fine, sd_fine] = run(1e-4, 2000);
  CHECK(std::abs(mean_fine - 2.0) <= 2.0 * 0.05 + 3.0 * sd_fine);
  CHECK(sd_fine < sd200);
}

TEST_CASE("sample_many matches single-path integration", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 20, 1e-3, 123);
  std::vector<Eigen::VectorXd> zs{Eigen::VectorXd::Constant(1, 0.4),
                                  Eigen::VectorXd::Constant(1, 0.4)};
  const Eigen::MatrixXd terminals = sample_many(zs, 3, cfg);
  REQUIRE(terminals.rows() == 6);
  for (int zi = 0; zi < 2; ++zi)
    for (int rep = 0; rep < 3; ++rep) {
      Rng rng = path_rng(cfg, static_cast<std::uint64_t>(zi), static_cast<std::uint64_t>(rep));
      const SamplePath p = euler_maruyama(zs[static_cast<std::size_t>(zi)], cfg, rng);
      CHECK(terminals(zi * 3 + rep, 0) == p.terminal(0));
    }
  // Distinct substreams give distinct terminals almost surely.
  CHECK(terminals(0, 0) != terminals(1, 0));
  CHECK(terminals(0, 0) != terminals(3, 0));
}

TEST_CASE("results are independent of blocking and thread count", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::vp_identity(), 30, 1e-3, 321);
  std::vector<Eigen::VectorXd> zs;
  for (int i = 0; i < 5; ++i) zs.push_back(Eigen::VectorXd::Constant(1, 0.1 * i));
  const Eigen::MatrixXd base = sample_many(zs, 40, cfg);
  SampleConfig small_blocks = cfg;
  small_blocks.block_rows = 7;
  CHECK(sample_many(zs, 40, small_blocks) == base);
  SampleConfig threaded = small_blocks;
  threaded.threads = 4;
  CHECK(sample_many(zs, 40, threaded) == base);
}

TEST_CASE("batched network drift equals per-path evaluation", "[sample]") {
  MlpSpec spec;
  spec.d_x = 2;
  spec.d_z = 1;
  spec.hidden = {8, 8};
  spec.init_seed = 99;
  SampleConfig cfg;
  cfg.steps = 15;
  cfg.epsilon = 1e-2;
  cfg.schedule = Schedule::vp_identity();
  cfg.anchor = Eigen::VectorXd::Zero(2);
  cfg.seed = 11;
  cfg.drift = NetworkDrift{init_params(spec)};
  std::vector<Eigen::VectorXd> zs{Eigen::VectorXd::Constant(1, -0.3),
                                  Eigen::VectorXd::Constant(1, 0.8)};
  const Eigen::MatrixXd terminals = sample_many(zs, 2, cfg);
  for (int zi = 0; zi < 2; ++zi)
    for (int rep = 0; rep < 2; ++rep) {
      Rng rng = path_rng(cfg, static_cast<std::uint64_t>(zi), static_cast<std::uint64_t>(rep));
      const SamplePath p = euler_maruyama(zs[static_cast<std::size_t>(zi)], cfg, rng);
      CHECK((terminals.row(zi * 2 + rep).transpose() - p.terminal).norm() <= 1e-12);
    }
}

TEST_CASE("seed-split terminal distributions are indistinguishable", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 40, 0.0, 2000);
  const int n = 10000;
  const Eigen::MatrixXd a = sample_many({kZ}, n, cfg);
  SampleConfig other = cfg;
  other.seed = 2001;
  const Eigen::MatrixXd b = sample_many({kZ}, n, other);
  const double ma = a.col(0).mean(), mb = b.col(0).mean();
  const double va = (a.col(0).array() - ma).square().sum() / (n - 1);
  const double vb = (b.col(0).array() - mb).square().sum() / (n - 1);
  const double se = std::sqrt(va / n + vb / n);
  CHECK(std::abs(ma - mb) <= 4.0 * se);
}

TEST_CASE("integration aborts on drift blow-up with the step index", "[sample]") {
  MlpSpec spec;
  spec.d_x = 1;
  spec.d_z = 1;
  spec.hidden = {4};
  spec.init_seed = 7;
  MlpParams p = init_params(spec);
  for (auto& w : p.weights) w.setConstant(1e200);
  SampleConfig cfg;
  cfg.steps = 10;
  cfg.epsilon = 1e-3;
  cfg.schedule = Schedule::ve_linear();
  cfg.anchor = Eigen::VectorXd::Zero(1);
  cfg.drift = NetworkDrift{p};
  Rng rng = path_rng(cfg, 0, 0);
  CHECK_THROWS_WITH(euler_maruyama(kZ, cfg, rng),
                    Catch::Matchers::ContainsSubstring("non-finite state at step"));
  CHECK_THROWS_WITH(sample_many({kZ}, 2, cfg),
                    Catch::Matchers::ContainsSubstring("replicate"));
}

TEST_CASE("dimension mismatches are rejected", "[sample]") {
  SampleConfig cfg = drift_free_config(Schedule::ve_linear(), 10, 1e-3, 1);
  Rng rng = path_rng(cfg, 0, 0);
  CHECK_THROWS_AS(euler_maruyama(Eigen::VectorXd::Zero(3), cfg, rng), std::invalid_argument);
  cfg.anchor = Eigen::VectorXd::Zero(2);  // drift expects d_x = 1
  CHECK_THROWS_AS(euler_maruyama(kZ, cfg, rng), std::invalid_argument);
  cfg.anchor = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(sample_many({kZ}, 0, cfg), std::invalid_argument);
}
