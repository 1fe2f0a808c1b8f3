#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sbcg/experiments.hpp"
#include "sbcg/idx.hpp"

using namespace sbcg;
using Catch::Approx;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("sbcg_pipe_" + tag + "_" +
                                                     std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

ExperimentConfig tiny(const std::string& id, const std::string& extra = "") {
  Config cfg;
  parse_config_text(extra, cfg);
  ExperimentConfig e = resolve_experiment(id, cfg);
  return e;
}

// Ten 16x16 synthetic classes: a bright block at a class-specific position
// plus pixel noise. Stands in for a labeled image corpus in pipeline tests.
void write_digit_fixture(const std::filesystem::path& dir, int per_class, std::uint64_t seed) {
  const int side = 16, d = side * side;
  IdxImages img;
  img.rows = side;
  img.cols = side;
  img.count = per_class * 10;
  img.pixels.resize(static_cast<std::size_t>(img.count) * d);
  IdxLabels lab;
  lab.count = img.count;
  lab.labels.resize(static_cast<std::size_t>(lab.count));
  Rng rng(seed);
  int idx = 0;
  for (int cls = 0; cls < 10; ++cls) {
    const int br = 2 + 3 * (cls / 4);
    const int bc = 2 + 4 * (cls % 4);
    for (int i = 0; i < per_class; ++i, ++idx) {
      lab.labels[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(cls);
      for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
          const bool lit = r >= br && r < br + 5 && c >= bc && c < bc + 4;
          double v = (lit ? 0.85 : 0.05) + 0.08 * rng.normal();
          v = std::clamp(v, 0.0, 1.0);
          img.pixels[static_cast<std::size_t>(idx) * d + r * side + c] =
              static_cast<std::uint8_t>(v * 255.0 + 0.5);
        }
    }
  }
  write_idx_images((dir / "train-images-idx3-ubyte").string(), img);
  write_idx_labels((dir / "train-labels-idx1-ubyte").string(), lab);
  write_idx_images((dir / "t10k-images-idx3-ubyte").string(), img);
  write_idx_labels((dir / "t10k-labels-idx1-ubyte").string(), lab);
}

}  // namespace

TEST_CASE("mixture example sampled moments match the law", "[pipeline][integration]") {
  // Train on the two-component mixture, then check sampled conditional
  // moments at a fixed condition against the mixture closed form.
  auto gen = gen_example_4_5_6(6, 20000, 71);
  MlpSpec spec;
  spec.d_x = 1;
  spec.d_z = 1;
  spec.hidden = {32, 64, 64, 32};
  spec.init_seed = 2;
  TrainConfig tc;
  tc.iterations = 8000;
  tc.batch_size = 256;
  tc.schedule = Schedule::vp_identity();
  tc.anchor = Eigen::VectorXd::Zero(1);
  tc.seed = 3;
  const TrainResult r = train(gen.data, spec, tc);

  SampleConfig sc;
  sc.steps = 100;
  sc.epsilon = 1e-3;
  sc.schedule = tc.schedule;
  sc.anchor = tc.anchor;
  sc.seed = 4;
  sc.drift = NetworkDrift{r.params};
  const Eigen::MatrixXd terminals =
      sample_many({Eigen::VectorXd::Constant(1, 1.0)}, 10000, sc);
  const double mean = terminals.col(0).mean();
  const double sd = std::sqrt((terminals.col(0).array() - mean).square().sum() /
                              (terminals.rows() - 1));
  const double want_sd = std::sqrt(1.0 + 0.0625);
  INFO("mean " << mean << " sd " << sd << " want sd " << want_sd);
  CHECK(std::abs(mean) <= 0.05 * want_sd);
  CHECK(sd == Approx(want_sd).epsilon(0.05));
}

TEST_CASE("trained sampler passes a distribution test at a central condition",
          "[pipeline][integration]") {
  auto gen = gen_example_1_2_3(2, 20000, 13);
  MlpSpec spec;
  spec.d_x = 1;
  spec.d_z = 1;
  spec.hidden = {32, 64, 64, 32};
  spec.init_seed = 5;
  TrainConfig tc;
  tc.iterations = 6000;
  tc.batch_size = 256;
  tc.schedule = Schedule::ve_rate(0.1);
  tc.anchor = Eigen::VectorXd::Zero(1);
  tc.seed = 6;
  const TrainResult r = train(gen.data, spec, tc);

  SampleConfig sc;
  sc.steps = 100;
  sc.epsilon = 1e-3;
  sc.schedule = tc.schedule;
  sc.anchor = tc.anchor;
  sc.seed = 7;
  sc.drift = NetworkDrift{r.params};
  const Eigen::MatrixXd terminals = sample_many({Eigen::VectorXd::Zero(1)}, 2000, sc);
  const Eigen::VectorXd zv = Eigen::VectorXd::Zero(1);
  const double ks = ks_statistic(terminals.col(0),
                                 [&](double x) { return gen.truth.cdf_fn(x, zv); });
  INFO("ks " << ks);
  CHECK(ks < 0.1);
}

TEST_CASE("terminal spread shrinks as training lengthens on a noise-free law",
          "[pipeline][integration]") {
  // x = g(z) exactly: the conditional is a point mass, so a better-trained
  // drift concentrates the terminal cloud.
  const long n = 4000;
  Dataset data;
  data.x.resize(n, 1);
  data.z.resize(n, 1);
  Rng gen_rng(88);
  for (long i = 0; i < n; ++i) {
    const double z = -3.0 + 6.0 * gen_rng.uniform();
    data.z(i, 0) = z;
    data.x(i, 0) = std::tanh(z);
  }
  data.z_continuous = {true};

  MlpSpec spec;
  spec.d_x = 1;
  spec.d_z = 1;
  spec.hidden = {32, 32};
  spec.init_seed = 9;
  TrainConfig tc;
  tc.iterations = 2400;
  tc.batch_size = 128;
  tc.schedule = Schedule::ve_rate(0.1);
  tc.anchor = Eigen::VectorXd::Zero(1);
  tc.seed = 10;

  std::vector<MlpParams> snapshots;
  auto observer = [&](long iter, const Minibatch&, double, const MlpParams& p) {
    if (iter == 600 || iter == 1200 || iter == 2400) snapshots.push_back(p);
  };
  train(data, spec, tc, observer);
  REQUIRE(snapshots.size() == 3);

  std::vector<double> variances;
  for (const MlpParams& p : snapshots) {
    SampleConfig sc;
    sc.steps = 100;
    sc.epsilon = 1e-3;
    sc.schedule = tc.schedule;
    sc.anchor = tc.anchor;
    sc.seed = 123;
    sc.drift = NetworkDrift{p};
    const Eigen::MatrixXd t = sample_many({Eigen::VectorXd::Constant(1, 0.8)}, 1500, sc);
    const double m = t.col(0).mean();
    variances.push_back((t.col(0).array() - m).square().sum() / (t.rows() - 1));
  }
  INFO("variances " << variances[0] << " " << variances[1] << " " << variances[2]);
  CHECK(variances[1] <= variances[0]);
  CHECK(variances[2] <= variances[1]);
}

TEST_CASE("holdout interval pipeline on a synthetic table", "[pipeline][integration]") {
  // Well-specified Gaussian regression with a categorical feature: the
  // interval coverage should land near nominal.
  TempDir tmp("uci");
  {
    std::ostringstream csv;
    csv << "grp,f1,f2,f3,score\n";
    Rng rng(41);
    const char* levels[3] = {"a", "b", "c"};
    for (int i = 0; i < 3000; ++i) {
      const int g = static_cast<int>(rng.next_below(3));
      const double f1 = rng.normal(), f2 = rng.normal(), f3 = rng.normal();
      const double y = 2.0 * f1 - f2 + 0.5 * f3 + 0.8 * g + rng.normal();
      csv << levels[g] << "," << format_double(f1) << "," << format_double(f2) << ","
          << format_double(f3) << "," << format_double(y) << "\n";
    }
    atomic_write_file(tmp.path / "table.csv", csv.str());
  }

  ExperimentConfig e = tiny("abalone",
                            "train.iterations = 4000\n"
                            "sample.per_z = 100\n");
  e.data_dir = tmp.path.string();
  e.out_dir = (tmp.path / "out").string();

  // Drive the pipeline pieces directly against the synthetic table.
  Dataset full = load_csv((tmp.path / "table.csv").string(), "score", {"grp", "f1", "f2", "f3"});
  auto [train_raw, test_raw] = split(full, 0.9, 17);
  const Normalizer nm = fit_normalizer(train_raw);
  const Dataset train_n = apply_normalizer(train_raw, nm);

  MlpSpec spec = detail::make_spec(e, 1, static_cast<int>(train_n.d_z()));
  TrainConfig tc = detail::make_train_config(e, 1);
  const TrainResult r = train(train_n, spec, tc);

  std::vector<Eigen::VectorXd> z_in;
  const Eigen::MatrixXd tz = nm.apply_z(test_raw.z);
  for (Eigen::Index i = 0; i < test_raw.n(); ++i) z_in.push_back(tz.row(i).transpose());
  SampleConfig sc = detail::make_sample_config(e, 1, NetworkDrift{r.params}, "sample");
  const Eigen::MatrixXd terminals = nm.invert_x(sample_many(z_in, e.per_z, sc));
  const auto [means, stds] = conditional_moments(terminals, e.per_z);

  for (double alpha : {0.1, 0.05}) {
    Eigen::VectorXd lo, hi;
    detail::intervals_for(means.col(0), stds.col(0), alpha, lo, hi);
    const double rate = coverage_rate(lo, hi, test_raw.x.col(0));
    INFO("alpha " << alpha << " coverage " << rate);
    CHECK(rate >= 1.0 - alpha - 0.08);
    CHECK(rate <= std::min(1.0, 1.0 - alpha + 0.08));
  }
}

TEST_CASE("label-conditional sampling pipeline on synthetic digits",
          "[pipeline][integration]") {
  TempDir tmp("label");
  write_digit_fixture(tmp.path, 80, 99);
  ExperimentConfig e = tiny("mnist-label",
                            "mnist.per_class = 20\n"
                            "mnist.max_atoms = 80\n"
                            "sample.steps = 50\n");
  e.data_dir = tmp.path.string();
  e.out_dir = (tmp.path / "out").string();
  RunContext ctx(e);
  const EvalReport report = run_mnist_label(e, ctx);
  ctx.finish();

  int digit_entries = 0;
  for (const auto& [label, rate] : report.metrics) {
    if (label.find("_match") == std::string::npos || label == "worst_match_rate") continue;
    ++digit_entries;
    INFO(label << " match rate " << rate);
    CHECK(rate >= 0.9);
  }
  CHECK(digit_entries == 10);
  CHECK(std::filesystem::exists(tmp.path / "out" / "generated_grid.pgm"));
  CHECK(std::filesystem::exists(tmp.path / "out" / "manifest.txt"));
}

TEST_CASE("inpainting pipeline on synthetic digits", "[pipeline][integration]") {
  TempDir tmp("inpaint");
  write_digit_fixture(tmp.path, 60, 5);
  ExperimentConfig e = tiny("mnist-inpaint:half",
                            "train.iterations = 600\n"
                            "net.hidden = 32,32\n"
                            "mnist.train_size = 600\n"
                            "sample.steps = 40\n");
  e.data_dir = tmp.path.string();
  e.out_dir = (tmp.path / "out").string();
  RunContext ctx(e);
  const EvalReport report = run_mnist_inpaint(e, ctx);
  ctx.finish();
  CHECK(std::isfinite(report.mse1));
  CHECK(report.mse1 < 0.25);  // better than predicting noise
  CHECK(std::filesystem::exists(tmp.path / "out" / "inpaint_panel.pgm"));
}

TEST_CASE("reproduce runs are byte-identical", "[pipeline][integration]") {
  TempDir tmp("repro");
  auto run_into = [&](const std::string& sub) {
    ExperimentConfig e = tiny("example1",
                              "data.n_train = 3000\n"
                              "train.iterations = 300\n"
                              "sample.per_z = 200\n");
    e.out_dir = (tmp.path / sub).string();
    RunContext ctx(e);
    cmd_reproduce(e, ctx);
    ctx.finish();
  };
  run_into("a");
  run_into("b");
  for (const char* name : {"checkpoint.ckpt", "loss_trace.csv", "samples.csv",
                           "hist_z=0.csv", "report.json"}) {
    INFO(name);
    CHECK(read_file(tmp.path / "a" / name) == read_file(tmp.path / "b" / name));
  }
}

TEST_CASE("sample and eval subcommands compose", "[pipeline][integration]") {
  TempDir tmp("cmds");
  ExperimentConfig e = tiny("example1",
                            "data.n_train = 3000\n"
                            "train.iterations = 400\n"
                            "sample.per_z = 150\n");
  e.out_dir = (tmp.path / "train").string();
  {
    RunContext ctx(e);
    cmd_train(e, ctx);
    ctx.finish();
  }
  // Conditions file with the three probe values.
  atomic_write_file(tmp.path / "z.csv", "z\n-1.2\n0\n1.2\n");

  ExperimentConfig es = e;
  es.out_dir = (tmp.path / "samples").string();
  {
    RunContext ctx(es);
    cmd_sample(es, (tmp.path / "train" / "checkpoint.ckpt").string(),
               (tmp.path / "z.csv").string(), ctx);
    ctx.finish();
  }
  const auto [header, samples] = read_csv_matrix((tmp.path / "samples" / "samples.csv").string());
  CHECK(header.size() == 2);
  CHECK(samples.rows() == 3 * 150);

  ExperimentConfig ev = e;
  ev.out_dir = (tmp.path / "eval").string();
  ev.per_z = 150;
  {
    RunContext ctx(ev);
    const EvalReport rep =
        cmd_eval(ev, (tmp.path / "samples" / "samples.csv").string(), ctx);
    ctx.finish();
    CHECK(rep.ks.size() == 3);
  }
  CHECK(std::filesystem::exists(tmp.path / "eval" / "report.json"));
}
