#pragma once

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbcg/config.hpp"
#include "sbcg/csv.hpp"
#include "sbcg/dataset.hpp"
#include "sbcg/eval.hpp"
#include "sbcg/io.hpp"
#include "sbcg/measure.hpp"
#include "sbcg/net.hpp"
#include "sbcg/sample.hpp"
#include "sbcg/schedule.hpp"
#include "sbcg/train.hpp"

namespace sbcg {

enum class Family { Figure, Toy, Table, Uci, MnistLabel, MnistInpaint };

inline Family family_of(const std::string& id) {
  if (id == "example1" || id == "example2" || id == "example3") return Family::Figure;
  if (id == "example4" || id == "example5" || id == "example6") return Family::Table;
  if (id.rfind("toy2d:", 0) == 0) {
    toy_shape_from_string(id.substr(6));
    return Family::Toy;
  }
  if (id == "wine" || id == "abalone") return Family::Uci;
  if (id == "mnist-label") return Family::MnistLabel;
  if (id.rfind("mnist-inpaint:", 0) == 0) {
    inpaint_mask_from_string(id.substr(14));
    return Family::MnistInpaint;
  }
  throw std::invalid_argument(
      "unknown experiment '" + id +
      "' (example1..example6, toy2d:<shape>, wine, abalone, mnist-label, mnist-inpaint:<mask>)");
}

// Fully resolved run description. Field defaults are per-experiment; a config
// file, SBCG_* environment variables and command-line settings override them
// in that order of increasing precedence.
struct ExperimentConfig {
  std::string id;

  Schedule schedule;
  std::string sde_alpha = "linear";  // textual form, kept for the manifest
  double beta_min = 0.0, beta_max = 1.0;

  std::vector<int> hidden = {32, 64, 64, 32};
  Activation activation = Activation::ReLU;
  bool sinusoidal_time = false;

  long iterations = 20000;
  int batch_size = 256;
  int t_samples = 1;
  double epsilon = 1e-3;
  AdamHyper adam;
  long checkpoint_every = 0;

  int steps = 100;
  int per_z = 200;
  Eigen::Index block_rows = 16384;

  long n_train = 50000;
  bool gamma_as_rate = false;
  double train_fraction = 0.9;

  std::vector<double> z_probes = {-1.2, 0.0, 1.2};
  long n_probes = 2000;
  int samples_per_probe = 200;
  int replications = 10;
  std::vector<double> alphas = {0.1, 0.05, 0.01};
  int hist_bins = 60;
  long scatter_n = 5000;

  int mnist_per_class = 100;
  Eigen::Index mnist_max_atoms = 3000;
  long mnist_train_size = 10000;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
  std::string data_dir = "data";
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment",       "seed",              "threads",
      "sde.kind",         "sde.alpha",         "sde.beta_min",   "sde.beta_max",
      "net.hidden",       "net.activation",    "net.sinusoidal_time",
      "train.iterations", "train.batch_size",  "train.t_samples", "train.epsilon",
      "train.lr",         "train.adam_beta1",  "train.adam_beta2", "train.adam_eps",
      "train.checkpoint_every",
      "sample.steps",     "sample.per_z",      "sample.block_rows",
      "data.n_train",     "data.gamma_as_rate", "data.train_fraction",
      "eval.z_probes",    "eval.n_probes",     "eval.samples_per_probe",
      "eval.replications", "eval.alphas",      "eval.hist_bins", "eval.scatter_n",
      "mnist.per_class",  "mnist.max_atoms",   "mnist.train_size",
  };
  return keys;
}

inline std::string activation_name(Activation a) {
  return a == Activation::ReLU ? "relu" : "selu";
}

inline Activation activation_from(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "selu") return Activation::SELU;
  throw std::invalid_argument("net.activation: expected relu|selu, got '" + s + "'");
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

inline std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag, std::uint64_t n = 0) {
  Rng r = Rng(seed).split(content_hash_bytes(tag)).split(n);
  return r.next_u64();
}

}  // namespace detail

inline void apply_experiment_defaults(ExperimentConfig& e) {
  const Family fam = family_of(e.id);
  switch (fam) {
    case Family::Figure:
      // Small diffusion rate keeps the integrator's terminal smoothing well
      // below the narrowest conditional scales of these benchmarks.
      e.schedule = Schedule::ve_rate(0.1);
      e.sde_alpha = "rate:0.1";
      e.per_z = 2000;
      break;
    case Family::Toy:
      e.schedule = Schedule::ve_rate(0.25);
      e.sde_alpha = "rate:0.25";
      e.per_z = 1;
      e.iterations = 12000;
      break;
    case Family::Table:
      e.schedule = Schedule::vp_identity();
      e.beta_min = 0.0;
      e.beta_max = 1.0;
      e.iterations = 10000;
      break;
    case Family::Uci:
      e.schedule = Schedule::vp_linear_ramp(1.0, 10.0);
      e.beta_min = 1.0;
      e.beta_max = 10.0;
      break;
    case Family::MnistLabel:
      e.schedule = Schedule::ve_linear();
      e.sde_alpha = "linear";
      break;
    case Family::MnistInpaint:
      e.schedule = Schedule::ve_linear();
      e.sde_alpha = "linear";
      e.hidden = {64, 64, 64};
      e.activation = Activation::SELU;
      e.batch_size = 128;
      e.iterations = 8000;
      break;
  }
}

// Overlay `layers` (file, then environment, then command line) on top of the
// id's defaults; every provided key must be recognized.
inline ExperimentConfig resolve_experiment(const std::string& id, const Config& merged) {
  ExperimentConfig e;
  e.id = id;
  apply_experiment_defaults(e);

  const std::string cfg_id = merged.get_string("experiment", id);
  if (cfg_id != id)
    throw std::invalid_argument("config names experiment '" + cfg_id +
                                "' but the run asked for '" + id + "'");

  const std::string kind = merged.get_string("sde.kind", to_string(e.schedule.kind));
  e.sde_alpha = merged.get_string("sde.alpha", e.sde_alpha);
  e.beta_min = merged.get_double("sde.beta_min", e.beta_min);
  e.beta_max = merged.get_double("sde.beta_max", e.beta_max);
  e.schedule = schedule_from_config(kind, e.sde_alpha, e.beta_min, e.beta_max);

  e.hidden = merged.get_int_list("net.hidden", e.hidden);
  e.activation = detail::activation_from(
      merged.get_string("net.activation", detail::activation_name(e.activation)));
  e.sinusoidal_time = merged.get_bool("net.sinusoidal_time", e.sinusoidal_time);

  e.iterations = merged.get_long("train.iterations", e.iterations);
  e.batch_size = static_cast<int>(merged.get_long("train.batch_size", e.batch_size));
  e.t_samples = static_cast<int>(merged.get_long("train.t_samples", e.t_samples));
  e.epsilon = merged.get_double("train.epsilon", e.epsilon);
  e.adam.lr = merged.get_double("train.lr", e.adam.lr);
  e.adam.beta1 = merged.get_double("train.adam_beta1", e.adam.beta1);
  e.adam.beta2 = merged.get_double("train.adam_beta2", e.adam.beta2);
  e.adam.eps = merged.get_double("train.adam_eps", e.adam.eps);
  e.checkpoint_every = merged.get_long("train.checkpoint_every", e.checkpoint_every);

  e.steps = static_cast<int>(merged.get_long("sample.steps", e.steps));
  e.per_z = static_cast<int>(merged.get_long("sample.per_z", e.per_z));
  e.block_rows = merged.get_long("sample.block_rows", e.block_rows);

  e.n_train = merged.get_long("data.n_train", e.n_train);
  e.gamma_as_rate = merged.get_bool("data.gamma_as_rate", e.gamma_as_rate);
  e.train_fraction = merged.get_double("data.train_fraction", e.train_fraction);

  e.z_probes = merged.get_double_list("eval.z_probes", e.z_probes);
  e.n_probes = merged.get_long("eval.n_probes", e.n_probes);
  e.samples_per_probe =
      static_cast<int>(merged.get_long("eval.samples_per_probe", e.samples_per_probe));
  e.replications = static_cast<int>(merged.get_long("eval.replications", e.replications));
  e.alphas = merged.get_double_list("eval.alphas", e.alphas);
  e.hist_bins = static_cast<int>(merged.get_long("eval.hist_bins", e.hist_bins));
  e.scatter_n = merged.get_long("eval.scatter_n", e.scatter_n);

  e.mnist_per_class = static_cast<int>(merged.get_long("mnist.per_class", e.mnist_per_class));
  e.mnist_max_atoms = merged.get_long("mnist.max_atoms", e.mnist_max_atoms);
  e.mnist_train_size = merged.get_long("mnist.train_size", e.mnist_train_size);

  e.seed = merged.get_u64("seed", e.seed);
  e.threads = static_cast<int>(merged.get_long("threads", e.threads));

  merged.reject_unconsumed();
  return e;
}

// Environment overlay: SBCG_TRAIN_ITERATIONS=... overrides train.iterations.
inline void overlay_environment(Config& cfg) {
  for (const std::string& key : detail::known_keys()) {
    std::string env = "SBCG_";
    for (char c : key) env += c == '.' ? '_' : static_cast<char>(std::toupper(c));
    if (const char* v = std::getenv(env.c_str())) cfg.set(key, v, 0);
  }
}

inline std::vector<std::pair<std::string, std::string>> config_snapshot(
    const ExperimentConfig& e) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("experiment", e.id);
  kv.emplace_back("seed", std::to_string(e.seed));
  kv.emplace_back("threads", std::to_string(e.threads));
  kv.emplace_back("sde.kind", to_string(e.schedule.kind));
  kv.emplace_back("sde.alpha", e.sde_alpha);
  kv.emplace_back("sde.beta_min", format_double(e.beta_min));
  kv.emplace_back("sde.beta_max", format_double(e.beta_max));
  kv.emplace_back("net.hidden", detail::join_ints(e.hidden));
  kv.emplace_back("net.activation", detail::activation_name(e.activation));
  kv.emplace_back("net.sinusoidal_time", e.sinusoidal_time ? "true" : "false");
  kv.emplace_back("train.iterations", std::to_string(e.iterations));
  kv.emplace_back("train.batch_size", std::to_string(e.batch_size));
  kv.emplace_back("train.t_samples", std::to_string(e.t_samples));
  kv.emplace_back("train.epsilon", format_double(e.epsilon));
  kv.emplace_back("train.lr", format_double(e.adam.lr));
  kv.emplace_back("train.adam_beta1", format_double(e.adam.beta1));
  kv.emplace_back("train.adam_beta2", format_double(e.adam.beta2));
  kv.emplace_back("train.adam_eps", format_double(e.adam.eps));
  kv.emplace_back("train.checkpoint_every", std::to_string(e.checkpoint_every));
  kv.emplace_back("sample.steps", std::to_string(e.steps));
  kv.emplace_back("sample.per_z", std::to_string(e.per_z));
  kv.emplace_back("sample.block_rows", std::to_string(e.block_rows));
  kv.emplace_back("data.n_train", std::to_string(e.n_train));
  kv.emplace_back("data.gamma_as_rate", e.gamma_as_rate ? "true" : "false");
  kv.emplace_back("data.train_fraction", format_double(e.train_fraction));
  kv.emplace_back("eval.z_probes", detail::join_doubles(e.z_probes));
  kv.emplace_back("eval.n_probes", std::to_string(e.n_probes));
  kv.emplace_back("eval.samples_per_probe", std::to_string(e.samples_per_probe));
  kv.emplace_back("eval.replications", std::to_string(e.replications));
  kv.emplace_back("eval.alphas", detail::join_doubles(e.alphas));
  kv.emplace_back("eval.hist_bins", std::to_string(e.hist_bins));
  kv.emplace_back("eval.scatter_n", std::to_string(e.scatter_n));
  kv.emplace_back("mnist.per_class", std::to_string(e.mnist_per_class));
  kv.emplace_back("mnist.max_atoms", std::to_string(e.mnist_max_atoms));
  kv.emplace_back("mnist.train_size", std::to_string(e.mnist_train_size));
  return kv;
}

// Accumulates the manifest while a run executes; outputs are hashed as they
// are recorded.
class RunContext {
 public:
  explicit RunContext(const ExperimentConfig& cfg)
      : cfg_(cfg), out_(cfg.out_dir), lock_(out_), start_(std::chrono::steady_clock::now()) {}

  const std::filesystem::path& dir() const { return out_; }

  std::filesystem::path path(const std::string& name) const { return out_ / name; }

  void record_input(const std::filesystem::path& p) {
    inputs_.emplace_back(p.string(), content_hash_file(p));
  }
  void record_output(const std::filesystem::path& p) {
    outputs_.emplace_back(p.filename().string(), content_hash_file(p));
  }

  void write_output(const std::string& name, std::string_view content) {
    atomic_write_file(path(name), content);
    record_output(path(name));
  }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ostringstream os;
    os << "experiment = " << cfg_.id << "\n";
    os << "wall_clock_s = " << format_double(wall) << "\n";
    os << "\n[config]\n";
    for (const auto& [k, v] : config_snapshot(cfg_)) {
      if (k == "experiment") continue;
      os << k << " = " << v << "\n";
    }
    if (!inputs_.empty()) {
      os << "\n[inputs]\n";
      for (const auto& [k, v] : inputs_) os << k << " = " << v << "\n";
    }
    os << "\n[outputs]\n";
    for (const auto& [k, v] : outputs_) os << k << " = " << v << "\n";
    atomic_write_file(path("manifest.txt"), os.str());
  }

 private:
  ExperimentConfig cfg_;
  std::filesystem::path out_;
  DirLock lock_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
};

namespace detail {

inline MlpSpec make_spec(const ExperimentConfig& e, int d_x, int d_z) {
  MlpSpec spec;
  spec.d_x = d_x;
  spec.d_z = d_z;
  spec.hidden = e.hidden;
  spec.activation = e.activation;
  spec.sinusoidal_time = e.sinusoidal_time;
  spec.init_seed = sub_seed(e.seed, "init");
  return spec;
}

inline TrainConfig make_train_config(const ExperimentConfig& e, Eigen::Index d_x) {
  TrainConfig tc;
  tc.iterations = e.iterations;
  tc.batch_size = e.batch_size;
  tc.t_samples = e.t_samples;
  tc.epsilon = e.epsilon;
  tc.schedule = e.schedule;
  tc.anchor = Eigen::VectorXd::Zero(d_x);
  tc.seed = sub_seed(e.seed, "train");
  tc.adam = e.adam;
  tc.checkpoint_every = e.checkpoint_every;
  return tc;
}

inline SampleConfig make_sample_config(const ExperimentConfig& e, Eigen::Index d_x,
                                       DriftSource drift, const std::string& tag) {
  SampleConfig sc;
  sc.steps = e.steps;
  sc.epsilon = e.epsilon;
  sc.schedule = e.schedule;
  sc.anchor = Eigen::VectorXd::Zero(d_x);
  sc.seed = sub_seed(e.seed, tag);
  sc.drift = std::move(drift);
  sc.threads = e.threads;
  sc.block_rows = e.block_rows;
  return sc;
}

inline std::string samples_csv_text(const std::vector<std::string>& z_names,
                                    const std::vector<std::string>& x_names,
                                    const std::vector<Eigen::VectorXd>& z_list, int per_z,
                                    const Eigen::MatrixXd& terminals) {
  std::ostringstream os;
  for (std::size_t i = 0; i < z_names.size(); ++i) os << (i ? "," : "") << z_names[i];
  for (const auto& n : x_names) os << "," << n;
  os << "\n";
  for (Eigen::Index r = 0; r < terminals.rows(); ++r) {
    const auto& z = z_list[static_cast<std::size_t>(r / per_z)];
    for (Eigen::Index c = 0; c < z.size(); ++c) os << (c ? "," : "") << format_double(z(c));
    for (Eigen::Index c = 0; c < terminals.cols(); ++c)
      os << "," << format_double(terminals(r, c));
    os << "\n";
  }
  return os.str();
}

inline std::string probe_label(double z) {
  std::string s = "z=" + format_double(z);
  return s;
}

// Per-condition Gaussian prediction intervals from sampled moments.
inline void intervals_for(const Eigen::VectorXd& means, const Eigen::VectorXd& stds, double alpha,
                          Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const double q = normal_quantile(1.0 - alpha / 2.0);
  lo = means - q * stds;
  hi = means + q * stds;
}

inline std::string normalizer_csv(const Normalizer& nm) {
  std::ostringstream os;
  os << "block,index,mean,std\n";
  for (Eigen::Index c = 0; c < nm.x_mean.size(); ++c)
    os << "x," << c << "," << format_double(nm.x_mean(c)) << "," << format_double(nm.x_std(c))
       << "\n";
  for (Eigen::Index c = 0; c < nm.z_mean.size(); ++c)
    os << "z," << c << "," << format_double(nm.z_mean(c)) << "," << format_double(nm.z_std(c))
       << "\n";
  return os.str();
}

inline Normalizer normalizer_from_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  std::vector<double> xm, xs, zm, zs;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double mean = parse_csv_double(t.rows[r][2], r + 2, 3);
    const double sd = parse_csv_double(t.rows[r][3], r + 2, 4);
    if (t.rows[r][0] == "x") {
      xm.push_back(mean);
      xs.push_back(sd);
    } else {
      zm.push_back(mean);
      zs.push_back(sd);
    }
  }
  Normalizer nm;
  nm.x_mean = Eigen::Map<Eigen::VectorXd>(xm.data(), static_cast<Eigen::Index>(xm.size()));
  nm.x_std = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  nm.z_mean = Eigen::Map<Eigen::VectorXd>(zm.data(), static_cast<Eigen::Index>(zm.size()));
  nm.z_std = Eigen::Map<Eigen::VectorXd>(zs.data(), static_cast<Eigen::Index>(zs.size()));
  return nm;
}

}  // namespace detail

// ---- training-data construction per experiment -------------------------

struct PreparedData {
  Dataset train;                   // normalized when the recipe standardizes
  std::optional<Dataset> test;     // UCI holdout, raw scale
  TrueConditional truth;           // raw-scale conditional law where defined
  Normalizer norm;                 // identity when not standardizing
};

inline PreparedData prepare_training_data(const ExperimentConfig& e, RunContext* ctx = nullptr) {
  const Family fam = family_of(e.id);
  PreparedData out;
  const std::uint64_t data_seed = detail::sub_seed(e.seed, "data");
  switch (fam) {
    case Family::Figure: {
      const int which = e.id.back() - '0';
      GammaNoise gamma{0.3, e.gamma_as_rate};
      auto gen = gen_example_1_2_3(which, e.n_train, data_seed, gamma);
      out.train = std::move(gen.data);
      out.truth = std::move(gen.truth);
      return out;
    }
    case Family::Table: {
      const int which = e.id.back() - '0';
      auto gen = gen_example_4_5_6(which, e.n_train, data_seed);
      out.truth = std::move(gen.truth);
      if (which == 6) {
        out.train = std::move(gen.data);  // already O(1) scale
      } else {
        out.norm = fit_normalizer(gen.data);
        out.train = apply_normalizer(gen.data, out.norm);
      }
      return out;
    }
    case Family::Toy: {
      out.train = gen_toy2d(toy_shape_from_string(e.id.substr(6)), e.n_train, data_seed);
      return out;
    }
    case Family::Uci: {
      const bool abalone = e.id == "abalone";
      const std::string file = abalone ? "abalone.csv" : "winequality.csv";
      const std::string target = abalone ? "rings" : "quality";
      const std::vector<std::string> features =
          abalone ? std::vector<std::string>{"sex", "length", "diameter", "height",
                                             "whole_weight", "shucked_weight", "viscera_weight",
                                             "shell_weight"}
                  : std::vector<std::string>{"fixed_acidity", "volatile_acidity", "citric_acid",
                                             "residual_sugar", "chlorides", "free_sulfur_dioxide",
                                             "total_sulfur_dioxide", "density", "pH", "sulphates",
                                             "alcohol"};
      const std::filesystem::path path = std::filesystem::path(e.data_dir) / file;
      Dataset full = load_csv(path.string(), target, features);
      if (ctx) ctx->record_input(path);
      auto [train_raw, test_raw] = split(full, e.train_fraction, detail::sub_seed(e.seed, "split"));
      out.norm = fit_normalizer(train_raw);
      out.train = apply_normalizer(train_raw, out.norm);
      out.test = std::move(test_raw);
      return out;
    }
    case Family::MnistInpaint: {
      const InpaintMask mask = inpaint_mask_from_string(e.id.substr(14));
      const std::filesystem::path imgs =
          std::filesystem::path(e.data_dir) / "train-images-idx3-ubyte";
      const std::filesystem::path labs =
          std::filesystem::path(e.data_dir) / "train-labels-idx1-ubyte";
      Dataset full = load_idx(imgs.string(), labs.string(), IdxMode::Inpaint, mask);
      if (ctx) {
        ctx->record_input(imgs);
        ctx->record_input(labs);
      }
      const Eigen::Index keep = std::min<Eigen::Index>(e.mnist_train_size, full.n());
      Dataset sub;
      sub.x = full.x.topRows(keep);
      sub.z = full.z.topRows(keep);
      sub.x_names = full.x_names;
      sub.z_names = full.z_names;
      sub.z_continuous = full.z_continuous;
      out.train = std::move(sub);
      return out;
    }
    case Family::MnistLabel:
      throw std::invalid_argument(
          "mnist-label uses the closed-form drift; there is no network to train");
  }
  throw std::logic_error("prepare_training_data: unreachable");
}

// ---- subcommands --------------------------------------------------------

// Train and persist a checkpoint plus the loss trace.
inline MlpParams cmd_train(const ExperimentConfig& e, RunContext& ctx) {
  PreparedData data = prepare_training_data(e, &ctx);
  const MlpSpec spec =
      detail::make_spec(e, static_cast<int>(data.train.d_x()), static_cast<int>(data.train.d_z()));
  TrainConfig tc = detail::make_train_config(e, data.train.d_x());
  if (tc.checkpoint_every > 0) tc.checkpoint_prefix = (ctx.dir() / "checkpoint").string();
  TrainResult result = train(data.train, spec, tc);

  save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
  ctx.record_output(ctx.path("checkpoint.ckpt"));
  write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
  ctx.record_output(ctx.path("loss_trace.csv"));
  if (!data.norm.empty()) ctx.write_output("normalizer.csv", detail::normalizer_csv(data.norm));
  return result.params;
}

// Sample terminals for conditions supplied as a CSV (one row per condition,
// d_z columns, raw scale). Applies the saved normalizer when present.
inline void cmd_sample(const ExperimentConfig& e, const std::string& checkpoint_path,
                       const std::string& z_csv_path, RunContext& ctx) {
  MlpParams params = load_checkpoint(checkpoint_path);
  ctx.record_input(checkpoint_path);
  auto [z_header, z_raw] = read_csv_matrix(z_csv_path);
  ctx.record_input(z_csv_path);
  if (z_raw.cols() != params.spec.d_z)
    throw std::invalid_argument("cmd_sample: condition file has " + std::to_string(z_raw.cols()) +
                                " columns, checkpoint expects " +
                                std::to_string(params.spec.d_z));

  Normalizer nm;
  const std::filesystem::path norm_path =
      std::filesystem::path(checkpoint_path).parent_path() / "normalizer.csv";
  if (std::filesystem::exists(norm_path)) {
    nm = detail::normalizer_from_csv(norm_path.string());
    ctx.record_input(norm_path);
  }

  const Eigen::MatrixXd z_in = nm.apply_z(z_raw);
  std::vector<Eigen::VectorXd> z_list;
  for (Eigen::Index r = 0; r < z_in.rows(); ++r) z_list.push_back(z_in.row(r).transpose());

  SampleConfig sc = detail::make_sample_config(e, params.spec.d_x, NetworkDrift{std::move(params)},
                                               "sample");
  Eigen::MatrixXd terminals = nm.invert_x(sample_many(z_list, e.per_z, sc));

  std::vector<Eigen::VectorXd> z_raw_list;
  for (Eigen::Index r = 0; r < z_raw.rows(); ++r) z_raw_list.push_back(z_raw.row(r).transpose());
  std::vector<std::string> x_names;
  for (Eigen::Index c = 0; c < terminals.cols(); ++c) x_names.push_back("x" + std::to_string(c));
  ctx.write_output("samples.csv",
                   detail::samples_csv_text(z_header, x_names, z_raw_list, e.per_z, terminals));
}

// ---- reproduction pipelines ---------------------------------------------

inline EvalReport run_figure(const ExperimentConfig& e, RunContext& ctx) {
  PreparedData data = prepare_training_data(e, &ctx);
  const MlpSpec spec = detail::make_spec(e, 1, 1);
  TrainConfig tc = detail::make_train_config(e, 1);
  TrainResult result = train(data.train, spec, tc);
  save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
  ctx.record_output(ctx.path("checkpoint.ckpt"));
  write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
  ctx.record_output(ctx.path("loss_trace.csv"));

  std::vector<Eigen::VectorXd> z_list;
  for (double z : e.z_probes) z_list.push_back(Eigen::VectorXd::Constant(1, z));
  SampleConfig sc = detail::make_sample_config(e, 1, NetworkDrift{result.params}, "sample");
  const Eigen::MatrixXd terminals = sample_many(z_list, e.per_z, sc);

  EvalReport report;
  report.sample_count = terminals.rows();
  report.seed = e.seed;
  ctx.write_output("samples.csv", detail::samples_csv_text({"z"}, {"x"}, z_list, e.per_z, terminals));
  for (std::size_t i = 0; i < z_list.size(); ++i) {
    const Eigen::VectorXd xs =
        terminals.middleRows(static_cast<Eigen::Index>(i) * e.per_z, e.per_z).col(0);
    const std::string label = detail::probe_label(e.z_probes[i]);
    ctx.write_output("hist_" + label + ".csv", histogram_csv(xs, e.hist_bins));
    if (data.truth.cdf_fn) {
      const Eigen::VectorXd zv = z_list[i];
      const double ks =
          ks_statistic(xs, [&](double x) { return data.truth.cdf_fn(x, zv); });
      report.ks.emplace_back(label, ks);
    }
  }
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

inline EvalReport run_toy(const ExperimentConfig& e, RunContext& ctx) {
  PreparedData data = prepare_training_data(e, &ctx);
  const MlpSpec spec = detail::make_spec(e, 1, 1);
  TrainConfig tc = detail::make_train_config(e, 1);
  TrainResult result = train(data.train, spec, tc);
  save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
  ctx.record_output(ctx.path("checkpoint.ckpt"));
  write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
  ctx.record_output(ctx.path("loss_trace.csv"));

  const Dataset fresh = gen_toy2d(toy_shape_from_string(e.id.substr(6)), e.scatter_n,
                                  detail::sub_seed(e.seed, "probe"));
  std::vector<Eigen::VectorXd> z_list;
  for (Eigen::Index r = 0; r < fresh.n(); ++r) z_list.push_back(fresh.z.row(r).transpose());
  SampleConfig sc = detail::make_sample_config(e, 1, NetworkDrift{result.params}, "sample");
  const Eigen::MatrixXd terminals = sample_many(z_list, 1, sc);

  ctx.write_output("generated.csv", detail::samples_csv_text({"z"}, {"x"}, z_list, 1, terminals));
  std::ostringstream truth_csv;
  truth_csv << "z,x\n";
  for (Eigen::Index r = 0; r < fresh.n(); ++r)
    truth_csv << format_double(fresh.z(r, 0)) << "," << format_double(fresh.x(r, 0)) << "\n";
  ctx.write_output("truth.csv", truth_csv.str());

  EvalReport report;
  report.sample_count = terminals.rows();
  report.seed = e.seed;
  ctx.write_output("report.json", report.to_json());
  return report;
}

// Conditional mean / standard deviation protocol: fresh model per
// replication, fresh probe conditions, squared-error aggregates against the
// closed-form moments.
inline EvalReport run_table(const ExperimentConfig& e, RunContext& ctx) {
  const int which = e.id.back() - '0';
  std::vector<double> mse_mean, mse_std;
  std::ostringstream reps_csv;
  reps_csv << "replication,mse_mean,mse_std\n";

  for (int rep = 0; rep < e.replications; ++rep) {
    ExperimentConfig er = e;
    er.seed = detail::sub_seed(e.seed, "replication", static_cast<std::uint64_t>(rep));
    PreparedData data = prepare_training_data(er, nullptr);
    const MlpSpec spec = detail::make_spec(er, 1, static_cast<int>(data.train.d_z()));
    TrainConfig tc = detail::make_train_config(er, 1);
    TrainResult result = train(data.train, spec, tc);
    if (rep == 0) {
      save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
      ctx.record_output(ctx.path("checkpoint.ckpt"));
      write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
      ctx.record_output(ctx.path("loss_trace.csv"));
    }

    Rng probe_rng = Rng(detail::sub_seed(er.seed, "probe")).split(7);
    const int d_z = which == 6 ? 1 : 5;
    std::vector<Eigen::VectorXd> z_raw(static_cast<std::size_t>(e.n_probes));
    for (auto& z : z_raw) {
      z.resize(d_z);
      for (int c = 0; c < d_z; ++c) z(c) = probe_rng.normal();
    }
    std::vector<Eigen::VectorXd> z_in;
    z_in.reserve(z_raw.size());
    for (const auto& z : z_raw) {
      Eigen::MatrixXd zm = z.transpose();
      z_in.push_back(data.norm.apply_z(zm).row(0).transpose());
    }

    SampleConfig sc = detail::make_sample_config(er, 1, NetworkDrift{result.params}, "sample");
    const Eigen::MatrixXd terminals =
        data.norm.invert_x(sample_many(z_in, e.samples_per_probe, sc));
    const auto [means, stds] = conditional_moments(terminals, e.samples_per_probe);

    Eigen::VectorXd truth_mean(e.n_probes), truth_std(e.n_probes);
    for (long i = 0; i < e.n_probes; ++i) {
      truth_mean(i) = data.truth.mean_fn(z_raw[static_cast<std::size_t>(i)]);
      truth_std(i) = data.truth.std_fn(z_raw[static_cast<std::size_t>(i)]);
    }
    const double m1 = mse_against_truth(means.col(0), truth_mean);
    const double m2 = mse_against_truth(stds.col(0), truth_std);
    mse_mean.push_back(m1);
    mse_std.push_back(m2);
    reps_csv << rep << "," << format_double(m1) << "," << format_double(m2) << "\n";
  }

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto stderr_of = [&](const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  };

  EvalReport report;
  report.mse1 = mean_of(mse_mean);
  report.mse2 = mean_of(mse_std);
  report.mse1_stderr = stderr_of(mse_mean, report.mse1);
  report.mse2_stderr = stderr_of(mse_std, report.mse2);
  report.sample_count = e.n_probes * e.samples_per_probe;
  report.seed = e.seed;
  ctx.write_output("replications.csv", reps_csv.str());
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

// Holdout prediction intervals from sampled conditional moments, with
// coverage against the held-out responses.
inline EvalReport run_uci(const ExperimentConfig& e, RunContext& ctx) {
  PreparedData data = prepare_training_data(e, &ctx);
  const Dataset& test = *data.test;
  const MlpSpec spec = detail::make_spec(e, 1, static_cast<int>(data.train.d_z()));
  TrainConfig tc = detail::make_train_config(e, 1);
  TrainResult result = train(data.train, spec, tc);
  save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
  ctx.record_output(ctx.path("checkpoint.ckpt"));
  write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
  ctx.record_output(ctx.path("loss_trace.csv"));
  ctx.write_output("normalizer.csv", detail::normalizer_csv(data.norm));

  std::vector<Eigen::VectorXd> z_in;
  const Eigen::MatrixXd test_z_norm = data.norm.apply_z(test.z);
  for (Eigen::Index r = 0; r < test.n(); ++r) z_in.push_back(test_z_norm.row(r).transpose());
  SampleConfig sc = detail::make_sample_config(e, 1, NetworkDrift{result.params}, "sample");
  const Eigen::MatrixXd terminals = data.norm.invert_x(sample_many(z_in, e.per_z, sc));
  const auto [means, stds] = conditional_moments(terminals, e.per_z);

  EvalReport report;
  report.sample_count = terminals.rows();
  report.seed = e.seed;

  std::ostringstream intervals_csv;
  intervals_csv << "row,truth,mean,std";
  for (double a : e.alphas)
    intervals_csv << ",lo_" << format_double(a) << ",hi_" << format_double(a);
  intervals_csv << "\n";
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> bounds;
  for (double a : e.alphas) {
    Eigen::VectorXd lo, hi;
    detail::intervals_for(means.col(0), stds.col(0), a, lo, hi);
    report.coverage[a] = coverage_rate(lo, hi, test.x.col(0));
    bounds.emplace_back(std::move(lo), std::move(hi));
  }
  for (Eigen::Index r = 0; r < test.n(); ++r) {
    intervals_csv << r << "," << format_double(test.x(r, 0)) << "," << format_double(means(r, 0))
                  << "," << format_double(stds(r, 0));
    for (const auto& [lo, hi] : bounds)
      intervals_csv << "," << format_double(lo(r)) << "," << format_double(hi(r));
    intervals_csv << "\n";
  }
  ctx.write_output("intervals.csv", intervals_csv.str());

  std::ostringstream cov_csv;
  cov_csv << "alpha,nominal,coverage\n";
  for (double a : e.alphas)
    cov_csv << format_double(a) << "," << format_double(1.0 - a) << ","
            << format_double(report.coverage[a]) << "\n";
  ctx.write_output("coverage.csv", cov_csv.str());
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

// Per-class closed-form drift sampling; no training involved.
inline EvalReport run_mnist_label(const ExperimentConfig& e, RunContext& ctx) {
  const std::filesystem::path imgs = std::filesystem::path(e.data_dir) / "train-images-idx3-ubyte";
  const std::filesystem::path labs = std::filesystem::path(e.data_dir) / "train-labels-idx1-ubyte";
  const Dataset ds = load_idx(imgs.string(), labs.string(), IdxMode::LabelConditional);
  ctx.record_input(imgs);
  ctx.record_input(labs);
  const Eigen::Index d = ds.d_x();

  Eigen::MatrixXd class_means(10, d);
  std::vector<Eigen::MatrixXd> generated(10);
  std::ostringstream match_csv;
  match_csv << "digit,samples,best_match_rate\n";

  EvalReport report;
  report.seed = e.seed;
  for (int digit = 0; digit < 10; ++digit) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < ds.n(); ++r)
      if (ds.z(r, digit) == 1.0) rows.push_back(r);
    if (rows.empty()) throw std::runtime_error("mnist-label: no images for digit " +
                                               std::to_string(digit));
    Eigen::MatrixXd atoms(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) atoms.row(static_cast<Eigen::Index>(i)) = ds.x.row(rows[i]);
    class_means.row(digit) = atoms.colwise().mean();

    Rng sub_rng = Rng(detail::sub_seed(e.seed, "atoms", static_cast<std::uint64_t>(digit))).split(1);
    EmpiricalMeasure measure = EmpiricalMeasure(atoms).subsample(e.mnist_max_atoms, sub_rng);
    ExperimentConfig ed = e;
    ed.seed = detail::sub_seed(e.seed, "digit", static_cast<std::uint64_t>(digit));
    SampleConfig sc = detail::make_sample_config(ed, d, AnalyticDrift{std::move(measure)}, "sample");
    std::vector<Eigen::VectorXd> z_list{Eigen::VectorXd::Constant(1, digit)};
    Eigen::MatrixXd terminals = sample_many(z_list, e.mnist_per_class, sc);
    // Pixel clamp happens only here, at export.
    terminals = terminals.cwiseMax(0.0).cwiseMin(1.0);
    generated[static_cast<std::size_t>(digit)] = terminals;
  }

  // Correlation of each sample against every class-mean image.
  auto pearson = [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::VectorXd du = u.array() - u.mean();
    const Eigen::VectorXd dv = v.array() - v.mean();
    const double denom = std::sqrt(du.squaredNorm() * dv.squaredNorm());
    return denom > 0 ? du.dot(dv) / denom : 0.0;
  };
  double worst_rate = 1.0, pixel_min = 1.0, pixel_max = 0.0;
  for (int digit = 0; digit < 10; ++digit) {
    const Eigen::MatrixXd& g = generated[static_cast<std::size_t>(digit)];
    pixel_min = std::min(pixel_min, g.minCoeff());
    pixel_max = std::max(pixel_max, g.maxCoeff());
    long matched = 0;
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      int best = 0;
      double best_corr = -2.0;
      for (int c = 0; c < 10; ++c) {
        const double corr = pearson(g.row(r).transpose(), class_means.row(c).transpose());
        if (corr > best_corr) {
          best_corr = corr;
          best = c;
        }
      }
      if (best == digit) ++matched;
    }
    const double rate = static_cast<double>(matched) / static_cast<double>(g.rows());
    worst_rate = std::min(worst_rate, rate);
    match_csv << digit << "," << g.rows() << "," << format_double(rate) << "\n";
    report.metrics.emplace_back("digit" + std::to_string(digit) + "_match", rate);
  }
  report.metrics.emplace_back("worst_match_rate", worst_rate);
  report.metrics.emplace_back("pixel_min", pixel_min);
  report.metrics.emplace_back("pixel_max", pixel_max);
  report.sample_count = 10L * e.mnist_per_class;

  // 10 x 10 grid: row = digit, first ten samples of each.
  const int side = static_cast<int>(std::round(std::sqrt(static_cast<double>(d))));
  if (side * side == d) {
    const int grid_cols = std::min(10, e.mnist_per_class);
    std::vector<double> grid(static_cast<std::size_t>(10 * side * grid_cols * side), 0.0);
    for (int digit = 0; digit < 10; ++digit)
      for (int s = 0; s < grid_cols; ++s)
        for (int r = 0; r < side; ++r)
          for (int c = 0; c < side; ++c)
            grid[static_cast<std::size_t>((digit * side + r) * grid_cols * side + s * side + c)] =
                generated[static_cast<std::size_t>(digit)](s, r * side + c);
    write_pgm(ctx.path("generated_grid.pgm"), grid.data(), 10 * side, grid_cols * side);
    ctx.record_output(ctx.path("generated_grid.pgm"));
  }
  ctx.write_output("class_match.csv", match_csv.str());
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

// Train on partially observed images, then reconstruct held-out digits.
inline EvalReport run_mnist_inpaint(const ExperimentConfig& e, RunContext& ctx) {
  const InpaintMask mask = inpaint_mask_from_string(e.id.substr(14));
  PreparedData data = prepare_training_data(e, &ctx);
  const MlpSpec spec = detail::make_spec(e, static_cast<int>(data.train.d_x()),
                                         static_cast<int>(data.train.d_z()));
  TrainConfig tc = detail::make_train_config(e, data.train.d_x());
  TrainResult result = train(data.train, spec, tc);
  save_checkpoint(ctx.path("checkpoint.ckpt").string(), result.params);
  ctx.record_output(ctx.path("checkpoint.ckpt"));
  write_loss_trace_csv(ctx.path("loss_trace.csv").string(), result.loss_trace);
  ctx.record_output(ctx.path("loss_trace.csv"));

  const std::filesystem::path timgs = std::filesystem::path(e.data_dir) / "t10k-images-idx3-ubyte";
  const std::filesystem::path tlabs = std::filesystem::path(e.data_dir) / "t10k-labels-idx1-ubyte";
  const Dataset test = load_idx(timgs.string(), tlabs.string(), IdxMode::Inpaint, mask);
  const Dataset test_full = load_idx(timgs.string(), tlabs.string(), IdxMode::LabelConditional);
  ctx.record_input(timgs);
  ctx.record_input(tlabs);
  const int side = static_cast<int>(std::round(std::sqrt(static_cast<double>(test_full.d_x()))));
  const int d_img = side * side;
  if (d_img != test_full.d_x())
    throw std::runtime_error("inpainting expects square images");

  // First test image of each digit.
  std::vector<Eigen::Index> picks;
  for (int digit = 0; digit < 10; ++digit)
    for (Eigen::Index r = 0; r < test_full.n(); ++r)
      if (test_full.z(r, digit) == 1.0) {
        picks.push_back(r);
        break;
      }

  std::vector<Eigen::VectorXd> z_list;
  for (Eigen::Index r : picks) z_list.push_back(test.z.row(r).transpose());
  constexpr int kReconstructions = 10;
  SampleConfig sc = detail::make_sample_config(e, data.train.d_x(), NetworkDrift{result.params},
                                               "sample");
  Eigen::MatrixXd recon = sample_many(z_list, kReconstructions, sc);
  recon = recon.cwiseMax(0.0).cwiseMin(1.0);

  const auto [observed, missing] = inpaint_partition(mask, side, side);
  double mse_sum = 0.0;
  for (std::size_t p = 0; p < picks.size(); ++p) {
    const Eigen::VectorXd truth_missing = test.x.row(picks[p]).transpose();
    for (int r = 0; r < kReconstructions; ++r)
      mse_sum += (recon.row(static_cast<Eigen::Index>(p) * kReconstructions + r).transpose() -
                  truth_missing)
                     .squaredNorm() /
                 static_cast<double>(truth_missing.size());
  }
  EvalReport report;
  report.mse1 = mse_sum / static_cast<double>(picks.size() * kReconstructions);
  report.sample_count = static_cast<long>(picks.size()) * kReconstructions;
  report.seed = e.seed;

  // Panel: truth | condition (missing region mid-gray) | reconstructions.
  const int cols = 2 + kReconstructions;
  const int nrows = static_cast<int>(picks.size());
  std::vector<double> panel(static_cast<std::size_t>(nrows * side * cols * side), 0.0);
  auto blit = [&](int prow, int pcol, const Eigen::VectorXd& full) {
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c)
        panel[static_cast<std::size_t>((prow * side + r) * cols * side + pcol * side + c)] =
            full(r * side + c);
  };
  for (std::size_t p = 0; p < picks.size(); ++p) {
    blit(static_cast<int>(p), 0, test_full.x.row(picks[p]).transpose());
    Eigen::VectorXd cond = Eigen::VectorXd::Constant(d_img, 0.5);
    for (std::size_t i = 0; i < observed.size(); ++i) cond(observed[i]) = test.z(picks[p], static_cast<Eigen::Index>(i));
    blit(static_cast<int>(p), 1, cond);
    for (int r = 0; r < kReconstructions; ++r) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(d_img);
      for (std::size_t i = 0; i < observed.size(); ++i)
        full(observed[i]) = test.z(picks[p], static_cast<Eigen::Index>(i));
      for (std::size_t i = 0; i < missing.size(); ++i)
        full(missing[i]) = recon(static_cast<Eigen::Index>(p) * kReconstructions + r,
                                 static_cast<Eigen::Index>(i));
      blit(static_cast<int>(p), 2 + r, full);
    }
  }
  write_pgm(ctx.path("inpaint_panel.pgm"), panel.data(), nrows * side, cols * side);
  ctx.record_output(ctx.path("inpaint_panel.pgm"));
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

inline EvalReport cmd_reproduce(const ExperimentConfig& e, RunContext& ctx) {
  switch (family_of(e.id)) {
    case Family::Figure: return run_figure(e, ctx);
    case Family::Toy: return run_toy(e, ctx);
    case Family::Table: return run_table(e, ctx);
    case Family::Uci: return run_uci(e, ctx);
    case Family::MnistLabel: return run_mnist_label(e, ctx);
    case Family::MnistInpaint: return run_mnist_inpaint(e, ctx);
  }
  throw std::logic_error("cmd_reproduce: unreachable");
}

// Standalone evaluation of a previously written samples.csv.
inline EvalReport cmd_eval(const ExperimentConfig& e, const std::string& samples_csv,
                           RunContext& ctx) {
  const Family fam = family_of(e.id);
  auto [header, values] = read_csv_matrix(samples_csv);
  ctx.record_input(samples_csv);
  EvalReport report;
  report.seed = e.seed;
  report.sample_count = values.rows();

  if (fam == Family::Figure) {
    PreparedData data = prepare_training_data(e, nullptr);
    if (values.rows() % e.per_z != 0)
      throw std::invalid_argument("cmd_eval: rows not a multiple of sample.per_z");
    const Eigen::Index groups = values.rows() / e.per_z;
    for (Eigen::Index g = 0; g < groups; ++g) {
      const Eigen::VectorXd zv = values.block(g * e.per_z, 0, 1, 1).transpose();
      const Eigen::VectorXd xs = values.middleRows(g * e.per_z, e.per_z).col(1);
      const std::string label = detail::probe_label(zv(0));
      ctx.write_output("hist_" + label + ".csv", histogram_csv(xs, e.hist_bins));
      if (data.truth.cdf_fn)
        report.ks.emplace_back(label,
                               ks_statistic(xs, [&](double x) { return data.truth.cdf_fn(x, zv); }));
    }
  } else if (fam == Family::Table) {
    PreparedData data = prepare_training_data(e, nullptr);
    const Eigen::Index d_z = values.cols() - 1;
    if (values.rows() % e.samples_per_probe != 0)
      throw std::invalid_argument("cmd_eval: rows not a multiple of eval.samples_per_probe");
    const auto [means, stds] = conditional_moments(values.rightCols(1), e.samples_per_probe);
    const Eigen::Index groups = means.rows();
    Eigen::VectorXd truth_mean(groups), truth_std(groups);
    for (Eigen::Index g = 0; g < groups; ++g) {
      const Eigen::VectorXd zv = values.block(g * e.samples_per_probe, 0, 1, d_z).transpose();
      truth_mean(g) = data.truth.mean_fn(zv);
      truth_std(g) = data.truth.std_fn(zv);
    }
    report.mse1 = mse_against_truth(means.col(0), truth_mean);
    report.mse2 = mse_against_truth(stds.col(0), truth_std);
  } else {
    throw std::invalid_argument("cmd_eval supports the synthetic sample layouts only");
  }
  ctx.write_output("report.json", report.to_json());
  ctx.write_output("eval.csv", report.to_csv());
  return report;
}

}  // namespace sbcg
