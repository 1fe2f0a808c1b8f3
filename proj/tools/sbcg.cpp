// Command-line front end: train / sample / eval / reproduce over the built-in
// experiment recipes. Precedence for settings: command line > environment
// (SBCG_*) > config file > recipe default.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "sbcg/config.hpp"
#include "sbcg/experiments.hpp"

namespace {

struct CommonArgs {
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::string data_dir;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("experiment", args.experiment,
                  "experiment id (example1..example6, toy2d:<shape>, wine, abalone, "
                  "mnist-label, mnist-inpaint:<mask>)")
      ->required();
  cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", args.out_dir, "output directory (default out/<experiment>)");
  cmd->add_option("--data", args.data_dir, "directory holding external data files");
  cmd->add_option("--threads", args.threads, "worker threads for sampling");
  cmd->add_option("--seed", args.seed, "master seed")->each([&](const std::string&) {
    args.seed_given = true;
  });
  cmd->add_option("--set", args.sets, "extra key=value overrides (repeatable)")
      ->expected(-1);
}

sbcg::ExperimentConfig resolve(const CommonArgs& args) {
  sbcg::Config merged;
  if (!args.config_path.empty()) {
    sbcg::Config file = sbcg::parse_config_file(args.config_path);
    for (const auto& [k, v] : file.items()) merged.set(k, v);
  }
  sbcg::overlay_environment(merged);
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    merged.set(sbcg::Config::trim(kv.substr(0, eq)), sbcg::Config::trim(kv.substr(eq + 1)));
  }
  if (args.seed_given) merged.set("seed", std::to_string(args.seed));
  if (args.threads > 0) merged.set("threads", std::to_string(args.threads));

  sbcg::ExperimentConfig cfg = sbcg::resolve_experiment(args.experiment, merged);
  cfg.out_dir = args.out_dir.empty() ? "out/" + args.experiment : args.out_dir;
  if (!args.data_dir.empty()) cfg.data_dir = args.data_dir;
  if (const char* env_data = std::getenv("SBCG_DATA_DIR"); env_data && args.data_dir.empty())
    cfg.data_dir = env_data;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional sampling via drift-matched bridge diffusions"};
  app.require_subcommand(1);

  CommonArgs train_args, sample_args, eval_args, repro_args;
  std::string checkpoint_path, z_csv_path, samples_csv_path;

  CLI::App* cmd_train = app.add_subcommand("train", "train a drift network and write a checkpoint");
  add_common(cmd_train, train_args);

  CLI::App* cmd_sample =
      app.add_subcommand("sample", "draw conditional samples from a trained checkpoint");
  add_common(cmd_sample, sample_args);
  cmd_sample->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  cmd_sample->add_option("--z-file", z_csv_path, "CSV of conditions, one row per condition")
      ->required();

  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a samples.csv against the known law");
  add_common(cmd_eval, eval_args);
  cmd_eval->add_option("--samples", samples_csv_path, "samples CSV to evaluate")->required();

  CLI::App* cmd_repro =
      app.add_subcommand("reproduce", "run the full pipeline for an experiment");
  add_common(cmd_repro, repro_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) {
      sbcg::ExperimentConfig cfg = resolve(train_args);
      sbcg::RunContext ctx(cfg);
      sbcg::cmd_train(cfg, ctx);
      ctx.finish();
    } else if (cmd_sample->parsed()) {
      sbcg::ExperimentConfig cfg = resolve(sample_args);
      sbcg::RunContext ctx(cfg);
      sbcg::cmd_sample(cfg, checkpoint_path, z_csv_path, ctx);
      ctx.finish();
    } else if (cmd_eval->parsed()) {
      sbcg::ExperimentConfig cfg = resolve(eval_args);
      sbcg::RunContext ctx(cfg);
      sbcg::cmd_eval(cfg, samples_csv_path, ctx);
      ctx.finish();
    } else if (cmd_repro->parsed()) {
      sbcg::ExperimentConfig cfg = resolve(repro_args);
      sbcg::RunContext ctx(cfg);
      const sbcg::EvalReport report = sbcg::cmd_reproduce(cfg, ctx);
      ctx.finish();
      std::printf("%s", report.to_json().c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
