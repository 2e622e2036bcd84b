#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "coexsim/harness/config.hpp"
#include "coexsim/harness/runner.hpp"

namespace {

using coexsim::harness::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  bool train_first = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_train_first) {
  cmd->add_option("-c,--config", flags.config_path, "experiment config file")->required();
  cmd->add_option("-o,--out", flags.out_dir, "output directory (overrides config and env)");
  cmd->add_option("-m,--mode", flags.mode, "run mode: qasal, primal-dual, static-cw");
  if (with_train_first) {
    cmd->add_flag("--train-first", flags.train_first, "train inline before executing");
  }
}

ExperimentConfig finalize(const CommonFlags& flags) {
  auto cfg = coexsim::harness::load_config(flags.config_path);
  if (const char* env_dir = std::getenv("COEX_OUTPUT_DIR"); env_dir != nullptr && *env_dir) {
    cfg.output_dir = env_dir;
  }
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (!flags.mode.empty()) cfg.mode = coexsim::harness::mode_from_string(flags.mode);
  if (flags.train_first) cfg.train_first = true;
  return cfg;
}

void warn_if_price_blind(const coexsim::agent::TrainResult& result, coexsim::harness::RunMode mode) {
  if (mode == coexsim::harness::RunMode::Qasal && !result.lambda_changes_policy) {
    std::fprintf(stderr,
                 "warning: the trained policy never changes its action with the price feature; "
                 "training quality is questionable\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR-U / Wi-Fi coexistence simulator and constrained-RL harness"};
  app.require_subcommand(1);

  CommonFlags train_flags, exec_flags, sweep_flags;
  std::string validate_path;
  std::uint64_t seed_override = 0;
  bool seed_set = false;

  auto* train_cmd = app.add_subcommand("train", "train a model per the config mode");
  add_common(train_cmd, train_flags, false);
  train_cmd->add_option("-s,--seed", seed_override, "training seed override");

  auto* exec_cmd = app.add_subcommand("execute", "run one episode at the first sweep point");
  add_common(exec_cmd, exec_flags, true);
  exec_cmd->add_option("-s,--seed", seed_override, "run seed override");

  auto* sweep_cmd = app.add_subcommand("sweep", "run the full population x threshold x seed grid");
  add_common(sweep_cmd, sweep_flags, true);
  sweep_cmd->add_option("-s,--seed", seed_override, "replace the seed list with one seed");

  auto* validate_cmd = app.add_subcommand("validate-config", "parse and validate a config file");
  validate_cmd->add_option("-c,--config", validate_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  for (auto* cmd : {train_cmd, exec_cmd, sweep_cmd}) {
    if (cmd->count("--seed") > 0) seed_set = true;
  }

  try {
    if (*validate_cmd) {
      const auto cfg = coexsim::harness::load_config(validate_path);
      std::printf("config ok (hash %016llx)\n",
                  static_cast<unsigned long long>(coexsim::harness::config_hash(cfg)));
      return 0;
    }

    if (*train_cmd) {
      auto cfg = finalize(train_flags);
      if (seed_set) cfg.train_seed = seed_override;
      const auto result = coexsim::harness::run_training(cfg, cfg.output_dir);
      warn_if_price_blind(result, cfg.mode);
      std::printf("trained %s model over %zu episodes -> %s/model.ckpt\n",
                  coexsim::harness::to_string(cfg.mode).c_str(), result.curve.size(),
                  cfg.output_dir.c_str());
      return 0;
    }

    if (*exec_cmd) {
      auto cfg = finalize(exec_flags);
      const std::uint64_t seed = seed_set ? seed_override : cfg.seeds.front();
      cfg.seeds = {seed};
      cfg.n_pc3 = {cfg.n_pc3.front()};
      cfg.d_th_us = {cfg.d_th_us.front()};
      const auto sweep = coexsim::harness::run_sweep(cfg);
      const auto& run = sweep.runs.front();
      if (sweep.lambda_policy_warning) {
        std::fprintf(stderr,
                     "warning: the trained policy never changes its action with the price "
                     "feature; training quality is questionable\n");
      }
      std::printf("mode=%s n_pc3=%d d_th_us=%g seed=%llu delay_last_half_us=%.3f final_jfi=%.6f "
                  "violation_frac=%.4f lambda_final=%.4f trace=%016llx\n",
                  coexsim::harness::to_string(run.mode).c_str(), run.n_pc3, run.d_th_us,
                  static_cast<unsigned long long>(run.seed), run.delay_last_half_us, run.final_jfi,
                  run.violation_fraction, run.lambda_final,
                  static_cast<unsigned long long>(run.trace_hash));
      return 0;
    }

    auto cfg = finalize(sweep_flags);
    if (seed_set) cfg.seeds = {seed_override};
    const auto sweep = coexsim::harness::run_sweep(cfg);
    if (sweep.lambda_policy_warning) {
      std::fprintf(stderr,
                   "warning: the trained policy never changes its action with the price feature; "
                   "training quality is questionable\n");
    }
    std::printf("%zu runs -> %s (config hash %016llx)\n", sweep.runs.size(),
                sweep.summary_path.c_str(), static_cast<unsigned long long>(sweep.config_hash));
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
