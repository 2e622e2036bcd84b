#include "coexsim/harness/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "coexsim/agent/checkpoint.hpp"

namespace coexsim::harness {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string run_dir_name(int n_pc3, double d_th_us, std::uint64_t seed) {
  return "n" + std::to_string(n_pc3) + "_dth" + std::to_string(static_cast<long long>(d_th_us)) +
         "_seed" + std::to_string(seed);
}

int expected_input_dim(RunMode mode) {
  return mode == RunMode::Qasal ? env::kAugmentedDim : env::kObservationDim;
}

void check_model(const ExperimentConfig& cfg, const agent::QNetwork& net) {
  if (net.input_dim() != expected_input_dim(cfg.mode)) {
    throw std::runtime_error("model input width " + std::to_string(net.input_dim()) +
                             " does not match mode " + to_string(cfg.mode) + " (expected " +
                             std::to_string(expected_input_dim(cfg.mode)) + ")");
  }
  const int actions = cfg.joint_action ? env::kJointActionCount : mac::kCwActionCount;
  if (net.output_dim() != actions) {
    throw std::runtime_error("model action count " + std::to_string(net.output_dim()) +
                             " does not match the configured action space (" +
                             std::to_string(actions) + ")");
  }
}

}  // namespace

void write_step_csv(const std::vector<agent::StepRow>& rows, const std::string& path) {
  std::string out =
      "episode,step,jfi,step_delay_us,avg_delay_us,collision_frac,airtime_nru,airtime_wifi,"
      "lambda,action_pc1,action_pc3,reward\n";
  for (const auto& r : rows) {
    out += std::to_string(r.episode);
    out += ",";
    out += std::to_string(r.step);
    out += ",";
    out += fmt(r.jfi);
    out += ",";
    out += fmt(r.step_delay_us);
    out += ",";
    out += fmt(r.avg_delay_us);
    out += ",";
    out += fmt(r.collision_frac);
    out += ",";
    out += fmt(r.airtime_nru);
    out += ",";
    out += fmt(r.airtime_wifi);
    out += ",";
    out += fmt(r.lambda);
    out += ",";
    out += std::to_string(r.action_pc1);
    out += ",";
    out += std::to_string(r.action_pc3);
    out += ",";
    out += fmt(r.reward);
    out += "\n";
  }
  write_file(path, out);
}

void write_curve_csv(const std::vector<agent::CurveRow>& curve, const std::string& path) {
  std::string out =
      "episode,lambda,mean_reward,mean_jfi,mean_delay_us,constraint_violation_frac,epsilon,loss\n";
  for (const auto& r : curve) {
    out += std::to_string(r.episode);
    out += ",";
    out += fmt(r.lambda);
    out += ",";
    out += fmt(r.mean_reward);
    out += ",";
    out += fmt(r.mean_jfi);
    out += ",";
    out += fmt(r.mean_delay_us);
    out += ",";
    out += fmt(r.violation_frac);
    out += ",";
    out += fmt(r.epsilon);
    out += ",";
    out += fmt(r.loss);
    out += "\n";
  }
  write_file(path, out);
}

agent::TrainResult run_training(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.mode == RunMode::StaticCw) {
    throw std::runtime_error("static-cw mode has no learner; nothing to train");
  }
  fs::create_directories(out_dir);
  const auto profile = make_train_profile(cfg);
  const auto schedule = make_schedule(cfg);
  const auto dual = make_dual(cfg);

  auto result = cfg.mode == RunMode::Qasal
                    ? agent::train_qasal(profile, schedule, dual, cfg.train_seed)
                    : agent::train_primal_dual(profile, schedule, dual, cfg.train_seed);
  agent::save_checkpoint(result.net, out_dir + "/model.ckpt");
  write_curve_csv(result.curve, out_dir + "/curve.csv");
  if (!result.lambda_trace.empty()) {
    std::string trace = "epoch,lambda\n";
    for (std::size_t i = 0; i < result.lambda_trace.size(); ++i) {
      trace += std::to_string(i) + "," + fmt(result.lambda_trace[i]) + "\n";
    }
    write_file(out_dir + "/lambda_trace.csv", trace);
  }
  return result;
}

RunSummary run_point(const ExperimentConfig& cfg, const agent::QNetwork* net, double lambda_fixed,
                     int n_pc3, double d_th_us, std::uint64_t seed, const std::string& run_dir) {
  fs::create_directories(run_dir);
  const auto profile = make_env_profile(cfg, n_pc3, d_th_us);
  env::CoexEnv env(profile, seed);
  env.set_trace_recording(true);
  const auto dual = make_dual(cfg);

  agent::ExecutionResult result;
  switch (cfg.mode) {
    case RunMode::Qasal:
      result = agent::execute_qasal(*net, env, dual, cfg.steps_per_episode);
      break;
    case RunMode::PrimalDual:
      result = agent::execute_primal_dual(*net, env, lambda_fixed, dual, cfg.steps_per_episode);
      break;
    case RunMode::StaticCw:
      result = agent::execute_static(env, dual, cfg.steps_per_episode);
      break;
  }

  write_step_csv(result.rows, run_dir + "/steps.csv");
  write_file(run_dir + "/config.txt", canonical_text(cfg) + "run_n_pc3 = " +
                                          std::to_string(n_pc3) + "\nrun_d_th_us = " +
                                          fmt(d_th_us) + "\nrun_seed = " + std::to_string(seed) +
                                          "\n");

  RunSummary summary;
  summary.n_pc3 = n_pc3;
  summary.d_th_us = d_th_us;
  summary.mode = cfg.mode;
  summary.seed = seed;
  summary.trace_hash = result.trace_hash;
  summary.violation_fraction = result.violation_fraction;
  summary.final_avg_delay_us = result.final_avg_delay_us;
  summary.mean_jfi = result.mean_jfi;
  if (!result.rows.empty()) {
    summary.final_jfi = result.rows.back().jfi;
    double sum = 0.0;
    const std::size_t half = result.rows.size() / 2;
    for (std::size_t i = half; i < result.rows.size(); ++i) {
      sum += result.rows[i].step_delay_us;
    }
    summary.delay_last_half_us = sum / static_cast<double>(result.rows.size() - half);
    double peak = 0.0, last = 0.0;
    for (const auto& r : result.rows) {
      peak = std::max(peak, r.lambda);
      last = r.lambda;
    }
    if (!result.lambda_trace.empty()) {
      for (const double l : result.lambda_trace) peak = std::max(peak, l);
      last = result.lambda_trace.back();
    }
    summary.lambda_peak = peak;
    summary.lambda_final = last;
  }
  return summary;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  write_file(cfg.output_dir + "/config.snapshot", canonical_text(cfg));

  SweepResult sweep;
  sweep.config_hash = config_hash(cfg);

  // Learning modes need a model: an explicit checkpoint, or inline training.
  agent::QNetwork model(1, {}, 1);
  const agent::QNetwork* net = nullptr;
  double lambda_fixed = cfg.lambda_fixed;
  if (cfg.mode != RunMode::StaticCw) {
    if (!cfg.checkpoint.empty()) {
      if (!fs::exists(cfg.checkpoint)) {
        throw std::runtime_error("checkpoint '" + cfg.checkpoint +
                                 "' not found; run the train command first, set train_first = "
                                 "true, or fix the path");
      }
      model = agent::load_checkpoint(cfg.checkpoint);
    } else if (cfg.train_first) {
      auto trained = run_training(cfg, cfg.output_dir);
      model = std::move(trained.net);
      if (cfg.mode == RunMode::PrimalDual && !trained.lambda_trace.empty()) {
        lambda_fixed = trained.lambda_trace.back();
      }
      sweep.lambda_policy_warning =
          cfg.mode == RunMode::Qasal && !trained.lambda_changes_policy;
    } else {
      throw std::runtime_error("mode " + to_string(cfg.mode) +
                               " needs a trained model: set checkpoint = <path> or train_first = "
                               "true");
    }
    check_model(cfg, model);
    net = &model;
  }

  for (const int n : cfg.n_pc3) {
    for (const double d : cfg.d_th_us) {
      for (const std::uint64_t seed : cfg.seeds) {
        const std::string run_dir =
            cfg.output_dir + "/runs/" + run_dir_name(n, d, seed);
        sweep.runs.push_back(run_point(cfg, net, lambda_fixed, n, d, seed, run_dir));
      }
    }
  }

  sweep.summary_path = cfg.output_dir + "/summary.csv";
  emit_summary(sweep.runs, sweep.summary_path);
  return sweep;
}

void emit_summary(const std::vector<RunSummary>& summaries, const std::string& path) {
  if (summaries.empty()) throw std::invalid_argument("no run summaries to aggregate");

  std::string out =
      "n_pc3,d_th_us,mode,seed_count,mean_delay_us,se_delay_us,mean_jfi,se_jfi,violation_frac\n";

  // Group by (population, threshold) in first-seen order.
  std::vector<std::pair<int, double>> keys;
  for (const auto& s : summaries) {
    const std::pair<int, double> key{s.n_pc3, s.d_th_us};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }

  auto mean_se = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= n;
    double se = 0.0;
    if (xs.size() > 1) {
      double var = 0.0;
      for (const double x : xs) var += (x - mean) * (x - mean);
      se = std::sqrt(var / (n - 1.0)) / std::sqrt(n);
    }
    return std::pair<double, double>{mean, se};
  };

  for (const auto& [n, d] : keys) {
    std::vector<double> delays, jfis, violations;
    RunMode mode = RunMode::Qasal;
    for (const auto& s : summaries) {
      if (s.n_pc3 != n || s.d_th_us != d) continue;
      delays.push_back(s.delay_last_half_us);
      jfis.push_back(s.final_jfi);
      violations.push_back(s.violation_fraction);
      mode = s.mode;
    }
    const auto [d_mean, d_se] = mean_se(delays);
    const auto [j_mean, j_se] = mean_se(jfis);
    const auto [v_mean, v_se] = mean_se(violations);
    (void)v_se;
    out += std::to_string(n) + "," + fmt(d) + "," + to_string(mode) + "," +
           std::to_string(delays.size()) + "," + fmt(d_mean) + "," + fmt(d_se) + "," +
           fmt(j_mean) + "," + fmt(j_se) + "," + fmt(v_mean) + "\n";
  }
  write_file(path, out);
}

}  // namespace coexsim::harness
