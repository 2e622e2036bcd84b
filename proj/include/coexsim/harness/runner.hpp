#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coexsim/agent/executor.hpp"
#include "coexsim/agent/trainer.hpp"
#include "coexsim/harness/config.hpp"

namespace coexsim::harness {

/// Outcome of one (population, threshold, seed) execution, reproducible from
/// the config plus the seed alone.
struct RunSummary {
  int n_pc3 = 0;
  double d_th_us = 0.0;
  RunMode mode = RunMode::Qasal;
  std::uint64_t seed = 0;

  double delay_last_half_us = 0.0;  // mean per-step delay over the last half
  double final_avg_delay_us = 0.0;  // running mean at episode end
  double final_jfi = 0.0;           // cumulative fairness at episode end
  double mean_jfi = 0.0;
  double violation_fraction = 0.0;  // complete epochs with negative mean slack
  double lambda_final = 0.0;
  double lambda_peak = 0.0;
  std::uint64_t trace_hash = 0;
};

struct SweepResult {
  std::vector<RunSummary> runs;
  std::string summary_path;
  std::uint64_t config_hash = 0;
  bool lambda_policy_warning = false;  // trained net ignores the price feature
};

/// Trains per cfg.mode, writes model.ckpt and curve.csv into out_dir.
agent::TrainResult run_training(const ExperimentConfig& cfg, const std::string& out_dir);

/// Executes one sweep point and writes steps.csv + config.txt into run_dir.
/// `net` may be null in static-cw mode; lambda_fixed applies to the baseline.
RunSummary run_point(const ExperimentConfig& cfg, const agent::QNetwork* net, double lambda_fixed,
                     int n_pc3, double d_th_us, std::uint64_t seed, const std::string& run_dir);

/// Full Cartesian sweep (n_pc3 x d_th_us x seeds) with aggregate summary CSV.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Aggregate CSV: one row per (population, threshold), mean and standard
/// error across seeds.
void emit_summary(const std::vector<RunSummary>& summaries, const std::string& path);

void write_step_csv(const std::vector<agent::StepRow>& rows, const std::string& path);
void write_curve_csv(const std::vector<agent::CurveRow>& curve, const std::string& path);

}  // namespace coexsim::harness
