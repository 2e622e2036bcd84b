#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coexsim/agent/dual.hpp"
#include "coexsim/agent/trainer.hpp"
#include "coexsim/env/coex_env.hpp"

namespace coexsim::harness {

enum class RunMode { Qasal, PrimalDual, StaticCw };

std::string to_string(RunMode mode);
RunMode mode_from_string(const std::string& text);

/// Everything an experiment needs, with defaults matching the reference
/// scenario. Parsed from a flat `key = value` file ('#' comments, commas for
/// lists); unknown or duplicate keys are rejected with the line number.
struct ExperimentConfig {
  // Sweep axes: one high-priority NR-U transmitter against each PC3
  // population, crossed with latency budgets and seeds.
  std::vector<int> n_pc3 = {5, 10, 15, 20, 25};
  int n_pc3_max = 50;
  std::vector<double> d_th_us = {1000.0, 2000.0, 3000.0};
  RunMode mode = RunMode::Qasal;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "runs";

  // MAC timing (shared grid; per-class defer and standard windows).
  double slot_us = 9.0;
  double sifs_us = 16.0;
  double tx_duration_us = 500.0;
  double boundary_period_us = 500.0;
  std::uint32_t pc1_defer_slots = 1;
  std::uint32_t pc3_defer_slots = 3;
  std::uint32_t pc1_cw_min_std = 3;
  std::uint32_t pc3_cw_min_std = 15;

  // Decision-step wrapper.
  std::uint64_t step_us = 2500;
  std::uint64_t steps_per_episode = 8000;
  bool beb_enabled = true;
  bool joint_action = true;
  std::uint32_t single_class_pc1_cw = 7;
  std::uint32_t initial_cw_pc1 = 7;
  std::uint32_t initial_cw_pc3 = 63;
  std::uint32_t fixed_cw_pc1 = 63;    // static-cw mode windows (caps, or pins with BEB off)
  std::uint32_t fixed_cw_pc3 = 1023;
  int metrics_window_steps = 10;
  bool per_step_jfi = false;

  // Constraint price dynamics.
  double lambda_max = 10.0;
  double eta_lambda = 0.1;
  int t0_steps = 5;
  double lambda_fixed = 0.0;  // baseline execution price when loading an external model

  // Training.
  int episodes = 300;
  std::uint64_t train_steps_per_episode = 8000;
  double train_d_th_us = 2000.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double epsilon_decay_fraction = 0.8;
  double gamma = 0.99;
  double learning_rate = 1e-4;
  int target_update_steps = 500;
  int batch_size = 16;
  std::uint64_t buffer_capacity = 100000;
  std::vector<int> train_populations = {5, 15, 25};
  std::uint64_t train_seed = 1;

  std::string checkpoint;    // trained model to execute; empty = none
  bool train_first = false;  // train inline before executing/sweeping
};

/// Parse + validate config text. Errors carry the offending key and line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical serialization: every key in fixed order, full precision. Used
/// for run-directory snapshots and hashing, so identical configs produce
/// byte-identical artifacts.
std::string canonical_text(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Environment profile for one sweep point.
env::EnvProfile make_env_profile(const ExperimentConfig& cfg, int n_pc3, double d_th_us);
/// Environment profile used during training (population cycles per episode).
env::EnvProfile make_train_profile(const ExperimentConfig& cfg);
agent::TrainSchedule make_schedule(const ExperimentConfig& cfg);
agent::DualConfig make_dual(const ExperimentConfig& cfg);

}  // namespace coexsim::harness
