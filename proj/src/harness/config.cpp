#include "coexsim/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "coexsim/sim/engine.hpp"

namespace coexsim::harness {
namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value, const std::string& key, int line) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, "empty element in list for '" + key + "'");
    items.push_back(item);
  }
  if (items.empty()) fail(line, "empty list for '" + key + "'");
  return items;
}

template <typename T>
T parse_number(const std::string& value, const std::string& key, int line) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, out);
  if (result.ec != std::errc() || result.ptr != end) {
    fail(line, "invalid value '" + value + "' for '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, "invalid value '" + value + "' for '" + key + "' (use true or false)");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&, int)>;

template <typename T, typename Member>
Setter number_key(Member member) {
  return [member](ExperimentConfig& cfg, const std::string& v, const std::string& key, int line) {
    cfg.*member = parse_number<T>(v, key, line);
  };
}

template <typename Member>
Setter bool_key(Member member) {
  return [member](ExperimentConfig& cfg, const std::string& v, const std::string& key, int line) {
    cfg.*member = parse_bool(v, key, line);
  };
}

template <typename T, typename Member>
Setter list_key(Member member) {
  return [member](ExperimentConfig& cfg, const std::string& v, const std::string& key, int line) {
    std::vector<T> items;
    for (const auto& s : split_list(v, key, line)) items.push_back(parse_number<T>(s, key, line));
    cfg.*member = std::move(items);
  };
}

template <typename Member>
Setter string_key(Member member) {
  return [member](ExperimentConfig& cfg, const std::string& v, const std::string&, int) {
    cfg.*member = v;
  };
}

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"n_pc3", list_key<int>(&ExperimentConfig::n_pc3)},
      {"n_pc3_max", number_key<int>(&ExperimentConfig::n_pc3_max)},
      {"d_th_us", list_key<double>(&ExperimentConfig::d_th_us)},
      {"mode",
       [](ExperimentConfig& cfg, const std::string& v, const std::string&, int line) {
         try {
           cfg.mode = mode_from_string(v);
         } catch (const std::exception& e) {
           fail(line, e.what());
         }
       }},
      {"seeds", list_key<std::uint64_t>(&ExperimentConfig::seeds)},
      {"output_dir", string_key(&ExperimentConfig::output_dir)},
      {"slot_us", number_key<double>(&ExperimentConfig::slot_us)},
      {"sifs_us", number_key<double>(&ExperimentConfig::sifs_us)},
      {"tx_duration_us", number_key<double>(&ExperimentConfig::tx_duration_us)},
      {"boundary_period_us", number_key<double>(&ExperimentConfig::boundary_period_us)},
      {"pc1_defer_slots", number_key<std::uint32_t>(&ExperimentConfig::pc1_defer_slots)},
      {"pc3_defer_slots", number_key<std::uint32_t>(&ExperimentConfig::pc3_defer_slots)},
      {"pc1_cw_min_std", number_key<std::uint32_t>(&ExperimentConfig::pc1_cw_min_std)},
      {"pc3_cw_min_std", number_key<std::uint32_t>(&ExperimentConfig::pc3_cw_min_std)},
      {"step_us", number_key<std::uint64_t>(&ExperimentConfig::step_us)},
      {"steps_per_episode", number_key<std::uint64_t>(&ExperimentConfig::steps_per_episode)},
      {"beb_enabled", bool_key(&ExperimentConfig::beb_enabled)},
      {"joint_action", bool_key(&ExperimentConfig::joint_action)},
      {"single_class_pc1_cw", number_key<std::uint32_t>(&ExperimentConfig::single_class_pc1_cw)},
      {"initial_cw_pc1", number_key<std::uint32_t>(&ExperimentConfig::initial_cw_pc1)},
      {"initial_cw_pc3", number_key<std::uint32_t>(&ExperimentConfig::initial_cw_pc3)},
      {"fixed_cw_pc1", number_key<std::uint32_t>(&ExperimentConfig::fixed_cw_pc1)},
      {"fixed_cw_pc3", number_key<std::uint32_t>(&ExperimentConfig::fixed_cw_pc3)},
      {"metrics_window_steps", number_key<int>(&ExperimentConfig::metrics_window_steps)},
      {"per_step_jfi", bool_key(&ExperimentConfig::per_step_jfi)},
      {"lambda_max", number_key<double>(&ExperimentConfig::lambda_max)},
      {"eta_lambda", number_key<double>(&ExperimentConfig::eta_lambda)},
      {"t0_steps", number_key<int>(&ExperimentConfig::t0_steps)},
      {"lambda_fixed", number_key<double>(&ExperimentConfig::lambda_fixed)},
      {"episodes", number_key<int>(&ExperimentConfig::episodes)},
      {"train_steps_per_episode",
       number_key<std::uint64_t>(&ExperimentConfig::train_steps_per_episode)},
      {"train_d_th_us", number_key<double>(&ExperimentConfig::train_d_th_us)},
      {"epsilon_start", number_key<double>(&ExperimentConfig::epsilon_start)},
      {"epsilon_end", number_key<double>(&ExperimentConfig::epsilon_end)},
      {"epsilon_decay_fraction", number_key<double>(&ExperimentConfig::epsilon_decay_fraction)},
      {"gamma", number_key<double>(&ExperimentConfig::gamma)},
      {"learning_rate", number_key<double>(&ExperimentConfig::learning_rate)},
      {"target_update_steps", number_key<int>(&ExperimentConfig::target_update_steps)},
      {"batch_size", number_key<int>(&ExperimentConfig::batch_size)},
      {"buffer_capacity", number_key<std::uint64_t>(&ExperimentConfig::buffer_capacity)},
      {"train_populations", list_key<int>(&ExperimentConfig::train_populations)},
      {"train_seed", number_key<std::uint64_t>(&ExperimentConfig::train_seed)},
      {"checkpoint", string_key(&ExperimentConfig::checkpoint)},
      {"train_first", bool_key(&ExperimentConfig::train_first)},
  };
  return table;
}

sim::Tick tick_value(double us, const char* key) {
  if (!(us >= 0.0) || us != std::floor(us) || us > 1e12) {
    throw std::runtime_error(std::string(key) + " must be a whole non-negative microsecond count");
  }
  return static_cast<sim::Tick>(us);
}

void validate(const ExperimentConfig& cfg) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw std::runtime_error("config validation: " + message);
  };
  require(!cfg.n_pc3.empty(), "n_pc3 list is empty");
  for (const int n : cfg.n_pc3) require(n >= 1, "n_pc3 entries must be >= 1");
  require(cfg.n_pc3_max >= 1, "n_pc3_max must be >= 1");
  for (const int n : cfg.n_pc3) {
    require(n <= cfg.n_pc3_max, "n_pc3 entry " + std::to_string(n) + " exceeds n_pc3_max");
  }
  require(!cfg.d_th_us.empty(), "d_th_us list is empty");
  for (const double d : cfg.d_th_us) require(d > 0.0, "d_th_us entries must be > 0");
  require(!cfg.seeds.empty(), "seeds list is empty");
  require(!cfg.output_dir.empty(), "output_dir is empty");

  require(cfg.slot_us >= 1.0, "slot_us must be >= 1");
  require(cfg.tx_duration_us >= 1.0, "tx_duration_us must be >= 1");
  require(cfg.boundary_period_us >= 1.0, "boundary_period_us must be >= 1");
  require(cfg.sifs_us >= 0.0, "sifs_us must be >= 0");
  tick_value(cfg.slot_us, "slot_us");
  tick_value(cfg.sifs_us, "sifs_us");
  tick_value(cfg.tx_duration_us, "tx_duration_us");
  tick_value(cfg.boundary_period_us, "boundary_period_us");

  require(cfg.step_us >= 1, "step_us must be >= 1");
  require(cfg.steps_per_episode >= 1, "steps_per_episode must be >= 1");
  require(cfg.metrics_window_steps >= 1, "metrics_window_steps must be >= 1");

  require(cfg.lambda_max > 0.0, "lambda_max must be > 0");
  require(cfg.eta_lambda >= 0.0, "eta_lambda must be >= 0");
  require(cfg.t0_steps >= 1, "t0_steps must be >= 1");
  require(cfg.lambda_fixed >= 0.0 && cfg.lambda_fixed <= cfg.lambda_max,
          "lambda_fixed must lie in [0, lambda_max]");

  require(cfg.episodes >= 1, "episodes must be >= 1");
  require(cfg.train_steps_per_episode >= 1, "train_steps_per_episode must be >= 1");
  require(cfg.train_d_th_us > 0.0, "train_d_th_us must be > 0");
  require(cfg.epsilon_start >= 0.0 && cfg.epsilon_start <= 1.0, "epsilon_start outside [0,1]");
  require(cfg.epsilon_end >= 0.0 && cfg.epsilon_end <= 1.0, "epsilon_end outside [0,1]");
  require(cfg.epsilon_end <= cfg.epsilon_start, "epsilon_end must be <= epsilon_start");
  require(cfg.epsilon_decay_fraction > 0.0 && cfg.epsilon_decay_fraction <= 1.0,
          "epsilon_decay_fraction outside (0,1]");
  require(cfg.gamma >= 0.0 && cfg.gamma <= 1.0, "gamma outside [0,1]");
  require(cfg.learning_rate > 0.0, "learning_rate must be > 0");
  require(cfg.target_update_steps >= 1, "target_update_steps must be >= 1");
  require(cfg.batch_size >= 1, "batch_size must be >= 1");
  require(cfg.buffer_capacity >= static_cast<std::uint64_t>(cfg.batch_size),
          "buffer_capacity must be >= batch_size");
  require(!cfg.train_populations.empty(), "train_populations list is empty");
  for (const int n : cfg.train_populations) {
    require(n >= 1 && n <= cfg.n_pc3_max, "train_populations entries must lie in [1, n_pc3_max]");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt(items[i]);
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Qasal: return "qasal";
    case RunMode::PrimalDual: return "primal-dual";
    case RunMode::StaticCw: return "static-cw";
  }
  return "?";
}

RunMode mode_from_string(const std::string& text) {
  if (text == "qasal") return RunMode::Qasal;
  if (text == "primal-dual") return RunMode::PrimalDual;
  if (text == "static-cw") return RunMode::StaticCw;
  throw std::runtime_error("unknown mode '" + text +
                           "' (expected qasal, primal-dual, or static-cw)");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;

    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(line, "missing key before '='");

    const auto it = key_table().find(key);
    if (it == key_table().end()) fail(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(line, "duplicate key '" + key + "'");
    if (value.empty()) fail(line, "missing value for '" + key + "'");
    it->second(cfg, value, key, line);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  try {
    return parse_config(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  auto put = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  put("n_pc3", join(cfg.n_pc3));
  put("n_pc3_max", std::to_string(cfg.n_pc3_max));
  put("d_th_us", join(cfg.d_th_us));
  put("mode", to_string(cfg.mode));
  put("seeds", join(cfg.seeds));
  put("output_dir", cfg.output_dir);
  put("slot_us", fmt(cfg.slot_us));
  put("sifs_us", fmt(cfg.sifs_us));
  put("tx_duration_us", fmt(cfg.tx_duration_us));
  put("boundary_period_us", fmt(cfg.boundary_period_us));
  put("pc1_defer_slots", std::to_string(cfg.pc1_defer_slots));
  put("pc3_defer_slots", std::to_string(cfg.pc3_defer_slots));
  put("pc1_cw_min_std", std::to_string(cfg.pc1_cw_min_std));
  put("pc3_cw_min_std", std::to_string(cfg.pc3_cw_min_std));
  put("step_us", std::to_string(cfg.step_us));
  put("steps_per_episode", std::to_string(cfg.steps_per_episode));
  put("beb_enabled", cfg.beb_enabled ? "true" : "false");
  put("joint_action", cfg.joint_action ? "true" : "false");
  put("single_class_pc1_cw", std::to_string(cfg.single_class_pc1_cw));
  put("initial_cw_pc1", std::to_string(cfg.initial_cw_pc1));
  put("initial_cw_pc3", std::to_string(cfg.initial_cw_pc3));
  put("fixed_cw_pc1", std::to_string(cfg.fixed_cw_pc1));
  put("fixed_cw_pc3", std::to_string(cfg.fixed_cw_pc3));
  put("metrics_window_steps", std::to_string(cfg.metrics_window_steps));
  put("per_step_jfi", cfg.per_step_jfi ? "true" : "false");
  put("lambda_max", fmt(cfg.lambda_max));
  put("eta_lambda", fmt(cfg.eta_lambda));
  put("t0_steps", std::to_string(cfg.t0_steps));
  put("lambda_fixed", fmt(cfg.lambda_fixed));
  put("episodes", std::to_string(cfg.episodes));
  put("train_steps_per_episode", std::to_string(cfg.train_steps_per_episode));
  put("train_d_th_us", fmt(cfg.train_d_th_us));
  put("epsilon_start", fmt(cfg.epsilon_start));
  put("epsilon_end", fmt(cfg.epsilon_end));
  put("epsilon_decay_fraction", fmt(cfg.epsilon_decay_fraction));
  put("gamma", fmt(cfg.gamma));
  put("learning_rate", fmt(cfg.learning_rate));
  put("target_update_steps", std::to_string(cfg.target_update_steps));
  put("batch_size", std::to_string(cfg.batch_size));
  put("buffer_capacity", std::to_string(cfg.buffer_capacity));
  put("train_populations", join(cfg.train_populations));
  put("train_seed", std::to_string(cfg.train_seed));
  // Empty values do not parse, so an unset checkpoint is simply omitted.
  if (!cfg.checkpoint.empty()) put("checkpoint", cfg.checkpoint);
  put("train_first", cfg.train_first ? "true" : "false");
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  sim::Fnv1a64 hash;
  hash.update(canonical_text(cfg));
  return hash.value();
}

env::EnvProfile make_env_profile(const ExperimentConfig& cfg, int n_pc3, double d_th_us) {
  env::EnvProfile p;
  p.n_pc3 = n_pc3;
  p.n_pc3_max = cfg.n_pc3_max;
  p.d_th_us = d_th_us;
  p.step_ticks = cfg.step_us;
  p.steps_per_episode = cfg.steps_per_episode;

  const sim::Tick slot = tick_value(cfg.slot_us, "slot_us");
  const sim::Tick sifs = tick_value(cfg.sifs_us, "sifs_us");
  const sim::Tick tx = tick_value(cfg.tx_duration_us, "tx_duration_us");
  const sim::Tick period = tick_value(cfg.boundary_period_us, "boundary_period_us");
  p.pc1_timing = {slot, sifs, cfg.pc1_defer_slots, sifs, cfg.pc1_cw_min_std, tx, period};
  p.pc3_timing = {slot, sifs, cfg.pc3_defer_slots, sifs, cfg.pc3_cw_min_std, tx, period};

  p.beb_enabled = cfg.beb_enabled;
  p.joint_action = cfg.joint_action;
  p.single_class_pc1_cw = cfg.single_class_pc1_cw;
  p.initial_cw_pc1 = cfg.initial_cw_pc1;
  p.initial_cw_pc3 = cfg.initial_cw_pc3;
  if (cfg.mode == RunMode::StaticCw) {
    // No learner: the standard maxima act as fixed caps for the usual
    // doubling dynamics (or as pinned windows when beb_enabled is off).
    p.initial_cw_pc1 = cfg.fixed_cw_pc1;
    p.initial_cw_pc3 = cfg.fixed_cw_pc3;
  }
  p.metrics_window_steps = cfg.metrics_window_steps;
  p.per_step_jfi = cfg.per_step_jfi;
  p.lambda_max = cfg.lambda_max;
  return p;
}

env::EnvProfile make_train_profile(const ExperimentConfig& cfg) {
  auto p = make_env_profile(cfg, cfg.train_populations.front(), cfg.train_d_th_us);
  p.steps_per_episode = cfg.train_steps_per_episode;
  return p;
}

agent::TrainSchedule make_schedule(const ExperimentConfig& cfg) {
  agent::TrainSchedule s;
  s.episodes = cfg.episodes;
  s.epsilon_start = cfg.epsilon_start;
  s.epsilon_end = cfg.epsilon_end;
  s.epsilon_decay_fraction = cfg.epsilon_decay_fraction;
  s.gamma = cfg.gamma;
  s.learning_rate = cfg.learning_rate;
  s.target_update_steps = cfg.target_update_steps;
  s.batch_size = cfg.batch_size;
  s.buffer_capacity = cfg.buffer_capacity;
  s.populations = cfg.train_populations;
  return s;
}

agent::DualConfig make_dual(const ExperimentConfig& cfg) {
  return {cfg.eta_lambda, cfg.lambda_max, cfg.t0_steps};
}

}  // namespace coexsim::harness
