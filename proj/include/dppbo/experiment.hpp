#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dppbo/diagnostics.hpp"
#include "dppbo/objectives.hpp"
#include "dppbo/strategies.hpp"

namespace dppbo {

// One configuration-driven sweep: multi-seed runs across strategies and
// batch sizes on a single objective.
struct ExperimentConfig {
  std::string objective = "branin";
  std::vector<int> resolution = {50, 50};
  int extra_points = 0;
  std::uint64_t grid_seed = 0;
  double noise_sigma = -1.0;  // observation noise; < 0 selects the default

  std::vector<std::string> strategies = {"bucb",        "b_est",          "ucb_dpp_max",
                                         "est_dpp_max", "ucb_dpp_sample", "est_dpp_sample"};
  std::vector<int> batch_sizes = {5, 10};
  int iterations = 30;
  int seeds = 50;
  std::uint64_t base_seed = 20240101;

  double delta = 0.1;
  double noise_var = 1.0;  // GP model noise sigma^2
  double signal_variance = 1.0;
  std::vector<double> lengthscales = {1.0};

  double cprime = 1.0;
  int t_init = 0;
  int exact_sampler_cap = 200;
  int kernel_build_cap = 600;
  long mcmc_steps = 0;

  std::string out_dir = "results";
  int workers = 0;  // 0 = hardware concurrency
  bool emit_plots = false;
  bool log_scale = false;
  std::string recommendation = "posterior_mean";  // or "best_observed"
  bool collect_bounds = false;

  void validate() const;  // throws InputError with field paths
};

ExperimentConfig load_config(const std::string& path);       // JSON file
ExperimentConfig parse_config(const std::string& json_text);  // JSON text

struct ResultRow {
  std::string objective;
  std::string strategy;
  int batch_size = 0;
  std::uint64_t seed = 0;
  int iteration = 0;
  double immediate_regret = 0.0;
  double cumulative_regret = 0.0;
  double wall_time_ms = 0.0;
};

struct MedianRow {
  std::string objective;
  std::string strategy;
  int batch_size = 0;
  int iteration = 0;
  double median_immediate_regret = 0.0;
  double median_cumulative_regret = 0.0;
};

struct CellError {
  std::string strategy;
  int batch_size = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<MedianRow> medians;
  std::vector<CellError> errors;                 // failed cells, recorded not fatal
  std::vector<std::pair<std::string, BoundReport>> bounds;  // "strategy/B/seed" -> report
};

ResultTable run_experiment(const ExperimentConfig& cfg);

double median(std::vector<double> values);

// CSV schema: objective,strategy,batch_size,seed,iteration,immediate_regret,
// cumulative_regret,wall_time_ms; 17 significant digits; a sibling
// <name>.median.csv carries the per-iteration medians.
void emit_csv(const ResultTable& table, const std::string& path);
std::vector<ResultRow> parse_results_csv(const std::string& path);

// One SVG line chart per (objective, B): median immediate regret per
// iteration, one series per strategy.
void emit_charts(const ResultTable& table, const std::string& dir, bool log_scale, double log_floor = 1e-8);

void emit_bounds_csv(const ResultTable& table, const std::string& path);

}  // namespace dppbo
