#include "dppbo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dppbo/errors.hpp"
#include "dppbo/posterior.hpp"

namespace dppbo {

double information_gain(const Eigen::MatrixXd& k_a, double noise_var) {
  if (k_a.rows() != k_a.cols()) throw InputError("information_gain: matrix must be square");
  if (k_a.size() == 0) return 0.0;
  const double scale = std::max(1.0, k_a.cwiseAbs().maxCoeff());
  if ((k_a - k_a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InputError("information_gain: matrix must be symmetric");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k_a.rows(), k_a.cols()) + k_a / noise_var;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InputError("information_gain: I + K/sigma^2 not positive definite (K not PSD)");
  }
  return llt.matrixLLT().diagonal().array().log().sum();
}

std::vector<double> greedy_gamma_curve(const DomainGrid& grid, const KernelParams& params, double noise_var,
                                       int t_budget) {
  if (t_budget < 0 || t_budget > grid.size()) throw InputError("greedy_gamma: budget out of range");
  PosteriorState state(params, noise_var);
  PosteriorSurface surface(state, grid);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(t_budget));
  double gain = 0.0;
  std::vector<char> taken(static_cast<std::size_t>(grid.size()), 0);
  for (int t = 0; t < t_budget; ++t) {
    int best = -1;
    double best_var = -1.0;
    for (int i = 0; i < grid.size(); ++i) {
      if (!taken[static_cast<std::size_t>(i)] && surface.variance()[i] > best_var) {
        best_var = surface.variance()[i];
        best = i;
      }
    }
    gain += 0.5 * std::log1p(best_var / noise_var);
    curve.push_back(gain);
    taken[static_cast<std::size_t>(best)] = 1;
    surface.hallucinate(best);
  }
  return curve;
}

double greedy_gamma(const DomainGrid& grid, const KernelParams& params, double noise_var, int t_budget) {
  const std::vector<double> curve = greedy_gamma_curve(grid, params, noise_var, t_budget);
  return curve.empty() ? 0.0 : curve.back();
}

void record_iteration(RegretTrace& trace, const BatchDecision& decision, const ObjectiveSpec& spec,
                      const std::function<double(int)>& posterior_mean_at, RecommendationRule rule,
                      const std::function<double(int)>& observed_value_at) {
  IterationRecord rec;
  rec.iteration = static_cast<int>(trace.iterations.size()) + 1;
  rec.indices = decision.indices;
  const double f_star = spec.optimum_value();
  double prev_cum = trace.iterations.empty() ? 0.0 : trace.iterations.back().cumulative_regret;
  for (int idx : decision.indices) {
    const double r = f_star - spec.evaluate_noiseless(idx);
    rec.simple_regret.push_back(std::max(0.0, r));
    prev_cum += std::max(0.0, r);
    trace.queried.push_back(idx);
  }
  rec.cumulative_regret = prev_cum;

  // recommendation over everything queried so far
  double best_score = -std::numeric_limits<double>::infinity();
  int best_idx = trace.queried.front();
  for (int idx : trace.queried) {
    const double score =
        rule == RecommendationRule::PosteriorMean ? posterior_mean_at(idx) : observed_value_at(idx);
    if (score > best_score) {
      best_score = score;
      best_idx = idx;
    }
  }
  rec.recommendation = best_idx;
  rec.immediate_regret = std::abs(spec.evaluate_noiseless(best_idx) - f_star);

  // Lemma monitor: the first point's deviation should not exceed the
  // smallest deviation in the previous batch.
  if (trace.last_batch_min_stddev >= 0.0 && !decision.pick_stddev.empty()) {
    if (decision.pick_stddev.front() > trace.last_batch_min_stddev + 1e-12) ++trace.lemma_sigma_violations;
  }
  if (!decision.pick_stddev.empty()) {
    trace.last_batch_min_stddev = *std::min_element(decision.pick_stddev.begin(), decision.pick_stddev.end());
  }

  trace.iterations.push_back(std::move(rec));
}

BoundReport bound_report(const RegretTrace& trace, const std::vector<double>& entropies,
                         const std::vector<double>& gamma_estimates, const StrategyConfig& cfg, int domain_size) {
  BoundReport report;
  const double log_term = std::log1p(1.0 / cfg.noise_var);
  report.c1 = 36.0 / log_term;
  report.c = 2.0 / log_term;
  report.lemma_sigma_violations = trace.lemma_sigma_violations;

  const int big_t = static_cast<int>(trace.iterations.size());
  const int b = cfg.batch_size;
  double entropy_sum = 0.0;
  for (int t = 1; t <= big_t; ++t) {
    BoundRow row;
    row.iteration = t;
    row.realized_cumulative = trace.iterations[static_cast<std::size_t>(t - 1)].cumulative_regret;
    const double gamma_tb =
        t - 1 < static_cast<int>(gamma_estimates.size()) ? gamma_estimates[static_cast<std::size_t>(t - 1)] : 0.0;
    const double beta_t = beta_ucb(ConfidenceParams{cfg.delta, domain_size, t});
    const double zeta_t = zeta(t, cfg.delta, 2);
    row.rhs_dpp_max = std::sqrt(report.c1 * t * b * beta_t * gamma_tb);
    row.rhs_est_dpp_max = std::sqrt(report.c1 * t * b * gamma_tb) * (std::sqrt(beta_t) + std::sqrt(zeta_t));
    if (t - 1 < static_cast<int>(entropies.size()) && entropies[static_cast<std::size_t>(t - 1)] >= 0.0) {
      row.entropy = entropies[static_cast<std::size_t>(t - 1)];
      entropy_sum += row.entropy;
    }
    const double bracket = gamma_tb - entropy_sum + b * std::log(static_cast<double>(domain_size));
    row.rhs_sample_sq = 2.0 * t * b * report.c1 * beta_t * bracket;
    row.sample_rhs_negative = row.rhs_sample_sq < 0.0;
    row.within_max_bound = row.realized_cumulative <= row.rhs_dpp_max;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace dppbo
