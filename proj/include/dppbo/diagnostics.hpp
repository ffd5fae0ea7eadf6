#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dppbo/grid.hpp"
#include "dppbo/kernel.hpp"
#include "dppbo/objectives.hpp"
#include "dppbo/strategies.hpp"

namespace dppbo {

// Regret accounting for one seeded run.
struct IterationRecord {
  int iteration = 0;                 // 1-based outer iteration
  std::vector<int> indices;          // queried domain indices
  std::vector<double> simple_regret; // per point, vs the grid optimum
  double cumulative_regret = 0.0;    // R_{tB}
  int recommendation = -1;           // domain index of the recommendation
  double immediate_regret = 0.0;     // |f(recommendation) - f(x*)|
};

struct RegretTrace {
  std::string algorithm;
  int batch_size = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  std::vector<int> queried;  // all queried domain indices, in order
  // monitored high-probability claims (logged, not asserted)
  long lemma_sigma_violations = 0;   // sigma_{t,1}(x_{t+1,1}) > min_b sigma_{t-1,b}(x_{t,b})
  double last_batch_min_stddev = -1.0;
};

enum class RecommendationRule { PosteriorMean, BestObserved };

// 1/2 ln det(I + K_A / noise_var), by triangular factorization.
double information_gain(const Eigen::MatrixXd& k_a, double noise_var);

// Greedy submodular lower bound on gamma_T = max_{|A|<=T} I(y_A; f_A);
// within (1 - 1/e) of the maximum.
double greedy_gamma(const DomainGrid& grid, const KernelParams& params, double noise_var, int t_budget);

// Cumulative greedy gains: entry t-1 is the greedy estimate of gamma_t.
std::vector<double> greedy_gamma_curve(const DomainGrid& grid, const KernelParams& params, double noise_var,
                                       int t_budget);

// Appends one outer iteration: simple regrets of the batch, cumulative
// regret, and the recommendation's immediate regret. `posterior_mean_at`
// gives the current posterior mean at a queried domain index.
void record_iteration(RegretTrace& trace, const BatchDecision& decision, const ObjectiveSpec& spec,
                      const std::function<double(int)>& posterior_mean_at,
                      RecommendationRule rule = RecommendationRule::PosteriorMean,
                      const std::function<double(int)>& observed_value_at = {});

// Informational regret-bound right-hand sides for one run.
struct BoundRow {
  int iteration = 0;
  double realized_cumulative = 0.0;
  double rhs_dpp_max = 0.0;          // sqrt(C1 t B beta_t gamma_tB) (UCB form)
  double rhs_est_dpp_max = 0.0;      // sqrt(C1 t B gamma_tB) (beta* + zeta)
  double rhs_sample_sq = 0.0;        // sampled-batch bound on R^2 (may be negative on tiny instances)
  bool sample_rhs_negative = false;
  double entropy = -1.0;             // H(DPP(K_{t,1})) when computable, else -1
  bool within_max_bound = true;
};

struct BoundReport {
  double c1 = 0.0;  // 36 / ln(1 + 1/noise_var)
  double c = 0.0;   // 2 / ln(1 + 1/noise_var)
  std::vector<BoundRow> rows;
  long lemma_sigma_violations = 0;
};

BoundReport bound_report(const RegretTrace& trace, const std::vector<double>& entropies,
                         const std::vector<double>& gamma_estimates, const StrategyConfig& cfg, int domain_size);

}  // namespace dppbo
