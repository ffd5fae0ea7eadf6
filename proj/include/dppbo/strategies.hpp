#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dppbo/acquisition.hpp"
#include "dppbo/dpp.hpp"
#include "dppbo/posterior.hpp"
#include "dppbo/rng.hpp"

namespace dppbo {

enum class Algorithm { Bucb, BEst, UcbDppMax, EstDppMax, UcbDppSample, EstDppSample };

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_name(Algorithm a);
AcqRule algorithm_rule(Algorithm a);
bool algorithm_is_dpp(Algorithm a);

struct StrategyConfig {
  Algorithm algorithm = Algorithm::UcbDppSample;
  int batch_size = 5;         // B >= 2 in the batched regime; 1 allowed for sequential baselines
  double delta = 0.1;
  double noise_var = 1.0;     // GP noise sigma^2
  double cprime = 1.0;        // regret multiplier C' >= 1
  int t_init = 0;             // two-stage initialization budget
  int exact_sampler_cap = 200;   // largest ground set sampled spectrally
  int kernel_build_cap = 600;    // largest region for which K_{t,1} is materialized
  long mcmc_steps = 0;           // 0 = default 10 m k ln(m)

  void validate() const;
};

struct BatchDecision {
  std::vector<int> indices;         // B domain indices, first = acquisition point
  std::vector<int> relevance;       // relevance-region domain indices (DPP strategies)
  double beta = 0.0;                // beta used for the first point
  std::optional<DppKernel> kernel;  // K_{t,1}, when materialized
  // hallucinated stddev of each pick at selection time, for lemma monitors
  std::vector<double> pick_stddev;
};

// Count of evaluations whose true values are available at inner step t.
long fb_map(long t, int batch_size);

// Sequential baseline: frozen-mean, hallucinated-variance batch.
// `state` holds exactly the truly observed data (mu_{fb[t]}).
BatchDecision select_batch_bucb(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                                AcqRule rule);
// Same selection with the frozen mean surface supplied by the caller.
BatchDecision select_batch_bucb_with_mean(const Eigen::VectorXd& frozen_mean, const PosteriorState& state,
                                          const DomainGrid& grid, const StrategyConfig& cfg, AcqRule rule);

// Uncertainty-sampling warm-up: T_init variance-greedy picks, all evaluated,
// returning the refreshed posterior and the (index, y) pairs queried.
std::pair<PosteriorState, std::vector<std::pair<int, double>>> two_stage_init(
    const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
    const std::function<double(int)>& evaluate);

// R_t^+ = {x : mu(x) + 2 sqrt(beta_next) sigma(x) >= y*}, where y* is the
// best lower confidence bound at level beta_lcb.
std::vector<int> relevance_region(const PosteriorSurface& surface, double beta_lcb, double beta_next);
std::vector<int> relevance_region(const PosteriorState& state, const DomainGrid& grid, double beta_lcb,
                                  double beta_next);

// K_{t,1} = I + sigma^{-2} [k_{t,1}(p_i, p_j)] over the region points;
// `surface` must already include the hallucinated first batch point.
DppKernel build_dpp_kernel(const PosteriorSurface& surface, const std::vector<int>& region, double noise_var);
DppKernel build_dpp_kernel(const PosteriorState& state_after_first, const std::vector<int>& region,
                           const DomainGrid& grid, double noise_var);

enum class DppMode { Max, Sample };

// DPP strategy: acquisition point, relevance region, DPP kernel, then B-1
// points by greedy maximization or k-DPP sampling. `outer_t` is the 1-based
// outer iteration (full batches observed so far).
BatchDecision select_batch_dpp(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                               AcqRule rule, DppMode mode, int outer_t, Rng& rng);
BatchDecision select_batch_dpp_with_mean(const Eigen::VectorXd& frozen_mean, const PosteriorState& state,
                                         const DomainGrid& grid, const StrategyConfig& cfg, AcqRule rule,
                                         DppMode mode, int outer_t, Rng& rng);

// Dispatch on cfg.algorithm; DPP modes draw from rng, batched modes ignore it.
BatchDecision select_batch(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                           int outer_t, Rng& rng);

}  // namespace dppbo
