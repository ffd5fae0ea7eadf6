#include "dppbo/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "bucb") return Algorithm::Bucb;
  if (name == "b_est") return Algorithm::BEst;
  if (name == "ucb_dpp_max") return Algorithm::UcbDppMax;
  if (name == "est_dpp_max") return Algorithm::EstDppMax;
  if (name == "ucb_dpp_sample") return Algorithm::UcbDppSample;
  if (name == "est_dpp_sample") return Algorithm::EstDppSample;
  throw InputError("unknown algorithm: " + name);
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Bucb: return "bucb";
    case Algorithm::BEst: return "b_est";
    case Algorithm::UcbDppMax: return "ucb_dpp_max";
    case Algorithm::EstDppMax: return "est_dpp_max";
    case Algorithm::UcbDppSample: return "ucb_dpp_sample";
    case Algorithm::EstDppSample: return "est_dpp_sample";
  }
  throw InputError("unknown algorithm enum");
}

AcqRule algorithm_rule(Algorithm a) {
  switch (a) {
    case Algorithm::Bucb:
    case Algorithm::UcbDppMax:
    case Algorithm::UcbDppSample: return AcqRule::Ucb;
    default: return AcqRule::Est;
  }
}

bool algorithm_is_dpp(Algorithm a) { return a != Algorithm::Bucb && a != Algorithm::BEst; }

void StrategyConfig::validate() const {
  if (batch_size < 1) throw InputError("strategy: batch size must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("strategy: delta must be in (0,1)");
  if (!(noise_var > 0.0)) throw InputError("strategy: noise variance must be positive");
  if (!(cprime >= 1.0)) throw InputError("strategy: C' must be >= 1");
  if (t_init < 0) throw InputError("strategy: T_init must be >= 0");
  if (exact_sampler_cap < 1 || kernel_build_cap < 1) throw InputError("strategy: sampler caps must be >= 1");
  if (mcmc_steps < 0) throw InputError("strategy: MCMC step budget must be >= 0");
}

long fb_map(long t, int batch_size) {
  if (t < 1) throw InputError("fb_map: t must be >= 1");
  return ((t - 1) / batch_size) * batch_size;
}

namespace {

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > best_val) {
      best_val = v[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

// argmax of surface variance over `allowed` (nullptr = whole grid), skipping
// anything in `blocked`; ties resolved by lowest domain index.
int argmax_variance(const PosteriorSurface& surface, const std::vector<int>* allowed,
                    const std::vector<char>& blocked) {
  const Eigen::VectorXd& var = surface.variance();
  int best = -1;
  double best_val = -std::numeric_limits<double>::infinity();
  auto consider = [&](int i) {
    if (blocked[static_cast<std::size_t>(i)]) return;
    if (var[i] > best_val) {
      best_val = var[i];
      best = i;
    }
  };
  if (allowed != nullptr) {
    for (int i : *allowed) consider(i);
  } else {
    for (int i = 0; i < surface.domain_size(); ++i) consider(i);
  }
  return best;
}

BatchDecision bucb_core(PosteriorSurface& surface, int observed_count, const StrategyConfig& cfg, AcqRule rule) {
  const Eigen::VectorXd& mu = surface.mean();
  const double signal_sd = surface.params().signal_stddev();
  BatchDecision decision;
  for (int b = 1; b <= cfg.batch_size; ++b) {
    ConfidenceParams p{cfg.delta, surface.domain_size(), observed_count + b};
    const Eigen::VectorXd sd = surface.stddev();
    double beta;
    if (rule == AcqRule::Ucb) {
      beta = cfg.cprime * cfg.cprime * beta_ucb(p);
    } else {
      const double mhat = est_mhat(mu, sd, signal_sd, p);
      beta = cfg.cprime * cfg.cprime * beta_est(mu, sd, mhat);
    }
    const int idx = argmax_ucb(mu, sd, beta);
    if (b == 1) decision.beta = beta;
    decision.indices.push_back(idx);
    decision.pick_stddev.push_back(sd[idx]);
    if (b < cfg.batch_size) surface.hallucinate(idx);
  }
  return decision;
}

}  // namespace

BatchDecision select_batch_bucb(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                                AcqRule rule) {
  cfg.validate();
  PosteriorSurface surface(state, grid);
  return bucb_core(surface, state.size(), cfg, rule);
}

BatchDecision select_batch_bucb_with_mean(const Eigen::VectorXd& frozen_mean, const PosteriorState& state,
                                          const DomainGrid& grid, const StrategyConfig& cfg, AcqRule rule) {
  cfg.validate();
  PosteriorSurface surface(state, grid);
  surface.override_mean(frozen_mean);
  return bucb_core(surface, state.size(), cfg, rule);
}

std::pair<PosteriorState, std::vector<std::pair<int, double>>> two_stage_init(
    const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
    const std::function<double(int)>& evaluate) {
  cfg.validate();
  std::vector<std::pair<int, double>> queried;
  if (cfg.t_init == 0) return {state, queried};

  PosteriorSurface surface(state, grid);
  std::vector<char> blocked(static_cast<std::size_t>(grid.size()), 0);
  std::vector<int> picks;
  for (int i = 0; i < cfg.t_init; ++i) {
    const int idx = argmax_variance(surface, nullptr, blocked);
    picks.push_back(idx);
    surface.hallucinate(idx);
  }
  PosteriorState refreshed = state;
  for (int idx : picks) {
    const double y = evaluate(idx);
    refreshed = refreshed.updated(grid.point(idx), y);
    queried.emplace_back(idx, y);
  }
  return {refreshed, queried};
}

std::vector<int> relevance_region(const PosteriorSurface& surface, double beta_lcb, double beta_next) {
  if (!(beta_next >= 0.0) || !(beta_lcb >= 0.0)) throw InputError("relevance_region: beta must be non-negative");
  const Eigen::VectorXd& mu = surface.mean();
  const Eigen::VectorXd sd = surface.stddev();
  const Eigen::VectorXd lcb = mu - std::sqrt(beta_lcb) * sd;
  const double y_star = lcb[argmax_lowest(lcb)];
  const double w = 2.0 * std::sqrt(beta_next);
  std::vector<int> region;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] + w * sd[i] >= y_star) region.push_back(static_cast<int>(i));
  }
  return region;
}

std::vector<int> relevance_region(const PosteriorState& state, const DomainGrid& grid, double beta_lcb,
                                  double beta_next) {
  PosteriorSurface surface(state, grid);
  return relevance_region(surface, beta_lcb, beta_next);
}

DppKernel build_dpp_kernel(const PosteriorSurface& surface, const std::vector<int>& region, double noise_var) {
  if (region.empty()) throw InputError("build_dpp_kernel: empty region");
  Eigen::MatrixXd k = surface.cov_block(region) / noise_var;
  k.diagonal().array() += 1.0;
  return DppKernel(std::move(k), region);
}

DppKernel build_dpp_kernel(const PosteriorState& state_after_first, const std::vector<int>& region,
                           const DomainGrid& grid, double noise_var) {
  PosteriorSurface surface(state_after_first, grid);
  return build_dpp_kernel(surface, region, noise_var);
}

namespace {

BatchDecision dpp_core(PosteriorSurface& surface, const StrategyConfig& cfg, AcqRule rule, DppMode mode,
                       int outer_t, Rng& rng) {
  const Eigen::VectorXd& mu = surface.mean();
  const Eigen::VectorXd sd = surface.stddev();
  const double signal_sd = surface.params().signal_stddev();
  const int m = surface.domain_size();

  ConfidenceParams p{cfg.delta, m, outer_t};
  double beta_t, beta_next;
  if (rule == AcqRule::Ucb) {
    beta_t = beta_ucb(p);
    beta_next = beta_ucb(ConfidenceParams{cfg.delta, m, outer_t + 1});
  } else {
    const double mhat = est_mhat(mu, sd, signal_sd, p);
    beta_t = beta_est(mu, sd, mhat);
    // EST's adaptive beta has no closed-form advance to t+1; reuse the
    // current value for the region width.
    beta_next = beta_t;
  }

  BatchDecision decision;
  decision.beta = beta_t;
  const int first = argmax_ucb(mu, sd, beta_t);
  decision.indices.push_back(first);
  decision.pick_stddev.push_back(sd[first]);
  decision.relevance = relevance_region(surface, beta_t, beta_next);

  surface.hallucinate(first);

  // DPP candidates: the relevance region minus the already-chosen first point.
  std::vector<int> region;
  region.reserve(decision.relevance.size());
  for (int i : decision.relevance) {
    if (i != first) region.push_back(i);
  }

  const int need = cfg.batch_size - 1;
  std::vector<int> chosen;  // domain indices, in pick order

  if (static_cast<int>(region.size()) <= need) {
    chosen = region;  // forced: take the whole region, fill the rest globally
  } else if (static_cast<int>(region.size()) <= cfg.kernel_build_cap) {
    DppKernel kernel = build_dpp_kernel(surface, region, cfg.noise_var);
    SubsetSample rows;
    if (mode == DppMode::Max) {
      rows = kdpp_greedy_max(kernel, need);
    } else {
      try {
        if (kernel.size() <= cfg.exact_sampler_cap) {
          rows = kdpp_sample_exact(kernel, need, rng);
        } else {
          const long steps = cfg.mcmc_steps > 0 ? cfg.mcmc_steps : kdpp_mcmc_default_steps(kernel.size(), need);
          rows = kdpp_sample_mcmc(kernel, need, steps, rng);
        }
      } catch (const InfeasibleError&) {
        rows = kdpp_greedy_max(kernel, need);  // rank-deficient kernel: greedy fallback
      }
    }
    for (int r : rows) chosen.push_back(region[static_cast<std::size_t>(r)]);
    decision.kernel = std::move(kernel);
  } else if (mode == DppMode::Max) {
    // Large region: greedy DPP maximization == hallucinated variance-greedy
    // selection, so run it directly without materializing K_{t,1}.
    std::vector<char> blocked(static_cast<std::size_t>(m), 1);
    for (int i : region) blocked[static_cast<std::size_t>(i)] = 0;
    PosteriorSurface work = surface;
    for (int b = 0; b < need; ++b) {
      const int idx = argmax_variance(work, &region, blocked);
      chosen.push_back(idx);
      blocked[static_cast<std::size_t>(idx)] = 1;
      if (b < need - 1) work.hallucinate(idx);
    }
  } else {
    // Large region: swap-chain sampling against the implicit kernel.
    std::vector<char> blocked(static_cast<std::size_t>(m), 1);
    for (int i : region) blocked[static_cast<std::size_t>(i)] = 0;
    PosteriorSurface work = surface;
    SubsetSample init_rows;
    {
      std::vector<char> taken = blocked;
      std::vector<int> greedy;
      for (int b = 0; b < need; ++b) {
        const int idx = argmax_variance(work, &region, taken);
        greedy.push_back(idx);
        taken[static_cast<std::size_t>(idx)] = 1;
        if (b < need - 1) work.hallucinate(idx);
      }
      for (int g : greedy) {
        const auto it = std::lower_bound(region.begin(), region.end(), g);
        init_rows.push_back(static_cast<int>(it - region.begin()));
      }
    }
    const double inv_noise = 1.0 / cfg.noise_var;
    auto entry = [&surface, &region, inv_noise](int i, int j) {
      const double c = surface.cov(region[static_cast<std::size_t>(i)], region[static_cast<std::size_t>(j)]);
      return (i == j ? 1.0 : 0.0) + inv_noise * c;
    };
    const long steps =
        cfg.mcmc_steps > 0 ? cfg.mcmc_steps : kdpp_mcmc_default_steps(static_cast<int>(region.size()), need);
    const SubsetSample rows =
        kdpp_sample_mcmc_fn(entry, static_cast<int>(region.size()), need, steps, std::move(init_rows), rng);
    for (int r : rows) chosen.push_back(region[static_cast<std::size_t>(r)]);
  }

  // Record conditional stddevs in pick order, hallucinating as we go; this
  // also leaves `surface` conditioned for the global fill below.
  for (int idx : chosen) {
    decision.indices.push_back(idx);
    decision.pick_stddev.push_back(std::sqrt(surface.variance()[idx]));
    surface.hallucinate(idx);
  }

  if (static_cast<int>(decision.indices.size()) < cfg.batch_size) {
    std::vector<char> blocked(static_cast<std::size_t>(m), 0);
    for (int i : decision.indices) blocked[static_cast<std::size_t>(i)] = 1;
    while (static_cast<int>(decision.indices.size()) < cfg.batch_size) {
      const int idx = argmax_variance(surface, nullptr, blocked);
      if (idx < 0) {
        // grid smaller than the batch: repeat the last pick
        decision.indices.push_back(decision.indices.back());
        decision.pick_stddev.push_back(std::sqrt(surface.variance()[decision.indices.back()]));
        continue;
      }
      decision.indices.push_back(idx);
      decision.pick_stddev.push_back(std::sqrt(surface.variance()[idx]));
      blocked[static_cast<std::size_t>(idx)] = 1;
      surface.hallucinate(idx);
    }
  }
  return decision;
}

}  // namespace

BatchDecision select_batch_dpp(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                               AcqRule rule, DppMode mode, int outer_t, Rng& rng) {
  cfg.validate();
  PosteriorSurface surface(state, grid);
  return dpp_core(surface, cfg, rule, mode, outer_t, rng);
}

BatchDecision select_batch_dpp_with_mean(const Eigen::VectorXd& frozen_mean, const PosteriorState& state,
                                         const DomainGrid& grid, const StrategyConfig& cfg, AcqRule rule,
                                         DppMode mode, int outer_t, Rng& rng) {
  cfg.validate();
  PosteriorSurface surface(state, grid);
  surface.override_mean(frozen_mean);
  return dpp_core(surface, cfg, rule, mode, outer_t, rng);
}

BatchDecision select_batch(const PosteriorState& state, const DomainGrid& grid, const StrategyConfig& cfg,
                           int outer_t, Rng& rng) {
  const AcqRule rule = algorithm_rule(cfg.algorithm);
  switch (cfg.algorithm) {
    case Algorithm::Bucb:
    case Algorithm::BEst: return select_batch_bucb(state, grid, cfg, rule);
    case Algorithm::UcbDppMax:
    case Algorithm::EstDppMax: return select_batch_dpp(state, grid, cfg, rule, DppMode::Max, outer_t, rng);
    case Algorithm::UcbDppSample:
    case Algorithm::EstDppSample: return select_batch_dpp(state, grid, cfg, rule, DppMode::Sample, outer_t, rng);
  }
  throw InputError("unknown algorithm enum");
}

}  // namespace dppbo
