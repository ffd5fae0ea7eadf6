#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dppbo/grid.hpp"
#include "dppbo/kernel.hpp"

namespace dppbo {

// Exact GP posterior over noisy observations, maintained through a
// lower-triangular factor of (K_n + noise_var * I). Immutable value type:
// updates return new states.
//
// A hallucinated update appends a placeholder target. Variance and
// covariance of the result are exact (they do not depend on targets);
// the mean is marked stale and reading it throws.
class PosteriorState {
 public:
  PosteriorState(KernelParams params, double noise_var);

  int size() const { return static_cast<int>(targets_.size()); }
  bool mean_stale() const { return mean_stale_; }
  const KernelParams& params() const { return params_; }
  double noise_var() const { return noise_var_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  const Eigen::MatrixXd& factor() const { return chol_; }

  PosteriorState updated(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const;
  PosteriorState hallucinated(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // (mu_n(x), sigma_n^2(x)); throws StaleMeanError after hallucination.
  std::pair<double, double> mean_var(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // sigma_n^2(x), clamped at 0; valid on stale states.
  double variance(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // posterior covariance k_n(x, x2); valid on stale states.
  double cov(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x2) const;

 private:
  PosteriorState extended(const Eigen::Ref<const Eigen::VectorXd>& x, double y, bool stale) const;
  Eigen::VectorXd solve_cross(const Eigen::Ref<const Eigen::VectorXd>& x) const;  // L^{-1} k_n(x)

  KernelParams params_;
  double noise_var_;
  Eigen::MatrixXd inputs_;  // n x d
  Eigen::VectorXd targets_;
  Eigen::MatrixXd chol_;    // lower triangular, n x n
  Eigen::VectorXd alpha_;   // (K + noise I)^{-1} y
  bool mean_stale_ = false;
};

// Posterior mean/variance evaluated over a whole grid, with O(n * |X|)
// in-place hallucinated updates. The mean vector is frozen at construction
// (this is exactly the batched algorithms' "frozen mean" semantics); the
// variance vector tracks every hallucination.
class PosteriorSurface {
 public:
  PosteriorSurface(const PosteriorState& state, const DomainGrid& grid);

  const DomainGrid& grid() const { return *grid_; }
  const KernelParams& params() const { return params_; }
  double noise_var() const { return noise_var_; }
  int domain_size() const { return grid_->size(); }
  bool mean_stale() const { return mean_stale_; }

  const Eigen::VectorXd& mean() const;  // throws if stale and not overridden
  const Eigen::VectorXd& variance() const { return var_; }
  Eigen::VectorXd stddev() const { return var_.cwiseSqrt(); }

  void override_mean(Eigen::VectorXd mu);  // e.g. target-invariance tests
  void hallucinate(int grid_index);

  // current posterior covariance between grid points
  double cov(int i, int j) const;
  Eigen::MatrixXd cov_block(const std::vector<int>& idx) const;

 private:
  const DomainGrid* grid_;
  KernelParams params_;
  double noise_var_;
  Eigen::MatrixXd v_;    // rows: (observations + hallucinations), cols: grid; V = L^{-1} K(obs, grid)
  Eigen::VectorXd mu_;
  Eigen::VectorXd var_;
  bool mean_stale_;
};

}  // namespace dppbo
