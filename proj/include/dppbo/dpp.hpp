#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dppbo/rng.hpp"

namespace dppbo {

// Symmetric PSD kernel over a finite ground set. `labels` maps row index
// back to the caller's domain index (identity when empty).
struct DppKernel {
  Eigen::MatrixXd matrix;
  std::vector<int> labels;

  DppKernel() = default;
  explicit DppKernel(Eigen::MatrixXd k, std::vector<int> labels = {});

  int size() const { return static_cast<int>(matrix.rows()); }
  // Full PSD check (eigendecomposition); meant for tests and debugging,
  // not the per-iteration hot path.
  void validate_psd() const;
};

// Sorted k-subset of ground-set row indices (0-based, strictly increasing).
using SubsetSample = std::vector<int>;

// Visits all k-subsets of {0..m-1} in lexicographic order.
void for_each_subset(int m, int k, const std::function<void(const SubsetSample&)>& fn);

double logdet_psd(const Eigen::MatrixXd& mat);      // -inf when singular
double det_principal(const Eigen::MatrixXd& k, const SubsetSample& s);

// Pr(S) = det(K_S) / sum_{|S'|=k} det(K_{S'}); exact enumeration, m <= 25.
double kdpp_prob(const DppKernel& k, const SubsetSample& s);

// e_k(eigenvalues) via the stable two-dimensional recurrence; e_0 = 1.
double elementary_symmetric(const Eigen::VectorXd& eigenvalues, int k);

// Spectral exact k-DPP sampler (eigenvector subset selection followed by
// sequential projection sampling).
SubsetSample kdpp_sample_exact(const DppKernel& kernel, int k, Rng& rng);

// Swap-chain MCMC: replace a uniform in-set element by a uniform out-of-set
// element, accept with min(1, det ratio). Initialized from the greedy
// maximizer; steps = 0 returns the initialization.
SubsetSample kdpp_sample_mcmc(const DppKernel& kernel, int k, long steps, Rng& rng);

// Same chain over an implicit kernel given by an entry callable; used when
// materializing the full matrix is too expensive.
SubsetSample kdpp_sample_mcmc_fn(const std::function<double(int, int)>& entry, int m, int k, long steps,
                                 SubsetSample init, Rng& rng);

// Default chain length for a ground set of size m: 10 * m * k * ln(m).
long kdpp_mcmc_default_steps(int m, int k);

// Greedy determinant maximization via incremental conditioning
// (conditional-variance updates); ties broken by lowest index.
SubsetSample kdpp_greedy_max(const DppKernel& kernel, int k);

// Shannon entropy of the k-DPP subset distribution, by exact enumeration.
double kdpp_entropy(const DppKernel& kernel, int k);

}  // namespace dppbo
