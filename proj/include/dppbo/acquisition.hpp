#pragma once

#include <Eigen/Dense>

#include "dppbo/posterior.hpp"

namespace dppbo {

enum class AcqRule { Ucb, Est };

struct ConfidenceParams {
  double delta = 0.1;   // in (0, 1)
  int domain_size = 1;  // |X|
  int t = 1;            // 1-based iteration

  void validate() const;
};

// Per-point confidence surfaces over the grid.
struct AcquisitionScores {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  Eigen::VectorXd upper;  // mean + sqrt(beta) * stddev
  Eigen::VectorXd lower;  // mean - sqrt(beta) * stddev
  double beta = 0.0;
};

// UCB schedule: 2 ln(|X| t^2 pi^2 / (6 delta)).
double beta_ucb(const ConfidenceParams& p);

// EST's zeta schedule. union_factor 1 is the sequential form
// 2 ln(pi^2 t^2 / delta); union_factor 2 is the batched form
// 2 ln(pi^2 t^2 / (3 delta)), which union-bounds over the extra
// pessimistic anchor point.
double zeta(int t, double delta, int union_factor);

// Upper estimate of the function maximum: max_x (mu + sqrt(beta_ucb) sigma)
// plus a small positive gap, so every EST ratio is strictly positive.
double est_mhat(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double signal_stddev,
                const ConfidenceParams& p);

// Adaptive EST beta: [min_x (mhat - mu(x)) / sigma(x)]^2, excluding
// numerically determined points (sigma <= 1e-12).
double beta_est(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double mhat);

AcquisitionScores acquisition_scores(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double beta);

// argmax of mean + sqrt(beta) * stddev, ties broken by lowest index
int argmax_ucb(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double beta);

// First batch point under UCB or EST; returns (index, beta used).
std::pair<int, double> select_first_point(const PosteriorState& state, const DomainGrid& grid, AcqRule rule,
                                          const ConfidenceParams& p);
std::pair<int, double> select_first_point(const PosteriorSurface& surface, AcqRule rule, const ConfidenceParams& p);

}  // namespace dppbo
