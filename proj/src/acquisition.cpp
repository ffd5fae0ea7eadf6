#include "dppbo/acquisition.hpp"

#include <cmath>
#include <limits>

#include "dppbo/errors.hpp"

namespace dppbo {

namespace {
constexpr double kSigmaFloor = 1e-12;  // below this a point counts as determined
constexpr double kMhatGapScale = 1e-6;
}  // namespace

void ConfidenceParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("confidence: delta must be in (0,1)");
  if (domain_size < 1) throw InputError("confidence: domain size must be >= 1");
  if (t < 1) throw InputError("confidence: iteration must be >= 1");
}

double beta_ucb(const ConfidenceParams& p) {
  p.validate();
  const double t = static_cast<double>(p.t);
  return 2.0 * std::log(static_cast<double>(p.domain_size) * t * t * M_PI * M_PI / (6.0 * p.delta));
}

double zeta(int t, double delta, int union_factor) {
  if (t < 1) throw InputError("zeta: iteration must be >= 1");
  if (union_factor != 1 && union_factor != 2) throw InputError("zeta: union_factor must be 1 or 2");
  const double td = static_cast<double>(t);
  const double denom = (union_factor == 2) ? 3.0 * delta : delta;
  return 2.0 * std::log(M_PI * M_PI * td * td / denom);
}

double est_mhat(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double signal_stddev,
                const ConfidenceParams& p) {
  if (mean.size() == 0 || mean.size() != stddev.size()) throw InputError("est_mhat: empty or mismatched surfaces");
  const double root_beta = std::sqrt(beta_ucb(p));
  const double ub = (mean + root_beta * stddev).maxCoeff();
  return ub + kMhatGapScale * signal_stddev;
}

double beta_est(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double mhat) {
  if (mean.size() == 0 || mean.size() != stddev.size()) throw InputError("beta_est: empty or mismatched surfaces");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    if (stddev[i] <= kSigmaFloor) continue;
    const double gap = mhat - mean[i];
    if (!(gap > 0.0)) throw InputError("beta_est: mhat must exceed the mean everywhere");
    best = std::min(best, gap / stddev[i]);
  }
  if (!std::isfinite(best)) throw DegeneratePosteriorError("beta_est: all points numerically determined");
  return best * best;
}

AcquisitionScores acquisition_scores(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double beta) {
  AcquisitionScores s;
  s.mean = mean;
  s.stddev = stddev;
  s.beta = beta;
  const double rb = std::sqrt(beta);
  s.upper = mean + rb * stddev;
  s.lower = mean - rb * stddev;
  return s;
}

int argmax_ucb(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev, double beta) {
  const double rb = std::sqrt(beta);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double score = mean[i] + rb * stddev[i];
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::pair<int, double> select_first_point(const PosteriorSurface& surface, AcqRule rule, const ConfidenceParams& p) {
  const Eigen::VectorXd& mu = surface.mean();
  const Eigen::VectorXd sd = surface.stddev();
  double beta;
  if (rule == AcqRule::Ucb) {
    beta = beta_ucb(p);
  } else {
    const double mhat = est_mhat(mu, sd, surface.params().signal_stddev(), p);
    beta = beta_est(mu, sd, mhat);
  }
  return {argmax_ucb(mu, sd, beta), beta};
}

std::pair<int, double> select_first_point(const PosteriorState& state, const DomainGrid& grid, AcqRule rule,
                                          const ConfidenceParams& p) {
  PosteriorSurface surface(state, grid);
  return select_first_point(surface, rule, p);
}

}  // namespace dppbo
