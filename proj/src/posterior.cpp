#include "dppbo/posterior.hpp"

#include <cmath>
#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

namespace {
double clamp_var(double v) { return v > 0.0 ? v : 0.0; }
}  // namespace

PosteriorState::PosteriorState(KernelParams params, double noise_var)
    : params_(std::move(params)), noise_var_(noise_var) {
  params_.validate();
  if (!(noise_var_ > 0.0)) throw InputError("posterior: noise variance must be positive");
  inputs_.resize(0, params_.input_dim());
  targets_.resize(0);
  chol_.resize(0, 0);
  alpha_.resize(0);
}

Eigen::VectorXd PosteriorState::solve_cross(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd k_vec = kernel_cross(params_, inputs_, x.transpose());
  return chol_.triangularView<Eigen::Lower>().solve(k_vec);
}

PosteriorState PosteriorState::extended(const Eigen::Ref<const Eigen::VectorXd>& x, double y, bool stale) const {
  if (x.size() != params_.input_dim()) throw InputError("posterior update: point dimension mismatch");
  const int n = size();
  PosteriorState next(*this);
  next.inputs_.conservativeResize(n + 1, Eigen::NoChange);
  next.inputs_.row(n) = x.transpose();
  next.targets_.conservativeResize(n + 1);
  next.targets_[n] = y;

  Eigen::VectorXd l(n);
  if (n > 0) l = solve_cross(x);
  const double kxx = kernel_eval(params_, x, x);
  const double base = kxx + noise_var_ - (n > 0 ? l.squaredNorm() : 0.0);

  // Rank-one factor extension; on breakdown, retry with growing jitter.
  double diag = base;
  double jitter = 1e-10 * params_.signal_variance;
  int attempts = 0;
  while (!(diag > 0.0) && attempts < 3) {
    diag = base + jitter;
    jitter *= 10.0;
    ++attempts;
  }
  if (!(diag > 0.0)) {
    throw NumericalError("posterior update: factor extension lost positive definiteness (noise variance too small)");
  }

  next.chol_.conservativeResize(n + 1, n + 1);
  if (n > 0) {
    next.chol_.topLeftCorner(n, n) = chol_;
    next.chol_.block(n, 0, 1, n) = l.transpose();
    next.chol_.block(0, n, n, 1).setZero();
  }
  next.chol_(n, n) = std::sqrt(diag);

  const Eigen::VectorXd w = next.chol_.triangularView<Eigen::Lower>().solve(next.targets_);
  next.alpha_ = next.chol_.transpose().triangularView<Eigen::Upper>().solve(w);
  next.mean_stale_ = mean_stale_ || stale;
  return next;
}

PosteriorState PosteriorState::updated(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const {
  return extended(x, y, false);
}

PosteriorState PosteriorState::hallucinated(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  // Placeholder target: any value gives the same variance/covariance.
  return extended(x, 0.0, true);
}

std::pair<double, double> PosteriorState::mean_var(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (mean_stale_) throw StaleMeanError("posterior mean read after hallucinated update");
  if (x.size() != params_.input_dim()) throw InputError("posterior query: point dimension mismatch");
  const double kxx = kernel_eval(params_, x, x);
  if (size() == 0) return {0.0, kxx};
  const Eigen::VectorXd k_vec = kernel_cross(params_, inputs_, x.transpose());
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k_vec);
  const double mean = k_vec.dot(alpha_);
  return {mean, clamp_var(kxx - v.squaredNorm())};
}

double PosteriorState::variance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != params_.input_dim()) throw InputError("posterior query: point dimension mismatch");
  const double kxx = kernel_eval(params_, x, x);
  if (size() == 0) return kxx;
  return clamp_var(kxx - solve_cross(x).squaredNorm());
}

double PosteriorState::cov(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& x2) const {
  const double kxy = kernel_eval(params_, x, x2);
  if (size() == 0) return kxy;
  return kxy - solve_cross(x).dot(solve_cross(x2));
}

PosteriorSurface::PosteriorSurface(const PosteriorState& state, const DomainGrid& grid)
    : grid_(&grid),
      params_(state.params()),
      noise_var_(state.noise_var()),
      mean_stale_(state.mean_stale()) {
  if (grid.dim() != params_.input_dim()) throw InputError("surface: grid dimension mismatch");
  const int n = state.size();
  const int m = grid.size();
  if (n > 0) {
    const Eigen::MatrixXd cross = kernel_cross(params_, state.inputs(), grid.points());
    v_ = state.factor().triangularView<Eigen::Lower>().solve(cross);
    const Eigen::VectorXd w = state.factor().triangularView<Eigen::Lower>().solve(state.targets());
    mu_ = v_.transpose() * w;
    var_ = (Eigen::VectorXd::Constant(m, params_.signal_variance) - v_.colwise().squaredNorm().transpose())
               .cwiseMax(0.0);
  } else {
    v_.resize(0, m);
    mu_ = Eigen::VectorXd::Zero(m);
    var_ = Eigen::VectorXd::Constant(m, params_.signal_variance);
  }
}

const Eigen::VectorXd& PosteriorSurface::mean() const {
  if (mean_stale_) throw StaleMeanError("surface mean read from a hallucinated state");
  return mu_;
}

void PosteriorSurface::override_mean(Eigen::VectorXd mu) {
  if (mu.size() != grid_->size()) throw InputError("surface: mean override size mismatch");
  mu_ = std::move(mu);
  mean_stale_ = false;
}

void PosteriorSurface::hallucinate(int grid_index) {
  const int m = grid_->size();
  if (grid_index < 0 || grid_index >= m) throw InputError("surface: hallucination index out of range");
  const Eigen::VectorXd x = grid_->point(grid_index);
  // current covariance row of the hallucinated point against the grid
  Eigen::VectorXd c = kernel_cross(params_, x.transpose(), grid_->points()).transpose();
  if (v_.rows() > 0) c.noalias() -= v_.transpose() * v_.col(grid_index);
  const double s = std::sqrt(var_[grid_index] + noise_var_);
  const Eigen::RowVectorXd w = (c / s).transpose();
  v_.conservativeResize(v_.rows() + 1, Eigen::NoChange);
  v_.row(v_.rows() - 1) = w;
  var_ = (var_ - w.transpose().cwiseAbs2()).cwiseMax(0.0);
}

double PosteriorSurface::cov(int i, int j) const {
  double c = kernel_eval(params_, grid_->point(i), grid_->point(j));
  if (v_.rows() > 0) c -= v_.col(i).dot(v_.col(j));
  return c;
}

Eigen::MatrixXd PosteriorSurface::cov_block(const std::vector<int>& idx) const {
  const Eigen::Index r = static_cast<Eigen::Index>(idx.size());
  const Eigen::MatrixXd pts = grid_->rows(idx);
  Eigen::MatrixXd block = kernel_gram(params_, pts);
  if (v_.rows() > 0) {
    Eigen::MatrixXd vi(v_.rows(), r);
    for (Eigen::Index j = 0; j < r; ++j) vi.col(j) = v_.col(idx[static_cast<std::size_t>(j)]);
    block.noalias() -= vi.transpose() * vi;
  }
  block = 0.5 * (block + block.transpose()).eval();
  return block;
}

}  // namespace dppbo
