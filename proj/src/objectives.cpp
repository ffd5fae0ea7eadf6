#include "dppbo/objectives.hpp"

#include <cmath>
#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

ObjectiveId objective_from_string(const std::string& name) {
  if (name == "branin") return ObjectiveId::Branin;
  if (name == "cosines") return ObjectiveId::Cosines;
  if (name == "hartmann6") return ObjectiveId::Hartmann6;
  throw InputError("unknown objective: " + name);
}

std::string objective_name(ObjectiveId id) {
  switch (id) {
    case ObjectiveId::Branin: return "branin";
    case ObjectiveId::Cosines: return "cosines";
    case ObjectiveId::Hartmann6: return "hartmann6";
  }
  throw InputError("unknown objective enum");
}

double branin_negated(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != 2) throw InputError("branin: expects 2-d input");
  const double a = 1.0;
  const double b = 5.1 / (4.0 * M_PI * M_PI);
  const double c = 5.0 / M_PI;
  const double r = 6.0;
  const double s = 10.0;
  const double t = 1.0 / (8.0 * M_PI);
  const double x1 = x[0], x2 = x[1];
  const double term = x2 - b * x1 * x1 + c * x1 - r;
  return -(a * term * term + s * (1.0 - t) * std::cos(x1) + s);
}

double cosine_mixture(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != 2) throw InputError("cosines: expects 2-d input");
  const double u = 1.6 * x[0] - 0.5;
  const double v = 1.6 * x[1] - 0.5;
  return 1.0 - (u * u + v * v - 0.3 * std::cos(3.0 * M_PI * u) - 0.3 * std::cos(3.0 * M_PI * v));
}

double hartmann6_negated(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != 6) throw InputError("hartmann6: expects 6-d input");
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                 {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                 {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                 {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
  static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double diff = x[j] - p[i][j];
      inner += a[i][j] * diff * diff;
    }
    total += alpha[i] * std::exp(-inner);
  }
  return total;  // already a maximization after negating the standard form
}

void objective_box(ObjectiveId id, Eigen::VectorXd& lower, Eigen::VectorXd& upper) {
  switch (id) {
    case ObjectiveId::Branin:
      lower = Eigen::Vector2d(-5.0, 0.0);
      upper = Eigen::Vector2d(10.0, 15.0);
      return;
    case ObjectiveId::Cosines:
      lower = Eigen::Vector2d(0.0, 0.0);
      upper = Eigen::Vector2d(1.0, 1.0);
      return;
    case ObjectiveId::Hartmann6:
      lower = Eigen::VectorXd::Zero(6);
      upper = Eigen::VectorXd::Ones(6);
      return;
  }
  throw InputError("unknown objective enum");
}

namespace {

double eval_by_id(ObjectiveId id, const Eigen::Ref<const Eigen::VectorXd>& x) {
  switch (id) {
    case ObjectiveId::Branin: return branin_negated(x);
    case ObjectiveId::Cosines: return cosine_mixture(x);
    case ObjectiveId::Hartmann6: return hartmann6_negated(x);
  }
  throw InputError("unknown objective enum");
}

// Stratified (Latin-hypercube style) extra points: each dimension gets an
// independent permutation of n strata with uniform jitter inside each.
Eigen::MatrixXd stratified_points(int n, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, Rng& rng) {
  const int d = static_cast<int>(lower.size());
  Eigen::MatrixXd pts(n, d);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      std::swap(perm[static_cast<std::size_t>(i)], perm[rng.uniform_index(static_cast<std::size_t>(i) + 1)]);
    }
    for (int i = 0; i < n; ++i) {
      const double cell = (perm[static_cast<std::size_t>(i)] + rng.uniform01()) / n;
      pts(i, k) = lower[k] + (upper[k] - lower[k]) * cell;
    }
  }
  return pts;
}

}  // namespace

ObjectiveSpec::ObjectiveSpec(ObjectiveId id, std::vector<int> resolution, double noise_sigma, int extra_points,
                             std::uint64_t grid_seed)
    : id_(id) {
  objective_box(id, lower_, upper_);
  if (static_cast<int>(resolution.size()) == 1 && lower_.size() > 1) {
    resolution.assign(static_cast<std::size_t>(lower_.size()), resolution[0]);
  }
  DomainGrid lattice = lattice_grid(lower_, upper_, resolution);
  if (extra_points > 0) {
    Rng rng(derive_seed(grid_seed, {label_hash("grid"), label_hash(objective_name(id))}));
    const Eigen::MatrixXd extra = stratified_points(extra_points, lower_, upper_, rng);
    Eigen::MatrixXd all(lattice.size() + extra_points, lattice.dim());
    all.topRows(lattice.size()) = lattice.points();
    all.bottomRows(extra_points) = extra;
    grid_ = DomainGrid(std::move(all));
  } else {
    grid_ = std::move(lattice);
  }

  values_.resize(grid_.size());
  optimum_index_ = 0;
  for (int i = 0; i < grid_.size(); ++i) {
    values_[i] = eval_by_id(id_, grid_.point(i));
    if (values_[i] > values_[optimum_index_]) optimum_index_ = i;
  }
  optimum_value_ = values_[optimum_index_];
  grid_min_ = values_.minCoeff();
  noise_sigma_ = noise_sigma >= 0.0 ? noise_sigma : 0.1 * grid_range();
}

double ObjectiveSpec::evaluate_noiseless(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower_.size()) throw InputError("objective: input dimension mismatch");
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x[k] < lower_[k] - 1e-12 || x[k] > upper_[k] + 1e-12) {
      throw InputError("objective: input outside the canonical box");
    }
  }
  return eval_by_id(id_, x);
}

double ObjectiveSpec::evaluate_noisy(const Eigen::Ref<const Eigen::VectorXd>& x, Rng& rng) const {
  const double f = evaluate_noiseless(x);
  return noise_sigma_ > 0.0 ? f + rng.normal(0.0, noise_sigma_) : f;
}

double ObjectiveSpec::evaluate_noisy(int grid_index, Rng& rng) const {
  const double f = values_[grid_index];
  return noise_sigma_ > 0.0 ? f + rng.normal(0.0, noise_sigma_) : f;
}

}  // namespace dppbo
