#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dppbo/grid.hpp"
#include "dppbo/rng.hpp"

namespace dppbo {

enum class ObjectiveId { Branin, Cosines, Hartmann6 };

ObjectiveId objective_from_string(const std::string& name);
std::string objective_name(ObjectiveId id);

// Synthetic benchmark on a discretized box. Everything is maximized:
// Branin-Hoo and Hartmann-6 are the negated standard minimization forms,
// the cosine mixture is maximized as-is. The optimum is the exact grid
// maximum of the noiseless function (computed by full sweep).
class ObjectiveSpec {
 public:
  // resolution: lattice points per dimension; extra_points: additional
  // seeded stratified points appended to the lattice (used to keep the
  // 6-d Hartmann domain tractable); noise_sigma < 0 selects the default
  // 0.1 * (grid range).
  ObjectiveSpec(ObjectiveId id, std::vector<int> resolution, double noise_sigma = -1.0, int extra_points = 0,
                std::uint64_t grid_seed = 0);

  ObjectiveId id() const { return id_; }
  const DomainGrid& grid() const { return grid_; }
  double noise_sigma() const { return noise_sigma_; }
  double optimum_value() const { return optimum_value_; }
  int optimum_index() const { return optimum_index_; }
  double grid_min() const { return grid_min_; }
  double grid_range() const { return optimum_value_ - grid_min_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  double evaluate_noiseless(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double evaluate_noiseless(int grid_index) const { return values_[grid_index]; }
  double evaluate_noisy(const Eigen::Ref<const Eigen::VectorXd>& x, Rng& rng) const;
  double evaluate_noisy(int grid_index, Rng& rng) const;

 private:
  ObjectiveId id_;
  DomainGrid grid_;
  Eigen::VectorXd values_;  // noiseless values over the grid
  double noise_sigma_;
  double optimum_value_;
  int optimum_index_;
  double grid_min_;
  Eigen::VectorXd lower_, upper_;
};

// Bare function evaluations (maximization orientation), exposed for oracles.
double branin_negated(const Eigen::Ref<const Eigen::VectorXd>& x);
double cosine_mixture(const Eigen::Ref<const Eigen::VectorXd>& x);
double hartmann6_negated(const Eigen::Ref<const Eigen::VectorXd>& x);

void objective_box(ObjectiveId id, Eigen::VectorXd& lower, Eigen::VectorXd& upper);

}  // namespace dppbo
