#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace dppbo {

// Finite candidate domain. Point order is fixed for the life of a run;
// the row index is the point's identity everywhere in the library.
class DomainGrid {
 public:
  DomainGrid() = default;
  explicit DomainGrid(Eigen::MatrixXd points);  // rows are points

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  Eigen::VectorXd point(int i) const { return points_.row(i).transpose(); }
  const Eigen::MatrixXd& points() const { return points_; }

  Eigen::MatrixXd rows(const std::vector<int>& idx) const;

 private:
  Eigen::MatrixXd points_;
};

// Uniform lattice over a box, row-major (last dimension varies fastest).
DomainGrid lattice_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const std::vector<int>& resolution, std::size_t max_points = 1000000);

}  // namespace dppbo
