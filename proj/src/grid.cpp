#include "dppbo/grid.hpp"

#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

DomainGrid::DomainGrid(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() == 0 || points_.cols() == 0) throw InputError("grid: empty point set");
}

Eigen::MatrixXd DomainGrid::rows(const std::vector<int>& idx) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), points_.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = points_.row(idx[i]);
  return out;
}

DomainGrid lattice_grid(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                        const std::vector<int>& resolution, std::size_t max_points) {
  const int d = static_cast<int>(lower.size());
  if (upper.size() != d || static_cast<int>(resolution.size()) != d) {
    throw InputError("lattice_grid: box/resolution dimension mismatch");
  }
  std::size_t total = 1;
  for (int r : resolution) {
    if (r < 2) throw InputError("lattice_grid: resolution must be >= 2 per dimension");
    total *= static_cast<std::size_t>(r);
    if (total > max_points) throw CapacityError("lattice_grid: grid exceeds the point cap");
  }
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(total), d);
  std::vector<int> counter(static_cast<std::size_t>(d), 0);
  for (std::size_t i = 0; i < total; ++i) {
    for (int k = 0; k < d; ++k) {
      pts(static_cast<Eigen::Index>(i), k) =
          lower[k] + (upper[k] - lower[k]) * counter[static_cast<std::size_t>(k)] / (resolution[static_cast<std::size_t>(k)] - 1);
    }
    // row-major increment: last dimension fastest
    for (int k = d - 1; k >= 0; --k) {
      if (++counter[static_cast<std::size_t>(k)] < resolution[static_cast<std::size_t>(k)]) break;
      counter[static_cast<std::size_t>(k)] = 0;
    }
  }
  return DomainGrid(std::move(pts));
}

}  // namespace dppbo
