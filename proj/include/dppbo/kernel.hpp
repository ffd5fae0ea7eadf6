#pragma once

#include <Eigen/Dense>

namespace dppbo {

// Squared-exponential (ARD) kernel hyper-parameters:
//   k(x, y) = signal_variance * exp(-0.5 * sum_d (x_d - y_d)^2 / l_d^2)
struct KernelParams {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;  // one per input dimension

  KernelParams() = default;
  KernelParams(double sv, Eigen::VectorXd ls);

  int input_dim() const { return static_cast<int>(lengthscales.size()); }
  double signal_stddev() const;
  void validate() const;
};

double kernel_eval(const KernelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

// Cross-kernel matrix [k(a_i, b_j)] for row-stacked point sets (n x d each).
Eigen::MatrixXd kernel_cross(const KernelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b);

// Symmetric Gram matrix over one point set.
Eigen::MatrixXd kernel_gram(const KernelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& pts);

}  // namespace dppbo
