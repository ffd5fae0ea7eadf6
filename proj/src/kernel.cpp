#include "dppbo/kernel.hpp"

#include <cmath>
#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

KernelParams::KernelParams(double sv, Eigen::VectorXd ls) : signal_variance(sv), lengthscales(std::move(ls)) {
  validate();
}

double KernelParams::signal_stddev() const { return std::sqrt(signal_variance); }

void KernelParams::validate() const {
  if (!(signal_variance > 0.0)) throw InputError("kernel: signal_variance must be positive");
  if (lengthscales.size() == 0) throw InputError("kernel: at least one lengthscale required");
  for (Eigen::Index d = 0; d < lengthscales.size(); ++d) {
    if (!(lengthscales[d] > 0.0)) throw InputError("kernel: lengthscales must be positive");
  }
}

double kernel_eval(const KernelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != params.input_dim() || y.size() != params.input_dim()) {
    throw InputError("kernel_eval: point dimension does not match lengthscale count");
  }
  const double q = ((x - y).array() / params.lengthscales.array()).square().sum();
  return params.signal_variance * std::exp(-0.5 * q);
}

Eigen::MatrixXd kernel_cross(const KernelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.cols() != params.input_dim() || b.cols() != params.input_dim()) {
    throw InputError("kernel_cross: point dimension does not match lengthscale count");
  }
  // Scale inputs by lengthscales, then use ||u-v||^2 = ||u||^2 + ||v||^2 - 2 u.v
  const Eigen::MatrixXd as = a * params.lengthscales.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd bs = b * params.lengthscales.cwiseInverse().asDiagonal();
  const Eigen::VectorXd an = as.rowwise().squaredNorm();
  const Eigen::VectorXd bn = bs.rowwise().squaredNorm();
  Eigen::MatrixXd sq = (-2.0 * as * bs.transpose());
  sq.colwise() += an;
  sq.rowwise() += bn.transpose();
  return params.signal_variance * (-0.5 * sq.array().max(0.0)).exp();
}

Eigen::MatrixXd kernel_gram(const KernelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& pts) {
  Eigen::MatrixXd g = kernel_cross(params, pts, pts);
  // enforce exact symmetry and diagonal
  g = 0.5 * (g + g.transpose()).eval();
  g.diagonal().setConstant(params.signal_variance);
  return g;
}

}  // namespace dppbo
