#include "dppbo/dpp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "dppbo/errors.hpp"

namespace dppbo {

namespace {
constexpr int kEnumerationCap = 25;
}

DppKernel::DppKernel(Eigen::MatrixXd k, std::vector<int> lbls) : matrix(std::move(k)), labels(std::move(lbls)) {
  if (matrix.rows() != matrix.cols()) throw InputError("dpp kernel: matrix must be square");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InputError("dpp kernel: matrix must be symmetric");
  }
  matrix = 0.5 * (matrix + matrix.transpose()).eval();
  if (!labels.empty() && static_cast<int>(labels.size()) != size()) {
    throw InputError("dpp kernel: label count must match matrix size");
  }
}

void DppKernel::validate_psd() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
  const double norm = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-8 * norm) {
    throw InputError("dpp kernel: matrix is not positive semidefinite");
  }
}

void for_each_subset(int m, int k, const std::function<void(const SubsetSample&)>& fn) {
  if (k < 0 || k > m) return;
  SubsetSample s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    fn(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++s[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
}

double det_principal(const Eigen::MatrixXd& k, const SubsetSample& s) {
  const Eigen::Index r = static_cast<Eigen::Index>(s.size());
  if (r == 0) return 1.0;
  Eigen::MatrixXd sub(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) sub(i, j) = k(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
  }
  return sub.partialPivLu().determinant();
}

double logdet_psd(const Eigen::MatrixXd& mat) {
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

namespace {

void check_enumeration_size(const DppKernel& kernel, int k) {
  if (kernel.size() > kEnumerationCap) {
    throw CapacityError("k-DPP enumeration: ground set larger than the cap of 25");
  }
  if (k < 0 || k > kernel.size()) throw InputError("k-DPP: subset size out of range");
}

// all k-subset determinants (clamped at 0) and their sum
std::pair<std::vector<double>, double> enumerate_dets(const DppKernel& kernel, int k) {
  std::vector<double> dets;
  double total = 0.0;
  for_each_subset(kernel.size(), k, [&](const SubsetSample& s) {
    const double d = std::max(0.0, det_principal(kernel.matrix, s));
    dets.push_back(d);
    total += d;
  });
  return {std::move(dets), total};
}

}  // namespace

double kdpp_prob(const DppKernel& kernel, const SubsetSample& s) {
  check_enumeration_size(kernel, static_cast<int>(s.size()));
  const int k = static_cast<int>(s.size());
  double total = 0.0;
  for_each_subset(kernel.size(), k, [&](const SubsetSample& sub) { total += std::max(0.0, det_principal(kernel.matrix, sub)); });
  if (!(total > 0.0)) throw InfeasibleError("kdpp_prob: all k-subset determinants vanish");
  return std::max(0.0, det_principal(kernel.matrix, s)) / total;
}

double elementary_symmetric(const Eigen::VectorXd& eigenvalues, int k) {
  const int m = static_cast<int>(eigenvalues.size());
  if (k < 0 || k > m) throw InputError("elementary_symmetric: k out of range");
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j = std::min(k, i + 1); j >= 1; --j) {
      e[static_cast<std::size_t>(j)] += eigenvalues[i] * e[static_cast<std::size_t>(j - 1)];
    }
  }
  return e[static_cast<std::size_t>(k)];
}

SubsetSample kdpp_sample_exact(const DppKernel& kernel, int k, Rng& rng) {
  const int m = kernel.size();
  if (k < 0 || k > m) throw InputError("kdpp_sample_exact: subset size out of range");
  if (k == 0) return {};

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel.matrix);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double lam_max = lam.maxCoeff();
  int rank = 0;
  for (int i = 0; i < m; ++i) {
    if (lam[i] > 1e-12 * std::max(1.0, lam_max)) ++rank;
  }
  if (rank < k) throw InfeasibleError("kdpp_sample_exact: kernel rank below requested subset size");

  // e[j][i] = e_j(lam_0 .. lam_{i-1})
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k + 1, m + 1);
  e.row(0).setOnes();
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= k; ++j) e(j, i) = e(j, i - 1) + lam[i - 1] * e(j - 1, i - 1);
  }

  // Phase 1: pick k eigenvector indices with probability proportional to
  // the product of their eigenvalues.
  std::vector<int> chosen_eigs;
  int remaining = k;
  for (int i = m; i >= 1 && remaining > 0; --i) {
    double p;
    if (i == remaining) {
      p = 1.0;
    } else if (e(remaining, i) <= 0.0) {
      continue;
    } else {
      p = lam[i - 1] * e(remaining - 1, i - 1) / e(remaining, i);
    }
    if (rng.uniform01() < p) {
      chosen_eigs.push_back(i - 1);
      --remaining;
    }
  }
  if (remaining != 0) throw InfeasibleError("kdpp_sample_exact: eigenvalue selection failed");

  // Phase 2: projection DPP over the chosen eigenvectors.
  Eigen::MatrixXd v(m, k);
  for (int c = 0; c < k; ++c) v.col(c) = es.eigenvectors().col(chosen_eigs[static_cast<std::size_t>(c)]);

  SubsetSample out;
  int cols = k;
  while (cols > 0) {
    const Eigen::VectorXd weights = v.leftCols(cols).rowwise().squaredNorm();
    const double total = weights.sum();
    double u = rng.uniform01() * total;
    int p = m - 1;
    for (int i = 0; i < m; ++i) {
      u -= weights[i];
      if (u <= 0.0) {
        p = i;
        break;
      }
    }
    out.push_back(p);
    if (cols == 1) break;
    // eliminate the column with the largest component at p
    int c_star = 0;
    v.row(p).head(cols).cwiseAbs().maxCoeff(&c_star);
    const Eigen::VectorXd vc = v.col(c_star) / v(p, c_star);
    v.col(c_star) = v.col(cols - 1);
    --cols;
    for (int c = 0; c < cols; ++c) v.col(c) -= vc * v(p, c);
    // re-orthonormalize the remaining columns (QR keeps the column space)
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v.leftCols(cols));
    v.leftCols(cols) = qr.householderQ() * Eigen::MatrixXd::Identity(m, cols);
  }
  std::sort(out.begin(), out.end());
  return out;
}

long kdpp_mcmc_default_steps(int m, int k) {
  const double lm = std::log(std::max(2, m));
  return static_cast<long>(10.0 * m * std::max(1, k) * lm) + 1;
}

SubsetSample kdpp_sample_mcmc_fn(const std::function<double(int, int)>& entry, int m, int k, long steps,
                                 SubsetSample init, Rng& rng) {
  if (k < 0 || k > m) throw InputError("kdpp_sample_mcmc: subset size out of range");
  if (k == 0) return {};
  if (static_cast<int>(init.size()) != k) throw InputError("kdpp_sample_mcmc: bad initial subset size");

  SubsetSample cur = std::move(init);
  std::vector<char> in_set(static_cast<std::size_t>(m), 0);
  for (int i : cur) in_set[static_cast<std::size_t>(i)] = 1;

  auto subset_det = [&](const SubsetSample& s) {
    Eigen::MatrixXd sub(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = a; b < k; ++b) {
        const double val = entry(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
        sub(a, b) = val;
        sub(b, a) = val;
      }
    }
    return sub.partialPivLu().determinant();
  };

  double det_cur = subset_det(cur);
  if (!(det_cur > 0.0)) throw InfeasibleError("kdpp_sample_mcmc: initial subset has non-positive determinant");
  if (m == k) {
    std::sort(cur.begin(), cur.end());
    return cur;
  }

  std::vector<int> outside;
  outside.reserve(static_cast<std::size_t>(m - k));
  for (int i = 0; i < m; ++i) {
    if (!in_set[static_cast<std::size_t>(i)]) outside.push_back(i);
  }

  for (long step = 0; step < steps; ++step) {
    const std::size_t ii = rng.uniform_index(cur.size());
    const std::size_t oi = rng.uniform_index(outside.size());
    SubsetSample prop = cur;
    prop[ii] = outside[oi];
    const double det_prop = subset_det(prop);
    const double ratio = det_prop / det_cur;
    if (ratio >= 1.0 || rng.uniform01() < ratio) {
      std::swap(cur[ii], outside[oi]);
      det_cur = det_prop;
    }
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

SubsetSample kdpp_sample_mcmc(const DppKernel& kernel, int k, long steps, Rng& rng) {
  SubsetSample init = kdpp_greedy_max(kernel, k);
  if (steps == 0) {
    std::sort(init.begin(), init.end());
    return init;
  }
  const Eigen::MatrixXd& mat = kernel.matrix;
  return kdpp_sample_mcmc_fn([&mat](int i, int j) { return mat(i, j); }, kernel.size(), k, steps, std::move(init),
                             rng);
}

SubsetSample kdpp_greedy_max(const DppKernel& kernel, int k) {
  const int m = kernel.size();
  if (k < 0 || k > m) throw InputError("kdpp_greedy_max: subset size out of range");
  // Returned in pick order (not sorted): callers that compare against the
  // sequential variance-greedy selection need the sequence.
  SubsetSample out;
  out.reserve(static_cast<std::size_t>(k));
  Eigen::VectorXd gain = kernel.matrix.diagonal();
  Eigen::MatrixXd cond(k, m);  // conditioning rows of selected elements
  std::vector<char> taken(static_cast<std::size_t>(m), 0);

  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (gain[i] > best_gain) {
        best_gain = gain[i];
        best = i;
      }
    }
    out.push_back(best);
    taken[static_cast<std::size_t>(best)] = 1;
    if (step == k - 1) break;
    if (!(best_gain > 0.0)) {
      // rank exhausted: remaining marginal gains are all zero, fill by index
      for (int i = 0; i < m && static_cast<int>(out.size()) < k; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) {
          out.push_back(i);
          taken[static_cast<std::size_t>(i)] = 1;
        }
      }
      break;
    }
    Eigen::RowVectorXd row = kernel.matrix.row(best);
    if (step > 0) row.noalias() -= cond.topRows(step).col(best).transpose() * cond.topRows(step);
    row /= std::sqrt(best_gain);
    cond.row(step) = row;
    gain = (gain - row.transpose().cwiseAbs2()).cwiseMax(0.0);
  }
  return out;
}

double kdpp_entropy(const DppKernel& kernel, int k) {
  check_enumeration_size(kernel, k);
  auto [dets, total] = enumerate_dets(kernel, k);
  if (!(total > 0.0)) throw InfeasibleError("kdpp_entropy: all k-subset determinants vanish");
  double h = 0.0;
  for (double d : dets) {
    if (d <= 0.0) continue;
    const double p = d / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

}  // namespace dppbo
