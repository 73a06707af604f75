#include "wh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wh {
namespace {

struct SvdParts {
  Eigen::MatrixXcd U, V;
  Eigen::VectorXd sigma;
};

// Real kernels get the much faster real decomposition.
SvdParts svd_of(const DiscretizedOperator& A) {
  if (A.is_real()) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A.matrix.real(),
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU().cast<cplx>(), svd.matrixV().cast<cplx>(),
            svd.singularValues()};
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.matrix,
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

Eigen::VectorXcd to_vector(const GridFunction& f) {
  Eigen::VectorXcd v(f.size());
  for (int j = 0; j < f.size(); ++j) v(j) = f[j];
  return v;
}

GridFunction to_grid(const Eigen::VectorXcd& v, double T, QuadRule rule) {
  std::vector<cplx> s(std::size_t(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) s[std::size_t(j)] = v(j);
  return GridFunction(T, std::move(s), rule);
}

// count + gap confidence shared by the estimator and the solve diagnostics
std::pair<int, bool> null_count(const Eigen::VectorXd& sigma, double threshold_ratio) {
  const Eigen::Index n = sigma.size();
  const double smax = sigma(0);
  if (!(smax > 0.0)) return {int(n), true};
  const double thr = threshold_ratio * smax;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sigma(i) < thr) ++count;
  if (count == 0 || count == n) return {count, false};
  const double largest_dropped = sigma(n - count);
  const double smallest_kept = sigma(n - count - 1);
  const bool gap = largest_dropped <= 0.0 || smallest_kept / largest_dropped >= 10.0;
  return {count, gap};
}

}  // namespace

bool DiscretizedOperator::is_real() const {
  return matrix.imag().cwiseAbs().maxCoeff() == 0.0;
}

DiscretizedOperator discretize(const KernelSpec& kernel, double T, int n) {
  if (kernel.level() != KernelLevel::K)
    throw std::invalid_argument("discretize expects a K-level kernel");
  if (n < 16) throw std::invalid_argument("discretization needs at least 16 nodes");
  if (!(T > 0.0)) throw std::invalid_argument("domain length must be positive");

  DiscretizedOperator A;
  A.T = T;
  A.n = n;
  const double h = T / double(n - 1);
  A.weights.resize(n);
  for (int j = 0; j < n; ++j)
    A.weights(j) = (j == 0 || j == n - 1) ? h / 2.0 : h;

  // evaluate the difference kernel once per lag
  std::vector<cplx> lag(std::size_t(2 * n - 1));
  for (int d = -(n - 1); d <= n - 1; ++d)
    lag[std::size_t(d + n - 1)] = kernel(h * d);

  // The diagonal carries the jump mean K(0) = (K(0+) + K(0-))/2; with nodes
  // at the jump this makes every interior row an exact trapezoid.  The t = 0
  // row then sees half the jump from outside the domain, an O(h) defect
  // confined to that node; the one-sided value would fix it but makes the
  // matrix exactly rank-deficient for one-sided kernels, which costs far
  // more in the regularized solve than the boundary defect does.
  A.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A.matrix(i, j) = A.weights(j) * lag[std::size_t(i - j + n - 1)];
  return A;
}

GridFunction manufacture_rhs(const DiscretizedOperator& A, const GridFunction& phi_star) {
  if (phi_star.size() != A.n || phi_star.T() != A.T)
    throw std::invalid_argument("grid mismatch between operator and phi*");
  const Eigen::VectorXcd f = A.matrix * to_vector(phi_star);
  return to_grid(f, A.T, phi_star.quadrature());
}

SolveResult solve_regularized(const DiscretizedOperator& A, const GridFunction& f,
                              const Regularization& reg) {
  if (f.size() != A.n || f.T() != A.T)
    throw std::invalid_argument("grid mismatch between operator and rhs");

  const SvdParts svd = svd_of(A);
  const Eigen::Index n = svd.sigma.size();
  const double smax = svd.sigma(0);

  Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(n);
  int kept = 0;
  switch (reg.kind) {
    case Regularization::Kind::TsvdThreshold: {
      const double thr = reg.threshold * smax;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (svd.sigma(i) > thr) {
          inv_sigma(i) = 1.0 / svd.sigma(i);
          ++kept;
        }
      }
      break;
    }
    case Regularization::Kind::TsvdRank: {
      const int rank = std::clamp(reg.rank, 0, int(n));
      for (Eigen::Index i = 0; i < rank; ++i) {
        if (svd.sigma(i) > 0.0) {
          inv_sigma(i) = 1.0 / svd.sigma(i);
          ++kept;
        }
      }
      break;
    }
    case Regularization::Kind::Tikhonov: {
      const double mu2 = reg.parameter * reg.parameter;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = svd.sigma(i);
        if (s > 0.0 || mu2 > 0.0) {
          inv_sigma(i) = s / (s * s + mu2);
          ++kept;
        }
      }
      break;
    }
  }
  if (kept == 0) throw AllModesDropped("regularization removed every singular direction");

  const Eigen::VectorXcd coeff = svd.U.adjoint() * to_vector(f);
  const Eigen::VectorXcd x = svd.V * (inv_sigma.cast<cplx>().asDiagonal() * coeff);

  SolveResult result{to_grid(x, A.T, f.quadrature()), 0.0, {}, reg, 0, false};
  result.residual_norm =
      to_grid(A.matrix * x - to_vector(f), A.T, f.quadrature()).norm();
  result.singular_values.assign(svd.sigma.data(), svd.sigma.data() + n);
  const double probe_ratio =
      reg.kind == Regularization::Kind::TsvdThreshold ? reg.threshold : 1e-8;
  const auto [count, confident] = null_count(svd.sigma, probe_ratio);
  result.estimated_null_dim = count;
  result.null_dim_confident = confident;
  return result;
}

NullSpaceEstimate estimate_null_dim(const DiscretizedOperator& A, double threshold_ratio) {
  const SvdParts svd = svd_of(A);
  const auto [count, confident] = null_count(svd.sigma, threshold_ratio);
  NullSpaceEstimate est;
  est.count = count;
  est.confident = confident;
  const Eigen::Index n = svd.sigma.size();
  for (Eigen::Index i = n - count; i < n; ++i)
    est.basis.push_back(to_grid(svd.V.col(i), A.T, QuadRule::Trapezoid));
  return est;
}

}  // namespace wh
