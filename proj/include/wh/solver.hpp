#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wh/kernel.hpp"
#include "wh/spaces.hpp"

namespace wh {

// Nystrom discretization of the convolution operator on [0, T]:
// A(i, j) = w_j K(t_i - t_j) with composite trapezoid weights.
struct DiscretizedOperator {
  double T = 0;
  int n = 0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd weights;

  bool is_real() const;
};

DiscretizedOperator discretize(const KernelSpec& kernel, double T, int n);

// f = A phi*, the manufactured right-hand side.
GridFunction manufacture_rhs(const DiscretizedOperator& A, const GridFunction& phi_star);

struct Regularization {
  enum class Kind { TsvdThreshold, TsvdRank, Tikhonov };
  Kind kind = Kind::TsvdThreshold;
  double threshold = 1e-8;  // relative to sigma_max (TsvdThreshold)
  int rank = 0;             // kept directions (TsvdRank)
  double parameter = 0.0;   // damping (Tikhonov)
};

struct SolveResult {
  GridFunction solution;
  double residual_norm = 0;  // ||A x - f||, recomputed by direct multiplication
  std::vector<double> singular_values;
  Regularization regularization;
  int estimated_null_dim = 0;
  bool null_dim_confident = false;
};

SolveResult solve_regularized(const DiscretizedOperator& A, const GridFunction& f,
                              const Regularization& reg = {});

struct NullSpaceEstimate {
  int count = 0;
  bool confident = false;  // low confidence when no clean spectral gap exists
  std::vector<GridFunction> basis;
};

// Counts singular values below threshold_ratio * sigma_max; the count is
// confident only when an order-of-magnitude gap separates dropped from kept.
// Heuristic: compact first-kind spectra accumulate at 0 without a gap.
NullSpaceEstimate estimate_null_dim(const DiscretizedOperator& A, double threshold_ratio);

}  // namespace wh
