#pragma once

#include <vector>

#include "fedgame/matrix.hpp"

namespace fedgame {

struct LeastSquaresSolution {
  std::vector<double> coefficients;
  double residual_norm = 0.0;  // ||X b - y||_2 against the original system
  std::size_t rank = 0;
  bool rank_deficient = false;
};

// Minimum-norm least squares via a one-sided Jacobi SVD. Intended for the
// small dense systems produced by the estimation stage (K x N with K, N well
// below 100); accuracy matters more than speed there.
LeastSquaresSolution solve_least_squares(const Matrix& x, const std::vector<double>& y);

}  // namespace fedgame
