#include "fedgame/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedgame/errors.hpp"

namespace fedgame {
namespace {

double column_dot(const Matrix& a, std::size_t p, std::size_t q) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) s += a(i, p) * a(i, q);
  return s;
}

void rotate_columns(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    double vp = m(i, p);
    double vq = m(i, q);
    m(i, p) = c * vp - s * vq;
    m(i, q) = s * vp + c * vq;
  }
}

}  // namespace

LeastSquaresSolution solve_least_squares(const Matrix& x, const std::vector<double>& y) {
  if (x.rows != y.size()) {
    throw RuntimeFailure("least squares: row count does not match observation count");
  }
  const std::size_t m = x.rows;
  const std::size_t n = x.cols;

  // One-sided Jacobi: orthogonalize the columns of A, accumulating the
  // right-singular vectors in V. At convergence A = U * diag(sigma).
  Matrix a = x;
  Matrix v(n, n);
  for (std::size_t j = 0; j < n; ++j) v(j, j) = 1.0;

  const double tol = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = column_dot(a, p, p);
        double aqq = column_dot(a, q, q);
        double apq = column_dot(a, p, q);
        if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        rotate_columns(a, p, q, c, s);
        rotate_columns(v, p, q, c, s);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n, 0.0);
  double sigma_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sigma[j] = std::sqrt(std::max(0.0, column_dot(a, j, j)));
    sigma_max = std::max(sigma_max, sigma[j]);
  }
  const double rank_tol =
      sigma_max * static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();

  LeastSquaresSolution out;
  out.coefficients.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (sigma[j] <= rank_tol || sigma[j] == 0.0) continue;
    ++out.rank;
    // u_j^T y with u_j = a_j / sigma_j
    double uty = 0.0;
    for (std::size_t i = 0; i < m; ++i) uty += a(i, j) * y[i];
    uty /= sigma[j];
    double scale = uty / sigma[j];
    for (std::size_t k = 0; k < n; ++k) out.coefficients[k] += v(k, j) * scale;
  }
  out.rank_deficient = out.rank < n;

  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double pred = 0.0;
    for (std::size_t k = 0; k < n; ++k) pred += x(i, k) * out.coefficients[k];
    double r = y[i] - pred;
    rss += r * r;
  }
  out.residual_norm = std::sqrt(rss);
  return out;
}

}  // namespace fedgame
