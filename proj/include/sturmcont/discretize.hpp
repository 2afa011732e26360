#pragma once

#include <vector>

#include "sturmcont/banded.hpp"

namespace sturmcont {

// Uniform grid on (-R, R) for an operator of order 2m. The m-1 clamped
// zeros beyond each end sit symmetrically about +-R, which gives
// h = 2R / (N + m) and nodes -R + (i + (m - 1) / 2) h for i = 1..N.
struct Grid {
  double R = 1.0;
  int N = 0;
  int m = 1;

  long double h() const { return 2.0L * R / (N + m); }
  long double node(int i) const;  // i = 0..N-1
  std::vector<long double> nodes() const;
  // Same node count, new half-length (used by R-continuation).
  Grid rescaled(double newR) const { return Grid{newR, N, m}; }
};

Grid make_grid(double R, int N, int m);

// (-1)^m D^{2m} on the interior nodes with clamped closure: the symmetric
// Toeplitz matrix with row coefficients (-1)^k C(2m, m+k) / h^{2m}.
class DiffOperator {
 public:
  DiffOperator() = default;
  explicit DiffOperator(const Grid& g);

  const Grid& grid() const { return grid_; }
  int m() const { return grid_.m; }
  int size() const { return grid_.N; }
  int half_bandwidth() const { return grid_.m; }
  long double h() const { return h_; }
  // coeff(k) for k = 0..m is the entry on the k-th off-diagonal.
  long double coeff(int k) const { return stencil_[k]; }
  // Sum of |coeff| over a full row, the scale of round-off in apply().
  long double row_abs_sum() const;

  Vec apply(const Vec& x) const;
  // h * <A x, x>, the discrete quadratic form.
  long double quadratic_form(const Vec& x) const;
  // h * <A x, y>.
  long double bilinear_form(const Vec& x, const Vec& y) const;

  // scale * A + diag(d) as a band matrix ready for LU (d may be empty).
  BandMatrix band(double scale, const std::vector<double>& d) const;
  // Upper band of A + shift I for Cholesky.
  std::vector<std::vector<double>> upper_band(double shift) const;

 private:
  Grid grid_;
  long double h_ = 0;
  std::vector<long double> stencil_;
};

DiffOperator build_operator(const Grid& g, int m);

struct EigenPair {
  double lambda;
  Vec psi;  // h * sum psi^2 = 1
};

struct EigenOptions {
  int max_iter = 2000;
  double tol = 1e-13;
  // Accept a stagnating relative change below this level.
  double noise_tol = 1e-9;
};

// k smallest eigenpairs of the operator, increasing order, trapezoid
// orthonormal, each psi positive at its first extremum.
std::vector<EigenPair> eigen_smallest(const DiffOperator& op, int k, const EigenOptions& opt = {});

// Trapezoid integral of f over the grid (boundary values are zero).
long double trapezoid(const Grid& g, const Vec& f);
long double sup_norm(const Vec& f);

}  // namespace sturmcont
