#include "sturmcont/discretize.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sturmcont/errors.hpp"

namespace sturmcont {

namespace {

long double binomial(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void orthonormalize(std::vector<double>& X, int N, int p) {
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < p; ++j) {
      double* xj = &X[static_cast<std::size_t>(j) * N];
      for (int i = 0; i < j; ++i) {
        const double* xi = &X[static_cast<std::size_t>(i) * N];
        double d = 0;
        for (int r = 0; r < N; ++r) d += xi[r] * xj[r];
        for (int r = 0; r < N; ++r) xj[r] -= d * xi[r];
      }
      double nrm = 0;
      for (int r = 0; r < N; ++r) nrm += xj[r] * xj[r];
      nrm = std::sqrt(nrm);
      if (nrm == 0) throw ConvergenceError("eigen_smallest: subspace collapsed");
      for (int r = 0; r < N; ++r) xj[r] /= nrm;
    }
}

void fix_sign(Vec& psi) {
  long double peak = sup_norm(psi);
  long double floor = 1e-6L * peak;
  for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
    long double a = std::fabs(psi[i]);
    if (a > floor && a >= std::fabs(psi[i - 1]) && a >= std::fabs(psi[i + 1])) {
      if (psi[i] < 0)
        for (auto& v : psi) v = -v;
      return;
    }
  }
}

// Eigenvalues are simple and the operator commutes with y -> -y, so each
// eigenvector is exactly even or odd; remove the round-off of the other part.
void symmetrize(Vec& psi) {
  const std::size_t N = psi.size();
  long double de = 0, dodd = 0;
  for (std::size_t i = 0; i < N; ++i) {
    de += std::fabs(psi[i] - psi[N - 1 - i]);
    dodd += std::fabs(psi[i] + psi[N - 1 - i]);
  }
  const long double sg = de <= dodd ? 1 : -1;
  for (std::size_t i = 0; i < N / 2; ++i) {
    const long double a = 0.5L * (psi[i] + sg * psi[N - 1 - i]);
    psi[i] = a;
    psi[N - 1 - i] = sg * a;
  }
  if (N % 2 == 1 && sg < 0) psi[N / 2] = 0;
}

}  // namespace

long double Grid::node(int i) const { return -R + (i + 1 + (m - 1) / 2.0L) * h(); }

std::vector<long double> Grid::nodes() const {
  std::vector<long double> y(N);
  for (int i = 0; i < N; ++i) y[i] = node(i);
  return y;
}

Grid make_grid(double R, int N, int m) {
  if (m < 1) throw InvalidArgument("grid: m must be at least 1");
  if (!(R > 0)) throw InvalidArgument("grid: R must be positive");
  if (N < 4 * m + 1) throw InvalidArgument("grid too coarse for stencil width: need N >= 4m+1");
  return Grid{R, N, m};
}

DiffOperator::DiffOperator(const Grid& g) : grid_(make_grid(g.R, g.N, g.m)), h_(g.h()) {
  const int m = g.m;
  const long double scale = std::pow(h_, -2.0L * m);
  stencil_.resize(m + 1);
  for (int k = 0; k <= m; ++k) stencil_[k] = ((k % 2) ? -1 : 1) * binomial(2 * m, m + k) * scale;
}

DiffOperator build_operator(const Grid& g, int m) {
  if (g.m != m) throw InvalidArgument("build_operator: grid was laid out for a different order");
  return DiffOperator(g);
}

long double DiffOperator::row_abs_sum() const {
  long double s = std::fabs(stencil_[0]);
  for (int k = 1; k <= m(); ++k) s += 2 * std::fabs(stencil_[k]);
  return s;
}

Vec DiffOperator::apply(const Vec& x) const {
  const int N = size(), m = this->m();
  if (static_cast<int>(x.size()) != N) throw InvalidArgument("apply: size mismatch");
  Vec y(N);
  for (int i = 0; i < N; ++i) {
    long double s = stencil_[0] * x[i];
    for (int k = 1; k <= m; ++k) {
      if (i - k >= 0) s += stencil_[k] * x[i - k];
      if (i + k < N) s += stencil_[k] * x[i + k];
    }
    y[i] = s;
  }
  return y;
}

long double DiffOperator::quadratic_form(const Vec& x) const { return bilinear_form(x, x); }

long double DiffOperator::bilinear_form(const Vec& x, const Vec& y) const {
  Vec ax = apply(x);
  long double s = 0;
  for (int i = 0; i < size(); ++i) s += ax[i] * y[i];
  return h_ * s;
}

BandMatrix DiffOperator::band(double scale, const std::vector<double>& d) const {
  const int N = size(), m = this->m();
  BandMatrix B(N, m, m);
  for (int i = 0; i < N; ++i) {
    B.at(i, i) = scale * static_cast<double>(stencil_[0]) + (d.empty() ? 0.0 : d[i]);
    for (int k = 1; k <= m; ++k) {
      if (i - k >= 0) B.at(i, i - k) = scale * static_cast<double>(stencil_[k]);
      if (i + k < N) B.at(i, i + k) = scale * static_cast<double>(stencil_[k]);
    }
  }
  return B;
}

std::vector<std::vector<double>> DiffOperator::upper_band(double shift) const {
  const int N = size(), m = this->m();
  std::vector<std::vector<double>> u(m + 1, std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i) u[0][i] = static_cast<double>(stencil_[0]) + shift;
  for (int k = 1; k <= m; ++k)
    for (int i = 0; i + k < N; ++i) u[k][i] = static_cast<double>(stencil_[k]);
  return u;
}

std::vector<EigenPair> eigen_smallest(const DiffOperator& op, int k, const EigenOptions& opt) {
  const int N = op.size();
  if (k < 1 || k > N) throw InvalidArgument("eigen_smallest: need 1 <= k <= N");
  const int p = std::min(N, k + std::max(4, k / 2));

  BandCholesky chol;
  if (!chol.factor(op.upper_band(0.0)))
    throw ConvergenceError("eigen_smallest: operator is not positive definite");

  std::vector<double> Q(static_cast<std::size_t>(N) * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < N; ++i)
      Q[static_cast<std::size_t>(j) * N + i] =
          std::sin((j + 1) * std::numbers::pi * (i + 1) / (N + 1));
  orthonormalize(Q, N, p);

  std::vector<double> lam(p, 0.0), prev(p, 0.0), T(static_cast<std::size_t>(p) * p), w(p);
  bool converged = false;
  double best_change = 1e300;
  int best_it = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    std::vector<double> Y = Q;
    chol.solve_many(Y, p);
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        double s = 0;
        for (int r = 0; r < N; ++r)
          s += Q[static_cast<std::size_t>(a) * N + r] * Y[static_cast<std::size_t>(b) * N + r];
        T[static_cast<std::size_t>(b) * p + a] = s;
        T[static_cast<std::size_t>(a) * p + b] = s;
      }
    if (LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', p, T.data(), p, w.data()) != 0)
      throw ConvergenceError("eigen_smallest: Ritz problem failed");
    // dsyev sorts ascending in mu = 1/lambda; reverse to ascending lambda.
    std::vector<double> Z(static_cast<std::size_t>(N) * p, 0.0);
    for (int j = 0; j < p; ++j) {
      const int c = p - 1 - j;
      lam[j] = 1.0 / w[c];
      for (int b = 0; b < p; ++b) {
        const double v = T[static_cast<std::size_t>(c) * p + b];
        const double* yb = &Y[static_cast<std::size_t>(b) * N];
        double* zj = &Z[static_cast<std::size_t>(j) * N];
        for (int r = 0; r < N; ++r) zj[r] += v * yb[r];
      }
    }
    orthonormalize(Z, N, p);
    Q.swap(Z);
    double change = 0;
    for (int j = 0; j < k; ++j) change = std::max(change, std::fabs(lam[j] - prev[j]) / lam[j]);
    prev = lam;
    if (it > 2 && change < opt.tol) {
      converged = true;
      break;
    }
    // Round-off floor of the double-precision solves: stop once the
    // change is small and has not improved for several sweeps.
    if (change < best_change) {
      best_change = change;
      best_it = it;
    } else if (best_change < opt.noise_tol && it - best_it >= 5) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("eigen_smallest: iteration budget exhausted");

  std::vector<EigenPair> out;
  out.reserve(k);
  for (int j = 0; j < k; ++j) {
    EigenPair e;
    e.psi.resize(N);
    for (int r = 0; r < N; ++r) e.psi[r] = Q[static_cast<std::size_t>(j) * N + r];
    symmetrize(e.psi);
    // Rayleigh quotient in extended precision.
    long double nrm2 = 0;
    for (auto v : e.psi) nrm2 += v * v;
    const long double scale = 1.0L / std::sqrt(nrm2 * op.h());
    for (auto& v : e.psi) v *= scale;
    nrm2 = 1.0L / op.h();
    e.lambda = static_cast<double>(op.quadratic_form(e.psi) / (op.h() * nrm2));
    fix_sign(e.psi);
    out.push_back(std::move(e));
  }
  return out;
}

long double trapezoid(const Grid& g, const Vec& f) {
  long double s = 0;
  for (auto v : f) s += v;
  return g.h() * s;
}

long double sup_norm(const Vec& f) {
  long double s = 0;
  for (auto v : f) s = std::max(s, std::fabs(v));
  return s;
}

}  // namespace sturmcont
