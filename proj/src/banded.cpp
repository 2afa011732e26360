#include "sturmcont/banded.hpp"

#include <lapacke.h>

#include "sturmcont/errors.hpp"

namespace sturmcont {

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ab_(static_cast<std::size_t>(2 * kl + ku + 1) * n, 0.0) {
  if (n <= 0 || kl < 0 || ku < 0) throw InvalidArgument("BandMatrix: bad dimensions");
}

// Column-major gb storage: element (i, j) lives at row kl + ku + i - j of column j.
double& BandMatrix::at(int i, int j) {
  return ab_[static_cast<std::size_t>(j) * ldab() + (kl_ + ku_ + i - j)];
}

double BandMatrix::at(int i, int j) const {
  return ab_[static_cast<std::size_t>(j) * ldab() + (kl_ + ku_ + i - j)];
}

std::vector<double> BandMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    int j0 = i - kl_ < 0 ? 0 : i - kl_;
    int j1 = i + ku_ >= n_ ? n_ - 1 : i + ku_;
    double s = 0.0;
    for (int j = j0; j <= j1; ++j) s += at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

bool BandLU::factor(BandMatrix a) {
  lu_ = std::move(a);
  ipiv_.assign(lu_.size(), 0);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, lu_.size(), lu_.size(), lu_.kl(), lu_.ku(),
                                   lu_.data(), lu_.ldab(), ipiv_.data());
  if (info < 0) throw InvalidArgument("dgbtrf: illegal argument");
  ok_ = info == 0;
  return ok_;
}

void BandLU::solve(std::vector<double>& b) const {
  if (!ok_) throw SingularJacobian("BandLU::solve on a failed factorization");
  auto& lu = const_cast<BandMatrix&>(lu_);
  lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', lu.size(), lu.kl(), lu.ku(), 1,
                                   lu.data(), lu.ldab(), ipiv_.data(), b.data(), lu.size());
  if (info != 0) throw InvalidArgument("dgbtrs failed");
}

Vec BandLU::solve(const Vec& b) const {
  std::vector<double> x(b.begin(), b.end());
  solve(x);
  return Vec(x.begin(), x.end());
}

bool BandCholesky::factor(const std::vector<std::vector<double>>& upper) {
  kd_ = static_cast<int>(upper.size()) - 1;
  n_ = static_cast<int>(upper.front().size());
  int ld = kd_ + 1;
  ab_.assign(static_cast<std::size_t>(ld) * n_, 0.0);
  // Upper storage: (i, j) with i <= j at row kd + i - j of column j.
  for (int d = 0; d <= kd_; ++d)
    for (int i = 0; i + d < n_; ++i) {
      int j = i + d;
      ab_[static_cast<std::size_t>(j) * ld + (kd_ - d)] = upper[d][i];
    }
  lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n_, kd_, ab_.data(), ld);
  if (info < 0) throw InvalidArgument("dpbtrf: illegal argument");
  return info == 0;
}

void BandCholesky::solve(std::vector<double>& b) const { solve_many(b, 1); }

void BandCholesky::solve_many(std::vector<double>& b, int nrhs) const {
  lapack_int info = LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n_, kd_, nrhs,
                                   const_cast<double*>(ab_.data()), kd_ + 1, b.data(), n_);
  if (info != 0) throw InvalidArgument("dpbtrs failed");
}

}  // namespace sturmcont
