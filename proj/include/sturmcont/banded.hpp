#pragma once

#include <cstddef>
#include <vector>

namespace sturmcont {

using Vec = std::vector<long double>;

// General band matrix with kl sub- and ku super-diagonals, stored in the
// LAPACK "gb" layout with kl extra rows reserved for LU fill-in.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku);

  int size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  double& at(int i, int j);
  double at(int i, int j) const;
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  std::vector<double> multiply(const std::vector<double>& x) const;

  double* data() { return ab_.data(); }
  int ldab() const { return 2 * kl_ + ku_ + 1; }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> ab_;
};

// Partial-pivoting LU of a BandMatrix (dgbtrf/dgbtrs).
class BandLU {
 public:
  // Returns false on an exactly zero pivot.
  bool factor(BandMatrix a);
  void solve(std::vector<double>& b) const;
  Vec solve(const Vec& b) const;
  bool ok() const { return ok_; }

 private:
  BandMatrix lu_;
  std::vector<int> ipiv_;
  bool ok_ = false;
};

// Cholesky of a symmetric positive definite band matrix given by its
// upper band: upper[d][i] is entry (i, i + d) for d = 0..kd.
class BandCholesky {
 public:
  bool factor(const std::vector<std::vector<double>>& upper);
  void solve(std::vector<double>& b) const;
  void solve_many(std::vector<double>& b, int nrhs) const;
  int size() const { return n_; }

 private:
  int n_ = 0, kd_ = 0;
  std::vector<double> ab_;
};

}  // namespace sturmcont
