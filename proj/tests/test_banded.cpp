#include <gtest/gtest.h>
#include <sturmcont/banded.hpp>

#include <cmath>

using namespace sturmcont;

namespace {

BandMatrix sample(int n, int kl, int ku) {
  BandMatrix a(n, kl, ku);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j)
      a.at(i, j) = i == j ? 10.0 + i : 1.0 / (1 + i + 2 * j);
  return a;
}

}  // namespace

TEST(BandMatrix, MultiplyMatchesEntries) {
  BandMatrix a = sample(6, 2, 1);
  std::vector<double> e(6, 0.0);
  e[3] = 1;
  const auto col = a.multiply(e);
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(col[i], a.in_band(i, 3) ? a.at(i, 3) : 0.0);
}

TEST(BandLU, SolvesNonsymmetricSystem) {
  const int n = 40;
  BandMatrix a = sample(n, 3, 2);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(0.3 * i) + 0.1;
  std::vector<double> b = a.multiply(x);
  BandLU lu;
  ASSERT_TRUE(lu.factor(a));
  lu.solve(b);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(b[i], x[i], 1e-12);
}

TEST(BandLU, ReportsZeroPivot) {
  BandMatrix a(4, 1, 1);
  BandLU lu;
  EXPECT_FALSE(lu.factor(a));
  EXPECT_FALSE(lu.ok());
}

TEST(BandCholesky, SolvesManyRightHandSides) {
  const int n = 30, kd = 2;
  std::vector<std::vector<double>> up(kd + 1, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) up[0][i] = 6;
  for (int i = 0; i + 1 < n; ++i) up[1][i] = -4;
  for (int i = 0; i + 2 < n; ++i) up[2][i] = 1;
  BandCholesky c;
  ASSERT_TRUE(c.factor(up));
  std::vector<double> x(2 * n), b(2 * n, 0.0);
  for (int i = 0; i < 2 * n; ++i) x[i] = std::cos(0.2 * i);
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < n; ++i)
      for (int d = -kd; d <= kd; ++d) {
        const int j = i + d;
        if (j < 0 || j >= n) continue;
        const double v = up[std::abs(d)][std::min(i, j)];
        b[r * n + i] += v * x[r * n + j];
      }
  c.solve_many(b, 2);
  for (int i = 0; i < 2 * n; ++i) EXPECT_NEAR(b[i], x[i], 1e-9);
}

TEST(BandCholesky, RejectsIndefiniteMatrix) {
  std::vector<std::vector<double>> up = {{1, -1, 1}, {2, 2, 0}};
  BandCholesky c;
  EXPECT_FALSE(c.factor(up));
}
