#include <gtest/gtest.h>
#include <sturmcont/discretize.hpp>
#include <sturmcont/errors.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

using namespace sturmcont;

namespace {

int interior_sign_changes(const Vec& v) {
  const long double thr = 1e-8L * sup_norm(v);
  int count = 0, last = 0;
  for (auto x : v) {
    if (std::fabs(x) < thr) continue;
    const int s = x > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

}  // namespace

TEST(Grid, LayoutAndErrors) {
  const Grid g = make_grid(2.0, 98, 2);
  EXPECT_NEAR(static_cast<double>(g.h()), 4.0 / 100, 1e-15);
  EXPECT_NEAR(static_cast<double>(g.node(0) + g.node(97)), 0.0, 1e-15);
  EXPECT_THROW(make_grid(1.0, 8, 2), InvalidArgument);
  EXPECT_NO_THROW(make_grid(1.0, 9, 2));
  EXPECT_THROW(make_grid(-1.0, 100, 2), InvalidArgument);
  EXPECT_THROW(build_operator(g, 3), InvalidArgument);
}

TEST(DiffOperator, StandardStencils) {
  const Grid g1 = make_grid(1.0, 99, 1);
  DiffOperator a1(g1);
  const long double h2 = g1.h() * g1.h();
  EXPECT_NEAR(static_cast<double>(a1.coeff(0) * h2), 2.0, 1e-12);
  EXPECT_NEAR(static_cast<double>(a1.coeff(1) * h2), -1.0, 1e-12);
  const Grid g2 = make_grid(1.0, 98, 2);
  DiffOperator a2(g2);
  const long double h4 = std::pow(g2.h(), 4);
  EXPECT_NEAR(static_cast<double>(a2.coeff(0) * h4), 6.0, 1e-10);
  EXPECT_NEAR(static_cast<double>(a2.coeff(1) * h4), -4.0, 1e-10);
  EXPECT_NEAR(static_cast<double>(a2.coeff(2) * h4), 1.0, 1e-10);
}

TEST(DiffOperator, QuarticGivesConstantAwayFromBoundary) {
  const Grid g = make_grid(1.0, 198, 2);
  DiffOperator a(g);
  Vec y4(g.N);
  for (int i = 0; i < g.N; ++i) y4[i] = std::pow(g.node(i), 4);
  const Vec r = a.apply(y4);
  for (int i = 10; i < g.N - 10; ++i) EXPECT_NEAR(static_cast<double>(r[i]), 24.0, 1e-6);
}

TEST(DiffOperator, ExactlySymmetric) {
  for (int m = 1; m <= 4; ++m) {
    DiffOperator a(make_grid(1.0, 60, m));
    BandMatrix b = a.band(1.0, {});
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j)
        if (b.in_band(i, j)) {
          EXPECT_EQ(b.at(i, j), b.at(j, i));
        }
  }
}

TEST(DiffOperator, PositiveDefiniteOnCoarsestGrids) {
  for (int m = 1; m <= 4; ++m) {
    DiffOperator a(make_grid(1.0, 4 * m + 1, m));
    const auto e = eigen_smallest(a, 1);
    EXPECT_GT(e[0].lambda, 0.0) << m;
  }
}

TEST(Eigen, DirichletLaplacianSpectrum) {
  DiffOperator a(make_grid(std::numbers::pi / 2, 2000, 1));
  const auto e = eigen_smallest(a, 3);
  for (int l = 0; l < 3; ++l) EXPECT_NEAR(e[l].lambda / ((l + 1.0) * (l + 1.0)), 1.0, 1e-5);
}

TEST(Eigen, ClampedBeamMatchesCharacteristicEquation) {
  EXPECT_NEAR(oracle::beam_root(0), 4.7300408, 1e-7);
  DiffOperator a(make_grid(1.0, 2000, 2));
  const auto e = eigen_smallest(a, 3);
  for (int l = 0; l < 3; ++l) EXPECT_NEAR(e[l].lambda / oracle::beam_eigenvalue(l, 1.0), 1.0, 1e-5) << l;
}

TEST(Eigen, FrozenHigherOrderValues) {
  // Continuum clamped eigenvalues on (-1, 1) from the characteristic
  // determinant of D^{2m} (m = 3, 4), computed offline.
  const double lam3 = 961.389193575304, lam4 = 54555.6451459445;
  EXPECT_NEAR(eigen_smallest(DiffOperator(make_grid(1.0, 400, 3)), 1)[0].lambda / lam3, 1.0, 2e-3);
  EXPECT_NEAR(eigen_smallest(DiffOperator(make_grid(1.0, 200, 4)), 1)[0].lambda / lam4, 1.0, 2e-2);
}

TEST(Eigen, SecondOrderMeshConvergence) {
  const double exact = oracle::beam_eigenvalue(0, 1.0);
  double prev = 0;
  for (int N : {98, 198, 398}) {
    const double err = std::fabs(eigen_smallest(DiffOperator(make_grid(1.0, N, 2)), 1)[0].lambda - exact);
    if (prev > 0) {
      EXPECT_GT(prev / err, 3.5);
      EXPECT_LT(prev / err, 4.5);
    }
    prev = err;
  }
}

TEST(Eigen, SturmSignChangesAndNormalization) {
  const Grid g = make_grid(1.0, 400, 2);
  const auto e = eigen_smallest(DiffOperator(g), 5);
  for (int l = 0; l < 5; ++l) {
    EXPECT_EQ(interior_sign_changes(e[l].psi), l) << l;
    if (l > 0) {
      EXPECT_LT(e[l - 1].lambda, e[l].lambda);
    }
    for (int k = 0; k <= l; ++k) {
      long double dot = 0;
      for (int i = 0; i < g.N; ++i) dot += e[l].psi[i] * e[k].psi[i];
      EXPECT_NEAR(static_cast<double>(g.h() * dot), k == l ? 1.0 : 0.0, 1e-10);
    }
    // Sign convention: positive at the first extremum.
    for (int i = 1; i + 1 < g.N; ++i) {
      const long double a = std::fabs(e[l].psi[i]);
      if (a > 1e-6L * sup_norm(e[l].psi) && a >= std::fabs(e[l].psi[i - 1]) && a >= std::fabs(e[l].psi[i + 1])) {
        EXPECT_GT(e[l].psi[i], 0) << l;
        break;
      }
    }
  }
}

TEST(Eigen, ExactParity) {
  const auto e = eigen_smallest(DiffOperator(make_grid(3.0, 301, 2)), 4);
  for (int l = 0; l < 4; ++l) {
    const auto& p = e[l].psi;
    const long double s = l % 2 ? -1 : 1;
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], s * p[p.size() - 1 - i]);
  }
}

TEST(Eigen, ScalesWithHalfLength) {
  const double l1 = eigen_smallest(DiffOperator(make_grid(1.0, 500, 2)), 1)[0].lambda;
  const double l5 = eigen_smallest(DiffOperator(make_grid(5.0, 500, 2)), 1)[0].lambda;
  EXPECT_NEAR(l5 * std::pow(5.0, 4) / l1, 1.0, 1e-10);
}

TEST(Quadrature, TrapezoidAndSup) {
  const Grid g = make_grid(1.0, 100, 1);
  Vec one(g.N, 1.0L);
  EXPECT_NEAR(static_cast<double>(trapezoid(g, one)), 2.0 * 100 / 101, 1e-15);
  Vec v = {1, -3, 2};
  EXPECT_EQ(sup_norm(v), 3);
}
