#include <gtest/gtest.h>
#include <sturmcont/evolve.hpp>

#include <cmath>

using namespace sturmcont;

namespace {

Problem evolution_problem(double n, ZerothSign s, double R) {
  Problem p;
  p.family = Family::RegularizedNonLipschitz;
  p.m = 2;
  p.n = n;
  p.R = R;
  p.zeroth_sign = s;
  return p;
}

Profile bump(double R, int N, double amp) {
  Profile p;
  p.grid = make_grid(R, N, 2);
  p.R = R;
  p.values.resize(N);
  for (int i = 0; i < N; ++i) {
    const long double c = std::cos(M_PI * p.grid.node(i) / (2 * R));
    p.values[i] = amp * c * c * c * c;
  }
  return p;
}

// Phi = (1 - t/T)^{-(n+2)/n} with E chosen so that Phi' = (n+2)/2 E.
EnergyTrace exact_blowup_trace(double n, double T, int K, double tmax) {
  EnergyTrace tr;
  const double p = -(n + 2) / n;
  for (int i = 0; i < K; ++i) {
    const double t = tmax * i / (K - 1);
    tr.times.push_back(t);
    tr.phi.push_back(std::pow(1 - t / T, p));
    tr.energy.push_back(2.0 / (n + 2) * (-p / T) * std::pow(1 - t / T, p - 1));
  }
  return tr;
}

}  // namespace

TEST(Energy, EigenfunctionValues) {
  const Problem p = evolution_problem(-0.5, ZerothSign::minus, 3);
  const Grid g = make_grid(3, 300, 2);
  const auto eig = eigen_smallest(DiffOperator(g), 1);
  Profile v;
  v.grid = g;
  v.R = 3;
  v.values = eig[0].psi;
  const EnergyPair e = energy_pair(v, p);
  EXPECT_NEAR(e.energy, -eig[0].lambda - 1, 1e-9 * eig[0].lambda);
  Problem plus = p;
  plus.zeroth_sign = ZerothSign::plus;
  EXPECT_NEAR(energy_pair(v, plus).energy, -eig[0].lambda + 1, 1e-9 * eig[0].lambda);
}

TEST(Energy, PhiScalesWithBeta) {
  for (double n : {1.0, -0.5}) {
    const Problem p = evolution_problem(n, ZerothSign::minus, 3);
    const Profile a = bump(3, 200, 1.0), b = bump(3, 200, 2.5);
    EXPECT_NEAR(energy_pair(b, p).phi, std::pow(2.5, p.beta()) * energy_pair(a, p).phi,
                1e-12 * energy_pair(b, p).phi);
    EXPECT_NEAR(energy_pair(b, p).energy, 6.25 * energy_pair(a, p).energy,
                1e-12 * std::fabs(energy_pair(b, p).energy));
  }
}

TEST(Evolution, ZeroDataIsTrivial) {
  const Problem p = evolution_problem(-0.5, ZerothSign::minus, 2);
  const Evolution ev = integrate(p, bump(2, 100, 0.0), 1.0);
  EXPECT_EQ(ev.trajectory.reason, StopReason::trivial);
  EXPECT_EQ(ev.trajectory.final_state.sup_norm(), 0);
}

TEST(Evolution, ExtinctionDecreasesPhiAndKeepsIdentity) {
  const Problem p = evolution_problem(-0.5, ZerothSign::minus, 2);
  const Evolution ev = integrate(p, bump(2, 100, 1.0), 0.1);
  const auto& tr = ev.trace;
  ASSERT_GE(tr.times.size(), 10u);
  for (std::size_t i = 1; i < tr.phi.size(); ++i) EXPECT_LE(tr.phi[i], tr.phi[i - 1]);
  for (double e : tr.energy) EXPECT_LT(e, 0);
  const BoundReport r = bound_check(tr, p.n, BoundMode::extinction);
  EXPECT_TRUE(r.hypotheses_met);
  EXPECT_LT(r.max_identity_error, 5e-3 * r.max_abs_energy);
  EXPECT_NEAR(r.T, (2 / p.n) * tr.phi[0] / tr.energy[0], 1e-12 * r.T);
}

TEST(Evolution, RejectsBadConfig) {
  const Problem p = evolution_problem(-0.5, ZerothSign::minus, 2);
  const Profile v = bump(2, 100, 1.0);
  EvolutionConfig c;
  c.dt_min = 1;
  EXPECT_THROW(integrate(p, v, 1.0, c), InvalidArgument);
  c = {};
  c.blowup_cap = 1;
  EXPECT_THROW(integrate(p, v, 1.0, c), InvalidArgument);
  EXPECT_THROW(integrate(p, v, 0.0), InvalidArgument);
}

TEST(Bound, ExactBlowupTraceSitsOnBound) {
  const EnergyTrace tr = exact_blowup_trace(1.0, 2.0, 2000, 1.5);
  const BoundReport r = bound_check(tr, 1.0, BoundMode::blowup);
  ASSERT_TRUE(r.hypotheses_met);
  EXPECT_NEAR(r.T, 2.0, 1e-12);
  EXPECT_LE(std::fabs(r.max_violation), 1e-10);
  EXPECT_LT(r.max_identity_error, 1e-2 * r.max_abs_energy);
  EXPECT_NEAR(r.checked_until, 1.5, 1e-12);
}

TEST(Bound, HypothesesReported) {
  const EnergyTrace tr = exact_blowup_trace(1.0, 2.0, 50, 1.0);
  EXPECT_FALSE(bound_check(tr, 1.0, BoundMode::extinction).hypotheses_met);
  EnergyTrace neg = tr;
  for (auto& e : neg.energy) e = -e;
  const BoundReport r = bound_check(neg, 1.0, BoundMode::blowup);
  EXPECT_FALSE(r.hypotheses_met);
  EXPECT_FALSE(r.note.empty());
  EXPECT_THROW(bound_check(EnergyTrace{}, 1.0, BoundMode::blowup), InvalidArgument);
}
