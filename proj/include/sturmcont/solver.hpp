#pragma once

#include <optional>
#include <vector>

#include "sturmcont/banded.hpp"
#include "sturmcont/discretize.hpp"
#include "sturmcont/errors.hpp"
#include "sturmcont/model.hpp"

namespace sturmcont {

struct Profile {
  Grid grid;
  Vec values;
  double residual_norm = 0;
  double eps = 0;
  double R = 0;
  int iterations = 0;

  double sup_norm() const;
};

struct Plateau {
  double level;  // +1, -1 or 0
  double start;
  double end;
};

struct TemplateSpec {
  std::vector<Plateau> plateaus;
  double smoothing_width = 1.0;
};

// C^1 step-like profile: each plateau sits at its level on [start, end] and
// blends to zero over smoothing_width on either side.
Profile template_profile(const TemplateSpec& spec, const Grid& grid);

enum class Parity { none, even, odd };

Parity detect_parity(const Vec& F);
void project_parity(Vec& x, Parity p);

enum class ParamKind { eps, R };

// Residual, Jacobian factorization and parameter derivative of the discrete
// stationary equation on a fixed grid.
class StationarySystem {
 public:
  StationarySystem(const Problem& p, const Grid& g);

  const Problem& problem() const { return problem_; }
  const DiffOperator& op() const { return op_; }
  const Grid& grid() const { return op_.grid(); }

  // -A F + g(F), or -A F - eps F + (int F^2) F for the nonlocal family.
  Vec residual(const Vec& F) const;
  // d residual / d param at fixed F.
  Vec dparam(const Vec& F, ParamKind kind) const;
  // Round-off level of residual(F) in extended precision.
  long double roundoff_floor(const Vec& F) const;

  class Linearization {
   public:
    Vec solve(const Vec& rhs) const;

   private:
    friend class StationarySystem;
    BandLU lu_;
    // Rank-one part u w^T (nonlocal family only).
    Vec u_, w_, z_;
    long double denom_ = 1;
  };
  // Factorizes the Jacobian at F; applies one 1e-10 diagonal shift on a
  // zero pivot before throwing SingularJacobian.
  Linearization linearize(const Vec& F) const;

 private:
  Problem problem_;
  DiffOperator op_;
};

enum class SymmetryMode { automatic, none };

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 100;
  // Accept the round-off floor of the residual when it exceeds tol.
  bool accept_roundoff_floor = true;
  SymmetryMode symmetry = SymmetryMode::automatic;
  double armijo_c = 1e-4;
  double min_step = 0x1p-20;
};

class NoConvergence : public ConvergenceError {
 public:
  NoConvergence(const std::string& what, Profile best)
      : ConvergenceError(what), best_(std::move(best)) {}
  const Profile& best() const { return best_; }

 private:
  Profile best_;
};

double effective_tolerance(const StationarySystem& sys, const Vec& F, const NewtonOptions& opt);

Profile newton_solve(const Problem& problem, const Profile& init, const NewtonOptions& opt);
Profile newton_solve(const Problem& problem, const Profile& init, double tol, int max_iter);

struct FiberingRoots {
  std::optional<double> r_minus;
  std::optional<double> r_zero;
  std::optional<double> r_plus;
  std::vector<double> all;
};

// Real roots in r of r - int |h + r v|^{beta-2} (h + r v) v + L0(h) v with
// L0(h) v = -<A h, v> + int h v, for v on the unit sphere of <A v, v> + int v^2.
FiberingRoots fibering_roots(const Profile& h, const Profile& v, const Problem& problem);

}  // namespace sturmcont
