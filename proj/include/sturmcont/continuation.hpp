#pragma once

#include <string>
#include <vector>

#include "sturmcont/solver.hpp"

namespace sturmcont {

struct StepControl {
  double ds_init = 0.02;
  double ds_min = 1e-5;
  double ds_max = 0.1;
  double shrink = 0.5;
  double grow = 1.3;
  int grow_after = 3;
  int max_corrector = 12;
  int max_steps = 20000;
  double tol = 1e-10;
  bool accept_roundoff_floor = true;
  // Admissible parameter interval; the trace stops when it leaves it.
  double param_min = -1e300;
  double param_max = 1e300;
  // Secant refinement of folds to this parameter resolution.
  double fold_tol = 1e-4;
  bool refine_folds = true;
  // Stop after this many folds (0 = never).
  int stop_after_folds = 0;
  // R-compression: stop once sup_norm exceeds this multiple of the start value.
  double divergence_factor = 1e3;
  // Keep every profile (otherwise only start, end and fold points).
  bool store_profiles = false;
  SymmetryMode symmetry = SymmetryMode::automatic;
};

struct BranchRecord {
  double param;
  double sup_norm;
  double c_F;
  double dparam_ds;  // parameter component of the unit tangent
  double residual_norm;
  bool fold = false;
  int profile_ref = -1;  // index into Branch::profiles, -1 if not kept
};

enum class FoldDirection { min, max };

struct FoldRecord {
  double param_star;
  double sup_norm_star;
  FoldDirection direction_change;
};

enum class BranchStatus {
  reached_target,
  step_floor,
  left_domain,
  fold_limit,
  diverged,
  max_steps,
};

std::string to_string(BranchStatus s);
std::string to_string(FoldDirection d);
std::string to_string(ParamKind k);

struct Branch {
  ParamKind param_kind = ParamKind::eps;
  std::vector<BranchRecord> records;
  std::vector<FoldRecord> folds;
  std::vector<Profile> profiles;
  BranchStatus status = BranchStatus::reached_target;
  Problem problem;  // problem at the start
  Profile endpoint;

  bool folded() const { return !folds.empty(); }
};

// Pseudo-arclength continuation of a solved start profile toward param_target.
Branch continue_branch(const Problem& problem, const Profile& start, ParamKind kind,
                       double param_target, const StepControl& ctrl = {});

// Sign changes of dparam/ds along the records.
std::vector<FoldRecord> detect_folds(const Branch& branch);

// Predicted bifurcation parameters from the k smallest eigenvalues on grid N.
std::vector<double> bifurcation_points(const Problem& problem, int k, int N);

// Exact discrete nonlocal solution sqrt(lambda_l + eps) psi_l.
Profile nonlocal_branch(const Problem& problem, int l, double eps, int N, int sign = +1);

}  // namespace sturmcont
