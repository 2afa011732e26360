#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sturmcont/continuation.hpp"
#include "sturmcont/solver.hpp"

namespace sturmcont {

// Signed entries count transversal crossings of the equilibrium sign*1 inside
// one run; unsigned entries count transversal zeros between runs.
struct MultiIndex {
  struct Entry {
    int value;
    bool is_signed;
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const MultiIndex& o) const;
  MultiIndex negated() const;
};

// Renders as "{+6,2,+2}".
std::string to_string(const MultiIndex& s);

MultiIndex multiindex(const Profile& profile, double amp_threshold = 1e-3);

// Local extrema of F' above amp_threshold * sup|F'| (shape metadata only).
int derivative_extrema(const Profile& profile, double amp_threshold = 1e-3);

// Number of transversal zero crossings, tangencies below the threshold removed.
int sign_changes(const Profile& profile, double amp_threshold = 1e-3);

double critical_value(const Profile& profile, const Problem& problem);

enum class TailKind { algebraic_oscillatory, exponential_oscillatory };

struct TailReport {
  TailKind kind = TailKind::algebraic_oscillatory;
  double interface_location = 0;  // +inf for the exponential case
  double threshold_interface = 0; // first point after which |F| < 1e-10 sup for good
  double gamma = 0;
  double decay_rate = 0;
  double frequency = 0;
  double fit_residual = 0;
  int extrema_used = 0;
};

struct TailOptions {
  // Extrema with amplitude in [band_low, band_high] * sup_norm enter the fit.
  double band_low = 1e-12;
  double band_high = 1e-3;
  // Exponential fits ignore extrema closer than this to the boundary.
  double boundary_margin = 0.25;  // fraction of R
};

TailReport tail_fit(const Profile& profile, const Problem& problem, const TailOptions& opt = {});

std::string to_string(TailKind k);

struct GeneralizedIndex {
  MultiIndex sigma_min;
  double R_min = 0;
  bool diverged = false;  // case (i): sup_norm blew up under compression
  int extrema = 0;        // interior extrema of the final profile
  BranchStatus status = BranchStatus::step_floor;
  Branch branch;
};

struct CompressionOptions {
  double R_floor = 0;   // stop below this R (0: only the step floor)
  double R_star = 0;    // stop below 2 R_star when positive
  double amp_threshold = 1e-3;
  // Compression stops at the first fold in R or once sup_norm grows tenfold.
  StepControl ctrl = [] {
    StepControl c;
    c.stop_after_folds = 1;
    c.divergence_factor = 10;
    return c;
  }();
};

GeneralizedIndex generalized_index(const Problem& problem, const Profile& profile,
                                   const CompressionOptions& opt = {});

// True iff c_F strictly decreases with the basic-family index.
bool ordering_check(std::vector<std::pair<int, double>> values);

int local_extrema(const Profile& profile, double amp_threshold = 1e-3);

}  // namespace sturmcont
