#pragma once

#include <string>
#include <vector>

#include "sturmcont/solver.hpp"

namespace sturmcont {

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> phi;
  std::vector<double> energy;
  std::vector<double> phi_rate;
  std::vector<double> bound;
  std::vector<double> violation;
  double T = 0;  // (2/n) Phi(0) / E(0)
};

enum class Scheme { implicit_euler_linearized };

struct EvolutionConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  // Regularization delta of psi'; <= 0 selects 1e-8 * sup|v0|.
  double delta = 0;
  Scheme scheme = Scheme::implicit_euler_linearized;
  double rtol = 1e-4;
  double atol = 1e-10;
  // Local Richardson extrapolation of each step-doubled pair.
  bool extrapolate = true;
  // Stop once sup_norm exceeds this multiple of its initial value.
  double blowup_cap = 1e3;
  // Stop once Phi falls below this fraction of Phi(0).
  double extinction_fraction = 1e-9;
  // Keep every k-th accepted state in the trajectory (0: only the ends).
  int snapshot_every = 0;
  int max_steps = 2000000;

  void validate() const;
};

enum class StopReason { reached_t_end, extinct, blowup_cap, trivial };

std::string to_string(StopReason r);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  Profile final_state;
  StopReason reason = StopReason::reached_t_end;
  double stop_time = 0;
  int accepted = 0;
  int rejected = 0;
};

struct Evolution {
  Trajectory trajectory;
  EnergyTrace trace;
};

// psi_delta(v)_t = -A v + s v, s = +1 (plus) or -1 (minus), clamped conditions.
Evolution integrate(const Problem& problem, const Profile& v0, double t_end,
                    const EvolutionConfig& cfg = {});

struct EnergyPair {
  double phi;
  double energy;
};

// Phi = 1/2 int |v|^beta and E = -<A v, v> +- int v^2.
EnergyPair energy_pair(const Profile& v, const Problem& problem);

enum class BoundMode { extinction, blowup };

struct BoundReport {
  bool hypotheses_met = true;
  double T = 0;
  double max_violation = 0;        // largest bound excess (positive means violated)
  double max_reverse_violation = 0;  // same for the opposite inequality
  double max_identity_error = 0;   // max |phi_rate - (n+2)/2 E|
  double max_abs_energy = 0;
  double max_concavity_violation = 0;  // extinction: max(Phi' - C1 Phi^{k_n}, 0)
  double checked_until = 0;
  std::string note;
};

BoundReport bound_check(const EnergyTrace& trace, double n, BoundMode mode);

// Fills phi_rate (second-order differences), bound and violation in place.
void finalize_trace(EnergyTrace& trace, double n, BoundMode mode);

}  // namespace sturmcont
