#pragma once

#include <functional>
#include <string>
#include <vector>

#include "viraltrace/events.hpp"

namespace viraltrace {

// Model time unit is hours; log ingestion converts seconds -> hours.

// dE/dt = (r/N)(N-E)E with fixed population N.
struct LogisticParams {
  double r = 0.0;   // transmission coefficient per hour
  double N = 0.0;   // total population
  double E0 = 0.0;  // initial exposed, 0 < E0 <= N

  void validate() const;
};

// Closed logistic form with the exponent rescaled by the current activity
// level: exp(-r' * N(t) * t). N(t) comes from an activity profile whose time
// axis must be in hours.
struct EffectiveNParams {
  double r_prime = 0.0;  // per-active-user transmission scale
  double n_inf = 0.0;    // asymptotic exposed count
  double E0 = 0.0;
  ActivityProfile activity;

  void validate() const;
};

// dE/dt = r/(N0-at) * (N0-at-E) * E - a*E/(N0-at); the active population
// shrinks linearly and drags exposed users with it. Valid for t < N0/a.
struct LinearDecayParams {
  double r = 0.0;
  double N0 = 0.0;
  double a = 0.0;  // active-user decay per hour, >= 0
  double E0 = 0.0;

  void validate() const;

  // pole of the right-hand side (infinity when a == 0)
  double singular_time() const;
};

struct TrajectorySample {
  double t = 0.0;
  double E = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // t strictly increasing
  bool clamped = false;        // state hit the [0, N(t)] clamp at least once
  bool halted_early = false;   // stopped before the requested end time
  std::string halt_reason;
};

double logistic_E(const LogisticParams& p, double t);
double logistic_rhs(const LogisticParams& p, double E);
double effective_n_E(const EffectiveNParams& p, double t);
double linear_decay_rhs(const LinearDecayParams& p, double t, double E);

using Rhs = std::function<double(double /*t*/, double /*E*/)>;
using StateBound = std::function<double(double /*t*/)>;

inline constexpr double kDefaultStep = 0.01;  // hours

// Classical fourth-order one-step method, fixed step h with a final partial
// step landing exactly on t1. State is clamped to [0, upper(t)] after each
// step (flagged); an rhs throwing Errc::singularity_reached halts the
// integration early (flagged); NaN/inf state throws Errc::non_finite_state.
Trajectory integrate(const Rhs& rhs, double E0, double t0, double t1, double h,
                     const StateBound& upper = {});

Trajectory integrate_logistic(const LogisticParams& p, double t0, double t1,
                              double h = kDefaultStep);

// Stops at t = N0/a - 10h when that precedes t1 (flagged halt).
Trajectory integrate_linear_decay(const LinearDecayParams& p, double t0, double t1,
                                  double h = kDefaultStep);

std::string trajectory_csv(const Trajectory& tr);
std::string trajectory_json(const Trajectory& tr);

}  // namespace viraltrace
