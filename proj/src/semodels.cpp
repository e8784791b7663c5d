#include "viraltrace/semodels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace viraltrace {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void LogisticParams::validate() const {
  if (!finite(r) || !finite(N) || !finite(E0) || r <= 0.0 || N <= 0.0 || E0 <= 0.0 || E0 > N) {
    fail(Errc::invalid_params, "logistic requires r>0, N>0, 0<E0<=N");
  }
}

void EffectiveNParams::validate() const {
  if (!finite(r_prime) || !finite(n_inf) || !finite(E0) || r_prime <= 0.0 || n_inf <= 0.0 ||
      E0 <= 0.0 || E0 > n_inf) {
    fail(Errc::invalid_params, "effective-N requires r'>0, N_inf>0, 0<E0<=N_inf");
  }
  if (activity.bins.empty()) fail(Errc::invalid_params, "effective-N requires an activity profile");
}

void LinearDecayParams::validate() const {
  if (!finite(r) || !finite(N0) || !finite(a) || !finite(E0) || r <= 0.0 || N0 <= 0.0 || a < 0.0 ||
      E0 <= 0.0 || E0 > N0) {
    fail(Errc::invalid_params, "linear decay requires r>0, N0>0, a>=0, 0<E0<=N0");
  }
}

double LinearDecayParams::singular_time() const {
  return a > 0.0 ? N0 / a : std::numeric_limits<double>::infinity();
}

double logistic_E(const LogisticParams& p, double t) {
  p.validate();
  if (t < 0.0) fail(Errc::domain_error, "t must be >= 0");
  return p.N * p.E0 / (p.E0 + (p.N - p.E0) * std::exp(-p.r * t));
}

double logistic_rhs(const LogisticParams& p, double E) {
  p.validate();
  if (E < 0.0 || E > p.N) fail(Errc::domain_error, "E outside [0, N]");
  return (p.r / p.N) * (p.N - E) * E;
}

double effective_n_E(const EffectiveNParams& p, double t) {
  p.validate();
  if (t < 0.0) fail(Errc::domain_error, "t must be >= 0");
  double n_t = interpolate_activity(p.activity, t);
  return p.n_inf * p.E0 / (p.E0 + (p.n_inf - p.E0) * std::exp(-p.r_prime * n_t * t));
}

double linear_decay_rhs(const LinearDecayParams& p, double t, double E) {
  p.validate();
  if (t >= p.singular_time()) {
    fail(Errc::singularity_reached, "t >= N0/a, no active users left");
  }
  double n_t = p.N0 - p.a * t;
  if (E < 0.0 || E > n_t) fail(Errc::domain_error, "E outside [0, N(t)]");
  return (p.r / n_t) * (n_t - E) * E - p.a * E / n_t;
}

Trajectory integrate(const Rhs& rhs, double E0, double t0, double t1, double h,
                     const StateBound& upper) {
  if (!(h > 0.0)) fail(Errc::invalid_params, "step must be positive");
  if (!(t1 > t0)) fail(Errc::invalid_params, "t1 must exceed t0");
  if (!finite(E0)) fail(Errc::non_finite_state, "initial state not finite");

  Trajectory tr;
  tr.samples.push_back({t0, E0});
  double t = t0;
  double E = E0;
  while (t < t1) {
    double step, t_next;
    if (t1 - t <= h * (1.0 + 1e-9)) {  // final, possibly partial, step
      step = t1 - t;
      t_next = t1;
    } else {
      step = h;
      t_next = t + h;
    }
    double k1, k2, k3, k4;
    try {
      k1 = rhs(t, E);
      k2 = rhs(t + step / 2.0, E + step / 2.0 * k1);
      k3 = rhs(t + step / 2.0, E + step / 2.0 * k2);
      k4 = rhs(t + step, E + step * k3);
    } catch (const Error& e) {
      if (e.code() == Errc::singularity_reached) {
        tr.halted_early = true;
        tr.halt_reason = "singularity_reached";
        return tr;
      }
      throw;
    }
    E = E + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(E)) fail(Errc::non_finite_state, "state became non-finite at t=" + format_double(t_next));
    t = t_next;
    if (E < 0.0) {
      E = 0.0;
      tr.clamped = true;
    } else if (upper) {
      double hi = upper(t);
      if (E > hi) {
        E = hi;
        tr.clamped = true;
      }
    }
    tr.samples.push_back({t, E});
  }
  return tr;
}

Trajectory integrate_logistic(const LogisticParams& p, double t0, double t1, double h) {
  p.validate();
  auto rhs = [&p](double, double E) { return (p.r / p.N) * (p.N - E) * E; };
  auto bound = [&p](double) { return p.N; };
  return integrate(rhs, p.E0, t0, t1, h, bound);
}

Trajectory integrate_linear_decay(const LinearDecayParams& p, double t0, double t1, double h) {
  p.validate();
  double t_guard = p.singular_time() - 10.0 * h;  // keep RK stages clear of the pole
  auto rhs = [&p](double t, double E) {
    double n_t = p.N0 - p.a * t;
    return (p.r / n_t) * (n_t - E) * E - p.a * E / n_t;
  };
  auto bound = [&p](double t) { return p.N0 - p.a * t; };

  if (t_guard <= t0) {
    Trajectory tr;
    tr.samples.push_back({t0, p.E0});
    tr.halted_early = true;
    tr.halt_reason = "singularity_reached";
    return tr;
  }
  double t_end = std::min(t1, t_guard);
  Trajectory tr = integrate(rhs, p.E0, t0, t_end, h, bound);
  if (t_end < t1 && !tr.halted_early) {
    tr.halted_early = true;
    tr.halt_reason = "singularity_reached";
  }
  return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,E\n";
  for (const auto& s : tr.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.E);
    out += '\n';
  }
  return out;
}

std::string trajectory_json(const Trajectory& tr) {
  nlohmann::json doc;
  auto samples = nlohmann::json::array();
  for (const auto& s : tr.samples) samples.push_back({{"t", s.t}, {"E", s.E}});
  doc["samples"] = std::move(samples);
  doc["clamped"] = tr.clamped;
  doc["halted_early"] = tr.halted_early;
  doc["halt_reason"] = tr.halt_reason;
  return doc.dump(2) + "\n";
}

}  // namespace viraltrace
