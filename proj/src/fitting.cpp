#include "viraltrace/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "viraltrace/neldermead.hpp"

namespace viraltrace {

const char* to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::logistic: return "logistic";
    case ModelVariant::effective_n: return "effective_n";
    case ModelVariant::linear_decay: return "linear_decay";
  }
  return "?";
}

ExposureSeries exposure_series(const CascadeGraph& graph, double t0, double t1, double step,
                               double seconds_per_unit) {
  if (graph.nodes.empty()) fail(Errc::empty_window, "graph has no nodes");
  if (!(t0 < t1)) fail(Errc::invalid_params, "window start must precede end");
  if (!(step > 0.0)) fail(Errc::invalid_params, "grid step must be positive");
  if (!(seconds_per_unit > 0.0)) fail(Errc::invalid_params, "seconds_per_unit must be positive");

  std::vector<double> times;
  for (const auto& [user, node] : graph.nodes) {
    if (!node.is_seed && node.first_exposure_time) {
      times.push_back(*node.first_exposure_time / seconds_per_unit);
    }
  }
  std::sort(times.begin(), times.end());

  ExposureSeries series;
  double t = t0;
  while (true) {
    auto n = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    series.points.push_back({t, static_cast<double>(n)});
    if (t >= t1) break;
    t = (t1 - t <= step * (1.0 + 1e-9)) ? t1 : t + step;
  }
  series.empty_window = series.points.back().count == 0.0;
  return series;
}

namespace {

constexpr double kPenalty = 1e300;

struct SeriesView {
  std::vector<double> ts;
  std::vector<double> ys;
  double max_y = 0.0;
  double first_nonzero_y = 1.0;
  double t_max = 0.0;
};

SeriesView view_of(const ExposureSeries& series) {
  SeriesView v;
  for (const auto& p : series.points) {
    v.ts.push_back(p.t);
    v.ys.push_back(p.count);
  }
  v.max_y = *std::max_element(v.ys.begin(), v.ys.end());
  for (double y : v.ys) {
    if (y > 0.0) {
      v.first_nonzero_y = std::max(y, 1.0);
      break;
    }
  }
  v.t_max = v.ts.back();
  return v;
}

// decoded candidate; a is unused outside the linear-decay variant
struct Candidate {
  double r = 0.0, N = 0.0, a = 0.0, E0 = 0.0;
};

// free-coordinate layout per variant: log-transformed (r, N-offset, [a,] E0)
struct Layout {
  bool has_a = false;
  std::vector<int> free_roles;  // 0=r, 1=N, 2=a, 3=E0
};

Layout make_layout(ModelVariant variant, const FitPins& pins) {
  Layout lay;
  lay.has_a = variant == ModelVariant::linear_decay;
  if (!pins.r) lay.free_roles.push_back(0);
  if (!pins.N) lay.free_roles.push_back(1);
  if (lay.has_a && !pins.a) lay.free_roles.push_back(2);
  if (!pins.E0) lay.free_roles.push_back(3);
  return lay;
}

Candidate decode(const std::vector<double>& theta, const Layout& lay, const FitPins& pins,
                 double max_y) {
  Candidate c;
  c.r = pins.r.value_or(0.0);
  c.N = pins.N.value_or(0.0);
  c.a = pins.a.value_or(0.0);
  c.E0 = pins.E0.value_or(0.0);
  std::size_t k = 0;
  for (int role : lay.free_roles) {
    double v = theta[k++];
    switch (role) {
      case 0: c.r = std::exp(v); break;
      case 1: c.N = max_y + std::exp(v); break;  // keeps the asymptote above the data
      case 2: c.a = std::exp(v); break;
      case 3: c.E0 = std::exp(v); break;
    }
  }
  return c;
}

double eval_logistic(double r, double N, double E0, double t) {
  return N * E0 / (E0 + (N - E0) * std::exp(-r * t));
}

// RK4 march over the sorted sample times, E(0) = E0
std::vector<double> eval_ode(double r, double N0, double a, double E0,
                             const std::vector<double>& ts, double h) {
  std::vector<double> out;
  out.reserve(ts.size());
  auto rhs = [&](double t, double E) {
    double n_t = N0 - a * t;
    return (r / n_t) * (n_t - E) * E - a * E / n_t;
  };
  double t = 0.0, E = E0;
  for (double target : ts) {
    while (t < target) {
      double step = (target - t <= h * (1.0 + 1e-9)) ? (target - t) : h;
      double k1 = rhs(t, E);
      double k2 = rhs(t + step / 2.0, E + step / 2.0 * k1);
      double k3 = rhs(t + step / 2.0, E + step / 2.0 * k2);
      double k4 = rhs(t + step, E + step * k3);
      E += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += step;
      double hi = N0 - a * t;
      if (E < 0.0) E = 0.0;
      if (E > hi) E = hi;
    }
    out.push_back(E);
  }
  return out;
}

class Objective {
 public:
  Objective(const SeriesView& view, ModelVariant variant, const Layout& lay, const FitPins& pins,
            const ActivityProfile* activity, double ode_step)
      : view_(view), variant_(variant), lay_(lay), pins_(pins), activity_(activity),
        ode_step_(ode_step) {}

  double operator()(const std::vector<double>& theta) const {
    Candidate c = decode(theta, lay_, pins_, view_.max_y);
    if (!std::isfinite(c.r) || !std::isfinite(c.N) || !std::isfinite(c.E0) || !std::isfinite(c.a))
      return kPenalty;
    if (c.r <= 0.0 || c.N <= 0.0 || c.E0 <= 0.0 || c.E0 > c.N || c.a < 0.0) return kPenalty;

    double sse = 0.0;
    if (variant_ == ModelVariant::linear_decay) {
      if (c.a > 0.0 && view_.t_max >= c.N / c.a - 10.0 * ode_step_) return kPenalty;
      std::vector<double> fitted = eval_ode(c.r, c.N, c.a, c.E0, view_.ts, ode_step_);
      for (std::size_t i = 0; i < fitted.size(); ++i) {
        double d = fitted[i] - view_.ys[i];
        sse += d * d;
      }
    } else {
      for (std::size_t i = 0; i < view_.ts.size(); ++i) {
        double t = view_.ts[i];
        double rate = variant_ == ModelVariant::effective_n
                          ? c.r * interpolate_activity(*activity_, t)
                          : c.r;
        double d = eval_logistic(rate, c.N, c.E0, t) - view_.ys[i];
        sse += d * d;
      }
    }
    return std::isfinite(sse) ? sse : kPenalty;
  }

 private:
  const SeriesView& view_;
  ModelVariant variant_;
  const Layout& lay_;
  const FitPins& pins_;
  const ActivityProfile* activity_;
  double ode_step_;
};

std::vector<double> start_point(const SeriesView& view, const Layout& lay, double f) {
  std::vector<double> theta;
  for (int role : lay.free_roles) {
    switch (role) {
      case 0: theta.push_back(std::log(std::pow(10.0, -3.0 + 5.0 * f))); break;
      case 1: theta.push_back(std::log(std::max(view.max_y * 3.0 * f, 0.05 * std::max(view.max_y, 1.0)))); break;
      case 2: theta.push_back(std::log(0.01 * std::max(view.max_y, 1.0) / view.t_max * std::pow(50.0, f))); break;
      case 3: theta.push_back(std::log(std::max(1.0 + f * (view.first_nonzero_y - 1.0), 1e-6))); break;
    }
  }
  return theta;
}

}  // namespace

FitResult fit(const ExposureSeries& series, ModelVariant variant, const FitPins& pins,
              const std::optional<ActivityProfile>& activity, double ode_step) {
  if (series.points.size() < 3) {
    fail(Errc::insufficient_data, "need at least 3 points, got " + std::to_string(series.points.size()));
  }
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (!(series.points[i].t > series.points[i - 1].t)) {
      fail(Errc::invalid_params, "series times must be strictly increasing");
    }
  }
  bool constant = std::all_of(series.points.begin(), series.points.end(), [&](const ExposurePoint& p) {
    return p.count == series.points.front().count;
  });
  if (constant) fail(Errc::degenerate_series, "series is constant, nothing to fit");
  if (variant == ModelVariant::effective_n && !activity) {
    fail(Errc::invalid_config, "effective-N variant requires an activity profile");
  }
  if (variant == ModelVariant::linear_decay && series.points.front().t < 0.0) {
    fail(Errc::invalid_params, "decay-model series must start at t >= 0");
  }

  SeriesView view = view_of(series);
  Layout lay = make_layout(variant, pins);
  if (lay.free_roles.empty()) fail(Errc::invalid_config, "all parameters pinned, nothing to optimize");

  Objective obj(view, variant, lay, pins, activity ? &*activity : nullptr, ode_step);

  FitResult result;
  result.variant = variant;

  constexpr int kStarts = 8;
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kStarts; ++i) {
    double f = static_cast<double>(i) / (kStarts - 1);
    std::vector<double> theta0 = start_point(view, lay, f);
    result.start_sses.push_back(obj(theta0));
    ++result.evaluations;

    NelderMeadOptions opts;
    opts.initial_step = 0.5;
    opts.rel_tol = 1e-10;
    opts.max_evaluations = 20000;
    NelderMeadResult nm = nelder_mead(obj, theta0, opts);
    result.evaluations += nm.evaluations;
    if (nm.fx < best_f) {
      best_f = nm.fx;
      best_x = nm.x;
    }
  }
  if (!(best_f < kPenalty)) fail(Errc::invalid_config, "no feasible parameters found");

  // polish: fresh small simplexes around the winner
  double final_diameter = 1.0;
  for (double step : {1e-3, 1e-5}) {
    NelderMeadOptions opts;
    opts.initial_step = step;
    opts.rel_tol = 1e-12;
    opts.max_evaluations = 20000;
    NelderMeadResult nm = nelder_mead(obj, best_x, opts);
    result.evaluations += nm.evaluations;
    if (nm.fx <= best_f) {
      best_f = nm.fx;
      best_x = nm.x;
    }
    final_diameter = nm.final_diameter;
  }
  result.converged = final_diameter < 1e-8;
  result.sse = best_f;

  Candidate c = decode(best_x, lay, pins, view.max_y);
  switch (variant) {
    case ModelVariant::logistic: {
      LogisticParams p{c.r, c.N, c.E0};
      p.validate();
      result.params = p;
      break;
    }
    case ModelVariant::effective_n: {
      EffectiveNParams p;
      p.r_prime = c.r;
      p.n_inf = c.N;
      p.E0 = c.E0;
      p.activity = *activity;
      p.validate();
      result.params = p;
      break;
    }
    case ModelVariant::linear_decay: {
      LinearDecayParams p{c.r, c.N, c.a, c.E0};
      p.validate();
      result.params = p;
      break;
    }
  }
  return result;
}

std::vector<double> evaluate_model(const FitParams& params, const std::vector<double>& ts,
                                   double ode_step) {
  std::vector<double> out;
  out.reserve(ts.size());
  if (std::holds_alternative<LogisticParams>(params)) {
    const auto& p = std::get<LogisticParams>(params);
    for (double t : ts) out.push_back(logistic_E(p, t));
  } else if (std::holds_alternative<EffectiveNParams>(params)) {
    const auto& p = std::get<EffectiveNParams>(params);
    for (double t : ts) out.push_back(effective_n_E(p, t));
  } else {
    const auto& p = std::get<LinearDecayParams>(params);
    p.validate();
    if (!ts.empty() && p.a > 0.0 && ts.back() >= p.N0 / p.a - 10.0 * ode_step) {
      fail(Errc::singularity_reached, "evaluation window reaches the pole at t = N0/a");
    }
    out = eval_ode(p.r, p.N0, p.a, p.E0, ts, ode_step);
  }
  return out;
}

ResidualReport residual_report(const ExposureSeries& series, const FitResult& result,
                               double ode_step) {
  std::vector<double> ts;
  for (const auto& p : series.points) ts.push_back(p.t);
  std::vector<double> fitted = evaluate_model(result.params, ts, ode_step);

  ResidualReport report;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double obs = series.points[i].count;
    double res = obs - fitted[i];
    report.rows.push_back({ts[i], obs, fitted[i], res});
    report.max_abs_residual = std::max(report.max_abs_residual, std::fabs(res));
  }
  std::size_t third = std::max<std::size_t>(1, report.rows.size() / 3);
  double s = 0.0;
  for (std::size_t i = 0; i < third; ++i) s += report.rows[i].residual;
  report.early_bias = s / static_cast<double>(third);
  return report;
}

namespace {

nlohmann::json fit_params_json(const FitParams& params) {
  if (std::holds_alternative<LogisticParams>(params)) {
    const auto& p = std::get<LogisticParams>(params);
    return {{"r", p.r}, {"N", p.N}, {"E0", p.E0}};
  }
  if (std::holds_alternative<EffectiveNParams>(params)) {
    const auto& p = std::get<EffectiveNParams>(params);
    return {{"r_prime", p.r_prime}, {"N_inf", p.n_inf}, {"E0", p.E0}};
  }
  const auto& p = std::get<LinearDecayParams>(params);
  return {{"r", p.r}, {"N0", p.N0}, {"a", p.a}, {"E0", p.E0}};
}

}  // namespace

std::string fit_result_json(const FitResult& result) {
  nlohmann::json doc;
  doc["variant"] = to_string(result.variant);
  doc["params"] = fit_params_json(result.params);
  doc["sse"] = result.sse;
  doc["converged"] = result.converged;
  doc["evaluations"] = result.evaluations;
  doc["start_sses"] = result.start_sses;
  return doc.dump(2) + "\n";
}

std::string residual_csv(const ResidualReport& report) {
  std::string out = "t,observed,fitted,residual\n";
  for (const auto& row : report.rows) {
    out += format_double(row.t);
    out += ',';
    out += format_double(row.observed);
    out += ',';
    out += format_double(row.fitted);
    out += ',';
    out += format_double(row.residual);
    out += '\n';
  }
  return out;
}

std::string exposure_csv(const ExposureSeries& series) {
  std::string out = "t,cumulative_unique_exposures\n";
  for (const auto& p : series.points) {
    out += format_double(p.t);
    out += ',';
    out += format_double(p.count);
    out += '\n';
  }
  return out;
}

}  // namespace viraltrace
