#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "viraltrace/cascade.hpp"
#include "viraltrace/semodels.hpp"

namespace viraltrace {

struct ExposurePoint {
  double t = 0.0;      // grid units (hours in the canonical pipeline)
  double count = 0.0;  // cumulative unique exposures
};

struct ExposureSeries {
  std::vector<ExposurePoint> points;  // t strictly increasing
  bool empty_window = false;          // warning: no exposure fell in the window
};

// Samples the cumulative count of non-seed first exposures on the grid
// t0, t0+step, ..., t1 (final partial step lands on t1). Node times are
// divided by `seconds_per_unit` first (3600 gives an hours series).
ExposureSeries exposure_series(const CascadeGraph& graph, double t0, double t1,
                               double step, double seconds_per_unit = 1.0);

enum class ModelVariant { logistic, effective_n, linear_decay };

const char* to_string(ModelVariant v);

using FitParams = std::variant<LogisticParams, EffectiveNParams, LinearDecayParams>;

// Optional pins; a pinned parameter is excluded from the search.
struct FitPins {
  std::optional<double> r;   // r, or r' for the effective-N variant
  std::optional<double> N;   // N / N_inf / N0
  std::optional<double> E0;
  std::optional<double> a;   // linear-decay only
};

struct FitResult {
  ModelVariant variant = ModelVariant::logistic;
  FitParams params;
  double sse = 0.0;
  bool converged = false;      // final simplex diameter < 1e-8 relative
  long long evaluations = 0;
  std::vector<double> start_sses;  // objective at each multi-start point
};

// Derivative-free simplex descent over log-transformed parameters,
// 8 deterministic multi-starts, best point polished by two restarts.
// The effective-N variant requires `activity` (time axis in series units).
FitResult fit(const ExposureSeries& series, ModelVariant variant, const FitPins& pins = {},
              const std::optional<ActivityProfile>& activity = std::nullopt,
              double ode_step = kDefaultStep);

// Model curve at the given times (integrates the ODE variant from t=0).
std::vector<double> evaluate_model(const FitParams& params, const std::vector<double>& ts,
                                   double ode_step = kDefaultStep);

struct ResidualRow {
  double t = 0.0;
  double observed = 0.0;
  double fitted = 0.0;
  double residual = 0.0;  // observed - fitted
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  double max_abs_residual = 0.0;
  double early_bias = 0.0;  // mean residual over the first third of points
};

ResidualReport residual_report(const ExposureSeries& series, const FitResult& result,
                               double ode_step = kDefaultStep);

std::string fit_result_json(const FitResult& result);
std::string residual_csv(const ResidualReport& report);
std::string exposure_csv(const ExposureSeries& series);

}  // namespace viraltrace
