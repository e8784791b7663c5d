#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "viraltrace/fitting.hpp"
#include "viraltrace/rng.hpp"

using namespace viraltrace;
using vt_test::make_log;

namespace {

ExposureSeries logistic_series(const LogisticParams& p, double t0, double t1, int n) {
  ExposureSeries s;
  for (int i = 0; i < n; ++i) {
    double t = t0 + (t1 - t0) * i / (n - 1);
    s.points.push_back({t, logistic_E(p, t)});
  }
  return s;
}

}  // namespace

TEST_CASE("exposure_series") {
  SUBCASE("hand trace on grid {0,1,2,3}") {
    // exposures at t=1 (B) and t=2 (C)
    auto g = build_cascade(vt_test::hand_log());
    ExposureSeries s = exposure_series(g, 0.0, 3.0, 1.0);
    REQUIRE(s.points.size() == 4);
    CHECK(s.points[0].count == 0.0);
    CHECK(s.points[1].count == 1.0);
    CHECK(s.points[2].count == 2.0);
    CHECK(s.points[3].count == 2.0);
    CHECK_FALSE(s.empty_window);
  }

  SUBCASE("window before any exposure is all zeros with a warning") {
    auto g = build_cascade(make_log({{"e1", 100.0, "A", "B"}}, {"A"}));
    ExposureSeries s = exposure_series(g, 0.0, 10.0, 5.0);
    for (const auto& p : s.points) CHECK(p.count == 0.0);
    CHECK(s.empty_window);
  }

  SUBCASE("grid step larger than the window gives the two endpoints") {
    auto g = build_cascade(vt_test::hand_log());
    ExposureSeries s = exposure_series(g, 0.0, 3.0, 10.0);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0].t == 0.0);
    CHECK(s.points[1].t == 3.0);
  }

  SUBCASE("seconds_per_unit converts node times") {
    auto g = build_cascade(make_log({{"e1", 3600.0, "A", "B"}, {"e2", 7200.0, "A", "C"}}, {"A"}));
    ExposureSeries s = exposure_series(g, 0.0, 3.0, 1.0, 3600.0);
    CHECK(s.points[1].count == 1.0);  // 1 hour
    CHECK(s.points[2].count == 2.0);  // 2 hours
  }

  SUBCASE("empty graph errors") {
    CascadeGraph g;
    try {
      exposure_series(g, 0.0, 1.0, 0.5);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::empty_window);
    }
  }

  SUBCASE("counts are non-decreasing") {
    auto g = build_cascade(vt_test::hand_log());
    ExposureSeries s = exposure_series(g, 0.0, 5.0, 0.3);
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      CHECK(s.points[i].count >= s.points[i - 1].count);
    }
  }
}

TEST_CASE("fit recovers noiseless logistic parameters") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
  FitResult res = fit(s, ModelVariant::logistic);

  REQUIRE(std::holds_alternative<LogisticParams>(res.params));
  const auto& p = std::get<LogisticParams>(res.params);
  CHECK(std::fabs(p.r - truth.r) / truth.r < 1e-4);
  CHECK(res.sse < 1e-8);
  CHECK(res.converged);
  CHECK(res.evaluations > 0);

  // objective never ends above any start
  for (double s0 : res.start_sses) CHECK(res.sse <= s0);
}

TEST_CASE("fit input validation") {
  SUBCASE("constant series is degenerate") {
    ExposureSeries s;
    for (int i = 0; i < 5; ++i) s.points.push_back({static_cast<double>(i), 7.0});
    try {
      fit(s, ModelVariant::logistic);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::degenerate_series);
    }
  }

  SUBCASE("fewer than 3 points is insufficient") {
    ExposureSeries s;
    s.points = {{0.0, 1.0}, {1.0, 2.0}};
    try {
      fit(s, ModelVariant::logistic);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::insufficient_data);
    }
  }

  SUBCASE("effective-N needs an activity profile") {
    ExposureSeries s;
    s.points = {{0.0, 1.0}, {1.0, 2.0}, {2.0, 4.0}};
    try {
      fit(s, ModelVariant::effective_n);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_config);
    }
  }
}

TEST_CASE("fit determinism: identical inputs give identical results") {
  LogisticParams truth{0.7, 300.0, 3.0};
  ExposureSeries s = logistic_series(truth, 0.0, 10.0, 20);
  FitResult a = fit(s, ModelVariant::logistic);
  FitResult b = fit(s, ModelVariant::logistic);
  const auto& pa = std::get<LogisticParams>(a.params);
  const auto& pb = std::get<LogisticParams>(b.params);
  CHECK(pa.r == pb.r);
  CHECK(pa.N == pb.N);
  CHECK(pa.E0 == pb.E0);
  CHECK(a.sse == b.sse);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("fit scale equivariance for the logistic variant") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 24);
  // deterministic perturbation so the optimum has nonzero sse
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    s.points[i].count += 2.0 * std::sin(static_cast<double>(i));
  }
  const double k = 3.0;
  ExposureSeries scaled = s;
  for (auto& p : scaled.points) p.count *= k;

  FitResult base = fit(s, ModelVariant::logistic);
  FitResult up = fit(scaled, ModelVariant::logistic);
  const auto& pb = std::get<LogisticParams>(base.params);
  const auto& pu = std::get<LogisticParams>(up.params);
  CHECK(std::fabs(pu.r - pb.r) / pb.r < 1e-5);
  CHECK(std::fabs(pu.N - k * pb.N) / (k * pb.N) < 1e-5);
  CHECK(std::fabs(pu.E0 - k * pb.E0) / (k * pb.E0) < 1e-5);
  CHECK(up.sse == doctest::Approx(k * k * base.sse).epsilon(1e-6));
}

TEST_CASE("fit with 2% gaussian noise stays near the truth") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries clean = logistic_series(truth, 0.0, 16.0, 33);
  SplitMix64 rng(99);
  ExposureSeries noisy = clean;
  for (auto& p : noisy.points) p.count += 0.02 * truth.N * gaussian(rng);

  FitResult res = fit(noisy, ModelVariant::logistic);
  const auto& p = std::get<LogisticParams>(res.params);
  CHECK(std::fabs(p.r - truth.r) / truth.r < 0.10);
  CHECK(std::fabs(p.N - truth.N) / truth.N < 0.05);
}

TEST_CASE("fit effective-N with constant activity matches the logistic rate") {
  ActivityProfile flat{{{0.0, 200}}, 1.0};
  LogisticParams truth{0.5, 400.0, 4.0};  // r = r' * 200 => r' = 0.0025
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
  FitResult res = fit(s, ModelVariant::effective_n, {}, flat);
  const auto& p = std::get<EffectiveNParams>(res.params);
  CHECK(std::fabs(p.r_prime * 200.0 - truth.r) / truth.r < 1e-3);
  CHECK(res.sse < 1e-6);
}

TEST_CASE("fit the decay ODE recovers r and a") {
  LinearDecayParams truth{0.8, 300.0, 8.0, 5.0};
  std::vector<double> ts;
  for (int i = 0; i <= 24; ++i) ts.push_back(0.25 * i);
  std::vector<double> ys = evaluate_model(FitParams{truth}, ts, 0.01);
  ExposureSeries s;
  for (std::size_t i = 0; i < ts.size(); ++i) s.points.push_back({ts[i], ys[i]});

  FitResult res = fit(s, ModelVariant::linear_decay);
  const auto& p = std::get<LinearDecayParams>(res.params);
  CHECK(std::fabs(p.r - truth.r) / truth.r < 0.10);
  CHECK(std::fabs(p.a - truth.a) / truth.a < 0.10);
}

TEST_CASE("exposure grid lands exactly on the window end") {
  auto g = build_cascade(vt_test::hand_log());
  ExposureSeries s = exposure_series(g, 0.0, 1.0, 0.3);
  CHECK(s.points.back().t == 1.0);
  // 0, 0.3, 0.6, 0.9, then the partial step to 1.0
  CHECK(s.points.size() == 5);
}

TEST_CASE("decay fit pinned to a=0 agrees with the logistic fit") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
  FitPins pins;
  pins.a = 0.0;
  FitResult ode = fit(s, ModelVariant::linear_decay, pins, std::nullopt, 0.01);
  const auto& p = std::get<LinearDecayParams>(ode.params);
  CHECK(p.a == 0.0);
  CHECK(std::fabs(p.r - truth.r) / truth.r < 1e-3);
  CHECK(std::fabs(p.N0 - truth.N) / truth.N < 1e-3);
}

TEST_CASE("evaluating the decay model into its pole is an error") {
  LinearDecayParams p{0.5, 100.0, 10.0, 4.0};  // pole at t = 10
  try {
    evaluate_model(FitParams{p}, {0.0, 5.0, 11.0}, 0.01);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singularity_reached);
  }
}

TEST_CASE("pinned parameters are honored") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
  FitPins pins;
  pins.E0 = 4.0;
  FitResult res = fit(s, ModelVariant::logistic, pins);
  const auto& p = std::get<LogisticParams>(res.params);
  CHECK(p.E0 == 4.0);
  CHECK(std::fabs(p.r - truth.r) / truth.r < 1e-5);

  FitPins all;
  all.r = 0.5;
  all.N = 400.0;
  all.E0 = 4.0;
  try {
    fit(s, ModelVariant::logistic, all);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
}

TEST_CASE("residual_report") {
  LogisticParams truth{0.5, 400.0, 4.0};

  SUBCASE("perfect fit has zero residuals") {
    ExposureSeries s = logistic_series(truth, 0.0, 12.0, 24);
    FitResult res;
    res.variant = ModelVariant::logistic;
    res.params = truth;
    ResidualReport rep = residual_report(s, res);
    CHECK(rep.max_abs_residual == 0.0);
    CHECK(rep.early_bias == 0.0);
  }

  SUBCASE("model shifted +1 gives residual -1 everywhere and bias -1") {
    ExposureSeries s = logistic_series(truth, 0.0, 12.0, 24);
    for (auto& p : s.points) p.count -= 1.0;  // observed = model - 1
    FitResult res;
    res.variant = ModelVariant::logistic;
    res.params = truth;
    ResidualReport rep = residual_report(s, res);
    for (const auto& row : rep.rows) CHECK(row.residual == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rep.early_bias == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rep.max_abs_residual == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("noiseless fit leaves tiny residuals") {
    ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
    FitResult res = fit(s, ModelVariant::logistic);
    ResidualReport rep = residual_report(s, res);
    CHECK(rep.max_abs_residual < 1e-4 * truth.N);
  }
}

TEST_CASE("fit result serialization") {
  LogisticParams truth{0.5, 400.0, 4.0};
  ExposureSeries s = logistic_series(truth, 0.0, 12.0, 25);
  FitResult res = fit(s, ModelVariant::logistic);
  std::string json = fit_result_json(res);
  CHECK(json.find("\"variant\"") != std::string::npos);
  CHECK(json.find("\"sse\"") != std::string::npos);

  ResidualReport rep = residual_report(s, res);
  std::string csv = residual_csv(rep);
  CHECK(csv.rfind("t,observed,fitted,residual\n", 0) == 0);
  CHECK(exposure_csv(s).rfind("t,cumulative_unique_exposures\n", 0) == 0);
}
