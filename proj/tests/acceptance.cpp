// Acceptance suite: every release gate in one binary, one line per criterion.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "viraltrace/cascade.hpp"
#include "viraltrace/events.hpp"
#include "viraltrace/fitting.hpp"
#include "viraltrace/params.hpp"
#include "viraltrace/rng.hpp"
#include "viraltrace/semodels.hpp"
#include "viraltrace/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace viraltrace;

namespace {

struct Gate {
  int failures = 0;

  void report(int number, const std::string& title, bool pass, const std::string& detail,
              double seconds) {
    std::printf("[%s] criterion %d: %s — %s (%.2fs)\n", pass ? "PASS" : "FAIL", number,
                title.c_str(), detail.c_str(), seconds);
    if (!pass) ++failures;
  }

  void run(int number, const std::string& title, double time_limit_s,
           const std::function<std::pair<bool, std::string>()>& body) {
    auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      auto [ok, msg] = body();
      pass = ok;
      detail = msg;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit_s > 0.0 && seconds > time_limit_s) {
      pass = false;
      detail += " [over " + std::to_string(time_limit_s) + "s budget]";
    }
    report(number, title, pass, detail, seconds);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

CampaignSummary counts(std::int64_t c, std::int64_t e, std::int64_t i) {
  CampaignSummary s;
  s.total_contacts = c;
  s.total_exposed = e;
  s.total_infective = i;
  return s;
}

// --- criterion bodies --------------------------------------------------------

std::pair<bool, std::string> table_reproduction() {
  struct Row {
    std::int64_t c, e, i;
    double pe, pc, p;
  };
  const Row rows[] = {
      {9972, 3069, 746, 0.31, 0.07, 0.24},
      {731, 635, 242, 0.87, 0.33, 0.38},
      {28446, 3874, 1873, 0.14, 0.07, 0.48},
  };
  double worst = 0.0;
  for (const auto& row : rows) {
    GlobalParams gp = compute_global_params(counts(row.c, row.e, row.i), {});
    worst = std::max({worst, std::fabs(gp.pe - row.pe), std::fabs(gp.pc - row.pc),
                      std::fabs(gp.p - row.p)});
  }
  return {worst < 0.005, "max |deviation| = " + fmt(worst) + " (tol 0.005)"};
}

std::pair<bool, std::string> headline_ratio() {
  GlobalParams focused = compute_global_params(counts(731, 635, 242), {});
  GlobalParams broad = compute_global_params(counts(9972, 3069, 746), {});
  double pc_ratio = focused.pc / broad.pc;
  double pe_ratio = focused.pe / broad.pe;
  bool ok = pc_ratio >= 4.4 && pc_ratio <= 5.0 && pe_ratio >= 2.7 && pe_ratio <= 2.9;
  return {ok, "pc ratio = " + fmt(pc_ratio) + " in [4.4,5.0], pe ratio = " + fmt(pe_ratio) +
                  " in [2.7,2.9]"};
}

std::pair<bool, std::string> analytic_consistency() {
  // closed form solves the rate equation
  const double rs[] = {0.1, 0.5, 1.0, 2.0, 5.0};
  const double setups[][2] = {{400.0, 4.0}, {50.0, 5.0}};
  double worst_resid_frac = 0.0;
  for (double r : rs) {
    for (const auto& su : setups) {
      LogisticParams p{r, su[0], su[1]};
      for (int i = 0; i < 100; ++i) {
        double t = 20.0 * i / 99.0;
        double expmrt = std::exp(-p.r * t);
        double den = p.E0 + (p.N - p.E0) * expmrt;
        double analytic = p.r * p.N * p.E0 * (p.N - p.E0) * expmrt / (den * den);
        double resid = std::fabs(analytic - logistic_rhs(p, logistic_E(p, t)));
        worst_resid_frac = std::max(worst_resid_frac, resid / (1e-9 * p.r * p.N));
      }
    }
  }
  if (worst_resid_frac >= 1.0) {
    return {false, "derivative residual " + fmt(worst_resid_frac) + "x the 1e-9*r*N bound"};
  }

  // integrator against the closed form
  LogisticParams p{0.5, 400.0, 4.0};
  Trajectory tr = integrate_logistic(p, 0.0, 20.0, 0.001);
  double worst_rel = 0.0;
  for (const auto& s : tr.samples) {
    double exact = logistic_E(p, s.t);
    worst_rel = std::max(worst_rel, std::fabs(s.E - exact) / exact);
  }
  if (worst_rel >= 1e-6) return {false, "integrator rel error " + fmt(worst_rel) + " >= 1e-6"};

  // decay model with a = 0 against the fixed-population trajectory
  LinearDecayParams flat{0.5, 400.0, 0.0, 4.0};
  Trajectory tr2 = integrate_linear_decay(flat, 0.0, 20.0, 0.001);
  double worst_abs = 0.0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    worst_abs = std::max(worst_abs, std::fabs(tr.samples[i].E - tr2.samples[i].E));
  }
  if (worst_abs > 1e-12) return {false, "a=0 trajectory deviates by " + fmt(worst_abs)};

  return {true, "derivative residual " + fmt(worst_resid_frac) + "x bound, integrator rel " +
                    fmt(worst_rel) + ", a=0 deviation " + fmt(worst_abs)};
}

std::pair<bool, std::string> integrator_order() {
  LogisticParams p{0.5, 400.0, 4.0};
  auto max_err = [&](double h) {
    Trajectory tr = integrate_logistic(p, 0.0, 20.0, h);
    double m = 0.0;
    for (const auto& s : tr.samples) m = std::max(m, std::fabs(s.E - logistic_E(p, s.t)));
    return m;
  };
  double r1 = max_err(0.1) / max_err(0.05);
  double r2 = max_err(0.05) / max_err(0.025);
  bool ok = r1 >= 8.0 && r1 <= 32.0 && r2 >= 8.0 && r2 <= 32.0;
  return {ok, "error ratios per halving: " + fmt(r1) + ", " + fmt(r2) + " (need [8,32])"};
}

std::pair<bool, std::string> fit_recovery() {
  LogisticParams truth{0.5, 400.0, 4.0};

  ExposureSeries clean;
  for (int i = 0; i < 25; ++i) {
    double t = 12.0 * i / 24.0;
    clean.points.push_back({t, logistic_E(truth, t)});
  }
  FitResult noiseless = fit(clean, ModelVariant::logistic);
  double r_err = std::fabs(std::get<LogisticParams>(noiseless.params).r - truth.r) / truth.r;
  if (r_err >= 1e-4 || noiseless.sse >= 1e-8) {
    return {false, "noiseless: r rel err " + fmt(r_err) + ", sse " + fmt(noiseless.sse)};
  }

  std::vector<double> r_errs, n_errs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SplitMix64 rng(seed);
    ExposureSeries noisy;
    for (int i = 0; i < 33; ++i) {
      double t = 16.0 * i / 32.0;
      noisy.points.push_back({t, logistic_E(truth, t) + 0.02 * truth.N * gaussian(rng)});
    }
    FitResult res = fit(noisy, ModelVariant::logistic);
    const auto& fp = std::get<LogisticParams>(res.params);
    r_errs.push_back(std::fabs(fp.r - truth.r) / truth.r);
    n_errs.push_back(std::fabs(fp.N - truth.N) / truth.N);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  double med_r = median(r_errs), med_n = median(n_errs);
  bool ok = med_r < 0.05 && med_n < 0.02;
  return {ok, "noiseless r err " + fmt(r_err) + ", sse " + fmt(noiseless.sse) +
                  "; noisy medians: r " + fmt(med_r) + " (<0.05), N " + fmt(med_n) + " (<0.02)"};
}

std::pair<bool, std::string> simulator_roundtrip() {
  SimConfig cfg;
  cfg.mode = SimMode::branching;
  cfg.pool_size = 500;
  cfg.seeds = 3;
  cfg.p_schedule = {0.38};
  cfg.offspring.kind = OffspringSpec::Kind::poisson;
  cfg.offspring.lambda = 3.0;
  cfg.max_generations = 10000;

  ReplicationRun run = replicate(cfg, 200, 20240101);

  std::int64_t pooled_exposed = 0, pooled_infective = 0;
  for (const auto& row : run.aggregate.pooled_per_generation) {
    pooled_exposed += row.exposed_count;
    pooled_infective += row.infective_count;
  }
  double p_hat = static_cast<double>(pooled_infective) / static_cast<double>(pooled_exposed);
  double se = std::sqrt(0.38 * 0.62 / static_cast<double>(pooled_exposed));
  bool p_ok = std::fabs(p_hat - 0.38) <= 3.0 * se;

  int mismatches = 0;
  for (const auto& r : run.results) {
    CascadeGraph g = build_cascade(r.log);
    if (generation_stats(g) != r.per_generation || wave_count(g) != r.waves) ++mismatches;
  }
  bool ok = p_ok && mismatches == 0;
  return {ok, "p_hat = " + fmt(p_hat) + " vs 0.38 (|diff| = " + fmt(std::fabs(p_hat - 0.38)) +
                  ", 3SE = " + fmt(3.0 * se) + ", n = " + std::to_string(pooled_exposed) +
                  "); analyzer mismatches: " + std::to_string(mismatches) + "/200"};
}

std::pair<bool, std::string> extinction_property() {
  SimConfig cfg;
  cfg.mode = SimMode::branching;
  cfg.pool_size = 100000;
  cfg.seeds = 3;
  cfg.p_schedule = {0.2};  // lambda * p = 0.6
  cfg.offspring.kind = OffspringSpec::Kind::poisson;
  cfg.offspring.lambda = 3.0;
  cfg.max_generations = 10000;

  ReplicationRun run = replicate(cfg, 100, 555000);
  int extinct = 0, max_waves = 0;
  double mean_waves = 0.0;
  for (const auto& r : run.results) {
    if (r.extinct) ++extinct;
    max_waves = std::max(max_waves, r.waves);
    mean_waves += r.waves;
  }
  mean_waves /= 100.0;
  bool ok = extinct == 100 && max_waves < 10000;
  return {ok, "extinct " + std::to_string(extinct) + "/100, waves mean " + fmt(mean_waves) +
                  " max " + std::to_string(max_waves)};
}

std::pair<bool, std::string> cascade_fixture() {
  CampaignLog log;
  log.events = {{"e1", 1.0, "A", "B"}, {"e2", 2.0, "B", "C"}, {"e3", 3.0, "A", "C"}};
  log.seeds = {"A"};
  finalize_log(log);

  CascadeGraph g = build_cascade(log);
  auto stats = generation_stats(g);
  bool ok = g.unique_edges.size() == 2 && g.non_unique_edges.size() == 1 &&
            g.nodes.at("A").generation == 0 && g.nodes.at("B").generation == 1 &&
            g.nodes.at("C").generation == 2 && wave_count(g) == 2 && stats.size() == 2 &&
            stats[0].p_g == 1.0 && stats[1].p_g == 0.0;
  return {ok, "2 unique + 1 non-unique, generations 0/1/2, waves 2, p_1 = 1.0, p_2 = 0.0"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("SOURCE_DATE_EPOCH=1700000000 ") + VIRALTRACE_BIN + " " + args +
                    " >/dev/null 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::pair<bool, std::string> cli_determinism() {
  fs::path dir = fs::temp_directory_path() / "viraltrace_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::ofstream cfg(dir / "config.json");
  cfg << R"({"mode":"branching","pool_size":500,"seeds":3,"p":0.38,)"
      << R"("offspring":{"type":"poisson","lambda":3.0},"max_generations":10000,"rng_seed":42})";
  cfg.close();

  std::string cfg_path = (dir / "config.json").string();
  if (run_cli("simulate " + cfg_path + " --reps 2 --seed 42 --out " + (dir / "runA").string()) != 0)
    return {false, "first simulate run failed"};
  if (run_cli("simulate " + cfg_path + " --reps 2 --seed 42 --out " + (dir / "runB").string()) != 0)
    return {false, "second simulate run failed"};

  for (const char* f : {"rep_0000.csv", "rep_0000.csv.seeds", "rep_0001.csv", "rep_0001.csv.seeds",
                        "aggregate.json", "manifest.json"}) {
    if (slurp(dir / "runA" / f) != slurp(dir / "runB" / f)) {
      return {false, std::string("file differs between reruns: ") + f};
    }
  }

  if (run_cli("stats " + (dir / "runA" / "rep_0000.csv").string() + " --out " +
              (dir / "check").string()) != 0)
    return {false, "stats on simulated log failed"};
  json agg = json::parse(slurp(dir / "runA" / "aggregate.json"));
  json rep = agg["per_rep"][0];
  json report = json::parse(slurp(dir / "check" / "rep_0000_stats.json"));
  bool agree = report["summary"]["waves"] == rep["waves"] &&
               report["summary"]["total_contacts"] == rep["contacts"] &&
               report["summary"]["total_exposed"] == rep["exposed"] &&
               report["summary"]["total_infective"] == rep["infective"] &&
               report["per_generation"] == rep["per_generation"];
  if (!agree) return {false, "simulate -> stats pipeline disagrees with embedded stats"};
  return {true, "reruns byte-identical, pipeline stats agree exactly"};
}

}  // namespace

int main() {
  Gate gate;
  gate.run(1, "reference parameter reproduction (tol 0.005)", 10.0, table_reproduction);
  gate.run(2, "headline pc/pe ratios", 10.0, headline_ratio);
  gate.run(3, "analytic consistency of the model family", 10.0, analytic_consistency);
  gate.run(4, "integrator fourth-order convergence", 10.0, integrator_order);
  gate.run(5, "fit recovery, noiseless and 2% noise", 30.0, fit_recovery);
  gate.run(6, "simulator-estimator roundtrip, 200 replications", 60.0, simulator_roundtrip);
  gate.run(7, "subcritical extinction, 100 replications", 60.0, extinction_property);
  gate.run(8, "three-event cascade fixture", 10.0, cascade_fixture);
  gate.run(9, "CLI determinism and pipeline agreement", 60.0, cli_determinism);

  if (gate.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", gate.failures);
  return 1;
}
