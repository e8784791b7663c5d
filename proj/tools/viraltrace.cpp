#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viraltrace/cascade.hpp"
#include "viraltrace/events.hpp"
#include "viraltrace/fitting.hpp"
#include "viraltrace/params.hpp"
#include "viraltrace/semodels.hpp"
#include "viraltrace/simulate.hpp"
#include "viraltrace/version.hpp"

namespace fs = std::filesystem;
using namespace viraltrace;
using nlohmann::json;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::malformed_record:
    case Errc::duplicate_event_id:
    case Errc::self_invitation:
    case Errc::negative_timestamp:
    case Errc::empty_log:
    case Errc::io_error:
      return 2;
    case Errc::inconsistent_log:
      return 3;
    default:
      return 4;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  out << content;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  std::time_t t = 0;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string config_hash;
  std::vector<std::uint64_t> rng_seeds;

  json to_json() const {
    return {{"command", command},
            {"tool_version", kVersion},
            {"inputs", inputs},
            {"outputs", outputs},
            {"config_hash", config_hash},
            {"rng_seeds", rng_seeds},
            {"timestamp_utc", utc_timestamp()}};
  }
};

std::string out_directory(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* e = std::getenv("VIRALTRACE_OUT")) return e;
  return ".";
}

LogFormat detect_format(const std::string& path, const std::string& override) {
  if (override == "csv") return LogFormat::csv;
  if (override == "json") return LogFormat::json;
  return fs::path(path).extension() == ".json" ? LogFormat::json : LogFormat::csv;
}

CampaignLog load_log(const std::string& path, const std::string& seeds_path,
                     const std::string& format_override) {
  std::string content = read_file(path);
  std::istringstream in(content);

  std::optional<std::vector<UserId>> seeds;
  std::string sp = seeds_path;
  if (sp.empty()) {
    std::string candidate = path + ".seeds";  // sidecar a simulate run leaves next to the log
    if (fs::exists(candidate)) sp = candidate;
  }
  if (!sp.empty()) {
    std::istringstream sin(read_file(sp));
    seeds = parse_seed_list(sin);
  }

  std::string stem = fs::path(path).stem().string();
  CampaignLog log = parse_log(in, detect_format(path, format_override),
                              seeds ? &*seeds : nullptr, stem);
  return log;
}

std::string campaign_name(const CampaignLog& log, const std::string& path) {
  return log.campaign_id.empty() ? fs::path(path).stem().string() : log.campaign_id;
}


std::string with_provenance(const std::string& report_text, const std::string& config_hash,
                            const std::string& manifest_name) {
  json doc = json::parse(report_text);
  doc["tool_version"] = kVersion;
  doc["config_hash"] = config_hash;
  doc["manifest"] = manifest_name;
  return doc.dump(2) + "\n";
}

std::string round2(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

// ---- stats ----------------------------------------------------------------

struct StatsBundle {
  CascadeGraph graph;
  CampaignSummary summary;
  std::vector<GenerationStats> gen_stats;
  GlobalParams params;
};

StatsBundle analyze(const CampaignLog& log) {
  StatsBundle b;
  b.graph = build_cascade(log);
  b.summary = summarize(b.graph, log);
  b.gen_stats = generation_stats(b.graph);
  b.params = compute_global_params(b.summary, b.gen_stats);
  return b;
}

int cmd_stats(const std::string& log_path, const std::string& seeds_path,
              const std::string& format, const std::string& out_flag) {
  CampaignLog log = load_log(log_path, seeds_path, format);
  StatsBundle b = analyze(log);

  std::string name = campaign_name(log, log_path);
  std::string dir = out_directory(out_flag);
  std::string stem = fs::path(log_path).stem().string();
  std::string report_path = (fs::path(dir) / (stem + "_stats.json")).string();

  Manifest m;
  m.command = "stats";
  m.inputs = {log_path};
  m.outputs = {stem + "_stats.json"};
  m.config_hash = hex64(fnv1a64(log_path));
  write_file((fs::path(dir) / (stem + "_stats_manifest.json")).string(), m.to_json().dump(2) + "\n");
  write_file(report_path,
             with_provenance(params_report_json(name, b.summary, b.params, b.gen_stats, log.seeds_inferred),
                             m.config_hash, stem + "_stats_manifest.json"));

  std::cout << "campaign: " << name << "\n";
  std::cout << "contacts=" << b.summary.total_contacts << " exposed=" << b.summary.total_exposed
            << " infective=" << b.summary.total_infective
            << " (with seeds: " << b.summary.total_infective_with_seeds << ")"
            << " waves=" << b.summary.waves << " duration_s=" << format_double(b.summary.duration)
            << "\n";
  std::cout << "pe=" << round2(b.params.pe) << " pc=" << round2(b.params.pc)
            << " p=" << round2(b.params.p) << " p_std=" << round2(b.params.p_std) << "\n";
  if (log.seeds_inferred) std::cout << "note: seeds inferred from the log\n";
  std::cout << "report: " << report_path << "\n";
  return 0;
}

// ---- generations ----------------------------------------------------------

std::string generations_csv(const std::vector<GenerationStats>& stats, int first) {
  std::string out = "generation,exposed,infective,p_g\n";
  int count = 0;
  for (const auto& row : stats) {
    if (first > 0 && count >= first) break;
    out += std::to_string(row.generation);
    out += ',';
    out += std::to_string(row.exposed_count);
    out += ',';
    out += std::to_string(row.infective_count);
    out += ',';
    if (row.p_g) out += format_double(*row.p_g);
    out += '\n';
    ++count;
  }
  return out;
}

int cmd_generations(const std::string& log_path, const std::string& seeds_path,
                    const std::string& format, int first, const std::string& out_flag) {
  CampaignLog log = load_log(log_path, seeds_path, format);
  auto stats = generation_stats(build_cascade(log));
  std::string csv = generations_csv(stats, first);

  std::string dir = out_directory(out_flag);
  std::string stem = fs::path(log_path).stem().string();
  std::string csv_path = (fs::path(dir) / (stem + "_generations.csv")).string();
  write_file(csv_path, csv);

  Manifest m;
  m.command = "generations";
  m.inputs = {log_path};
  m.outputs = {stem + "_generations.csv"};
  m.config_hash = hex64(fnv1a64(log_path + "|" + std::to_string(first)));
  write_file((fs::path(dir) / (stem + "_generations_manifest.json")).string(),
             m.to_json().dump(2) + "\n");

  std::cout << csv;
  return 0;
}

// ---- fit ------------------------------------------------------------------

std::pair<double, double> parse_window(const std::string& window) {
  auto colon = window.find(':');
  if (colon == std::string::npos) fail(Errc::invalid_config, "window must be 't0:t1'");
  try {
    double t0 = std::stod(window.substr(0, colon));
    double t1 = std::stod(window.substr(colon + 1));
    return {t0, t1};
  } catch (const std::exception&) {
    fail(Errc::invalid_config, "window must be 't0:t1' with numeric bounds");
  }
}

FitPins parse_pins(const std::string& pins_text) {
  FitPins pins;
  if (pins_text.empty()) return pins;
  std::istringstream ss(pins_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(Errc::invalid_config, "pin must be name=value");
    std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      fail(Errc::invalid_config, "pin value for '" + key + "' is not numeric");
    }
    if (key == "r") {
      pins.r = value;
    } else if (key == "N") {
      pins.N = value;
    } else if (key == "E0") {
      pins.E0 = value;
    } else if (key == "a") {
      pins.a = value;
    } else {
      fail(Errc::invalid_config, "unknown pin '" + key + "' (use r, N, E0, a)");
    }
  }
  return pins;
}

ActivityProfile load_activity_csv(const std::string& path, double seconds_per_unit) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("bin_start,active_count", 0) != 0) {
    fail(Errc::malformed_record, "activity file '" + path + "' must start with bin_start,active_count");
  }
  ActivityProfile p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) fail(Errc::malformed_record, "activity row '" + line + "'");
    try {
      p.bins.push_back({std::stod(line.substr(0, comma)), std::stoll(line.substr(comma + 1))});
    } catch (const std::exception&) {
      fail(Errc::malformed_record, "activity row '" + line + "'");
    }
  }
  if (p.bins.empty()) fail(Errc::malformed_record, "activity file '" + path + "' has no bins");
  p.bin_width = p.bins.size() >= 2 ? p.bins[1].bin_start - p.bins[0].bin_start : 1.0;
  return scale_activity_time(p, seconds_per_unit);
}

int cmd_fit(const std::string& log_path, const std::string& seeds_path, const std::string& format,
            const std::string& model, const std::string& window, double grid,
            double seconds_per_unit, const std::string& activity_path, double activity_bin_width,
            const std::string& pins_text, double ode_step, const std::string& out_flag) {
  CampaignLog log = load_log(log_path, seeds_path, format);
  CascadeGraph graph = build_cascade(log);

  auto [t0, t1] = parse_window(window);
  ExposureSeries series = exposure_series(graph, t0, t1, grid, seconds_per_unit);

  ModelVariant variant;
  if (model == "logistic") {
    variant = ModelVariant::logistic;
  } else if (model == "effective-n") {
    variant = ModelVariant::effective_n;
  } else if (model == "ode") {
    variant = ModelVariant::linear_decay;
  } else {
    fail(Errc::invalid_config, "model must be logistic|effective-n|ode");
  }

  std::optional<ActivityProfile> activity;
  if (!activity_path.empty()) {
    activity = load_activity_csv(activity_path, seconds_per_unit);
  } else if (activity_bin_width > 0.0) {
    activity = scale_activity_time(activity_from_log(log, activity_bin_width * seconds_per_unit),
                                   seconds_per_unit);
  }
  if (variant == ModelVariant::effective_n && !activity) {
    fail(Errc::invalid_config,
         "the effective-n model needs activity data: pass --activity FILE or --activity-from-log WIDTH");
  }

  FitResult result = fit(series, variant, parse_pins(pins_text), activity, ode_step);
  ResidualReport residuals = residual_report(series, result, ode_step);

  std::string dir = out_directory(out_flag);
  std::string stem = fs::path(log_path).stem().string();
  std::string fit_path = (fs::path(dir) / (stem + "_fit.json")).string();
  std::string curve_path = (fs::path(dir) / (stem + "_fit_curve.csv")).string();

  Manifest m;
  m.command = "fit";
  m.inputs = {log_path};
  if (!activity_path.empty()) m.inputs.push_back(activity_path);
  m.outputs = {stem + "_fit.json", stem + "_fit_curve.csv"};
  m.config_hash = hex64(fnv1a64(log_path + "|" + model + "|" + window + "|" + format_double(grid) +
                                "|" + pins_text));
  write_file((fs::path(dir) / (stem + "_fit_manifest.json")).string(), m.to_json().dump(2) + "\n");
  write_file(fit_path, with_provenance(fit_result_json(result), m.config_hash, stem + "_fit_manifest.json"));
  write_file(curve_path, residual_csv(residuals));

  std::cout << fit_result_json(result);
  std::cout << "curve: " << curve_path << "\n";
  return 0;
}

// ---- simulate ---------------------------------------------------------------

json gen_stats_to_json(const std::vector<GenerationStats>& stats) {
  auto rows = json::array();
  for (const auto& row : stats) {
    json r{{"generation", row.generation},
           {"exposed", row.exposed_count},
           {"infective", row.infective_count}};
    if (row.p_g) {
      r["p_g"] = *row.p_g;
    } else {
      r["p_g"] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

int cmd_simulate(const std::string& config_path, std::int64_t reps, std::int64_t seed_flag,
                 const std::string& out_flag) {
  std::string config_text = read_file(config_path);
  SimConfig cfg = sim_config_from_json(config_text);
  std::uint64_t base_seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : cfg.rng_seed;

  ReplicationRun run = replicate(cfg, reps, base_seed);

  std::string dir = out_directory(out_flag);
  std::vector<std::string> outputs;
  json per_rep = json::array();
  for (std::int64_t i = 0; i < reps; ++i) {
    const SimResult& r = run.results[static_cast<std::size_t>(i)];
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%04lld", static_cast<long long>(i));
    std::string log_path = (fs::path(dir) / (std::string(name) + ".csv")).string();
    std::string seeds_path = log_path + ".seeds";
    write_file(log_path, write_csv(r.log));
    write_file(seeds_path, write_seed_list(r.log));
    outputs.push_back(std::string(name) + ".csv");
    outputs.push_back(std::string(name) + ".csv.seeds");

    std::int64_t exposed = 0, infective = 0;
    for (const auto& row : r.per_generation) {
      exposed += row.exposed_count;
      infective += row.infective_count;
    }
    per_rep.push_back({{"rep", i},
                       {"rng_seed", base_seed + static_cast<std::uint64_t>(i)},
                       {"log_file", std::string(name) + ".csv"},
                       {"waves", r.waves},
                       {"extinct", r.extinct},
                       {"pool_exhausted", r.pool_exhausted},
                       {"contacts", r.log.events.size()},
                       {"exposed", exposed},
                       {"infective", infective},
                       {"per_generation", gen_stats_to_json(r.per_generation)}});
  }

  const auto& agg = run.aggregate;
  json aggregate{{"n_reps", agg.n_reps},
                 {"mean_waves", agg.mean_waves},
                 {"std_waves", agg.std_waves},
                 {"mean_contacts", agg.mean_contacts},
                 {"std_contacts", agg.std_contacts},
                 {"mean_exposed", agg.mean_exposed},
                 {"std_exposed", agg.std_exposed},
                 {"mean_infective", agg.mean_infective},
                 {"std_infective", agg.std_infective},
                 {"extinct_fraction", agg.extinct_fraction},
                 {"pooled_per_generation", gen_stats_to_json(agg.pooled_per_generation)}};
  if (agg.pooled_params_defined) {
    aggregate["pooled_params"] = {{"pe", agg.pooled_params.pe},
                                  {"pc", agg.pooled_params.pc},
                                  {"p", agg.pooled_params.p},
                                  {"p_std", agg.pooled_params.p_std}};
  } else {
    aggregate["pooled_params"] = nullptr;
  }

  std::string config_hash = hex64(fnv1a64(sim_config_to_json(cfg)));
  json doc{{"tool_version", kVersion},
           {"config", json::parse(sim_config_to_json(cfg))},
           {"config_hash", config_hash},
           {"base_seed", base_seed},
           {"manifest", "manifest.json"},
           {"aggregate", aggregate},
           {"per_rep", per_rep}};
  std::string agg_path = (fs::path(dir) / "aggregate.json").string();
  write_file(agg_path, doc.dump(2) + "\n");
  outputs.push_back("aggregate.json");

  Manifest m;
  m.command = "simulate";
  m.inputs = {config_path};
  m.outputs = outputs;
  m.config_hash = config_hash;
  for (std::int64_t i = 0; i < reps; ++i) m.rng_seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
  write_file((fs::path(dir) / "manifest.json").string(), m.to_json().dump(2) + "\n");

  std::cout << "reps=" << reps << " base_seed=" << base_seed
            << " mean_contacts=" << agg.mean_contacts << " mean_waves=" << agg.mean_waves
            << " extinct_fraction=" << agg.extinct_fraction << "\n";
  std::cout << "aggregate: " << agg_path << "\n";
  return 0;
}

// ---- compare ----------------------------------------------------------------

int cmd_compare(const std::vector<std::string>& log_paths, bool markdown,
                const std::string& out_flag) {
  if (log_paths.size() < 2) {
    fail(Errc::fewer_than_two_campaigns, "compare needs at least two logs");
  }
  std::vector<std::pair<std::string, GlobalParams>> campaigns;
  for (const auto& path : log_paths) {
    CampaignLog log = load_log(path, "", "");
    StatsBundle b = analyze(log);
    campaigns.emplace_back(campaign_name(log, path), b.params);
  }
  CampaignComparison cmp = compare_campaigns(campaigns);

  std::string dir = out_directory(out_flag);
  std::string report_path = (fs::path(dir) / "comparison.json").string();

  Manifest m;
  m.command = "compare";
  m.inputs = log_paths;
  m.outputs = {"comparison.json"};
  std::string joined;
  for (const auto& p : log_paths) joined += p + "|";
  m.config_hash = hex64(fnv1a64(joined));
  write_file((fs::path(dir) / "comparison_manifest.json").string(), m.to_json().dump(2) + "\n");
  write_file(report_path, with_provenance(comparison_report_json(cmp), m.config_hash, "comparison_manifest.json"));

  if (markdown) {
    std::cout << comparison_report_markdown(cmp);
  } else {
    std::cout << "campaign  pe  pc  p  p_std\n";
    for (const auto& [name, gp] : cmp.campaigns) {
      std::cout << name << "  " << round2(gp.pe) << "  " << round2(gp.pc) << "  " << round2(gp.p)
                << "  " << round2(gp.p_std) << "\n";
    }
    std::cout << "max pe: " << cmp.max_pe_campaign << ", max pc: " << cmp.max_pc_campaign << "\n";
  }
  std::cout << "report: " << report_path << "\n";
  return 0;
}

// ---- export -----------------------------------------------------------------

int cmd_export(const std::string& log_path, const std::string& seeds_path,
               const std::string& format, const std::string& what, const std::string& output,
               const std::string& window, double grid, double seconds_per_unit, double bin_width,
               const std::string& out_flag) {
  CampaignLog log = load_log(log_path, seeds_path, format);

  std::string payload;
  std::string default_name;
  if (what == "cascade-dot") {
    payload = export_cascade(build_cascade(log), GraphFormat::dot);
    default_name = "cascade.dot";
  } else if (what == "cascade-json") {
    payload = export_cascade(build_cascade(log), GraphFormat::json);
    default_name = "cascade.json";
  } else if (what == "exposure-csv") {
    auto [t0, t1] = parse_window(window);
    payload = exposure_csv(exposure_series(build_cascade(log), t0, t1, grid, seconds_per_unit));
    default_name = "exposure.csv";
  } else if (what == "activity-csv") {
    ActivityProfile p = activity_from_log(log, bin_width);
    payload = "bin_start,active_count\n";
    for (const auto& b : p.bins) {
      payload += format_double(b.bin_start);
      payload += ',';
      payload += std::to_string(b.active_count);
      payload += '\n';
    }
    default_name = "activity.csv";
  } else {
    fail(Errc::invalid_config, "unknown export kind '" + what + "'");
  }

  std::string dir = out_directory(out_flag);
  std::string stem = fs::path(log_path).stem().string();
  std::string out_path =
      output.empty() ? (fs::path(dir) / (stem + "_" + default_name)).string() : output;
  write_file(out_path, payload);

  Manifest m;
  m.command = "export";
  m.inputs = {log_path};
  m.outputs = {output.empty() ? stem + "_" + default_name : output};
  m.config_hash = hex64(fnv1a64(log_path + "|" + what));
  write_file(out_path + ".manifest.json", m.to_json().dump(2) + "\n");

  std::cout << "written: " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viraltrace: cascade reconstruction, epidemic parameters, SE-model fits and simulation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_dir;

  // stats
  auto* stats = app.add_subcommand("stats", "campaign summary and global parameters");
  stats->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::string s_log, s_seeds, s_format;
  stats->add_option("log", s_log, "event log (csv or json)")->required();
  stats->add_option("--seeds", s_seeds, "seed sidecar file (one user id per line)");
  stats->add_option("--format", s_format, "force log format")->check(CLI::IsMember({"csv", "json"}));

  // generations
  auto* gens = app.add_subcommand("generations", "per-generation exposure/response table");
  gens->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::string g_log, g_seeds, g_format;
  int g_first = 0;
  gens->add_option("log", g_log)->required();
  gens->add_option("--seeds", g_seeds);
  gens->add_option("--format", g_format)->check(CLI::IsMember({"csv", "json"}));
  gens->add_option("--first", g_first, "limit to the first N generations");

  // fit
  auto* fitc = app.add_subcommand("fit", "least-squares fit of the exposure curve");
  fitc->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::string f_log, f_seeds, f_format, f_model = "logistic", f_window = "0:6";
  std::string f_activity, f_pins;
  double f_grid = 1.0 / 12.0, f_spu = 3600.0, f_act_bw = 0.0, f_ode_step = kDefaultStep;
  fitc->add_option("log", f_log)->required();
  fitc->add_option("--seeds", f_seeds);
  fitc->add_option("--format", f_format)->check(CLI::IsMember({"csv", "json"}));
  fitc->add_option("--model", f_model)->check(CLI::IsMember({"logistic", "effective-n", "ode"}));
  fitc->add_option("--window", f_window, "fit window t0:t1 in hours (default 0:6)");
  fitc->add_option("--grid", f_grid, "sampling step in hours (default 1/12 = 5 min)");
  fitc->add_option("--seconds-per-unit", f_spu, "log seconds per series time unit (default 3600)");
  fitc->add_option("--activity", f_activity, "activity csv (bin_start,active_count in log seconds)");
  fitc->add_option("--activity-from-log", f_act_bw, "derive activity from the log, bin width in hours");
  fitc->add_option("--pin", f_pins, "pin parameters, e.g. r=0.5,E0=4");
  fitc->add_option("--ode-step", f_ode_step, "integration step in hours for --model ode");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the seeded cascade generator");
  sim->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::string m_config;
  std::int64_t m_reps = 1, m_seed = -1;
  sim->add_option("config", m_config, "simulation config json")->required();
  sim->add_option("--reps", m_reps, "number of replications");
  sim->add_option("--seed", m_seed, "base rng seed (default: config rng_seed)");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare parameters across campaigns");
  cmp->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::vector<std::string> c_logs;
  bool c_markdown = false;
  cmp->add_option("logs", c_logs, "two or more event logs")->expected(-1);
  cmp->add_flag("--markdown", c_markdown, "print a markdown table");

  // export
  auto* exp = app.add_subcommand("export", "write plot-ready artifacts");
  exp->add_option("--out", out_dir, "output directory (default: $VIRALTRACE_OUT or .)");
  std::string e_log, e_seeds, e_format, e_what, e_output, e_window = "0:6";
  double e_grid = 1.0 / 12.0, e_spu = 3600.0, e_bin_width = 3600.0;
  exp->add_option("log", e_log)->required();
  exp->add_option("--seeds", e_seeds);
  exp->add_option("--format", e_format)->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--what", e_what, "cascade-dot|cascade-json|exposure-csv|activity-csv")
      ->required()
      ->check(CLI::IsMember({"cascade-dot", "cascade-json", "exposure-csv", "activity-csv"}));
  exp->add_option("--output", e_output, "output file (default: derived name in --out dir)");
  exp->add_option("--window", e_window, "exposure window t0:t1 in hours");
  exp->add_option("--grid", e_grid, "exposure grid step in hours");
  exp->add_option("--seconds-per-unit", e_spu, "log seconds per exposure time unit");
  exp->add_option("--bin-width", e_bin_width, "activity bin width in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 4;
  }

  try {
    if (*stats) return cmd_stats(s_log, s_seeds, s_format, out_dir);
    if (*gens) return cmd_generations(g_log, g_seeds, g_format, g_first, out_dir);
    if (*fitc) {
      return cmd_fit(f_log, f_seeds, f_format, f_model, f_window, f_grid, f_spu, f_activity,
                     f_act_bw, f_pins, f_ode_step, out_dir);
    }
    if (*sim) return cmd_simulate(m_config, m_reps, m_seed, out_dir);
    if (*cmp) return cmd_compare(c_logs, c_markdown, out_dir);
    if (*exp) {
      return cmd_export(e_log, e_seeds, e_format, e_what, e_output, e_window, e_grid, e_spu,
                        e_bin_width, out_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
