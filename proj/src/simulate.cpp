#include "viraltrace/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "viraltrace/rng.hpp"

namespace viraltrace {

double SimConfig::p_for_generation(int g) const {
  if (p_schedule.empty() || g < 1) return 0.0;
  auto idx = static_cast<std::size_t>(g - 1);  // entry k applies to generation k+1
  if (idx >= p_schedule.size()) idx = p_schedule.size() - 1;
  return p_schedule[idx];
}

void SimConfig::validate() const {
  if (seeds < 1) fail(Errc::invalid_config, "seeds must be >= 1");
  if (max_generations < 1) fail(Errc::invalid_config, "max_generations must be >= 1");
  if (p_schedule.empty()) fail(Errc::invalid_config, "p_schedule must not be empty");
  for (double p : p_schedule) {
    if (!(p >= 0.0 && p <= 1.0)) fail(Errc::invalid_config, "p values must lie in [0,1]");
  }
  switch (offspring.kind) {
    case OffspringSpec::Kind::poisson:
      if (!(offspring.lambda >= 0.0) || !std::isfinite(offspring.lambda)) {
        fail(Errc::invalid_config, "poisson lambda must be >= 0");
      }
      break;
    case OffspringSpec::Kind::fixed:
      if (offspring.k < 0) fail(Errc::invalid_config, "fixed offspring count must be >= 0");
      break;
    case OffspringSpec::Kind::empirical:
      if (offspring.values.empty()) fail(Errc::invalid_config, "empirical offspring list is empty");
      for (auto v : offspring.values) {
        if (v < 0) fail(Errc::invalid_config, "empirical offspring values must be >= 0");
      }
      break;
  }
  if (mode == SimMode::branching) {
    if (pool_size < 1) fail(Errc::invalid_config, "pool_size must be >= 1");
    if (seeds > pool_size) fail(Errc::invalid_config, "seeds cannot exceed pool_size");
  } else {
    if (!(n0 > 0.0) || !std::isfinite(n0)) fail(Errc::invalid_config, "n0 must be > 0");
    if (!(a >= 0.0) || !std::isfinite(a)) fail(Errc::invalid_config, "a must be >= 0");
    if (!(tick > 0.0)) fail(Errc::invalid_config, "tick must be > 0");
    if (!(send_rate >= 0.0)) fail(Errc::invalid_config, "send_rate must be >= 0");
  }
}

namespace {

std::string user_id(std::int64_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "u%06lld", static_cast<long long>(index));
  return buf;
}

std::string event_id(std::int64_t counter) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "e%08lld", static_cast<long long>(counter));
  return buf;
}

// One uniform per draw (fixed consumes none; degenerate specs return 0 and
// consume none, the process then just stops for lack of sends).
std::int64_t draw_offspring(const OffspringSpec& spec, const std::vector<std::int64_t>& positives,
                            SplitMix64& rng) {
  switch (spec.kind) {
    case OffspringSpec::Kind::poisson:
      if (spec.lambda <= 0.0) return 0;
      return zero_truncated_poisson_from_uniform(spec.lambda, rng.uniform());
    case OffspringSpec::Kind::fixed:
      return spec.k;
    case OffspringSpec::Kind::empirical: {
      if (positives.empty()) return 0;
      auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(positives.size()));
      if (idx >= positives.size()) idx = positives.size() - 1;
      return positives[idx];
    }
  }
  return 0;
}

// uniform over [0, pool) excluding self
std::int64_t draw_target(std::int64_t pool, std::int64_t self, SplitMix64& rng) {
  auto idx = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(pool - 1));
  if (idx >= pool - 1) idx = pool - 2;
  if (idx >= self) ++idx;
  return idx;
}

struct Bookkeeping {
  std::vector<std::int64_t> exposed_by_gen;    // index g-1
  std::vector<std::int64_t> infective_by_gen;

  void note_exposed(int g) {
    if (exposed_by_gen.size() < static_cast<std::size_t>(g)) {
      exposed_by_gen.resize(static_cast<std::size_t>(g), 0);
      infective_by_gen.resize(static_cast<std::size_t>(g), 0);
    }
    exposed_by_gen[static_cast<std::size_t>(g - 1)] += 1;
  }
  void note_infective(int g) { infective_by_gen[static_cast<std::size_t>(g - 1)] += 1; }

  std::vector<GenerationStats> rows() const {
    std::vector<GenerationStats> out;
    for (std::size_t i = 0; i < exposed_by_gen.size(); ++i) {
      GenerationStats row;
      row.generation = static_cast<int>(i) + 1;
      row.exposed_count = exposed_by_gen[i];
      row.infective_count = infective_by_gen[i];
      if (row.exposed_count > 0) {
        row.p_g = static_cast<double>(row.infective_count) / static_cast<double>(row.exposed_count);
      }
      out.push_back(row);
    }
    return out;
  }
};

SimResult run_branching(const SimConfig& cfg) {
  SplitMix64 rng(cfg.rng_seed);
  const std::int64_t pool = cfg.pool_size;
  const std::int64_t n_seeds = cfg.seeds;

  std::vector<std::int64_t> positives;
  if (cfg.offspring.kind == OffspringSpec::Kind::empirical) {
    for (auto v : cfg.offspring.values) {
      if (v > 0) positives.push_back(v);
    }
  }

  std::vector<std::uint8_t> exposed(static_cast<std::size_t>(pool), 0);
  std::vector<std::uint8_t> sent(static_cast<std::size_t>(pool), 0);
  std::vector<int> gen(static_cast<std::size_t>(pool), 0);
  for (std::int64_t i = 0; i < n_seeds; ++i) exposed[static_cast<std::size_t>(i)] = 1;

  Bookkeeping book;
  SimResult res;
  std::int64_t counter = 0;
  int max_sender_gen = -1;  // -1: nobody sent

  std::vector<std::int64_t> senders;
  for (std::int64_t i = 0; i < n_seeds; ++i) senders.push_back(i);

  for (int g = 0;; ++g) {
    if (senders.empty()) {
      res.extinct = true;
      break;
    }
    if (g > static_cast<int>(cfg.max_generations) - 1) break;  // cap hit, process still alive

    std::vector<std::int64_t> next;
    if (pool >= 2) {
      for (std::int64_t s : senders) {
        std::int64_t m = draw_offspring(cfg.offspring, positives, rng);
        for (std::int64_t j = 0; j < m; ++j) {
          std::int64_t target = draw_target(pool, s, rng);
          InvitationEvent ev;
          ev.event_id = event_id(counter++);
          ev.timestamp = static_cast<double>(g) * 3600.0;  // wave g senders, hours -> seconds
          ev.sender = user_id(s);
          ev.receiver = user_id(target);
          res.log.events.push_back(std::move(ev));

          if (!sent[static_cast<std::size_t>(s)]) {
            sent[static_cast<std::size_t>(s)] = 1;
            max_sender_gen = std::max(max_sender_gen, g);
            if (s >= n_seeds) book.note_infective(gen[static_cast<std::size_t>(s)]);
          }
          if (!exposed[static_cast<std::size_t>(target)]) {
            exposed[static_cast<std::size_t>(target)] = 1;
            gen[static_cast<std::size_t>(target)] = g + 1;
            book.note_exposed(g + 1);
            if (rng.uniform() < cfg.p_for_generation(g + 1)) next.push_back(target);
          }
        }
      }
    }
    senders = std::move(next);
  }

  res.waves = max_sender_gen < 0 ? 0 : 1 + max_sender_gen;
  res.per_generation = book.rows();
  for (std::int64_t i = 0; i < n_seeds; ++i) res.log.seeds.push_back(user_id(i));
  return res;
}

SimResult run_time_driven(const SimConfig& cfg) {
  SplitMix64 rng(cfg.rng_seed);
  const std::int64_t n_seeds = cfg.seeds;
  const std::int64_t capacity = std::max(static_cast<std::int64_t>(std::llround(cfg.n0)), n_seeds);

  std::vector<std::uint8_t> exposed(static_cast<std::size_t>(capacity), 0);
  std::vector<std::uint8_t> sent(static_cast<std::size_t>(capacity), 0);
  std::vector<int> gen(static_cast<std::size_t>(capacity), 0);
  std::vector<std::int64_t> eligible_from(static_cast<std::size_t>(capacity), 0);

  Bookkeeping book;
  SimResult res;
  std::int64_t counter = 0;
  int max_sender_gen = -1;
  std::int64_t exposed_total = n_seeds;

  std::vector<std::int64_t> infectives;  // creation order, seeds first
  for (std::int64_t i = 0; i < n_seeds; ++i) {
    exposed[static_cast<std::size_t>(i)] = 1;
    infectives.push_back(i);
  }

  const double mean_sends = cfg.send_rate * cfg.tick;
  for (std::int64_t k = 0; k < cfg.max_generations; ++k) {
    double t_mid = (static_cast<double>(k) + 0.5) * cfg.tick;  // hours
    auto pool_raw = static_cast<std::int64_t>(std::llround(cfg.n0 - cfg.a * t_mid));
    if (pool_raw <= 0) {
      res.pool_exhausted = true;
      res.extinct = true;
      break;
    }
    std::int64_t pool = std::max(pool_raw, exposed_total);  // exposed users stay in the system

    std::size_t n_current = infectives.size();  // same-tick entrants wait for the next tick
    for (std::size_t si = 0; si < n_current; ++si) {
      std::int64_t s = infectives[si];
      if (eligible_from[static_cast<std::size_t>(s)] > k) continue;
      if (s >= pool) continue;  // paused while outside the shrunken pool
      if (pool < 2) continue;
      std::int64_t m = poisson_from_uniform(mean_sends, rng.uniform());
      for (std::int64_t j = 0; j < m; ++j) {
        std::int64_t target = draw_target(pool, s, rng);
        InvitationEvent ev;
        ev.event_id = event_id(counter++);
        ev.timestamp = t_mid * 3600.0;
        ev.sender = user_id(s);
        ev.receiver = user_id(target);
        res.log.events.push_back(std::move(ev));

        if (!sent[static_cast<std::size_t>(s)]) {
          sent[static_cast<std::size_t>(s)] = 1;
          max_sender_gen = std::max(max_sender_gen, gen[static_cast<std::size_t>(s)]);
          if (s >= n_seeds) book.note_infective(gen[static_cast<std::size_t>(s)]);
        }
        if (!exposed[static_cast<std::size_t>(target)]) {
          exposed[static_cast<std::size_t>(target)] = 1;
          int tg = gen[static_cast<std::size_t>(s)] + 1;
          gen[static_cast<std::size_t>(target)] = tg;
          exposed_total += 1;
          book.note_exposed(tg);
          if (rng.uniform() < cfg.p_for_generation(tg)) {
            infectives.push_back(target);
            eligible_from[static_cast<std::size_t>(target)] = k + 1;
          }
        }
      }
    }
  }

  res.waves = max_sender_gen < 0 ? 0 : 1 + max_sender_gen;
  res.per_generation = book.rows();
  for (std::int64_t i = 0; i < n_seeds; ++i) res.log.seeds.push_back(user_id(i));
  return res;
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  SimResult res = cfg.mode == SimMode::branching ? run_branching(cfg) : run_time_driven(cfg);
  res.log.campaign_id = (cfg.mode == SimMode::branching ? "sim-branching-" : "sim-time-driven-") +
                        std::to_string(cfg.rng_seed);
  finalize_log(res.log, /*infer_seeds_when_empty=*/false);
  return res;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

ReplicationRun replicate(const SimConfig& cfg, std::int64_t n_reps, std::uint64_t base_seed) {
  if (n_reps < 1) fail(Errc::invalid_config, "n_reps must be >= 1");
  cfg.validate();

  ReplicationRun run;
  std::vector<double> waves, contacts, exposed, infective;
  std::int64_t sum_contacts = 0, sum_exposed = 0, sum_infective = 0;
  std::int64_t n_extinct = 0;
  std::vector<std::int64_t> pooled_exposed, pooled_infective;

  for (std::int64_t i = 0; i < n_reps; ++i) {
    SimConfig c = cfg;
    c.rng_seed = base_seed + static_cast<std::uint64_t>(i);
    SimResult r = simulate(c);

    std::int64_t rep_exposed = 0, rep_infective = 0;
    for (const auto& row : r.per_generation) {
      rep_exposed += row.exposed_count;
      rep_infective += row.infective_count;
      auto idx = static_cast<std::size_t>(row.generation - 1);
      if (pooled_exposed.size() <= idx) {
        pooled_exposed.resize(idx + 1, 0);
        pooled_infective.resize(idx + 1, 0);
      }
      pooled_exposed[idx] += row.exposed_count;
      pooled_infective[idx] += row.infective_count;
    }
    waves.push_back(static_cast<double>(r.waves));
    contacts.push_back(static_cast<double>(r.log.events.size()));
    exposed.push_back(static_cast<double>(rep_exposed));
    infective.push_back(static_cast<double>(rep_infective));
    sum_contacts += static_cast<std::int64_t>(r.log.events.size());
    sum_exposed += rep_exposed;
    sum_infective += rep_infective;
    if (r.extinct) ++n_extinct;

    run.results.push_back(std::move(r));
  }

  auto& agg = run.aggregate;
  agg.n_reps = n_reps;
  agg.mean_waves = mean_of(waves);
  agg.std_waves = sample_std(waves, agg.mean_waves);
  agg.mean_contacts = mean_of(contacts);
  agg.std_contacts = sample_std(contacts, agg.mean_contacts);
  agg.mean_exposed = mean_of(exposed);
  agg.std_exposed = sample_std(exposed, agg.mean_exposed);
  agg.mean_infective = mean_of(infective);
  agg.std_infective = sample_std(infective, agg.mean_infective);
  agg.extinct_fraction = static_cast<double>(n_extinct) / static_cast<double>(n_reps);

  for (std::size_t i = 0; i < pooled_exposed.size(); ++i) {
    GenerationStats row;
    row.generation = static_cast<int>(i) + 1;
    row.exposed_count = pooled_exposed[i];
    row.infective_count = pooled_infective[i];
    if (row.exposed_count > 0) {
      row.p_g = static_cast<double>(row.infective_count) / static_cast<double>(row.exposed_count);
    }
    agg.pooled_per_generation.push_back(row);
  }
  if (sum_contacts > 0 && sum_exposed > 0) {
    CampaignSummary s;
    s.total_contacts = sum_contacts;
    s.total_exposed = sum_exposed;
    s.total_infective = sum_infective;
    agg.pooled_params = compute_global_params(s, agg.pooled_per_generation);
    agg.pooled_params_defined = true;
  }
  return run;
}

SimConfig sim_config_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::invalid_config, e.what());
  }
  if (!doc.is_object()) fail(Errc::invalid_config, "config must be a JSON object");

  static const std::vector<std::string> known = {
      "mode", "pool_size", "n0", "a", "seeds", "p", "p_schedule",
      "offspring", "max_generations", "tick", "send_rate", "rng_seed"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(Errc::invalid_config, "unknown config key '" + key + "'");
    }
  }

  SimConfig cfg;
  try {
    std::string mode = doc.value("mode", "branching");
    if (mode == "branching") {
      cfg.mode = SimMode::branching;
    } else if (mode == "time_driven") {
      cfg.mode = SimMode::time_driven;
    } else {
      fail(Errc::invalid_config, "mode must be 'branching' or 'time_driven'");
    }
    cfg.pool_size = doc.value("pool_size", std::int64_t{0});
    cfg.n0 = doc.value("n0", 0.0);
    cfg.a = doc.value("a", 0.0);
    cfg.seeds = doc.value("seeds", std::int64_t{1});
    if (doc.contains("p") && doc.contains("p_schedule")) {
      fail(Errc::invalid_config, "give either 'p' or 'p_schedule', not both");
    }
    if (doc.contains("p")) cfg.p_schedule = {doc.at("p").get<double>()};
    if (doc.contains("p_schedule")) cfg.p_schedule = doc.at("p_schedule").get<std::vector<double>>();
    if (doc.contains("offspring")) {
      const auto& o = doc.at("offspring");
      std::string type = o.value("type", "");
      if (type == "poisson") {
        cfg.offspring.kind = OffspringSpec::Kind::poisson;
        cfg.offspring.lambda = o.at("lambda").get<double>();
      } else if (type == "fixed") {
        cfg.offspring.kind = OffspringSpec::Kind::fixed;
        cfg.offspring.k = o.at("k").get<std::int64_t>();
      } else if (type == "empirical") {
        cfg.offspring.kind = OffspringSpec::Kind::empirical;
        cfg.offspring.values = o.at("values").get<std::vector<std::int64_t>>();
      } else {
        fail(Errc::invalid_config, "offspring type must be poisson|fixed|empirical");
      }
    }
    cfg.max_generations = doc.value("max_generations", std::int64_t{100});
    cfg.tick = doc.value("tick", 0.25);
    cfg.send_rate = doc.value("send_rate", 1.0);
    cfg.rng_seed = doc.value("rng_seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_config, e.what());
  }
  cfg.validate();
  return cfg;
}

std::string sim_config_to_json(const SimConfig& cfg) {
  nlohmann::json doc;
  doc["mode"] = cfg.mode == SimMode::branching ? "branching" : "time_driven";
  if (cfg.mode == SimMode::branching) {
    doc["pool_size"] = cfg.pool_size;
  } else {
    doc["n0"] = cfg.n0;
    doc["a"] = cfg.a;
    doc["tick"] = cfg.tick;
    doc["send_rate"] = cfg.send_rate;
  }
  doc["seeds"] = cfg.seeds;
  if (cfg.p_schedule.size() == 1) {
    doc["p"] = cfg.p_schedule[0];
  } else {
    doc["p_schedule"] = cfg.p_schedule;
  }
  switch (cfg.offspring.kind) {
    case OffspringSpec::Kind::poisson:
      doc["offspring"] = {{"type", "poisson"}, {"lambda", cfg.offspring.lambda}};
      break;
    case OffspringSpec::Kind::fixed:
      doc["offspring"] = {{"type", "fixed"}, {"k", cfg.offspring.k}};
      break;
    case OffspringSpec::Kind::empirical:
      doc["offspring"] = {{"type", "empirical"}, {"values", cfg.offspring.values}};
      break;
  }
  doc["max_generations"] = cfg.max_generations;
  doc["rng_seed"] = cfg.rng_seed;
  return doc.dump(2) + "\n";
}

}  // namespace viraltrace
