#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "viraltrace/cascade.hpp"
#include "viraltrace/params.hpp"

namespace viraltrace {

enum class SimMode { branching, time_driven };

struct OffspringSpec {
  enum class Kind { poisson, fixed, empirical };
  Kind kind = Kind::poisson;
  double lambda = 0.0;                  // poisson
  std::int64_t k = 0;                   // fixed
  std::vector<std::int64_t> values;     // empirical, drawn uniformly
};

struct SimConfig {
  SimMode mode = SimMode::branching;

  std::int64_t pool_size = 0;  // branching: fixed target pool
  double n0 = 0.0;             // time-driven: initial active population
  double a = 0.0;              // time-driven: linear decay per hour

  std::int64_t seeds = 1;
  std::vector<double> p_schedule;  // single entry = constant p; entry k -> generation k+1
  OffspringSpec offspring;
  std::int64_t max_generations = 100;  // branching: wave cap; time-driven: tick cap
  double tick = 0.25;                  // hours, time-driven
  double send_rate = 1.0;              // invitations per infective per hour, time-driven
  std::uint64_t rng_seed = 0;

  double p_for_generation(int g) const;  // schedule lookup, clamped to last entry
  void validate() const;
};

SimConfig sim_config_from_json(const std::string& json_text);
std::string sim_config_to_json(const SimConfig& cfg);

struct SimResult {
  CampaignLog log;  // passes events-module validation; seeds carried explicitly
  bool extinct = false;
  bool pool_exhausted = false;  // time-driven: active pool hit zero
  int waves = 0;
  std::vector<GenerationStats> per_generation;  // simulator's own bookkeeping
};

// Seeded cascade generator. Branching mode is generation-synchronous over a
// fixed pool; time-driven mode advances in ticks over a linearly shrinking
// pool. All draws come from splitmix64 in a documented order (offspring
// count, then targets in send order, then the infection coin at each first
// exposure), so a (config, seed) pair regenerates the log bit-identically.
SimResult simulate(const SimConfig& cfg);

struct ReplicationAggregate {
  std::int64_t n_reps = 0;
  double mean_waves = 0.0, std_waves = 0.0;
  double mean_contacts = 0.0, std_contacts = 0.0;
  double mean_exposed = 0.0, std_exposed = 0.0;
  double mean_infective = 0.0, std_infective = 0.0;
  double extinct_fraction = 0.0;
  bool pooled_params_defined = false;
  GlobalParams pooled_params;  // from summed counts, when defined
  std::vector<GenerationStats> pooled_per_generation;
};

struct ReplicationRun {
  std::vector<SimResult> results;  // replication i seeded with base_seed + i
  ReplicationAggregate aggregate;
};

ReplicationRun replicate(const SimConfig& cfg, std::int64_t n_reps, std::uint64_t base_seed);

}  // namespace viraltrace
