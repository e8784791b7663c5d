#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viraltrace/events.hpp"

namespace viraltrace {

// S -> E on first received invitation, E -> I on first send; irreversible.
enum class SEIState { susceptible, exposed, infective };

const char* to_string(SEIState s);

struct CascadeNode {
  UserId user;
  SEIState state = SEIState::susceptible;
  int generation = 0;                         // seeds: 0
  std::optional<double> first_exposure_time;  // absent for seeds
  std::optional<UserId> infector;             // absent for seeds
  std::optional<double> first_send_time;
  bool is_seed = false;
};

// The tree-with-loops: unique edges form a forest rooted at the seeds,
// non-unique edges are the loops.
struct CascadeGraph {
  std::map<UserId, CascadeNode> nodes;
  std::vector<InvitationEvent> unique_edges;      // sender == infector
  std::vector<InvitationEvent> non_unique_edges;

  bool empty_of_events() const { return unique_edges.empty() && non_unique_edges.empty(); }
};

struct GenerationStats {
  int generation = 0;
  std::int64_t exposed_count = 0;
  std::int64_t infective_count = 0;
  std::optional<double> p_g;  // infective/exposed, absent when exposed_count == 0

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

// Replays the log in total order. First invitation to a susceptible user is
// a unique edge and fixes generation (= infector's + 1) and infector; any
// other invitation is non-unique. A sender's first event promotes them to
// Infective. A non-seed sending while still susceptible makes the log
// inconsistent.
CascadeGraph build_cascade(const CampaignLog& log);

// Per-generation exposure/response counts for g >= 1; seeds (generation 0)
// are excluded because their infection is exogenous.
std::vector<GenerationStats> generation_stats(const CascadeGraph& graph);

// 1 + max generation over users who sent (seed sends are wave 1);
// 0 when the log has no invitations.
int wave_count(const CascadeGraph& graph);

enum class GraphFormat { dot, json };

// DOT: one rank group per generation, unique edges solid, non-unique dashed.
// JSON: nodes plus edge arrays whose entries carry the same four keys as
// log events.
std::string export_cascade(const CascadeGraph& graph, GraphFormat format);

}  // namespace viraltrace
