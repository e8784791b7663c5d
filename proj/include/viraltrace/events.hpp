#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "viraltrace/error.hpp"

namespace viraltrace {

using UserId = std::string;

// One directed invitation; the atomic contact of every campaign log.
struct InvitationEvent {
  std::string event_id;
  double timestamp = 0.0;  // seconds since campaign start
  UserId sender;
  UserId receiver;

  friend bool operator==(const InvitationEvent&, const InvitationEvent&) = default;
};

struct CampaignLog {
  std::string campaign_id;
  std::vector<InvitationEvent> events;  // ascending (timestamp, event_id)
  std::vector<UserId> seeds;            // sorted, unique
  bool seeds_inferred = false;

  friend bool operator==(const CampaignLog& a, const CampaignLog& b) {
    return a.campaign_id == b.campaign_id && a.events == b.events && a.seeds == b.seeds;
  }
};

// N(t) source: distinct users active (sent or received) per bin.
struct ActivityBin {
  double bin_start = 0.0;
  std::int64_t active_count = 0;

  friend bool operator==(const ActivityBin&, const ActivityBin&) = default;
};

struct ActivityProfile {
  std::vector<ActivityBin> bins;  // contiguous, ascending starts
  double bin_width = 0.0;
};

enum class LogFormat { csv, json };

// Parses, validates and normalizes a log. CSV header must be exactly
// `event_id,timestamp,sender_id,receiver_id`. Events are sorted by
// (timestamp, event_id); ids must be unique; self-invitations and negative
// timestamps are hard errors. When `sidecar_seeds` is null the seed set is
// inferred: a user is a seed iff they send and never receive earlier in the
// total order than their first send.
CampaignLog parse_log(std::istream& in, LogFormat format,
                      const std::vector<UserId>* sidecar_seeds = nullptr,
                      const std::string& campaign_id = "");

// Sidecar format: one UserId per line.
std::vector<UserId> parse_seed_list(std::istream& in);

std::string write_csv(const CampaignLog& log);
std::string write_seed_list(const CampaignLog& log);
std::string write_json(const CampaignLog& log);

std::vector<UserId> infer_seeds(const std::vector<InvitationEvent>& sorted_events);

// Sorts events, checks all CampaignLog invariants, fills seeds (inference)
// when empty and requested. Simulator output goes through this too.
void finalize_log(CampaignLog& log, bool infer_seeds_when_empty = true);

ActivityProfile activity_from_log(const CampaignLog& log, double bin_width);

// Piecewise-linear between bin midpoints, constant beyond the first/last
// midpoint. Total on any non-empty profile.
double interpolate_activity(const ActivityProfile& profile, double t);

// Rescales the time axis (e.g. divisor 3600 for seconds -> hours).
ActivityProfile scale_activity_time(const ActivityProfile& profile, double divisor);

// Shortest round-trip decimal form; the one formatter used for every
// timestamp the toolkit writes.
std::string format_double(double v);

}  // namespace viraltrace
