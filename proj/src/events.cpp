#include "viraltrace/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace viraltrace {

namespace {

constexpr const char* kCsvHeader = "event_id,timestamp,sender_id,receiver_id";

bool valid_csv_field(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\r' || c == '\n') return false;
  }
  return true;
}

double parse_timestamp(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(Errc::malformed_record, "line " + std::to_string(line_no) + ": bad timestamp '" + field + "'");
  }
  return v;
}

void check_event(InvitationEvent& ev, std::size_t line_no) {
  if (ev.timestamp < 0.0) {
    fail(Errc::negative_timestamp,
         "line " + std::to_string(line_no) + ": event '" + ev.event_id + "' has timestamp " +
             format_double(ev.timestamp));
  }
  if (ev.sender == ev.receiver) {
    fail(Errc::self_invitation,
         "line " + std::to_string(line_no) + ": event '" + ev.event_id + "' sent by '" +
             ev.sender + "' to itself");
  }
}

std::vector<InvitationEvent> parse_csv_events(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    return {};  // empty stream: empty campaign
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    fail(Errc::malformed_record, "line 1: expected header '" + std::string(kCsvHeader) + "'");
  }

  std::vector<InvitationEvent> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      fail(Errc::malformed_record, "line " + std::to_string(line_no) + ": empty record");
    }
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != 4) {
      fail(Errc::malformed_record,
           "line " + std::to_string(line_no) + ": expected 4 fields, got " +
               std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == 1) continue;  // timestamp validated separately
      if (!valid_csv_field(fields[i])) {
        fail(Errc::malformed_record,
             "line " + std::to_string(line_no) + ": empty or unquotable field " + std::to_string(i + 1));
      }
    }
    InvitationEvent ev;
    ev.event_id = fields[0];
    ev.timestamp = parse_timestamp(fields[1], line_no);
    ev.sender = fields[2];
    ev.receiver = fields[3];
    check_event(ev, line_no);
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<InvitationEvent> parse_json_events(const nlohmann::json& arr) {
  std::vector<InvitationEvent> events;
  std::size_t idx = 0;
  for (const auto& item : arr) {
    ++idx;
    if (!item.is_object() || !item.contains("event_id") || !item.contains("timestamp") ||
        !item.contains("sender_id") || !item.contains("receiver_id")) {
      fail(Errc::malformed_record, "event " + std::to_string(idx) + ": missing required keys");
    }
    InvitationEvent ev;
    try {
      ev.event_id = item.at("event_id").get<std::string>();
      ev.timestamp = item.at("timestamp").get<double>();
      ev.sender = item.at("sender_id").get<std::string>();
      ev.receiver = item.at("receiver_id").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::malformed_record, "event " + std::to_string(idx) + ": " + e.what());
    }
    if (ev.event_id.empty() || ev.sender.empty() || ev.receiver.empty()) {
      fail(Errc::malformed_record, "event " + std::to_string(idx) + ": empty id field");
    }
    if (!std::isfinite(ev.timestamp)) {
      fail(Errc::malformed_record, "event " + std::to_string(idx) + ": non-finite timestamp");
    }
    check_event(ev, idx);
    events.push_back(std::move(ev));
  }
  return events;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<UserId> infer_seeds(const std::vector<InvitationEvent>& sorted_events) {
  std::unordered_map<std::string, std::size_t> first_send, first_recv;
  for (std::size_t i = 0; i < sorted_events.size(); ++i) {
    const auto& ev = sorted_events[i];
    first_send.emplace(ev.sender, i);
    first_recv.emplace(ev.receiver, i);
  }
  std::vector<UserId> seeds;
  for (const auto& [user, send_pos] : first_send) {
    auto it = first_recv.find(user);
    if (it == first_recv.end() || it->second > send_pos) seeds.push_back(user);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

void finalize_log(CampaignLog& log, bool infer_seeds_when_empty) {
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const InvitationEvent& a, const InvitationEvent& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.event_id < b.event_id;
                   });
  std::unordered_set<std::string> ids;
  ids.reserve(log.events.size());
  for (const auto& ev : log.events) {
    if (!ids.insert(ev.event_id).second) {
      fail(Errc::duplicate_event_id, "event id '" + ev.event_id + "' appears more than once");
    }
    if (ev.timestamp < 0.0) {
      fail(Errc::negative_timestamp, "event '" + ev.event_id + "'");
    }
    if (ev.sender == ev.receiver) {
      fail(Errc::self_invitation, "event '" + ev.event_id + "'");
    }
  }
  std::sort(log.seeds.begin(), log.seeds.end());
  log.seeds.erase(std::unique(log.seeds.begin(), log.seeds.end()), log.seeds.end());
  if (log.seeds.empty() && infer_seeds_when_empty && !log.events.empty()) {
    log.seeds = infer_seeds(log.events);
    log.seeds_inferred = true;
  }
}

CampaignLog parse_log(std::istream& in, LogFormat format,
                      const std::vector<UserId>* sidecar_seeds, const std::string& campaign_id) {
  CampaignLog log;
  log.campaign_id = campaign_id;

  if (format == LogFormat::csv) {
    log.events = parse_csv_events(in);
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::malformed_record, e.what());
    }
    if (doc.is_array()) {
      log.events = parse_json_events(doc);
    } else if (doc.is_object()) {
      if (doc.contains("campaign_id") && doc.at("campaign_id").is_string()) {
        log.campaign_id = doc.at("campaign_id").get<std::string>();
      }
      if (!doc.contains("events") || !doc.at("events").is_array()) {
        fail(Errc::malformed_record, "top-level object has no 'events' array");
      }
      log.events = parse_json_events(doc.at("events"));
      if (doc.contains("seeds")) {
        if (!doc.at("seeds").is_array()) fail(Errc::malformed_record, "'seeds' is not an array");
        for (const auto& s : doc.at("seeds")) {
          if (!s.is_string()) fail(Errc::malformed_record, "seed entry is not a string");
          log.seeds.push_back(s.get<std::string>());
        }
      }
    } else {
      fail(Errc::malformed_record, "expected a JSON array or object");
    }
  }

  if (sidecar_seeds != nullptr) {
    log.seeds = *sidecar_seeds;  // sidecar wins over embedded seeds
  }
  finalize_log(log);
  return log;
}

std::vector<UserId> parse_seed_list(std::istream& in) {
  std::vector<UserId> seeds;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    seeds.push_back(line);
  }
  return seeds;
}

std::string write_csv(const CampaignLog& log) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& ev : log.events) {
    if (!valid_csv_field(ev.event_id) || !valid_csv_field(ev.sender) || !valid_csv_field(ev.receiver)) {
      fail(Errc::malformed_record, "event '" + ev.event_id + "': id not representable in CSV");
    }
    out += ev.event_id;
    out += ',';
    out += format_double(ev.timestamp);
    out += ',';
    out += ev.sender;
    out += ',';
    out += ev.receiver;
    out += '\n';
  }
  return out;
}

std::string write_seed_list(const CampaignLog& log) {
  std::string out;
  for (const auto& s : log.seeds) {
    out += s;
    out += '\n';
  }
  return out;
}

std::string write_json(const CampaignLog& log) {
  nlohmann::json doc;
  doc["campaign_id"] = log.campaign_id;
  doc["seeds"] = log.seeds;
  auto events = nlohmann::json::array();
  for (const auto& ev : log.events) {
    events.push_back({{"event_id", ev.event_id},
                      {"timestamp", ev.timestamp},
                      {"sender_id", ev.sender},
                      {"receiver_id", ev.receiver}});
  }
  doc["events"] = std::move(events);
  return doc.dump(2) + "\n";
}

ActivityProfile activity_from_log(const CampaignLog& log, double bin_width) {
  if (!(bin_width > 0.0)) fail(Errc::invalid_params, "bin_width must be positive");
  if (log.events.empty()) fail(Errc::empty_log, "no events to bin");

  double max_t = log.events.back().timestamp;
  auto n_bins = static_cast<std::size_t>(std::floor(max_t / bin_width)) + 1;
  std::vector<std::unordered_set<std::string>> users(n_bins);
  for (const auto& ev : log.events) {
    auto b = static_cast<std::size_t>(std::floor(ev.timestamp / bin_width));
    users[b].insert(ev.sender);
    users[b].insert(ev.receiver);
  }
  ActivityProfile profile;
  profile.bin_width = bin_width;
  profile.bins.reserve(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    profile.bins.push_back({static_cast<double>(b) * bin_width,
                            static_cast<std::int64_t>(users[b].size())});
  }
  return profile;
}

double interpolate_activity(const ActivityProfile& profile, double t) {
  if (profile.bins.empty()) fail(Errc::invalid_params, "empty activity profile");
  const auto mid = [&](std::size_t i) { return profile.bins[i].bin_start + profile.bin_width / 2.0; };
  const auto cnt = [&](std::size_t i) { return static_cast<double>(profile.bins[i].active_count); };

  if (t <= mid(0)) return cnt(0);
  std::size_t last = profile.bins.size() - 1;
  if (t >= mid(last)) return cnt(last);
  std::size_t lo = 0, hi = last;
  while (hi - lo > 1) {
    std::size_t m = (lo + hi) / 2;
    (mid(m) <= t ? lo : hi) = m;
  }
  double f = (t - mid(lo)) / (mid(hi) - mid(lo));
  return cnt(lo) + f * (cnt(hi) - cnt(lo));
}

ActivityProfile scale_activity_time(const ActivityProfile& profile, double divisor) {
  if (!(divisor > 0.0)) fail(Errc::invalid_params, "divisor must be positive");
  ActivityProfile out;
  out.bin_width = profile.bin_width / divisor;
  out.bins.reserve(profile.bins.size());
  for (const auto& b : profile.bins) {
    out.bins.push_back({b.bin_start / divisor, b.active_count});
  }
  return out;
}

}  // namespace viraltrace
