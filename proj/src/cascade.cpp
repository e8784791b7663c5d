#include "viraltrace/cascade.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace viraltrace {

const char* to_string(SEIState s) {
  switch (s) {
    case SEIState::susceptible: return "susceptible";
    case SEIState::exposed: return "exposed";
    case SEIState::infective: return "infective";
  }
  return "?";
}

CascadeGraph build_cascade(const CampaignLog& log) {
  CascadeGraph graph;
  for (const auto& seed : log.seeds) {
    CascadeNode node;
    node.user = seed;
    node.state = SEIState::exposed;  // externally infected, not yet forwarding
    node.generation = 0;
    node.is_seed = true;
    graph.nodes.emplace(seed, std::move(node));
  }

  for (const auto& ev : log.events) {
    auto sender_it = graph.nodes.find(ev.sender);
    if (sender_it == graph.nodes.end() || sender_it->second.state == SEIState::susceptible) {
      fail(Errc::inconsistent_log,
           "event '" + ev.event_id + "': sender '" + ev.sender + "' sends before any exposure");
    }
    CascadeNode& sender = sender_it->second;

    auto [recv_it, created] = graph.nodes.try_emplace(ev.receiver);
    CascadeNode& receiver = recv_it->second;
    if (created) receiver.user = ev.receiver;

    if (receiver.state == SEIState::susceptible) {
      receiver.state = SEIState::exposed;
      receiver.generation = sender.generation + 1;
      receiver.first_exposure_time = ev.timestamp;
      receiver.infector = ev.sender;
      graph.unique_edges.push_back(ev);
    } else {
      graph.non_unique_edges.push_back(ev);
    }

    if (!sender.first_send_time.has_value()) {
      sender.first_send_time = ev.timestamp;
      sender.state = SEIState::infective;
    }
  }
  return graph;
}

std::vector<GenerationStats> generation_stats(const CascadeGraph& graph) {
  int max_gen = 0;
  for (const auto& [user, node] : graph.nodes) {
    if (!node.is_seed) max_gen = std::max(max_gen, node.generation);
  }
  if (max_gen == 0) return {};

  std::vector<GenerationStats> stats(static_cast<std::size_t>(max_gen));
  for (int g = 1; g <= max_gen; ++g) stats[static_cast<std::size_t>(g - 1)].generation = g;
  for (const auto& [user, node] : graph.nodes) {
    if (node.is_seed) continue;
    auto& row = stats[static_cast<std::size_t>(node.generation - 1)];
    row.exposed_count += 1;
    if (node.state == SEIState::infective) row.infective_count += 1;
  }
  for (auto& row : stats) {
    if (row.exposed_count > 0) {
      row.p_g = static_cast<double>(row.infective_count) / static_cast<double>(row.exposed_count);
    }
  }
  return stats;
}

int wave_count(const CascadeGraph& graph) {
  if (graph.empty_of_events()) return 0;
  int max_sender_gen = 0;
  for (const auto& [user, node] : graph.nodes) {
    if (node.first_send_time.has_value()) max_sender_gen = std::max(max_sender_gen, node.generation);
  }
  return 1 + max_sender_gen;
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string export_dot(const CascadeGraph& graph) {
  std::ostringstream os;
  os << "digraph cascade {\n";
  os << "  rankdir=TB;\n";
  os << "  node [shape=circle];\n";
  int max_gen = 0;
  for (const auto& [user, node] : graph.nodes) max_gen = std::max(max_gen, node.generation);
  for (int g = 0; g <= max_gen; ++g) {
    bool any = false;
    for (const auto& [user, node] : graph.nodes) {
      if (node.generation != g) continue;
      if (!any) {
        os << "  { rank=same;";
        any = true;
      }
      os << ' ' << dot_quote(user) << ';';
    }
    if (any) os << " }\n";
  }
  for (const auto& e : graph.unique_edges) {
    os << "  " << dot_quote(e.sender) << " -> " << dot_quote(e.receiver) << " [style=solid];\n";
  }
  for (const auto& e : graph.non_unique_edges) {
    os << "  " << dot_quote(e.sender) << " -> " << dot_quote(e.receiver) << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

nlohmann::json edge_json(const InvitationEvent& e) {
  return {{"event_id", e.event_id},
          {"timestamp", e.timestamp},
          {"sender_id", e.sender},
          {"receiver_id", e.receiver}};
}

std::string export_json(const CascadeGraph& graph) {
  nlohmann::json doc;
  auto nodes = nlohmann::json::array();
  for (const auto& [user, node] : graph.nodes) {
    nlohmann::json n{{"user", user},
                     {"state", to_string(node.state)},
                     {"generation", node.generation},
                     {"seed", node.is_seed}};
    if (node.infector) n["infector"] = *node.infector;
    if (node.first_exposure_time) n["first_exposure_time"] = *node.first_exposure_time;
    if (node.first_send_time) n["first_send_time"] = *node.first_send_time;
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  auto uniq = nlohmann::json::array(), non = nlohmann::json::array();
  for (const auto& e : graph.unique_edges) uniq.push_back(edge_json(e));
  for (const auto& e : graph.non_unique_edges) non.push_back(edge_json(e));
  doc["unique_edges"] = std::move(uniq);
  doc["non_unique_edges"] = std::move(non);
  return doc.dump(2) + "\n";
}

}  // namespace

std::string export_cascade(const CascadeGraph& graph, GraphFormat format) {
  return format == GraphFormat::dot ? export_dot(graph) : export_json(graph);
}

}  // namespace viraltrace
