#include "viraltrace/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace viraltrace {

CampaignSummary summarize(const CascadeGraph& graph, const CampaignLog& log) {
  CampaignSummary s;
  s.total_contacts = static_cast<std::int64_t>(log.events.size());
  for (const auto& [user, node] : graph.nodes) {
    bool sent = node.first_send_time.has_value();
    if (!node.is_seed) {
      s.total_exposed += 1;
      if (sent) s.total_infective += 1;
    }
    if (sent) s.total_infective_with_seeds += 1;
  }
  s.waves = wave_count(graph);
  s.duration = log.events.empty() ? 0.0 : log.events.back().timestamp;
  return s;
}

GlobalParams compute_global_params(const CampaignSummary& summary,
                                   const std::vector<GenerationStats>& gen_stats) {
  if (summary.total_contacts <= 0) fail(Errc::zero_contacts, "no contacts in summary");
  if (summary.total_exposed <= 0) fail(Errc::zero_exposed, "no exposed users in summary");

  GlobalParams gp;
  gp.pe = static_cast<double>(summary.total_exposed) / static_cast<double>(summary.total_contacts);
  gp.pc = static_cast<double>(summary.total_infective) / static_cast<double>(summary.total_contacts);
  gp.p = static_cast<double>(summary.total_infective) / static_cast<double>(summary.total_exposed);

  std::vector<double> ps;
  for (const auto& row : gen_stats) {
    if (row.p_g) ps.push_back(*row.p_g);
  }
  if (ps.size() >= 2) {
    double mean = 0.0;
    for (double v : ps) mean += v;
    mean /= static_cast<double>(ps.size());
    double ss = 0.0;
    for (double v : ps) ss += (v - mean) * (v - mean);
    gp.p_std = std::sqrt(ss / static_cast<double>(ps.size() - 1));
  }
  return gp;
}

CampaignComparison compare_campaigns(
    const std::vector<std::pair<std::string, GlobalParams>>& campaigns) {
  if (campaigns.size() < 2) {
    fail(Errc::fewer_than_two_campaigns,
         "need at least 2 campaigns, got " + std::to_string(campaigns.size()));
  }
  CampaignComparison cmp;
  cmp.campaigns = campaigns;
  for (std::size_t i = 0; i < campaigns.size(); ++i) {
    for (std::size_t j = 0; j < campaigns.size(); ++j) {
      if (i == j) continue;
      const auto& [name_a, a] = campaigns[i];
      const auto& [name_b, b] = campaigns[j];
      cmp.ratios.push_back({name_a, name_b, a.pe / b.pe, a.pc / b.pc, a.p / b.p});
    }
  }
  auto max_by = [&](auto field) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < campaigns.size(); ++i) {
      if (field(campaigns[i].second) > field(campaigns[best].second)) best = i;
    }
    return campaigns[best].first;
  };
  cmp.max_pe_campaign = max_by([](const GlobalParams& g) { return g.pe; });
  cmp.max_pc_campaign = max_by([](const GlobalParams& g) { return g.pc; });
  return cmp;
}

namespace {

nlohmann::json params_json(const GlobalParams& gp) {
  return {{"pe", gp.pe}, {"pc", gp.pc}, {"p", gp.p}, {"p_std", gp.p_std}};
}

nlohmann::json gen_stats_json(const std::vector<GenerationStats>& gen_stats) {
  auto rows = nlohmann::json::array();
  for (const auto& row : gen_stats) {
    nlohmann::json r{{"generation", row.generation},
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

}  // namespace

std::string params_report_json(const std::string& campaign, const CampaignSummary& summary,
                               const GlobalParams& params,
                               const std::vector<GenerationStats>& gen_stats,
                               bool seeds_inferred) {
  nlohmann::json doc;
  doc["campaign"] = campaign;
  doc["summary"] = {{"total_contacts", summary.total_contacts},
                    {"total_exposed", summary.total_exposed},
                    {"total_infective", summary.total_infective},
                    {"total_infective_with_seeds", summary.total_infective_with_seeds},
                    {"waves", summary.waves},
                    {"duration_seconds", summary.duration}};
  doc["params"] = params_json(params);
  doc["per_generation"] = gen_stats_json(gen_stats);
  doc["seeds_inferred"] = seeds_inferred;
  doc["p_std_method"] = "sample_std_unweighted_per_generation";
  return doc.dump(2) + "\n";
}

std::string comparison_report_json(const CampaignComparison& cmp) {
  nlohmann::json doc;
  auto campaigns = nlohmann::json::array();
  for (const auto& [name, gp] : cmp.campaigns) {
    campaigns.push_back({{"name", name}, {"params", params_json(gp)}});
  }
  doc["campaigns"] = std::move(campaigns);
  auto ratios = nlohmann::json::array();
  for (const auto& r : cmp.ratios) {
    ratios.push_back({{"numerator", r.numerator},
                      {"denominator", r.denominator},
                      {"pe_ratio", r.pe_ratio},
                      {"pc_ratio", r.pc_ratio},
                      {"p_ratio", r.p_ratio}});
  }
  doc["ratios"] = std::move(ratios);
  doc["max_pe_campaign"] = cmp.max_pe_campaign;
  doc["max_pc_campaign"] = cmp.max_pc_campaign;
  return doc.dump(2) + "\n";
}

namespace {

std::string round2(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

}  // namespace

std::string comparison_report_markdown(const CampaignComparison& cmp) {
  std::ostringstream os;
  os << "| campaign | pe | pc | p | p_std |\n";
  os << "|---|---|---|---|---|\n";
  for (const auto& [name, gp] : cmp.campaigns) {
    os << "| " << name << " | " << round2(gp.pe) << " | " << round2(gp.pc) << " | " << round2(gp.p)
       << " | " << round2(gp.p_std) << " |\n";
  }
  os << "\n| ratio | pe | pc | p |\n";
  os << "|---|---|---|---|\n";
  for (const auto& r : cmp.ratios) {
    os << "| " << r.numerator << "/" << r.denominator << " | " << round2(r.pe_ratio) << " | "
       << round2(r.pc_ratio) << " | " << round2(r.p_ratio) << " |\n";
  }
  os << "\nmax pe: " << cmp.max_pe_campaign << "\n";
  os << "max pc: " << cmp.max_pc_campaign << "\n";
  return os.str();
}

}  // namespace viraltrace
