#pragma once

#include <string>
#include <utility>
#include <vector>

#include "viraltrace/cascade.hpp"

namespace viraltrace {

struct CampaignSummary {
  std::int64_t total_contacts = 0;   // all invitations
  std::int64_t total_exposed = 0;    // non-seed users ever exposed/infective
  std::int64_t total_infective = 0;  // non-seed users with >= 1 sent event
  std::int64_t total_infective_with_seeds = 0;  // including seed senders
  int waves = 0;
  double duration = 0.0;  // max timestamp, seconds
};

struct GlobalParams {
  double pe = 0.0;     // exposed / contacts
  double pc = 0.0;     // infective / contacts
  double p = 0.0;      // infective / exposed
  double p_std = 0.0;  // sample std of per-generation p_g
};

CampaignSummary summarize(const CascadeGraph& graph, const CampaignLog& log);

GlobalParams compute_global_params(const CampaignSummary& summary,
                                   const std::vector<GenerationStats>& gen_stats);

struct CampaignRatios {
  std::string numerator;
  std::string denominator;
  double pe_ratio = 0.0;
  double pc_ratio = 0.0;
  double p_ratio = 0.0;
};

struct CampaignComparison {
  std::vector<std::pair<std::string, GlobalParams>> campaigns;
  std::vector<CampaignRatios> ratios;  // every ordered pair
  std::string max_pe_campaign;
  std::string max_pc_campaign;
};

CampaignComparison compare_campaigns(
    const std::vector<std::pair<std::string, GlobalParams>>& campaigns);

// Report shape:
// {"campaign":..., "summary":{...}, "params":{...}, "per_generation":[...]}
std::string params_report_json(const std::string& campaign, const CampaignSummary& summary,
                               const GlobalParams& params,
                               const std::vector<GenerationStats>& gen_stats,
                               bool seeds_inferred);

std::string comparison_report_json(const CampaignComparison& cmp);
std::string comparison_report_markdown(const CampaignComparison& cmp);

}  // namespace viraltrace
