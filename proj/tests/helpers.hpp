#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "viraltrace/cascade.hpp"
#include "viraltrace/events.hpp"

namespace vt_test {

using Row = std::tuple<std::string, double, std::string, std::string>;

inline viraltrace::CampaignLog make_log(const std::vector<Row>& rows,
                                        const std::vector<std::string>& seeds = {}) {
  viraltrace::CampaignLog log;
  for (const auto& [id, t, s, r] : rows) {
    log.events.push_back({id, t, s, r});
  }
  log.seeds = seeds;
  viraltrace::finalize_log(log);
  return log;
}

// the 3-event hand log used across modules: A->B@1, B->C@2, A->C@3, seeds={A}
inline viraltrace::CampaignLog hand_log() {
  return make_log({{"e1", 1.0, "A", "B"}, {"e2", 2.0, "B", "C"}, {"e3", 3.0, "A", "C"}}, {"A"});
}

}  // namespace vt_test
