#pragma once

#include <stdexcept>
#include <string>

namespace viraltrace {

enum class Errc {
  malformed_record,
  duplicate_event_id,
  self_invitation,
  negative_timestamp,
  empty_log,
  inconsistent_log,
  zero_contacts,
  zero_exposed,
  fewer_than_two_campaigns,
  invalid_params,
  domain_error,
  singularity_reached,
  non_finite_state,
  empty_window,
  insufficient_data,
  degenerate_series,
  invalid_config,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace viraltrace
