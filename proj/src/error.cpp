#include "viraltrace/error.hpp"

namespace viraltrace {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::duplicate_event_id: return "DuplicateEventId";
    case Errc::self_invitation: return "SelfInvitation";
    case Errc::negative_timestamp: return "NegativeTimestamp";
    case Errc::empty_log: return "EmptyLog";
    case Errc::inconsistent_log: return "InconsistentLog";
    case Errc::zero_contacts: return "ZeroContacts";
    case Errc::zero_exposed: return "ZeroExposed";
    case Errc::fewer_than_two_campaigns: return "FewerThanTwoCampaigns";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::domain_error: return "DomainError";
    case Errc::singularity_reached: return "SingularityReached";
    case Errc::non_finite_state: return "NonFiniteState";
    case Errc::empty_window: return "EmptyWindow";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::degenerate_series: return "DegenerateSeries";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace viraltrace
