#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "prefel/elicit.hpp"

namespace prefel::service {

using nlohmann::json;

// A session is stored as its event list: one session_created header
// followed by query_issued / answer_recorded events in order.
json created_event(const Session& s);
json query_event(const QueryRecord& r);
json answer_event(const QueryRecord& r, const MetricsSnapshot& m);
json events_of(const Session& s);

// Folds an event list back into a session. Throws std::invalid_argument on
// malformed or out-of-order events.
Session fold_events(const json& events);

// Whole-file document {format, version, seed?, events}.
json session_document(const Session& s, std::optional<std::uint64_t> seed = std::nullopt);
Session session_from_document(const json& doc);
std::optional<std::uint64_t> seed_of(const json& doc);

json config_to_json(const SessionConfig& c);
// Missing keys keep their defaults.
SessionConfig config_from_json(const json& j);

json query_json(const QueryRecord& r);
json metrics_json(const MetricsSnapshot& m);
MetricsSnapshot metrics_from_json(const json& j);
// Breakpoints with the utility range and the center utility at each.
json band_json(const Session& s);
json summary_json(const Session& s);

// "B" maps to +1, "A" to -1.
int choice_to_h(const std::string& choice);
std::string h_to_choice(int h);

// Current UTC time as 2024-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace prefel::service
