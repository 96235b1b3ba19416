#pragma once

#include "hawkesnet/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace hawkesnet {

// Event CSV: header "node,time", rows ordered by time (ties by node), times
// printed with 17 significant digits so they parse back bit-exactly.
void write_events_csv(const EventLog& log, std::ostream& out);
void write_events_csv(const EventLog& log, const std::filesystem::path& path);

// Side-car metadata {"d","t_start","t_end","seed","method","beta"}.
[[nodiscard]] nlohmann::json meta_to_json(const EventLog& log);
void write_meta(const EventLog& log, const std::filesystem::path& path);

/// Rebuilds an EventLog from the CSV rows and the side-car metadata.
/// Throws std::runtime_error on malformed rows or out-of-window events.
[[nodiscard]] EventLog read_event_log(std::istream& csv, const nlohmann::json& meta);
[[nodiscard]] EventLog read_event_log(const std::filesystem::path& csv, const std::filesystem::path& meta);

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_double(double v);

} // namespace hawkesnet
