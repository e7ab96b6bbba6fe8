#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/calendar.hpp"
#include "hawkes/csv_io.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"

namespace hawkes {

inline constexpr const char* kMessagesCsvHeader = "timestamp,sender";

struct IngestResult {
  EventLog log;
  // Dimension m carries messages from senders[m]; assignment follows first
  // appearance in time order.
  std::vector<std::string> senders;
  int dropped_before{0};
  int dropped_after{0};
  int ties_adjusted{0};
  bool empty_window{false};
};

// Converts a raw message table (local timestamps plus sender labels) into an
// event log over [start, end): times become hours since the window start,
// out-of-window rows are dropped and counted, and exact timestamp ties are
// broken by nudging later events forward one nanosecond-scale step so event
// times stay strictly increasing.
inline IngestResult ingest_messages(std::istream& is,
                                    const CivilDateTime& window_start,
                                    const CivilDateTime& window_end,
                                    const TimeZone& zone) {
  const std::int64_t start_utc = zone.local_to_utc(window_start);
  const std::int64_t end_utc = zone.local_to_utc(window_end);
  if (end_utc <= start_utc) {
    throw contract_error("ingest window must have positive length");
  }
  const double horizon =
      static_cast<double>(end_utc - start_utc) / 3600.0;

  std::string line;
  if (!detail::next_line(is, line) || line != kMessagesCsvHeader) {
    throw data_error("message file must start with '" +
                     std::string(kMessagesCsvHeader) + "'");
  }

  struct Row {
    double hours;
    std::string sender;
  };
  std::vector<Row> rows;
  IngestResult out{EventLog({}, horizon, 1), {}, 0, 0, 0, false};
  int line_no = 1;
  while (detail::next_line(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw data_error("line " + std::to_string(line_no) +
                       ": expected 'timestamp,sender'");
    }
    const std::string stamp = line.substr(0, comma);
    std::string sender = line.substr(comma + 1);
    if (sender.empty()) {
      throw data_error("line " + std::to_string(line_no) +
                       ": empty sender label");
    }
    CivilDateTime civil;
    try {
      civil = parse_civil_datetime(stamp);
    } catch (const data_error& e) {
      throw data_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::int64_t utc = zone.local_to_utc(civil);
    const double hours =
        (static_cast<double>(utc - start_utc) + civil.frac) / 3600.0;
    if (hours < 0.0) {
      ++out.dropped_before;
      continue;
    }
    if (hours >= horizon) {
      ++out.dropped_after;
      continue;
    }
    rows.push_back({hours, std::move(sender)});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.hours < b.hours; });

  std::vector<Event> events;
  events.reserve(rows.size());
  double prev = -1.0;
  for (Row& row : rows) {
    double t = row.hours;
    if (!events.empty() && t <= prev) {
      t = prev + 1e-9;
      ++out.ties_adjusted;
    }
    int dim = -1;
    for (std::size_t m = 0; m < out.senders.size(); ++m) {
      if (out.senders[m] == row.sender) {
        dim = static_cast<int>(m);
        break;
      }
    }
    if (dim < 0) {
      dim = static_cast<int>(out.senders.size());
      out.senders.push_back(std::move(row.sender));
    }
    events.push_back({t, dim});
    prev = t;
  }

  if (events.empty()) {
    out.empty_window = true;
    out.log = EventLog({}, horizon, 1);
    return out;
  }
  out.log = EventLog(std::move(events), horizon,
                     static_cast<int>(out.senders.size()));
  return out;
}

inline IngestResult ingest_messages(const std::string& path,
                                    const CivilDateTime& window_start,
                                    const CivilDateTime& window_end,
                                    const TimeZone& zone) {
  auto is = detail::open_for_read(path);
  return ingest_messages(is, window_start, window_end, zone);
}

}  // namespace hawkes
