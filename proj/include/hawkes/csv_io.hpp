#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hawkes/background.hpp"
#include "hawkes/branching.hpp"
#include "hawkes/calendar.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/gibbs.hpp"

namespace hawkes {

namespace detail {

// Shortest decimal form that parses back to the same double, so files
// round-trip bit for bit.
inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw data_error("number formatting failed");
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& field, int line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw data_error("line " + std::to_string(line) + ": '" + field +
                     "' is not a number");
  }
  return v;
}

inline long parse_int(const std::string& field, int line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw data_error("line " + std::to_string(line) + ": '" + field +
                     "' is not an integer");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Reads one line tolerating trailing \r from files written on Windows.
inline bool next_line(std::istream& is, std::string& line) {
  if (!std::getline(is, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open '" + path + "' for writing");
  return os;
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open '" + path + "' for reading");
  return is;
}

}  // namespace detail

inline constexpr const char* kEventsCsvHeader = "time_hours,dimension";
inline constexpr const char* kTruthCsvHeader = "event_index,parent_index";

// Events on disk carry 1-based dimension labels.
inline void write_events_csv(std::ostream& os, const EventLog& log) {
  os << kEventsCsvHeader << '\n';
  for (int i = 0; i < log.size(); ++i) {
    os << detail::format_double(log.time(i)) << ',' << log.dim(i) + 1 << '\n';
  }
}

inline void write_events_csv(const std::string& path, const EventLog& log) {
  auto os = detail::open_for_write(path);
  write_events_csv(os, log);
}

// Missing horizon falls back to the last event time; missing dimension count
// falls back to the largest label seen.
inline EventLog read_events_csv(std::istream& is,
                                std::optional<double> horizon = std::nullopt,
                                std::optional<int> num_dims = std::nullopt) {
  std::string line;
  if (!detail::next_line(is, line) || line != kEventsCsvHeader) {
    throw data_error("events file must start with '" +
                     std::string(kEventsCsvHeader) + "'");
  }
  std::vector<Event> events;
  int max_dim = 0;
  int line_no = 1;
  while (detail::next_line(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw data_error("line " + std::to_string(line_no) +
                       ": expected two fields");
    }
    const double t = detail::parse_double(fields[0], line_no);
    const long d = detail::parse_int(fields[1], line_no);
    if (d < 1) {
      throw data_error("line " + std::to_string(line_no) +
                       ": dimension labels are 1-based");
    }
    max_dim = std::max(max_dim, static_cast<int>(d));
    events.push_back({t, static_cast<int>(d) - 1});
  }
  const int dims = num_dims.value_or(std::max(max_dim, 1));
  if (max_dim > dims) {
    throw data_error("dimension label " + std::to_string(max_dim) +
                     " exceeds the declared count " + std::to_string(dims));
  }
  const double T =
      horizon.value_or(events.empty() ? 1.0 : events.back().time);
  return EventLog(std::move(events), T, dims);
}

inline EventLog read_events_csv(const std::string& path,
                                std::optional<double> horizon = std::nullopt,
                                std::optional<int> num_dims = std::nullopt) {
  auto is = detail::open_for_read(path);
  return read_events_csv(is, horizon, num_dims);
}

// Branching structure on disk: 1-based event indices, parent 0 meaning
// an immigrant.
inline void write_truth_csv(std::ostream& os, const std::vector<int>& parents) {
  os << kTruthCsvHeader << '\n';
  for (std::size_t i = 0; i < parents.size(); ++i) {
    os << i + 1 << ',' << parents[i] + 1 << '\n';
  }
}

inline void write_truth_csv(const std::string& path,
                            const std::vector<int>& parents) {
  auto os = detail::open_for_write(path);
  write_truth_csv(os, parents);
}

inline std::vector<int> read_truth_csv(std::istream& is) {
  std::string line;
  if (!detail::next_line(is, line) || line != kTruthCsvHeader) {
    throw data_error("truth file must start with '" +
                     std::string(kTruthCsvHeader) + "'");
  }
  std::vector<int> parents;
  int line_no = 1;
  while (detail::next_line(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw data_error("line " + std::to_string(line_no) +
                       ": expected two fields");
    }
    const long index = detail::parse_int(fields[0], line_no);
    const long parent = detail::parse_int(fields[1], line_no);
    if (index != static_cast<long>(parents.size()) + 1) {
      throw data_error("line " + std::to_string(line_no) +
                       ": event indices must run 1..N in order");
    }
    if (parent < 0 || parent >= index) {
      throw data_error("line " + std::to_string(line_no) +
                       ": parent must be 0 or an earlier event index");
    }
    parents.push_back(static_cast<int>(parent) - 1);
  }
  return parents;
}

inline std::vector<int> read_truth_csv(const std::string& path) {
  auto is = detail::open_for_read(path);
  return read_truth_csv(is);
}

inline void write_table_csv(std::ostream& os,
                            const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    os << (c ? "," : "") << header[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw contract_error("table row width differs from header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << detail::format_double(row[c]);
    }
    os << '\n';
  }
}

inline void write_draws_csv(std::ostream& os, const ChainDraws& chain) {
  const auto names = chain.column_names();
  std::vector<std::vector<double>> rows;
  rows.reserve(chain.draws.size());
  for (const ChainDraw& d : chain.draws) rows.push_back(chain.row_values(d));
  write_table_csv(os, names, rows);
}

inline void write_draws_csv(const std::string& path, const ChainDraws& chain) {
  auto os = detail::open_for_write(path);
  write_draws_csv(os, chain);
}

namespace detail {

inline const char* model_tag(ModelKind m) {
  switch (m) {
    case ModelKind::classic: return "classic";
    case ModelKind::ancestor: return "ancestor";
    case ModelKind::ancestor_restricted: return "ancestor-restricted";
  }
  throw contract_error("unknown model kind");
}

inline ModelKind model_from_tag(const std::string& tag) {
  if (tag == "classic") return ModelKind::classic;
  if (tag == "ancestor") return ModelKind::ancestor;
  if (tag == "ancestor-restricted") return ModelKind::ancestor_restricted;
  throw config_error("unknown model tag '" + tag + "'");
}

inline const char* background_tag(BackgroundKind b) {
  switch (b) {
    case BackgroundKind::constant: return "constant";
    case BackgroundKind::piecewise: return "piecewise";
    case BackgroundKind::seasonal: return "seasonal";
  }
  throw contract_error("unknown background kind");
}

inline BackgroundKind background_from_tag(const std::string& tag) {
  if (tag == "constant") return BackgroundKind::constant;
  if (tag == "piecewise") return BackgroundKind::piecewise;
  if (tag == "seasonal") return BackgroundKind::seasonal;
  throw config_error("unknown background tag '" + tag + "'");
}

inline nlohmann::json prior_json(const GammaPrior& p) {
  return nlohmann::json{{"shape", p.shape}, {"rate", p.rate}};
}

inline GammaPrior prior_from_json(const nlohmann::json& j) {
  return GammaPrior{j.at("shape").get<double>(), j.at("rate").get<double>()};
}

inline nlohmann::json priors_json(const PriorSpec& p) {
  return nlohmann::json{
      {"mu", prior_json(p.mu)},
      {"alpha", prior_json(p.alpha)},
      {"theta", prior_json(p.theta)},
      {"influence_K", prior_json(p.influence_K)},
      {"influence_L", prior_json(p.influence_L)},
      {"rate_g", prior_json(p.rate_g)},
      {"rate_h", prior_json(p.rate_h)},
  };
}

inline PriorSpec priors_from_json(const nlohmann::json& j) {
  PriorSpec p;
  p.mu = prior_from_json(j.at("mu"));
  p.alpha = prior_from_json(j.at("alpha"));
  p.theta = prior_from_json(j.at("theta"));
  p.influence_K = prior_from_json(j.at("influence_K"));
  p.influence_L = prior_from_json(j.at("influence_L"));
  p.rate_g = prior_from_json(j.at("rate_g"));
  p.rate_h = prior_from_json(j.at("rate_h"));
  return p;
}

inline nlohmann::json mcmc_json(const McmcConfig& c) {
  nlohmann::json j{
      {"iterations", c.iterations},
      {"burnin", c.burnin},
      {"thin", c.thin},
      {"seed", c.seed},
      {"slice",
       {{"initial_width", c.slice.initial_width},
        {"max_doublings", c.slice.max_doublings},
        {"max_shrinks", c.slice.max_shrinks}}},
  };
  if (std::isinf(c.branching_log_cutoff)) {
    j["branching_log_cutoff"] = nullptr;
  } else {
    j["branching_log_cutoff"] = c.branching_log_cutoff;
  }
  return j;
}

inline McmcConfig mcmc_from_json(const nlohmann::json& j) {
  McmcConfig c;
  c.iterations = j.at("iterations").get<int>();
  c.burnin = j.at("burnin").get<int>();
  c.thin = j.at("thin").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& cutoff = j.at("branching_log_cutoff");
  c.branching_log_cutoff = cutoff.is_null()
                               ? std::numeric_limits<double>::infinity()
                               : cutoff.get<double>();
  const auto& s = j.at("slice");
  c.slice.initial_width = s.at("initial_width").get<double>();
  c.slice.max_doublings = s.at("max_doublings").get<int>();
  c.slice.max_shrinks = s.at("max_shrinks").get<int>();
  return c;
}

}  // namespace detail

// Everything needed to reconstruct the chain besides the numeric draws:
// model and background tags, shapes, the sampling configuration, and the
// calendar window for seasonal chains. Runtime is deliberately left out.
inline nlohmann::json chain_meta_json(const ChainDraws& chain) {
  nlohmann::json j{
      {"schema_version", 1},
      {"model", detail::model_tag(chain.model)},
      {"background", detail::background_tag(chain.background)},
      {"num_dims", chain.num_dims},
      {"horizon", chain.horizon},
      {"priors", detail::priors_json(chain.priors)},
      {"mcmc", detail::mcmc_json(chain.config)},
  };
  if (chain.background == BackgroundKind::piecewise) {
    j["piecewise_edges"] = chain.piecewise_edges;
  }
  if (chain.background == BackgroundKind::seasonal) {
    if (!chain.calendar) {
      throw contract_error("seasonal chain lost its calendar grid");
    }
    j["calendar"] = {{"start_utc", chain.calendar->start_utc()},
                     {"end_utc", chain.calendar->end_utc()},
                     {"zone", chain.calendar->zone().name()}};
    j["seasonal_prior_only"] = {
        {"hours", chain.seasonal_prior_only.prior_only_hours},
        {"weekdays", chain.seasonal_prior_only.prior_only_weekdays},
        {"months", chain.seasonal_prior_only.prior_only_months}};
  }
  return j;
}

inline void write_chain_meta_json(const std::string& path,
                                  const ChainDraws& chain) {
  auto os = detail::open_for_write(path);
  os << chain_meta_json(chain).dump(2) << '\n';
}

namespace detail {

inline ChainDraw draw_from_row(const ChainDraws& shell,
                               const std::vector<double>& row) {
  ChainDraw d;
  std::size_t at = 0;
  const auto take = [&] {
    if (at >= row.size()) throw data_error("draw row is too short");
    return row[at++];
  };
  int mu_len = shell.num_dims;
  if (shell.background == BackgroundKind::piecewise) {
    mu_len = shell.num_dims * shell.piecewise_bins();
  }
  d.mu.resize(mu_len);
  for (double& v : d.mu) v = take();
  if (shell.background == BackgroundKind::seasonal) {
    d.theta_hour.resize(kHourBins);
    d.theta_weekday.resize(kWeekdayBins);
    d.theta_month.resize(kMonthBins);
    for (double& v : d.theta_hour) v = take();
    for (double& v : d.theta_weekday) v = take();
    for (double& v : d.theta_month) v = take();
  }
  d.K = InfluenceMatrix(shell.num_dims);
  for (int from = 0; from < shell.num_dims; ++from) {
    for (int to = 0; to < shell.num_dims; ++to) d.K.set(from, to, take());
  }
  if (shell.model == ModelKind::classic) {
    d.g_rate_diag = take();
    d.g_rate_off = take();
    d.rho = take();
  } else {
    d.L = InfluenceMatrix(shell.num_dims);
    for (int from = 0; from < shell.num_dims; ++from) {
      for (int to = 0; to < shell.num_dims; ++to) d.L.set(from, to, take());
    }
    d.g_rate_diag = take();
    d.g_rate_off = take();
    d.h_rate_diag = take();
    d.h_rate_off = take();
    d.rho = take();
  }
  d.immigrant_total = static_cast<int>(std::lround(take()));
  d.immigrants_per_dim.resize(shell.num_dims);
  for (int& v : d.immigrants_per_dim) {
    v = static_cast<int>(std::lround(take()));
  }
  if (at != row.size()) throw data_error("draw row is too long");
  return d;
}

}  // namespace detail

inline ChainDraws read_chain(const std::string& draws_csv_path,
                             const std::string& meta_json_path) {
  nlohmann::json meta;
  {
    auto is = detail::open_for_read(meta_json_path);
    try {
      is >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw data_error("cannot parse '" + meta_json_path + "': " + e.what());
    }
  }
  ChainDraws chain;
  try {
    if (meta.at("schema_version").get<int>() != 1) {
      throw data_error("unsupported chain schema version");
    }
    chain.model = detail::model_from_tag(meta.at("model").get<std::string>());
    chain.background =
        detail::background_from_tag(meta.at("background").get<std::string>());
    chain.num_dims = meta.at("num_dims").get<int>();
    chain.horizon = meta.at("horizon").get<double>();
    chain.priors = detail::priors_from_json(meta.at("priors"));
    chain.config = detail::mcmc_from_json(meta.at("mcmc"));
    if (chain.background == BackgroundKind::piecewise) {
      chain.piecewise_edges =
          meta.at("piecewise_edges").get<std::vector<double>>();
    }
    if (chain.background == BackgroundKind::seasonal) {
      const auto& cal = meta.at("calendar");
      chain.calendar = std::make_shared<const CalendarGrid>(
          cal.at("start_utc").get<std::int64_t>(),
          cal.at("end_utc").get<std::int64_t>(),
          TimeZone::parse(cal.at("zone").get<std::string>()));
      const auto& rep = meta.at("seasonal_prior_only");
      chain.seasonal_prior_only.prior_only_hours =
          rep.at("hours").get<int>();
      chain.seasonal_prior_only.prior_only_weekdays =
          rep.at("weekdays").get<int>();
      chain.seasonal_prior_only.prior_only_months =
          rep.at("months").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error("chain metadata in '" + meta_json_path +
                     "' is incomplete: " + e.what());
  }

  auto is = detail::open_for_read(draws_csv_path);
  std::string line;
  if (!detail::next_line(is, line)) {
    throw data_error("draws file '" + draws_csv_path + "' is empty");
  }
  const auto expected = chain.column_names();
  const auto header = detail::split_csv_line(line);
  if (header != expected) {
    throw data_error("draws header does not match the chain metadata");
  }
  int line_no = 1;
  while (detail::next_line(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != expected.size()) {
      throw data_error("line " + std::to_string(line_no) +
                       ": expected " + std::to_string(expected.size()) +
                       " fields");
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row[c] = detail::parse_double(fields[c], line_no);
    }
    chain.draws.push_back(detail::draw_from_row(chain, row));
  }
  return chain;
}

inline void write_chain(const std::string& draws_csv_path,
                        const std::string& meta_json_path,
                        const ChainDraws& chain) {
  write_draws_csv(draws_csv_path, chain);
  write_chain_meta_json(meta_json_path, chain);
}

}  // namespace hawkes
