#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"

namespace hawkes {

// ---------------------------------------------------------------------------
// Civil date arithmetic (proleptic Gregorian), Howard Hinnant's algorithms.
// ---------------------------------------------------------------------------

struct CivilDateTime {
  int year{1970};
  int month{1};   // 1..12
  int day{1};     // 1..31
  int hour{0};    // 0..23
  int minute{0};  // 0..59
  int second{0};  // 0..59
  double frac{0.0};
};

inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

inline int days_in_month(int year, int month) {
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30,
                                      31, 31, 30, 31, 30, 31};
  const bool leap =
      (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : lengths[month - 1];
}

// Weekday with Monday = 1 .. Sunday = 7.
inline int weekday_from_days(std::int64_t days) {
  const int sun0 = static_cast<int>(((days + 4) % 7 + 7) % 7);
  return sun0 == 0 ? 7 : sun0;
}

inline std::int64_t civil_to_epoch_seconds(const CivilDateTime& c) {
  return days_from_civil(c.year, c.month, c.day) * 86400 + c.hour * 3600 +
         c.minute * 60 + c.second;
}

inline CivilDateTime epoch_seconds_to_civil(std::int64_t s) {
  std::int64_t days = s / 86400;
  std::int64_t rem = s % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  CivilDateTime c;
  civil_from_days(days, c.year, c.month, c.day);
  c.hour = static_cast<int>(rem / 3600);
  c.minute = static_cast<int>((rem % 3600) / 60);
  c.second = static_cast<int>(rem % 60);
  return c;
}

// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM:SS" and an optional
// fractional second part.
inline CivilDateTime parse_civil_datetime(const std::string& text) {
  CivilDateTime c;
  const char* p = text.c_str();
  auto read_int = [&](int width, const char* what) {
    int v = 0;
    for (int i = 0; i < width; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(*p))) {
        throw data_error("bad timestamp '" + text + "': expected digit in " +
                         what);
      }
      v = v * 10 + (*p - '0');
      ++p;
    }
    return v;
  };
  auto expect = [&](char ch) {
    if (*p != ch) {
      throw data_error("bad timestamp '" + text + "': expected '" +
                       std::string(1, ch) + "'");
    }
    ++p;
  };
  c.year = read_int(4, "year");
  expect('-');
  c.month = read_int(2, "month");
  expect('-');
  c.day = read_int(2, "day");
  if (*p != 'T' && *p != ' ') {
    throw data_error("bad timestamp '" + text + "': expected date-time separator");
  }
  ++p;
  c.hour = read_int(2, "hour");
  expect(':');
  c.minute = read_int(2, "minute");
  if (*p == ':') {
    ++p;
    c.second = read_int(2, "second");
    if (*p == '.') {
      ++p;
      double scale = 0.1;
      if (!std::isdigit(static_cast<unsigned char>(*p))) {
        throw data_error("bad timestamp '" + text + "': empty fraction");
      }
      while (std::isdigit(static_cast<unsigned char>(*p))) {
        c.frac += (*p - '0') * scale;
        scale *= 0.1;
        ++p;
      }
    }
  }
  if (*p != '\0') {
    throw data_error("bad timestamp '" + text + "': trailing characters");
  }
  if (c.month < 1 || c.month > 12 || c.day < 1 ||
      c.day > days_in_month(c.year, c.month) || c.hour > 23 || c.minute > 59 ||
      c.second > 59) {
    throw data_error("bad timestamp '" + text + "': field out of range");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Time zones. The compiler's std::chrono ships no zone database here, so a
// small set of zones is built in: UTC, fixed offsets, and the EU / US
// daylight-saving rule families under their current standard rules (applied
// to all years). The zone is a run parameter; anything else is rejected.
// ---------------------------------------------------------------------------

class TimeZone {
 public:
  static TimeZone utc() { return TimeZone("UTC", 0); }

  static TimeZone fixed(const std::string& name, int offset_seconds) {
    return TimeZone(name, offset_seconds);
  }

  static TimeZone parse(const std::string& name) {
    if (name.empty() || name == "UTC" || name == "Z") return utc();
    if (name[0] == '+' || name[0] == '-' || name.rfind("UTC", 0) == 0) {
      return TimeZone(name, parse_fixed_offset(name));
    }
    struct NamedRule {
      const char* name;
      int std_offset;
      RuleFamily family;
    };
    static constexpr NamedRule rules[] = {
        {"Europe/London", 0, RuleFamily::eu},
        {"Europe/Dublin", 0, RuleFamily::eu},
        {"Europe/Lisbon", 0, RuleFamily::eu},
        {"Europe/Paris", 3600, RuleFamily::eu},
        {"Europe/Berlin", 3600, RuleFamily::eu},
        {"Europe/Madrid", 3600, RuleFamily::eu},
        {"Europe/Rome", 3600, RuleFamily::eu},
        {"Europe/Amsterdam", 3600, RuleFamily::eu},
        {"Europe/Athens", 7200, RuleFamily::eu},
        {"Europe/Helsinki", 7200, RuleFamily::eu},
        {"America/New_York", -18000, RuleFamily::us},
        {"America/Chicago", -21600, RuleFamily::us},
        {"America/Denver", -25200, RuleFamily::us},
        {"America/Los_Angeles", -28800, RuleFamily::us},
    };
    for (const NamedRule& r : rules) {
      if (name == r.name) {
        TimeZone tz(name, r.std_offset);
        tz.family_ = r.family;
        tz.dst_offset_ = r.std_offset + 3600;
        return tz;
      }
    }
    throw config_error(
        "unsupported time zone '" + name +
        "'; use UTC, a fixed offset like UTC+02:00, or one of the built-in "
        "EU/US zones");
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool has_dst() const noexcept {
    return family_ != RuleFamily::none;
  }

  [[nodiscard]] int offset_at(std::int64_t utc) const {
    if (family_ == RuleFamily::none) return std_offset_;
    const auto [spring, fall] = transitions_for(utc_year(utc));
    return (utc >= spring && utc < fall) ? dst_offset_ : std_offset_;
  }

  // First rule transition strictly after `utc`; int64 max when none exists.
  [[nodiscard]] std::int64_t next_transition_after(std::int64_t utc) const {
    if (family_ == RuleFamily::none) {
      return std::numeric_limits<std::int64_t>::max();
    }
    const int y = utc_year(utc);
    for (int year = y; year <= y + 1; ++year) {
      const auto [spring, fall] = transitions_for(year);
      if (spring > utc) return spring;
      if (fall > utc) return fall;
    }
    throw structural_error("time zone transition search failed");
  }

  // Local wall time to UTC. Times skipped by a spring-forward transition map
  // to the post-transition instant; times repeated at fall-back map to their
  // first occurrence.
  [[nodiscard]] std::int64_t local_to_utc(const CivilDateTime& local) const {
    const std::int64_t wall = civil_to_epoch_seconds(local);
    if (family_ == RuleFamily::none) return wall - std_offset_;
    const std::int64_t cand_std = wall - std_offset_;
    const std::int64_t cand_dst = wall - dst_offset_;
    const bool std_ok = offset_at(cand_std) == std_offset_;
    const bool dst_ok = offset_at(cand_dst) == dst_offset_;
    if (std_ok && dst_ok) return std::min(cand_std, cand_dst);
    if (std_ok) return cand_std;
    if (dst_ok) return cand_dst;
    return cand_std;  // spring gap: lands just after the transition
  }

  [[nodiscard]] CivilDateTime utc_to_local(std::int64_t utc) const {
    return epoch_seconds_to_civil(utc + offset_at(utc));
  }

 private:
  enum class RuleFamily { none, eu, us };

  TimeZone(std::string name, int std_offset)
      : name_(std::move(name)), std_offset_(std_offset) {}

  static int parse_fixed_offset(const std::string& name) {
    std::string body = name;
    if (body.rfind("UTC", 0) == 0) body = body.substr(3);
    if (body.empty()) return 0;
    const int sign = body[0] == '-' ? -1 : 1;
    if (body[0] == '+' || body[0] == '-') body = body.substr(1);
    int hours = 0;
    int minutes = 0;
    const auto colon = body.find(':');
    try {
      if (colon == std::string::npos) {
        hours = std::stoi(body);
      } else {
        hours = std::stoi(body.substr(0, colon));
        minutes = std::stoi(body.substr(colon + 1));
      }
    } catch (const std::exception&) {
      throw config_error("bad fixed UTC offset '" + name + "'");
    }
    if (hours > 14 || minutes > 59) {
      throw config_error("bad fixed UTC offset '" + name + "'");
    }
    return sign * (hours * 3600 + minutes * 60);
  }

  static int utc_year(std::int64_t utc) {
    return epoch_seconds_to_civil(utc).year;
  }

  // Day of month of the nth (1-based) `weekday` of a month; n = 5 means last.
  static int nth_weekday_of_month(int year, int month, int weekday, int n) {
    if (n == 5) {
      for (int d = days_in_month(year, month); d >= 1; --d) {
        if (weekday_from_days(days_from_civil(year, month, d)) == weekday) {
          return d;
        }
      }
    } else {
      int seen = 0;
      for (int d = 1; d <= days_in_month(year, month); ++d) {
        if (weekday_from_days(days_from_civil(year, month, d)) == weekday &&
            ++seen == n) {
          return d;
        }
      }
    }
    throw structural_error("weekday rule not satisfiable");
  }

  // (to-DST instant, to-standard instant) of one year, in UTC seconds.
  [[nodiscard]] std::pair<std::int64_t, std::int64_t> transitions_for(
      int year) const {
    if (family_ == RuleFamily::eu) {
      // Last Sunday of March / October at 01:00 UTC.
      const int md = nth_weekday_of_month(year, 3, 7, 5);
      const int od = nth_weekday_of_month(year, 10, 7, 5);
      return {days_from_civil(year, 3, md) * 86400 + 3600,
              days_from_civil(year, 10, od) * 86400 + 3600};
    }
    // US: second Sunday of March, first Sunday of November, both 02:00 wall.
    const int md = nth_weekday_of_month(year, 3, 7, 2);
    const int nd = nth_weekday_of_month(year, 11, 7, 1);
    return {days_from_civil(year, 3, md) * 86400 + 7200 - std_offset_,
            days_from_civil(year, 11, nd) * 86400 + 7200 - dst_offset_};
  }

  std::string name_;
  int std_offset_{0};
  int dst_offset_{0};
  RuleFamily family_{RuleFamily::none};
};

// ---------------------------------------------------------------------------
// Calendar cells and the window exposure tensor.
// ---------------------------------------------------------------------------

inline constexpr int kHourBins = 24;
inline constexpr int kWeekdayBins = 7;
inline constexpr int kMonthBins = 12;
inline constexpr int kCalendarCells = kHourBins * kWeekdayBins * kMonthBins;

// All three coordinates are 1-based: clock hour k is bin k + 1, Monday is 1,
// January is 1.
struct CalendarCell {
  int hour_bin{1};
  int weekday{1};
  int month{1};
};

inline int calendar_cell_index(const CalendarCell& c) {
  if (c.hour_bin < 1 || c.hour_bin > kHourBins || c.weekday < 1 ||
      c.weekday > kWeekdayBins || c.month < 1 || c.month > kMonthBins) {
    throw contract_error("calendar cell out of range");
  }
  return (c.hour_bin - 1) * kWeekdayBins * kMonthBins +
         (c.weekday - 1) * kMonthBins + (c.month - 1);
}

inline CalendarCell calendar_cell_from_index(int idx) {
  if (idx < 0 || idx >= kCalendarCells) {
    throw contract_error("calendar cell index out of range");
  }
  CalendarCell c;
  c.hour_bin = idx / (kWeekdayBins * kMonthBins) + 1;
  c.weekday = (idx / kMonthBins) % kWeekdayBins + 1;
  c.month = idx % kMonthBins + 1;
  return c;
}

inline CalendarCell calendar_cell_of(const CivilDateTime& local) {
  CalendarCell c;
  c.hour_bin = local.hour + 1;
  c.weekday = weekday_from_days(days_from_civil(local.year, local.month,
                                                local.day));
  c.month = local.month;
  return c;
}

// Hours of window time falling in each (hour, weekday, month) cell.
struct ExposureTensor {
  std::array<double, kCalendarCells> hours{};

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double h : hours) s += h;
    return s;
  }

  [[nodiscard]] std::array<double, kHourBins> hour_marginal() const {
    std::array<double, kHourBins> m{};
    for (int i = 0; i < kCalendarCells; ++i) {
      m[i / (kWeekdayBins * kMonthBins)] += hours[i];
    }
    return m;
  }

  [[nodiscard]] std::array<double, kWeekdayBins> weekday_marginal() const {
    std::array<double, kWeekdayBins> m{};
    for (int i = 0; i < kCalendarCells; ++i) {
      m[(i / kMonthBins) % kWeekdayBins] += hours[i];
    }
    return m;
  }

  [[nodiscard]] std::array<double, kMonthBins> month_marginal() const {
    std::array<double, kMonthBins> m{};
    for (int i = 0; i < kCalendarCells; ++i) m[i % kMonthBins] += hours[i];
    return m;
  }
};

// Precomputed map from window time (hours since window start) to calendar
// cell, as half-open constant segments, plus the exposure tensor. Segment
// boundaries are whole local hours and zone transitions; all arithmetic is
// done in integer seconds so exposures sum exactly to the window length.
class CalendarGrid {
 public:
  CalendarGrid(std::int64_t start_utc, std::int64_t end_utc, TimeZone zone)
      : zone_(std::move(zone)), start_utc_(start_utc), end_utc_(end_utc) {
    if (end_utc <= start_utc) {
      throw contract_error("calendar window must have positive length");
    }
    std::array<std::int64_t, kCalendarCells> seconds{};
    std::int64_t u = start_utc;
    while (u < end_utc) {
      const int off = zone_.offset_at(u);
      const std::int64_t local = u + off;
      std::int64_t next_hour = (floor_div(local, 3600) + 1) * 3600 - off;
      const std::int64_t next_trans = zone_.next_transition_after(u);
      std::int64_t seg_end = std::min(next_hour, end_utc);
      if (next_trans < seg_end) seg_end = next_trans;
      const CalendarCell cell = calendar_cell_of(epoch_seconds_to_civil(local));
      const int idx = calendar_cell_index(cell);
      seconds[idx] += seg_end - u;
      begin_hours_.push_back(static_cast<double>(u - start_utc) / 3600.0);
      cell_index_.push_back(idx);
      u = seg_end;
    }
    for (int i = 0; i < kCalendarCells; ++i) {
      exposure_.hours[i] = static_cast<double>(seconds[i]) / 3600.0;
    }
    horizon_hours_ = static_cast<double>(end_utc - start_utc) / 3600.0;
  }

  [[nodiscard]] double horizon_hours() const noexcept {
    return horizon_hours_;
  }
  [[nodiscard]] std::int64_t start_utc() const noexcept { return start_utc_; }
  [[nodiscard]] std::int64_t end_utc() const noexcept { return end_utc_; }
  [[nodiscard]] const TimeZone& zone() const noexcept { return zone_; }
  [[nodiscard]] const ExposureTensor& exposure() const noexcept {
    return exposure_;
  }

  [[nodiscard]] int cell_index_at(double hours_since_start) const {
    if (!(hours_since_start >= 0.0) || hours_since_start > horizon_hours_) {
      throw contract_error("time outside the calendar window");
    }
    auto it = std::upper_bound(begin_hours_.begin(), begin_hours_.end(),
                               hours_since_start);
    const auto pos = static_cast<std::size_t>(it - begin_hours_.begin());
    return cell_index_[pos == 0 ? 0 : pos - 1];
  }

  [[nodiscard]] CalendarCell cell_at(double hours_since_start) const {
    return calendar_cell_from_index(cell_index_at(hours_since_start));
  }

  [[nodiscard]] std::size_t segment_count() const noexcept {
    return cell_index_.size();
  }

 private:
  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }

  TimeZone zone_;
  std::int64_t start_utc_;
  std::int64_t end_utc_;
  double horizon_hours_{0.0};
  std::vector<double> begin_hours_;
  std::vector<int> cell_index_;
  ExposureTensor exposure_;
};

}  // namespace hawkes
