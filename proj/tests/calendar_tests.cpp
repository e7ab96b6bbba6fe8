#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "hawkes/background.hpp"
#include "hawkes/calendar.hpp"
#include "hawkes/errors.hpp"

using namespace hawkes;

TEST_CASE("civil date arithmetic round-trips and knows its weekdays") {
  REQUIRE(days_from_civil(1970, 1, 1) == 0);
  REQUIRE(days_from_civil(2021, 1, 1) == 18628);
  REQUIRE(weekday_from_days(days_from_civil(2021, 1, 1)) == 5);   // Friday
  REQUIRE(weekday_from_days(days_from_civil(2021, 3, 28)) == 7);  // Sunday
  REQUIRE(weekday_from_days(days_from_civil(2024, 2, 29)) == 4);  // Thursday

  std::mt19937 gen(11);
  std::uniform_int_distribution<std::int64_t> dd(-200000, 200000);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t z = dd(gen);
    int y = 0;
    int m = 0;
    int d = 0;
    civil_from_days(z, y, m, d);
    REQUIRE(days_from_civil(y, m, d) == z);
  }
}

TEST_CASE("timestamp parsing accepts both separators and rejects junk") {
  const CivilDateTime a = parse_civil_datetime("2021-06-05 13:45:12");
  REQUIRE(a.year == 2021);
  REQUIRE(a.month == 6);
  REQUIRE(a.hour == 13);
  REQUIRE(a.second == 12);
  const CivilDateTime b = parse_civil_datetime("2021-06-05T13:45");
  REQUIRE(b.minute == 45);
  REQUIRE(b.second == 0);
  const CivilDateTime c = parse_civil_datetime("2021-06-05T13:45:12.25");
  REQUIRE(c.frac == Catch::Approx(0.25));

  REQUIRE_THROWS_AS(parse_civil_datetime("2021-13-05 00:00"), data_error);
  REQUIRE_THROWS_AS(parse_civil_datetime("2021-02-29 00:00"), data_error);
  REQUIRE_THROWS_AS(parse_civil_datetime("2021-06-05"), data_error);
  REQUIRE_THROWS_AS(parse_civil_datetime("2021-06-05 24:00"), data_error);
  REQUIRE_THROWS_AS(parse_civil_datetime("2021-06-05 10:00:00x"), data_error);
  REQUIRE_THROWS_AS(parse_civil_datetime(""), data_error);
}

TEST_CASE("fixed-offset zones parse and convert") {
  const TimeZone utc = TimeZone::parse("UTC");
  REQUIRE(utc.offset_at(1000000) == 0);
  REQUIRE_FALSE(utc.has_dst());

  const TimeZone ist = TimeZone::parse("+05:30");
  REQUIRE(ist.offset_at(0) == 5 * 3600 + 30 * 60);
  const TimeZone nyfixed = TimeZone::parse("UTC-04:00");
  REQUIRE(nyfixed.offset_at(0) == -4 * 3600);

  const CivilDateTime local = parse_civil_datetime("2021-01-01 05:30");
  REQUIRE(ist.local_to_utc(local) ==
          civil_to_epoch_seconds(parse_civil_datetime("2021-01-01 00:00")));

  REQUIRE_THROWS_AS(TimeZone::parse("Mars/Olympus"), config_error);
  REQUIRE_THROWS_AS(TimeZone::parse("UTC+25:00"), config_error);
}

TEST_CASE("EU rule zone has the 2021 transitions at 01:00 UTC") {
  const TimeZone paris = TimeZone::parse("Europe/Paris");
  REQUIRE(paris.has_dst());
  const std::int64_t spring =
      civil_to_epoch_seconds(parse_civil_datetime("2021-03-28 01:00"));
  const std::int64_t fall =
      civil_to_epoch_seconds(parse_civil_datetime("2021-10-31 01:00"));
  REQUIRE(paris.offset_at(spring - 1) == 3600);
  REQUIRE(paris.offset_at(spring) == 7200);
  REQUIRE(paris.offset_at(fall - 1) == 7200);
  REQUIRE(paris.offset_at(fall) == 3600);
  REQUIRE(paris.next_transition_after(spring - 10) == spring);
  REQUIRE(paris.next_transition_after(spring) == fall);

  const TimeZone london = TimeZone::parse("Europe/London");
  REQUIRE(london.offset_at(spring - 1) == 0);
  REQUIRE(london.offset_at(spring) == 3600);
}

TEST_CASE("US rule zone transitions at 2am wall clock") {
  const TimeZone ny = TimeZone::parse("America/New_York");
  const std::int64_t spring =
      civil_to_epoch_seconds(parse_civil_datetime("2021-03-14 07:00"));
  const std::int64_t fall =
      civil_to_epoch_seconds(parse_civil_datetime("2021-11-07 06:00"));
  REQUIRE(ny.offset_at(spring - 1) == -5 * 3600);
  REQUIRE(ny.offset_at(spring) == -4 * 3600);
  REQUIRE(ny.offset_at(fall - 1) == -4 * 3600);
  REQUIRE(ny.offset_at(fall) == -5 * 3600);
}

TEST_CASE("skipped local times map forward, repeated ones map to the first pass") {
  const TimeZone paris = TimeZone::parse("Europe/Paris");
  // 02:30 local does not exist on 2021-03-28; post-transition reading
  const std::int64_t gap =
      paris.local_to_utc(parse_civil_datetime("2021-03-28 02:30"));
  REQUIRE(gap == civil_to_epoch_seconds(parse_civil_datetime("2021-03-28 01:30")));
  // 02:30 local happens twice on 2021-10-31; first occurrence is DST (+2)
  const std::int64_t overlap =
      paris.local_to_utc(parse_civil_datetime("2021-10-31 02:30"));
  REQUIRE(overlap ==
          civil_to_epoch_seconds(parse_civil_datetime("2021-10-31 00:30")));
  // unambiguous times stay exact
  const std::int64_t plain =
      paris.local_to_utc(parse_civil_datetime("2021-07-14 12:00"));
  REQUIRE(plain ==
          civil_to_epoch_seconds(parse_civil_datetime("2021-07-14 10:00")));
}

TEST_CASE("calendar cells are 1-based in every coordinate") {
  const CivilDateTime c = parse_civil_datetime("2021-01-01 00:10");
  const CalendarCell cell = calendar_cell_of(c);
  REQUIRE(cell.hour_bin == 1);
  REQUIRE(cell.weekday == 5);
  REQUIRE(cell.month == 1);
  const CalendarCell noon = calendar_cell_of(parse_civil_datetime("2021-07-05 12:59"));
  REQUIRE(noon.hour_bin == 13);
  REQUIRE(noon.weekday == 1);
  REQUIRE(noon.month == 7);

  for (int idx = 0; idx < kCalendarCells; ++idx) {
    REQUIRE(calendar_cell_index(calendar_cell_from_index(idx)) == idx);
  }
  REQUIRE_THROWS_AS(calendar_cell_index({0, 1, 1}), contract_error);
  REQUIRE_THROWS_AS(calendar_cell_index({1, 8, 1}), contract_error);
}

TEST_CASE("full-year UTC exposure is exactly 8760 hours, uniformly by hour") {
  const TimeZone utc = TimeZone::utc();
  const std::int64_t start =
      civil_to_epoch_seconds(parse_civil_datetime("2021-01-01 00:00"));
  const std::int64_t end =
      civil_to_epoch_seconds(parse_civil_datetime("2022-01-01 00:00"));
  const CalendarGrid grid(start, end, utc);
  const ExposureTensor& e = grid.exposure();

  REQUIRE(e.total() == Catch::Approx(8760.0).margin(1e-9));
  REQUIRE(grid.horizon_hours() == Catch::Approx(8760.0).margin(1e-12));

  const auto hm = e.hour_marginal();
  for (double h : hm) REQUIRE(h == Catch::Approx(365.0).margin(1e-10));

  // 2021 starts and ends on a Friday, so Fridays appear 53 times
  const auto wm = e.weekday_marginal();
  REQUIRE(wm[4] == Catch::Approx(53.0 * 24.0).margin(1e-9));
  REQUIRE(wm[0] == Catch::Approx(52.0 * 24.0).margin(1e-9));

  const auto mm = e.month_marginal();
  REQUIRE(mm[0] == Catch::Approx(31.0 * 24.0).margin(1e-9));
  REQUIRE(mm[1] == Catch::Approx(28.0 * 24.0).margin(1e-9));
}

TEST_CASE("exposure matches a minute-resolution recount across a DST jump") {
  const TimeZone paris = TimeZone::parse("Europe/Paris");
  const std::int64_t start =
      paris.local_to_utc(parse_civil_datetime("2021-03-26 00:00"));
  const std::int64_t end =
      paris.local_to_utc(parse_civil_datetime("2021-04-02 00:00"));
  const CalendarGrid grid(start, end, paris);

  // one hour is skipped, so the local week spans 167 elapsed hours
  REQUIRE(grid.horizon_hours() == Catch::Approx(167.0).margin(1e-12));

  std::array<double, kCalendarCells> brute{};
  for (std::int64_t u = start; u < end; u += 60) {
    const CalendarCell cell = calendar_cell_of(paris.utc_to_local(u));
    brute[calendar_cell_index(cell)] += 1.0 / 60.0;
  }
  const ExposureTensor& e = grid.exposure();
  for (int i = 0; i < kCalendarCells; ++i) {
    REQUIRE(e.hours[i] == Catch::Approx(brute[i]).margin(1e-9));
  }

  // the skipped clock hour 02 appears on six days, not seven
  const auto hm = e.hour_marginal();
  REQUIRE(hm[2] == Catch::Approx(6.0).margin(1e-9));
  REQUIRE(hm[1] == Catch::Approx(7.0).margin(1e-9));
}

TEST_CASE("grid cell lookup agrees with direct conversion") {
  const TimeZone ny = TimeZone::parse("America/New_York");
  const std::int64_t start =
      ny.local_to_utc(parse_civil_datetime("2021-11-05 00:00"));
  const std::int64_t end =
      ny.local_to_utc(parse_civil_datetime("2021-11-09 00:00"));
  const CalendarGrid grid(start, end, ny);
  // fall-back adds one hour to the elapsed window
  REQUIRE(grid.horizon_hours() == Catch::Approx(97.0).margin(1e-12));

  std::mt19937 gen(3);
  std::uniform_real_distribution<double> ud(0.0, grid.horizon_hours());
  for (int i = 0; i < 500; ++i) {
    const double t = ud(gen);
    const std::int64_t u = start + static_cast<std::int64_t>(t * 3600.0);
    const CalendarCell direct = calendar_cell_of(ny.utc_to_local(u));
    const CalendarCell viagrid = grid.cell_at(t);
    REQUIRE(viagrid.hour_bin == direct.hour_bin);
    REQUIRE(viagrid.weekday == direct.weekday);
    REQUIRE(viagrid.month == direct.month);
  }
  REQUIRE_NOTHROW(grid.cell_at(grid.horizon_hours()));
  REQUIRE_THROWS_AS(grid.cell_at(grid.horizon_hours() + 0.1), contract_error);
  REQUIRE_THROWS_AS(grid.cell_at(-0.1), contract_error);
}

namespace {

std::shared_ptr<const CalendarGrid> two_week_grid() {
  const TimeZone tz = TimeZone::parse("Europe/London");
  const std::int64_t start =
      tz.local_to_utc(parse_civil_datetime("2021-05-03 00:00"));
  const std::int64_t end =
      tz.local_to_utc(parse_civil_datetime("2021-05-17 00:00"));
  return std::make_shared<CalendarGrid>(start, end, tz);
}

}  // namespace

TEST_CASE("seasonal background with unit factors is the constant rate") {
  auto grid = two_week_grid();
  SeasonalBackground bg({0.2, 0.05}, grid);
  REQUIRE(bg.norm() == 1.0);
  REQUIRE(bg.rate(0, 5.0) == Catch::Approx(0.2).margin(1e-14));
  REQUIRE(bg.integral(0, grid->horizon_hours()) ==
          Catch::Approx(0.2 * grid->horizon_hours()).margin(1e-12));
  REQUIRE(bg.max_rate(1) == Catch::Approx(0.05).margin(1e-14));
}

TEST_CASE("seasonal factors renormalise to exposure-weighted mean one") {
  auto grid = two_week_grid();
  SeasonalBackground bg({0.1}, grid);

  std::array<double, kHourBins> th;
  std::array<double, kWeekdayBins> tw;
  std::array<double, kMonthBins> tm;
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> ud(0.2, 3.0);
  for (double& v : th) v = ud(gen);
  for (double& v : tw) v = ud(gen);
  for (double& v : tm) v = ud(gen);

  bg.set_factors(th, tw, tm);
  const auto means = bg.factor_means();
  REQUIRE(means[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(means[1] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(means[2] == Catch::Approx(1.0).margin(1e-12));

  // alpha keeps its meaning as the exact time-average rate
  const double horizon = grid->horizon_hours();
  double integral = 0.0;
  for (std::int64_t u = grid->start_utc(); u < grid->end_utc(); u += 60) {
    const double t = static_cast<double>(u - grid->start_utc()) / 3600.0;
    integral += bg.rate(0, t) / 60.0;
  }
  REQUIRE(integral / horizon == Catch::Approx(0.1).margin(1e-9));
  REQUIRE(bg.integral(0, horizon) == Catch::Approx(0.1 * horizon).margin(1e-12));
}

TEST_CASE("raw-scale repackaging leaves the rate function untouched") {
  auto grid = two_week_grid();
  SeasonalBackground bg({1.0, 1.0}, grid);

  std::array<double, kHourBins> th;
  std::array<double, kWeekdayBins> tw;
  std::array<double, kMonthBins> tm;
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> ud(0.05, 4.0);
  for (double& v : th) v = ud(gen);
  for (double& v : tw) v = ud(gen);
  for (double& v : tm) v = ud(gen);
  const std::vector<double> raw_alpha{0.31, 0.07};

  bg.set_from_raw(raw_alpha, th, tw, tm);

  std::uniform_real_distribution<double> td(0.0, grid->horizon_hours());
  for (int i = 0; i < 400; ++i) {
    const double t = td(gen);
    const CalendarCell c = grid->cell_at(t);
    for (int m = 0; m < 2; ++m) {
      const double direct = raw_alpha[m] * th[c.hour_bin - 1] *
                            tw[c.weekday - 1] * tm[c.month - 1];
      REQUIRE(bg.rate(m, t) == Catch::Approx(direct).epsilon(1e-12));
    }
  }
  const auto means = bg.factor_means();
  REQUIRE(means[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(means[1] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(means[2] == Catch::Approx(1.0).margin(1e-12));
  // raw_alpha view inverts the packaging
  REQUIRE(bg.raw_alpha(0) == Catch::Approx(0.31 * th[0] / bg.theta_hour[0] *
                                           tw[0] / bg.theta_weekday[0] *
                                           tm[0] / bg.theta_month[0])
                                 .epsilon(1e-10));
}
