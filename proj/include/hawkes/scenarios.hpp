#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "hawkes/background.hpp"
#include "hawkes/calendar.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/params.hpp"

namespace hawkes {

// Named synthetic generating processes used by the simulation, recovery, and
// benchmark tooling.
struct Scenario {
  std::string name;
  std::string description;
  AncestorParams params;
  double default_horizon{0.0};
};

// Three symmetric dimensions with strong immigrant reproduction and a
// subcritical triggered cascade; stationary rate 0.2 events per hour per
// dimension.
inline Scenario three_symmetric_scenario() {
  ConstantBackground bg(3, 0.05);
  InfluenceMatrix K(3, 0.6);
  InfluenceMatrix L(3, 0.05);
  for (int m = 0; m < 3; ++m) L.set(m, m, 0.3);
  Scenario s;
  s.name = "three-symmetric";
  s.description = "3 dimensions, uniform cross-excitation, slow cascades";
  s.params = AncestorParams(bg, K, L, ExponentialKernel(2.0, 2.0),
                            ExponentialKernel(0.5, 0.5));
  s.default_horizon = 3400.0;
  return s;
}

namespace detail {

inline AncestorParams four_dim_params(const ExponentialKernel& g,
                                      const ExponentialKernel& h) {
  ConstantBackground bg(std::vector<double>{0.05, 0.07, 0.04, 0.06});
  const auto K = InfluenceMatrix::from_to_rows({{0.18, 0.12, 0.0, 0.10},
                                                {0.0, 0.16, 0.12, 0.0},
                                                {0.10, 0.0, 0.17, 0.12},
                                                {0.12, 0.10, 0.0, 0.15}});
  const auto L = InfluenceMatrix::from_to_rows({{0.30, 0.22, 0.20, 0.0},
                                                {0.20, 0.28, 0.0, 0.18},
                                                {0.22, 0.20, 0.26, 0.0},
                                                {0.0, 0.22, 0.20, 0.30}});
  return AncestorParams(bg, K, L, g, h);
}

}  // namespace detail

// Four dimensions with sparse asymmetric influence and well-separated kernel
// time scales: immigrant offspring arrive fast, triggered offspring slowly.
inline Scenario four_structured_scenario() {
  Scenario s;
  s.name = "four-structured";
  s.description = "4 dimensions, sparse influence, separated time scales";
  s.params = detail::four_dim_params(ExponentialKernel(4.0, 3.0),
                                     ExponentialKernel(0.8, 0.5));
  s.default_horizon = 4000.0;
  return s;
}

// The same influence structure with both kernels collapsed onto one shared
// decay rate, removing the time-scale cue that separates the two channels.
inline Scenario four_matched_rate_scenario() {
  Scenario s;
  s.name = "four-matched-rates";
  s.description = "4 dimensions, sparse influence, indistinguishable decays";
  s.params = detail::four_dim_params(ExponentialKernel(2.4, 2.4),
                                     ExponentialKernel(2.4, 2.4));
  s.default_horizon = 4000.0;
  return s;
}

// Nine senders on a shared calendar: twelve autumn weeks in New York
// spanning a fall-back transition, with daily double peaks, a weekend dip,
// and a mild monthly drift. Averages roughly two thousand events.
inline Scenario groupchat_scenario() {
  const TimeZone zone = TimeZone::parse("America/New_York");
  const std::int64_t start = zone.local_to_utc({2021, 9, 6, 0, 0, 0});
  const std::int64_t end = zone.local_to_utc({2021, 11, 29, 0, 0, 0});
  auto grid = std::make_shared<CalendarGrid>(start, end, zone);

  const std::vector<double> alpha{0.085, 0.075, 0.070, 0.065, 0.060,
                                  0.055, 0.050, 0.045, 0.040};
  SeasonalBackground bg(alpha, grid);
  const std::array<double, kHourBins> th{
      0.25, 0.15, 0.10, 0.10, 0.10, 0.15, 0.35, 0.70, 1.05, 1.25, 1.35, 1.45,
      1.60, 1.50, 1.35, 1.25, 1.15, 1.25, 1.55, 1.80, 1.85, 1.55, 1.00, 0.55};
  const std::array<double, kWeekdayBins> tw{1.15, 1.20, 1.20, 1.15,
                                            1.05, 0.65, 0.60};
  std::array<double, kMonthBins> tm;
  tm.fill(1.0);
  tm[8] = 1.05;
  tm[10] = 0.90;
  bg.set_factors(th, tw, tm);

  const int dims = 9;
  InfluenceMatrix K(dims);
  InfluenceMatrix L(dims);
  for (int m = 0; m < dims; ++m) {
    for (int t = 0; t < dims; ++t) {
      K.set(m, t, 0.012 + 0.002 * ((m + t) % 3));
      L.set(m, t, 0.012 + 0.003 * ((m + 2 * t) % 3));
    }
  }
  for (int m = 0; m < dims; ++m) {
    K.set(m, m, 0.20 + 0.01 * ((3 * m) % 8));
    K.set(m, (m + 1) % dims, 0.09 + 0.012 * (m % 5));
    K.set(m, (m + dims - 1) % dims, 0.06 + 0.010 * (m % 4));
    K.set(m, (m + 4) % dims, 0.030 + 0.008 * (m % 3));
    L.set(m, m, 0.22 + 0.008 * ((2 * m) % 7));
    L.set(m, (m + 1) % dims, 0.08 + 0.010 * (m % 4));
    L.set(m, (m + 3) % dims, 0.04 + 0.006 * (m % 3));
  }

  Scenario s;
  s.name = "groupchat";
  s.description = "9 senders, seasonal calendar background, autumn window";
  s.params = AncestorParams(bg, K, L, ExponentialKernel(3.0, 2.0),
                            ExponentialKernel(1.2, 0.8));
  s.default_horizon = grid->horizon_hours();
  return s;
}

inline std::vector<std::string> scenario_names() {
  return {"three-symmetric", "four-structured", "four-matched-rates",
          "groupchat"};
}

inline Scenario scenario_by_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (name == "three-symmetric" || name == "s1" || name == "1") {
    return three_symmetric_scenario();
  }
  if (name == "four-structured" || name == "s2" || name == "2") {
    return four_structured_scenario();
  }
  if (name == "four-matched-rates" || name == "s3" || name == "3") {
    return four_matched_rate_scenario();
  }
  if (name == "groupchat") return groupchat_scenario();
  throw config_error("unknown scenario '" + name + "'");
}

}  // namespace hawkes
