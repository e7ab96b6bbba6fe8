#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hawkes/calendar.hpp"
#include "hawkes/errors.hpp"

namespace hawkes {

// Homogeneous immigrant rate per dimension, events per hour.
struct ConstantBackground {
  std::vector<double> mu;

  ConstantBackground() = default;
  explicit ConstantBackground(std::vector<double> rates) : mu(std::move(rates)) {
    validate();
  }
  ConstantBackground(int dims, double rate) : mu(dims, rate) { validate(); }

  void validate() const {
    if (mu.empty()) throw contract_error("background needs >= 1 dimension");
    for (double r : mu) {
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw contract_error("background rates must be finite and >= 0");
      }
    }
  }

  [[nodiscard]] int dims() const noexcept { return static_cast<int>(mu.size()); }
  [[nodiscard]] double rate(int m, double) const { return mu[m]; }
  [[nodiscard]] double integral(int m, double horizon) const {
    return mu[m] * horizon;
  }
  [[nodiscard]] double max_rate(int m) const { return mu[m]; }
};

// Step-function immigrant rate on a shared bin partition of [0, horizon].
struct PiecewiseBackground {
  std::vector<double> edges;              // size bins + 1, edges[0] == 0
  std::vector<std::vector<double>> mu;    // [dim][bin]

  PiecewiseBackground() = default;
  PiecewiseBackground(std::vector<double> bin_edges,
                      std::vector<std::vector<double>> rates)
      : edges(std::move(bin_edges)), mu(std::move(rates)) {
    validate();
  }

  void validate() const {
    if (edges.size() < 2 || edges.front() != 0.0) {
      throw contract_error("piecewise background needs edges starting at 0");
    }
    for (std::size_t b = 1; b < edges.size(); ++b) {
      if (!(edges[b] > edges[b - 1])) {
        throw contract_error("piecewise bin edges must be increasing");
      }
    }
    if (mu.empty()) throw contract_error("background needs >= 1 dimension");
    for (const auto& row : mu) {
      if (row.size() != edges.size() - 1) {
        throw contract_error("piecewise rates must match the bin count");
      }
      for (double r : row) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
          throw contract_error("background rates must be finite and >= 0");
        }
      }
    }
  }

  [[nodiscard]] int dims() const noexcept { return static_cast<int>(mu.size()); }
  [[nodiscard]] int bins() const noexcept {
    return static_cast<int>(edges.size()) - 1;
  }

  // Bins are right-closed, (edges[b], edges[b + 1]]; time zero falls in the
  // first bin.
  [[nodiscard]] int bin_at(double t) const {
    if (!(t >= edges.front()) || t > edges.back()) {
      throw contract_error("time outside the piecewise partition");
    }
    const auto it = std::lower_bound(edges.begin(), edges.end(), t);
    const auto pos = static_cast<int>(it - edges.begin());
    return pos == 0 ? 0 : pos - 1;
  }

  [[nodiscard]] double rate(int m, double t) const { return mu[m][bin_at(t)]; }

  [[nodiscard]] double integral(int m, double horizon) const {
    double s = 0.0;
    for (int b = 0; b < bins(); ++b) {
      const double lo = edges[b];
      const double hi = std::min(edges[b + 1], horizon);
      if (hi <= lo) break;
      s += mu[m][b] * (hi - lo);
    }
    return s;
  }

  [[nodiscard]] double max_rate(int m) const {
    return *std::max_element(mu[m].begin(), mu[m].end());
  }
};

// Multiplicative calendar background:
//   mu_m(t) = alpha_m / norm * theta_hour(h(t)) * theta_weekday(w(t))
//             * theta_month(mon(t))
// where each factor vector has exposure-weighted mean one over the window.
// norm is the exposure-weighted mean of the triple product, so alpha_m is
// exactly the time-average immigrant rate: integral(m) == alpha_m * horizon.
// With all factors at one, norm is one and this reduces to a constant rate.
struct SeasonalBackground {
  std::vector<double> alpha;
  std::array<double, kHourBins> theta_hour{};
  std::array<double, kWeekdayBins> theta_weekday{};
  std::array<double, kMonthBins> theta_month{};
  std::shared_ptr<const CalendarGrid> grid;

  SeasonalBackground() = default;

  SeasonalBackground(std::vector<double> alpha_rates,
                     std::shared_ptr<const CalendarGrid> calendar)
      : alpha(std::move(alpha_rates)), grid(std::move(calendar)) {
    theta_hour.fill(1.0);
    theta_weekday.fill(1.0);
    theta_month.fill(1.0);
    if (!grid) throw contract_error("seasonal background needs a calendar");
    if (alpha.empty()) throw contract_error("background needs >= 1 dimension");
    for (double a : alpha) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw contract_error("background rates must be finite and >= 0");
      }
    }
    renormalize();
  }

  [[nodiscard]] int dims() const noexcept {
    return static_cast<int>(alpha.size());
  }

  [[nodiscard]] double factor_at_cell(int cell_idx) const {
    const CalendarCell c = calendar_cell_from_index(cell_idx);
    return theta_hour[c.hour_bin - 1] * theta_weekday[c.weekday - 1] *
           theta_month[c.month - 1];
  }

  [[nodiscard]] double rate(int m, double t) const {
    return alpha[m] / norm_ * factor_at_cell(grid->cell_index_at(t));
  }

  [[nodiscard]] double integral(int m, double) const {
    return alpha[m] * grid->horizon_hours();
  }

  [[nodiscard]] double max_rate(int m) const {
    double mh = 0.0;
    for (double v : theta_hour) mh = std::max(mh, v);
    double mw = 0.0;
    for (double v : theta_weekday) mw = std::max(mw, v);
    double mm = 0.0;
    for (double v : theta_month) mm = std::max(mm, v);
    return alpha[m] / norm_ * mh * mw * mm;
  }

  [[nodiscard]] double norm() const noexcept { return norm_; }

  // Exposure-weighted means of the three factor vectors; the constraint
  // rescaling drives each of these to one.
  [[nodiscard]] std::array<double, 3> factor_means() const {
    const ExposureTensor& e = grid->exposure();
    const double total = e.total();
    const auto mh = e.hour_marginal();
    const auto mw = e.weekday_marginal();
    const auto mm = e.month_marginal();
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int i = 0; i < kHourBins; ++i) out[0] += theta_hour[i] * mh[i];
    for (int i = 0; i < kWeekdayBins; ++i) out[1] += theta_weekday[i] * mw[i];
    for (int i = 0; i < kMonthBins; ++i) out[2] += theta_month[i] * mm[i];
    out[0] /= total;
    out[1] /= total;
    out[2] /= total;
    return out;
  }

  // The multiplicative scale the samplers work on: mu_m(t) on cell c equals
  // raw_alpha(m) * theta_hour * theta_weekday * theta_month.
  [[nodiscard]] double raw_alpha(int m) const { return alpha[m] / norm_; }

  // Repackages an unconstrained parameter draw. Input is the raw scale,
  // mu_m(t) = alpha_raw_m * th * tw * tm with arbitrary positive factors.
  // Each factor vector is rescaled to exposure-weighted mean one and alpha
  // absorbs the scales, so the rate function is unchanged pointwise and
  // alpha_m ends up as its exact time average over the window.
  void set_from_raw(const std::vector<double>& alpha_raw,
                    const std::array<double, kHourBins>& th,
                    const std::array<double, kWeekdayBins>& tw,
                    const std::array<double, kMonthBins>& tm) {
    if (static_cast<int>(alpha_raw.size()) != dims()) {
      throw contract_error("seasonal raw alpha has wrong dimension count");
    }
    theta_hour = th;
    theta_weekday = tw;
    theta_month = tm;
    const double absorbed = normalize_factors();
    refresh_norm();
    for (int m = 0; m < dims(); ++m) {
      alpha[m] = alpha_raw[m] * absorbed * norm_;
    }
  }

  // Replaces the factor shapes while keeping each dimension's time-average
  // rate alpha_m; used to build presets with a chosen average level.
  void set_factors(const std::array<double, kHourBins>& th,
                   const std::array<double, kWeekdayBins>& tw,
                   const std::array<double, kMonthBins>& tm) {
    theta_hour = th;
    theta_weekday = tw;
    theta_month = tm;
    normalize_factors();
    refresh_norm();
  }

  // Re-applies the mean-one constraints to the current factors.
  void renormalize() { set_factors(theta_hour, theta_weekday, theta_month); }

 private:
  // Scales each factor block to exposure-weighted mean one; returns the
  // product of the removed scales. Blocks with zero weighted mean are left
  // alone (refresh_norm rejects a fully degenerate configuration).
  double normalize_factors() {
    const auto means = factor_means();
    double product = 1.0;
    if (means[0] > 0.0) {
      for (double& v : theta_hour) v /= means[0];
      product *= means[0];
    }
    if (means[1] > 0.0) {
      for (double& v : theta_weekday) v /= means[1];
      product *= means[1];
    }
    if (means[2] > 0.0) {
      for (double& v : theta_month) v /= means[2];
      product *= means[2];
    }
    return product;
  }

  void refresh_norm() {
    const ExposureTensor& e = grid->exposure();
    double z = 0.0;
    for (int i = 0; i < kCalendarCells; ++i) {
      if (e.hours[i] > 0.0) z += factor_at_cell(i) * e.hours[i];
    }
    norm_ = z / e.total();
    if (!(norm_ > 0.0) || !std::isfinite(norm_)) {
      throw stability_error("seasonal background has zero or non-finite "
                            "exposure-weighted mass");
    }
  }

  double norm_{1.0};
};

using Background =
    std::variant<ConstantBackground, PiecewiseBackground, SeasonalBackground>;

inline int background_dims(const Background& bg) {
  return std::visit([](const auto& b) { return b.dims(); }, bg);
}

inline double background_rate(const Background& bg, int m, double t) {
  return std::visit([&](const auto& b) { return b.rate(m, t); }, bg);
}

inline double background_integral(const Background& bg, int m,
                                  double horizon) {
  return std::visit([&](const auto& b) { return b.integral(m, horizon); }, bg);
}

inline double background_max_rate(const Background& bg, int m) {
  return std::visit([&](const auto& b) { return b.max_rate(m); }, bg);
}

}  // namespace hawkes
