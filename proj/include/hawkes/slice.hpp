#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hawkes/errors.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

struct SliceConfig {
  double initial_width{1.0};
  int max_doublings{50};
  int max_shrinks{1000};
};

namespace detail {

template <typename LogDensity>
double logf_or_neg_inf(LogDensity& logf, double x) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return logf(x);
}

// Acceptance test for points found after interval doubling (Neal 2003,
// figure 6): retraces the doublings towards x1 and rejects the proposal if
// it could not have produced the interval from x1's side.
template <typename LogDensity>
bool doubling_acceptable(LogDensity& logf, double x0, double x1, double y,
                         double width, double lo, double hi) {
  bool differs = false;
  while (hi - lo > 1.1 * width) {
    const double mid = 0.5 * (lo + hi);
    if ((x0 < mid && x1 >= mid) || (x0 >= mid && x1 < mid)) differs = true;
    if (x1 < mid) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (differs && y >= logf_or_neg_inf(logf, lo) &&
        y >= logf_or_neg_inf(logf, hi)) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// One slice-sampling update for a positive scalar with log density `logf`
// (up to an additive constant). The slice interval starts at initial_width
// around the current point and grows by doubling; candidates are drawn by
// shrinkage with the doubling acceptance test.
template <typename LogDensity>
double slice_sample_positive(LogDensity&& logf, double x0,
                             const SliceConfig& config, Rng& rng) {
  if (!(x0 > 0.0)) {
    throw contract_error("slice sampling needs a positive starting point");
  }
  const double f0 = logf(x0);
  if (!std::isfinite(f0)) {
    throw sampler_error(
        "slice sampler started at a point of zero or non-finite density (x = " +
        std::to_string(x0) + ")");
  }
  const double y = f0 - rng.exponential(1.0);

  double lo = x0 - config.initial_width * rng.uniform();
  double hi = lo + config.initial_width;
  double f_lo = detail::logf_or_neg_inf(logf, lo);
  double f_hi = detail::logf_or_neg_inf(logf, hi);
  for (int k = 0; k < config.max_doublings && (f_lo > y || f_hi > y); ++k) {
    if (rng.uniform() < 0.5) {
      lo -= hi - lo;
      f_lo = detail::logf_or_neg_inf(logf, lo);
    } else {
      hi += hi - lo;
      f_hi = detail::logf_or_neg_inf(logf, hi);
    }
  }

  double shrink_lo = lo;
  double shrink_hi = hi;
  for (int it = 0; it < config.max_shrinks; ++it) {
    const double x1 = rng.uniform(shrink_lo, shrink_hi);
    if (x1 > 0.0 && logf(x1) >= y &&
        detail::doubling_acceptable(logf, x0, x1, y, config.initial_width, lo,
                                    hi)) {
      return x1;
    }
    if (x1 < x0) {
      shrink_lo = x1;
    } else {
      shrink_hi = x1;
    }
    if (!(shrink_hi - shrink_lo >
          1e-15 * std::max(1.0, std::abs(x0)))) {
      break;
    }
  }
  throw sampler_error("slice sampler interval collapsed without an "
                      "acceptable point near x = " +
                      std::to_string(x0));
}

}  // namespace hawkes
