#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hawkes/event_log.hpp"

namespace hawkes {

// Temporal clustering fingerprints of one event sequence. Each statistic
// carries a defined flag; the value is zero whenever the sequence is too
// short or too degenerate to support it.
struct SummaryStats {
  int event_count{0};
  double upper_tail_mean_iet{0.0};
  bool upper_tail_defined{false};
  double lag1_acf{0.0};
  bool acf_defined{false};
  double ripley_k2{0.0};
  bool ripley_defined{false};
};

namespace detail {

inline double quantile_type7(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  if (p <= 0.0) return xs.front();
  if (p >= 1.0) return xs.back();
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - lo) * (xs[hi] - xs[lo]);
}

}  // namespace detail

// Statistics of a pooled (or single-dimension) time sequence; `times` must
// be sorted ascending.
inline SummaryStats summary_statistics(const std::vector<double>& times) {
  SummaryStats out;
  out.event_count = static_cast<int>(times.size());

  if (!times.empty()) {
    // Reproduction clustering measure: the average number of later events
    // within two hours of each event, window half-open on the left.
    double pairs = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto hi = std::upper_bound(times.begin(), times.end(),
                                       times[i] + 2.0);
      pairs += static_cast<double>(hi - times.begin()) -
               static_cast<double>(i) - 1.0;
    }
    out.ripley_k2 = pairs / static_cast<double>(times.size());
    out.ripley_defined = true;
  }

  if (times.size() >= 2) {
    std::vector<double> iets(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      iets[i] = times[i + 1] - times[i];
    }

    const double cut = detail::quantile_type7(iets, 0.9);
    double tail_sum = 0.0;
    int tail_n = 0;
    for (double v : iets) {
      if (v > cut) {
        tail_sum += v;
        ++tail_n;
      }
    }
    if (tail_n > 0) {
      out.upper_tail_mean_iet = tail_sum / tail_n;
      out.upper_tail_defined = true;
    }

    if (iets.size() >= 2) {
      const double m =
          std::accumulate(iets.begin(), iets.end(), 0.0) / iets.size();
      double var = 0.0;
      for (double v : iets) var += (v - m) * (v - m);
      if (var > 0.0) {
        double cov = 0.0;
        for (std::size_t i = 0; i + 1 < iets.size(); ++i) {
          cov += (iets[i] - m) * (iets[i + 1] - m);
        }
        out.lag1_acf = cov / var;
        out.acf_defined = true;
      }
    }
  }
  return out;
}

inline SummaryStats summary_statistics(const EventLog& log) {
  std::vector<double> times(log.size());
  for (int i = 0; i < log.size(); ++i) times[i] = log.time(i);
  return summary_statistics(times);
}

inline std::vector<SummaryStats> per_dim_summary(const EventLog& log) {
  std::vector<SummaryStats> out;
  out.reserve(log.num_dims());
  for (int m = 0; m < log.num_dims(); ++m) {
    out.push_back(summary_statistics(log.restrict_to_dim(m)));
  }
  return out;
}

}  // namespace hawkes
