#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/branching.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/params.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/stability.hpp"

namespace hawkes {

struct SimulationRequest {
  AncestorParams params;
  std::optional<double> horizon;     // fixed-window mode
  std::optional<int> target_events;  // fixed-count mode
  std::uint64_t seed{0};
  long max_events{10'000'000};       // explosion guard
};

struct SimulatedData {
  EventLog log;
  BranchingState truth;
};

// Immigrant events of the background process in (t0, t1], time-ordered.
// Constant and piecewise rates sample counts and uniform positions directly;
// the seasonal rate is thinned against its finite bound.
inline std::vector<Event> simulate_immigrants(const Background& bg, double t0,
                                              double t1, Rng& rng) {
  if (!(t0 >= 0.0) || !(t1 > t0)) {
    throw contract_error("immigrant window needs 0 <= t0 < t1");
  }
  std::vector<Event> out;
  const int dims = background_dims(bg);
  for (int m = 0; m < dims; ++m) {
    if (const auto* c = std::get_if<ConstantBackground>(&bg)) {
      const long n = rng.poisson(c->mu[m] * (t1 - t0));
      for (long i = 0; i < n; ++i) out.push_back({rng.uniform(t0, t1), m});
    } else if (const auto* pw = std::get_if<PiecewiseBackground>(&bg)) {
      for (int b = 0; b < pw->bins(); ++b) {
        const double lo = std::max(pw->edges[b], t0);
        const double hi = std::min(pw->edges[b + 1], t1);
        if (hi <= lo) continue;
        const long n = rng.poisson(pw->mu[m][b] * (hi - lo));
        for (long i = 0; i < n; ++i) out.push_back({rng.uniform(lo, hi), m});
      }
    } else {
      const auto& s = std::get<SeasonalBackground>(bg);
      const double bound = s.max_rate(m);
      if (!std::isfinite(bound)) {
        throw stability_error("seasonal thinning bound is not finite");
      }
      if (bound <= 0.0) continue;
      const long n = rng.poisson(bound * (t1 - t0));
      for (long i = 0; i < n; ++i) {
        const double t = rng.uniform(t0, t1);
        const double u = rng.uniform();
        if (u * bound <= s.rate(m, t)) out.push_back({t, m});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return a.time != b.time ? a.time < b.time : a.dim < b.dim;
  });
  return out;
}

inline std::vector<Event> simulate_immigrants(const Background& bg,
                                              double horizon, Rng& rng) {
  return simulate_immigrants(bg, 0.0, horizon, rng);
}

// Direct children of one parent restricted to the window (w0, w1]. Counts
// are Poisson with the windowed kernel mass as mean; lags are inverse-CDF
// draws from the kernel conditioned to the window.
inline std::vector<Event> simulate_offspring(const Event& parent,
                                             bool immigrant_parent,
                                             const AncestorParams& params,
                                             double w0, double w1, Rng& rng) {
  if (!(w1 > w0)) throw contract_error("offspring window needs w0 < w1");
  const InfluenceMatrix& mat = immigrant_parent ? params.K : params.L;
  const ExponentialKernel& ker = immigrant_parent ? params.g : params.h;
  const double lo = std::max(w0, parent.time);
  std::vector<Event> out;
  if (w1 <= lo) return out;
  const double lo_lag = lo - parent.time;
  const double hi_lag = w1 - parent.time;
  for (int m = 0; m < mat.dims(); ++m) {
    const double eta = mat.get(parent.dim, m);
    if (eta == 0.0) continue;
    const double mass = eta * (ker.primitive(parent.dim, m, hi_lag) -
                               ker.primitive(parent.dim, m, lo_lag));
    const long n = rng.poisson(std::max(0.0, mass));
    for (long i = 0; i < n; ++i) {
      const double lag = ker.sample_lag_in(parent.dim, m, lo_lag, hi_lag, rng);
      out.push_back({parent.time + lag, m});
    }
  }
  std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) {
    return a.time != b.time ? a.time < b.time : a.dim < b.dim;
  });
  return out;
}

inline std::vector<Event> simulate_offspring(const Event& parent,
                                             bool immigrant_parent,
                                             const AncestorParams& params,
                                             double horizon, Rng& rng) {
  return simulate_offspring(parent, immigrant_parent, params, parent.time,
                            horizon, rng);
}

// Exact cluster-representation sampler. Immigrants arrive from the
// background; each cascade is expanded window by window, immigrants through
// (K, g) and their descendants through (L, h). Fixed-count requests grow the
// window by doubling until enough events exist, then truncate to the first
// target_events and close the log at the last kept time, which leaves the
// law of the kept prefix untouched.
//
// Determinism: every (cascade, window) pair and the immigrant stream of each
// window draw from their own substreams derived from the request seed, so
// identical requests produce bit-identical output.
inline SimulatedData simulate(const SimulationRequest& request) {
  const AncestorParams& params = request.params;
  params.validate();
  const bool fixed_n = request.target_events.has_value();
  if (fixed_n == request.horizon.has_value()) {
    throw contract_error(
        "simulation needs exactly one of horizon or target_events");
  }
  if (fixed_n && *request.target_events < 1) {
    throw contract_error("target_events must be >= 1");
  }
  if (!fixed_n && !(*request.horizon > 0.0)) {
    throw contract_error("simulation horizon must be > 0");
  }

  const StabilityReport stability = stability_report(params);
  if (fixed_n && !stability.stable) {
    throw stability_error(
        "fixed-count simulation requires rho(L) < 1; got rho(L) = " +
        std::to_string(stability.spectral_radius_L));
  }

  double window_cap = std::numeric_limits<double>::infinity();
  if (const auto* s = std::get_if<SeasonalBackground>(&params.background)) {
    window_cap = s->grid->horizon_hours();
  }
  if (!fixed_n && *request.horizon > window_cap) {
    throw contract_error("horizon exceeds the seasonal calendar window");
  }

  double w_hi;
  if (!fixed_n) {
    w_hi = *request.horizon;
  } else {
    double total_rate = 0.0;
    if (stability.total_rate) {
      total_rate = std::accumulate(stability.total_rate->begin(),
                                   stability.total_rate->end(), 0.0);
    } else {
      const double probe = std::min(window_cap, 1e6);
      for (int m = 0; m < params.dims(); ++m) {
        total_rate += background_integral(params.background, m, probe) / probe;
      }
    }
    w_hi = total_rate > 0.0 ? *request.target_events / total_rate : 1.0;
    w_hi = std::min(std::max(w_hi, 1.0), window_cap);
  }

  struct SimEvent {
    double time;
    int dim;
    long parent;  // index into the creation-order list, -1 for immigrants
    long cascade;
  };
  std::vector<SimEvent> all;
  long n_cascades = 0;
  const Rng base(request.seed);
  double w_lo = 0.0;
  int window_index = 0;

  while (true) {
    Rng imm_rng = base.substream(0).substream(window_index);
    for (const Event& e :
         simulate_immigrants(params.background, w_lo, w_hi, imm_rng)) {
      all.push_back({e.time, e.dim, -1, n_cascades++});
    }
    std::vector<std::vector<long>> by_cascade(n_cascades);
    for (long i = 0; i < static_cast<long>(all.size()); ++i) {
      by_cascade[all[i].cascade].push_back(i);
    }
    for (long c = 0; c < n_cascades; ++c) {
      Rng cascade_rng = base.substream(1 + c).substream(window_index);
      std::vector<long>& list = by_cascade[c];
      for (std::size_t q = 0; q < list.size(); ++q) {
        const SimEvent ev = all[list[q]];
        const std::vector<Event> kids = simulate_offspring(
            {ev.time, ev.dim}, ev.parent < 0, params, w_lo, w_hi, cascade_rng);
        for (const Event& k : kids) {
          all.push_back({k.time, k.dim, list[q], c});
          list.push_back(static_cast<long>(all.size()) - 1);
          if (static_cast<long>(all.size()) > request.max_events) {
            throw stability_error(
                "simulation exceeded the event cap of " +
                std::to_string(request.max_events) +
                "; parameters are at or beyond the stable regime");
          }
        }
      }
    }
    if (!fixed_n) break;
    if (static_cast<long>(all.size()) >= *request.target_events) break;
    if (w_hi >= window_cap) {
      throw contract_error(
          "seasonal calendar window too short for the requested event count");
    }
    w_lo = w_hi;
    w_hi = std::min(w_hi * 2.0, window_cap);
    ++window_index;
  }

  // Global time order; the stable sort keeps creation order on exact float
  // ties, which always places parents before children.
  std::vector<long> order(all.size());
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
    return all[a].time < all[b].time;
  });
  std::vector<long> rank_of(all.size());
  for (long r = 0; r < static_cast<long>(order.size()); ++r) {
    rank_of[order[r]] = r;
  }

  const long keep =
      fixed_n ? *request.target_events : static_cast<long>(all.size());
  std::vector<Event> events;
  events.reserve(keep);
  std::vector<int> parents(keep);
  double prev = -1.0;
  for (long r = 0; r < keep; ++r) {
    const SimEvent& se = all[order[r]];
    double t = se.time;
    // Exact float ties get the smallest forward nudge; later-ordered events
    // only ever move later, so genealogy order survives.
    while (t <= prev) t = std::nextafter(t, std::numeric_limits<double>::max());
    prev = t;
    events.push_back({t, se.dim});
    parents[r] = se.parent < 0 ? kNoParent : static_cast<int>(rank_of[se.parent]);
  }
  const double horizon =
      fixed_n ? events.back().time : *request.horizon;

  EventLog log(std::move(events), horizon, params.dims());
  BranchingState truth = rebuild_child_sets(log, parents);
  return {std::move(log), std::move(truth)};
}

inline SimulatedData simulate(const ClassicParams& params,
                              std::optional<double> horizon,
                              std::optional<int> target_events,
                              std::uint64_t seed) {
  SimulationRequest request;
  request.params = params.as_ancestor();
  request.horizon = horizon;
  request.target_events = target_events;
  request.seed = seed;
  return simulate(request);
}

}  // namespace hawkes
