#pragma once

#include "hawkes/branching.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/params.hpp"

namespace hawkes {

// Conditional intensity of dimension m at time t given the history strictly
// before t and the branching labels: the background rate plus one excitation
// term per earlier event, routed through (K, g) when that event is an
// immigrant and through (L, h) when it was itself triggered.
inline double intensity_at(const AncestorParams& params, const EventLog& log,
                           const BranchingState& branching, int m, double t) {
  if (m < 0 || m >= params.dims() || log.num_dims() != params.dims()) {
    throw contract_error("intensity dimension out of range");
  }
  if (!(t >= 0.0) || t > log.horizon()) {
    throw contract_error("intensity time outside (0, horizon]");
  }
  if (branching.size() != log.size()) {
    throw contract_error("branching state does not match the event log");
  }
  double lam = background_rate(params.background, m, t);
  for (int i = 0; i < log.size(); ++i) {
    const double lag = t - log.time(i);
    if (lag <= 0.0) break;
    const int from = log.dim(i);
    if (branching.is_immigrant(i)) {
      lam += params.K.get(from, m) * params.g.density(from, m, lag);
    } else {
      lam += params.L.get(from, m) * params.h.density(from, m, lag);
    }
  }
  return lam;
}

// Classic intensity: every event excites through (K, g); branching labels
// are irrelevant.
inline double intensity_at(const ClassicParams& params, const EventLog& log,
                           int m, double t) {
  if (m < 0 || m >= params.dims() || log.num_dims() != params.dims()) {
    throw contract_error("intensity dimension out of range");
  }
  if (!(t >= 0.0) || t > log.horizon()) {
    throw contract_error("intensity time outside (0, horizon]");
  }
  double lam = background_rate(params.background, m, t);
  for (int i = 0; i < log.size(); ++i) {
    const double lag = t - log.time(i);
    if (lag <= 0.0) break;
    const int from = log.dim(i);
    lam += params.K.get(from, m) * params.g.density(from, m, lag);
  }
  return lam;
}

}  // namespace hawkes
