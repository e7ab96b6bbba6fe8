#pragma once

#include <cmath>
#include <limits>

#include "hawkes/branching.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/params.hpp"

namespace hawkes {

// Structural log-zero sentinel. The conditional log-likelihoods return this
// value, and only this value, when the branching structure is impossible
// under the parameters: a zero excitation magnitude paired with a nonempty
// child set, or an immigrant placed where the background rate is zero. No
// code path reaches it through log(0), so -inf always means "impossible
// configuration", never a numerical accident.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double loglik) { return loglik == kLogZero; }

namespace detail {

inline void check_likelihood_args(const EventLog& log,
                                  const BranchingState& branching, int dims) {
  if (log.num_dims() != dims) {
    throw contract_error("parameter dimensions do not match the event log");
  }
  if (branching.size() != log.size()) {
    throw contract_error("branching state does not match the event log");
  }
}

// Sum of log background rates at immigrant events minus the background
// compensator; kLogZero if some immigrant sits at zero rate.
inline double background_block(const Background& bg, const EventLog& log,
                               const BranchingState& branching) {
  double ll = 0.0;
  for (int m = 0; m < log.num_dims(); ++m) {
    for (int i : branching.immigrants_in_dim(m)) {
      const double rate = background_rate(bg, m, log.time(i));
      if (rate <= 0.0) return kLogZero;
      ll += std::log(rate);
    }
    ll -= background_integral(bg, m, log.horizon());
  }
  return ll;
}

// One parent's reproduction block under magnitude matrix `mat` and kernel
// `ker`: right-censored compensators toward every target dimension plus the
// density terms of its direct children.
inline double parent_block(const InfluenceMatrix& mat,
                           const ExponentialKernel& ker, const EventLog& log,
                           const BranchingState& branching, int p) {
  const int from = log.dim(p);
  const double tail = log.horizon() - log.time(p);
  double ll = 0.0;
  for (int m = 0; m < log.num_dims(); ++m) {
    ll -= mat.get(from, m) * ker.primitive(from, m, tail);
  }
  for (int c : branching.children(p)) {
    const double eta = mat.get(from, log.dim(c));
    if (eta == 0.0) return kLogZero;
    ll += std::log(eta) + ker.log_density(from, log.dim(c),
                                          log.time(c) - log.time(p));
  }
  return ll;
}

}  // namespace detail

// Log-likelihood of (events, branching) under the ancestor process:
// immigrants priced by the background, each immigrant's offspring through
// (K, g), each triggered event's offspring through (L, h).
inline double ancestor_conditional_loglik(const AncestorParams& params,
                                          const EventLog& log,
                                          const BranchingState& branching) {
  detail::check_likelihood_args(log, branching, params.dims());
  double ll = detail::background_block(params.background, log, branching);
  if (is_log_zero(ll)) return kLogZero;
  for (int p = 0; p < log.size(); ++p) {
    const double block =
        branching.is_immigrant(p)
            ? detail::parent_block(params.K, params.g, log, branching, p)
            : detail::parent_block(params.L, params.h, log, branching, p);
    if (is_log_zero(block)) return kLogZero;
    ll += block;
  }
  return ll;
}

// Log-likelihood under the classic process: one reproduction law for all.
inline double classic_conditional_loglik(const ClassicParams& params,
                                         const EventLog& log,
                                         const BranchingState& branching) {
  detail::check_likelihood_args(log, branching, params.dims());
  double ll = detail::background_block(params.background, log, branching);
  if (is_log_zero(ll)) return kLogZero;
  for (int p = 0; p < log.size(); ++p) {
    const double block =
        detail::parent_block(params.K, params.g, log, branching, p);
    if (is_log_zero(block)) return kLogZero;
    ll += block;
  }
  return ll;
}

}  // namespace hawkes
