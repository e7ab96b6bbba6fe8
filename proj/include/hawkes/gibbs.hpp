#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hawkes/background.hpp"
#include "hawkes/branching.hpp"
#include "hawkes/calendar.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/matrix.hpp"
#include "hawkes/params.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/slice.hpp"
#include "hawkes/stability.hpp"

namespace hawkes {

struct McmcConfig {
  int iterations{20000};
  int burnin{5000};
  int thin{1};
  std::uint64_t seed{0};
  SliceConfig slice{};
  // Branching sweeps skip candidate parents whose kernel exponent alone
  // exceeds this many nats; infinity keeps every candidate.
  double branching_log_cutoff{40.0};

  void validate() const {
    if (iterations <= 0) throw config_error("iterations must be positive");
    if (burnin < 0 || burnin >= iterations) {
      throw config_error("burnin must lie in [0, iterations)");
    }
    if (thin < 1) throw config_error("thin must be >= 1");
    if ((iterations - burnin) % thin != 0) {
      throw config_error("thin must divide iterations - burnin exactly");
    }
    if (!(branching_log_cutoff > 0.0)) {
      throw config_error("branching log cutoff must be positive");
    }
    if (!(slice.initial_width > 0.0) || slice.max_doublings < 0 ||
        slice.max_shrinks <= 0) {
      throw config_error("invalid slice sampler settings");
    }
  }

  [[nodiscard]] int retained() const { return (iterations - burnin) / thin; }
};

// Which events act as reproducing parents in a conditional update: immigrant
// events reproduce through one channel, triggered events through the other,
// and the classic model lets every event reproduce through its single channel.
enum class ParentSet { immigrants, triggered, all };

inline bool in_parent_set(ParentSet set, bool immigrant) {
  switch (set) {
    case ParentSet::immigrants: return immigrant;
    case ParentSet::triggered: return !immigrant;
    case ParentSet::all: return true;
  }
  return false;
}

namespace detail {

inline double safe_log(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

struct SweepWorkspace {
  std::vector<double> log_mu;
  std::vector<double> log_K, log_L;
  std::vector<double> k_diag, k_off, l_diag, l_off;
  std::vector<double> cand_w;
  std::vector<int> cand_parent;
};

inline void ensure_finite(double v, const char* what, int iteration) {
  if (!std::isfinite(v)) {
    throw sampler_error(std::string("non-finite ") + what +
                        " draw at iteration " + std::to_string(iteration));
  }
}

inline std::vector<double> uniform_edges(double horizon, int bins) {
  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    edges[b] = horizon * static_cast<double>(b) / bins;
  }
  return edges;
}

}  // namespace detail

// One systematic Gibbs scan over the parent assignments of the two-kernel
// model, sweeping events in reverse time order so that every child set is
// already refreshed when its parent's reproduction block is priced. The
// full conditional for event j weighs each candidate by the incoming edge
// (background rate, or the candidate's reproduction kernel under its current
// label) times event j's own outgoing block under the label the choice
// implies.
inline void ancestor_sample_branching(const EventLog& log,
                                      const AncestorParams& params,
                                      BranchingState& state, double log_cutoff,
                                      Rng& rng,
                                      detail::SweepWorkspace& ws) {
  const int n = log.size();
  if (n == 0) return;
  if (state.size() != n) {
    throw contract_error("branching state does not match the event log");
  }
  const int dims = params.dims();
  if (log.num_dims() != dims) {
    throw contract_error("event log dimension count does not match params");
  }
  const double horizon = log.horizon();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  ws.log_mu.resize(n);
  for (int i = 0; i < n; ++i) {
    ws.log_mu[i] = detail::safe_log(
        background_rate(params.background, log.dim(i), log.time(i)));
  }
  ws.log_K.assign(static_cast<std::size_t>(dims) * dims, 0.0);
  ws.log_L.assign(static_cast<std::size_t>(dims) * dims, 0.0);
  ws.k_diag.assign(dims, 0.0);
  ws.k_off.assign(dims, 0.0);
  ws.l_diag.assign(dims, 0.0);
  ws.l_off.assign(dims, 0.0);
  for (int from = 0; from < dims; ++from) {
    for (int to = 0; to < dims; ++to) {
      ws.log_K[from * dims + to] = detail::safe_log(params.K.get(from, to));
      ws.log_L[from * dims + to] = detail::safe_log(params.L.get(from, to));
    }
    ws.k_diag[from] = params.K.get(from, from);
    ws.k_off[from] = params.K.row_sum_from(from) - ws.k_diag[from];
    ws.l_diag[from] = params.L.get(from, from);
    ws.l_off[from] = params.L.row_sum_from(from) - ws.l_diag[from];
  }
  const double gd = params.g.rate_diag, go = params.g.rate_off;
  const double hd = params.h.rate_diag, ho = params.h.rate_off;
  const double lgd = std::log(gd), lgo = std::log(go);
  const double lhd = std::log(hd), lho = std::log(ho);
  const double min_rate = std::min(std::min(gd, go), std::min(hd, ho));
  const double max_lag = log_cutoff / min_rate;

  for (int j = n - 1; j >= 0; --j) {
    const int dj = log.dim(j);
    const double tj = log.time(j);
    const double tau = horizon - tj;
    double out_imm = ws.k_diag[dj] * std::expm1(-gd * tau) +
                     ws.k_off[dj] * std::expm1(-go * tau);
    double out_trig = ws.l_diag[dj] * std::expm1(-hd * tau) +
                      ws.l_off[dj] * std::expm1(-ho * tau);
    for (int c : state.children(j)) {
      const int dc = log.dim(c);
      const double lag = log.time(c) - tj;
      if (dc == dj) {
        out_imm += ws.log_K[dj * dims + dc] + lgd - gd * lag;
        out_trig += ws.log_L[dj * dims + dc] + lhd - hd * lag;
      } else {
        out_imm += ws.log_K[dj * dims + dc] + lgo - go * lag;
        out_trig += ws.log_L[dj * dims + dc] + lho - ho * lag;
      }
    }

    ws.cand_w.clear();
    ws.cand_parent.clear();
    double best = ws.log_mu[j] + out_imm;
    ws.cand_w.push_back(best);
    ws.cand_parent.push_back(kNoParent);
    for (int k = j - 1; k >= 0; --k) {
      const double lag = tj - log.time(k);
      if (lag > max_lag) break;
      const int dk = log.dim(k);
      double lw;
      if (state.is_immigrant(k)) {
        lw = (dk == dj) ? ws.log_K[dk * dims + dj] + lgd - gd * lag
                        : ws.log_K[dk * dims + dj] + lgo - go * lag;
      } else {
        lw = (dk == dj) ? ws.log_L[dk * dims + dj] + lhd - hd * lag
                        : ws.log_L[dk * dims + dj] + lho - ho * lag;
      }
      lw += out_trig;
      ws.cand_w.push_back(lw);
      ws.cand_parent.push_back(k);
      if (lw > best) best = lw;
    }
    if (!(best > kNegInf)) {
      throw sampler_error("every parent candidate for event " +
                          std::to_string(j) + " has zero weight");
    }

    double total = 0.0;
    for (double& w : ws.cand_w) {
      w = std::exp(w - best);
      total += w;
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int chosen = ws.cand_parent.back();
    for (std::size_t c = 0; c < ws.cand_w.size(); ++c) {
      acc += ws.cand_w[c];
      if (u <= acc) {
        chosen = ws.cand_parent[c];
        break;
      }
    }
    state.set_parent(j, chosen, log);
  }
}

inline void ancestor_sample_branching(const EventLog& log,
                                      const AncestorParams& params,
                                      BranchingState& state, double log_cutoff,
                                      Rng& rng) {
  detail::SweepWorkspace ws;
  ancestor_sample_branching(log, params, state, log_cutoff, rng, ws);
}

// Parent assignments in the classic model are conditionally independent
// given the parameters, so each event is drawn fresh from its categorical
// full conditional.
inline BranchingState classic_sample_branching(const EventLog& log,
                                               const ClassicParams& params,
                                               double log_cutoff, Rng& rng,
                                               detail::SweepWorkspace& ws) {
  const int n = log.size();
  if (log.num_dims() != params.dims()) {
    throw contract_error("event log dimension count does not match params");
  }
  std::vector<int> parents(n, kNoParent);
  const double bd = params.g.rate_diag, bo = params.g.rate_off;
  const double max_lag = log_cutoff / std::min(bd, bo);

  for (int i = 0; i < n; ++i) {
    const int di = log.dim(i);
    const double ti = log.time(i);
    const double w0 = background_rate(params.background, di, ti);
    ws.cand_w.clear();
    ws.cand_parent.clear();
    double total = w0;
    for (int k = i - 1; k >= 0; --k) {
      const double lag = ti - log.time(k);
      if (lag > max_lag) break;
      const int dk = log.dim(k);
      const double w =
          params.K.get(dk, di) * (dk == di ? bd * std::exp(-bd * lag)
                                           : bo * std::exp(-bo * lag));
      if (w > 0.0) {
        ws.cand_w.push_back(w);
        ws.cand_parent.push_back(k);
        total += w;
      }
    }
    if (!(total > 0.0)) {
      throw sampler_error("every parent candidate for event " +
                          std::to_string(i) + " has zero weight");
    }
    const double u = rng.uniform() * total;
    if (u > w0) {
      double acc = w0;
      for (std::size_t c = 0; c < ws.cand_w.size(); ++c) {
        acc += ws.cand_w[c];
        if (u <= acc) {
          parents[i] = ws.cand_parent[c];
          break;
        }
      }
    }
  }
  return rebuild_child_sets(log, parents);
}

inline BranchingState classic_sample_branching(const EventLog& log,
                                               const ClassicParams& params,
                                               double log_cutoff, Rng& rng) {
  detail::SweepWorkspace ws;
  return classic_sample_branching(log, params, log_cutoff, rng, ws);
}

// Gamma-conjugate update of a constant background given the immigrant set.
inline std::vector<double> sample_mu_constant(const EventLog& log,
                                              const BranchingState& state,
                                              const GammaPrior& prior,
                                              Rng& rng) {
  const double horizon = log.horizon();
  std::vector<double> mu(log.num_dims());
  for (int m = 0; m < log.num_dims(); ++m) {
    const auto count = static_cast<double>(state.immigrants_in_dim(m).size());
    mu[m] = rng.gamma(prior.shape + count, prior.rate + horizon);
  }
  return mu;
}

// Gamma-conjugate update of a piecewise background: each (dimension, bin)
// cell pairs its immigrant count with the bin's duration inside the window.
inline std::vector<std::vector<double>> sample_mu_piecewise(
    const EventLog& log, const BranchingState& state,
    const PiecewiseBackground& current, const GammaPrior& prior, Rng& rng) {
  const int dims = log.num_dims();
  if (current.dims() != dims) {
    throw contract_error("piecewise background dimension count mismatch");
  }
  const int bins = current.bins();
  const double horizon = log.horizon();
  std::vector<std::vector<double>> counts(dims, std::vector<double>(bins, 0.0));
  for (int m = 0; m < dims; ++m) {
    for (int i : state.immigrants_in_dim(m)) {
      counts[m][current.bin_at(log.time(i))] += 1.0;
    }
  }
  std::vector<std::vector<double>> mu(dims, std::vector<double>(bins, 0.0));
  for (int m = 0; m < dims; ++m) {
    for (int b = 0; b < bins; ++b) {
      const double lo = std::min(current.edges[b], horizon);
      const double hi = std::min(current.edges[b + 1], horizon);
      mu[m][b] = rng.gamma(prior.shape + counts[m][b],
                           prior.rate + (hi - lo));
    }
  }
  return mu;
}

// Gamma-conjugate update of an influence matrix given the branching state.
// Entry (from, to) pairs the child count on that channel with the parent
// set's censored kernel mass. With restrict_offdiag the off-diagonal entries
// are pinned to zero and consume no randomness.
inline InfluenceMatrix sample_influence(const EventLog& log,
                                        const BranchingState& state,
                                        const ExponentialKernel& kernel,
                                        ParentSet set, const GammaPrior& prior,
                                        bool restrict_offdiag, Rng& rng) {
  const int dims = log.num_dims();
  const double horizon = log.horizon();
  std::vector<double> count(static_cast<std::size_t>(dims) * dims, 0.0);
  std::vector<double> mass(static_cast<std::size_t>(dims) * dims, 0.0);
  for (int j = 0; j < log.size(); ++j) {
    if (!in_parent_set(set, state.is_immigrant(j))) continue;
    const int from = log.dim(j);
    const double tau = horizon - log.time(j);
    const double mass_diag = -std::expm1(-kernel.rate_diag * tau);
    const double mass_off = -std::expm1(-kernel.rate_off * tau);
    for (int to = 0; to < dims; ++to) {
      mass[from * dims + to] += to == from ? mass_diag : mass_off;
    }
    for (int c : state.children(j)) {
      count[from * dims + log.dim(c)] += 1.0;
    }
  }
  InfluenceMatrix out(dims);
  for (int from = 0; from < dims; ++from) {
    for (int to = 0; to < dims; ++to) {
      if (restrict_offdiag && from != to) continue;
      out.set(from, to,
              rng.gamma(prior.shape + count[from * dims + to],
                        prior.rate + mass[from * dims + to]));
    }
  }
  return out;
}

// Collapsed data for one kernel rate's full conditional,
//   log f(r) = (shape - 1 + child_count) log r - (rate + child_lag_sum) r
//              - sum_j coef_j (1 - exp(-r tau_j)),
// where the censoring terms run over the parent set and coef_j is the
// influence mass the parent emits through this rate class.
struct RateConditional {
  GammaPrior prior{1.0, 1.0};
  double child_count{0.0};
  double child_lag_sum{0.0};
  std::vector<double> taus;   // descending
  std::vector<double> coefs;  // aligned with taus
  std::vector<double> coef_prefix;

  [[nodiscard]] bool informative() const {
    return child_count > 0.0 || !taus.empty();
  }

  void finalize() {
    coef_prefix.resize(coefs.size() + 1);
    coef_prefix[0] = 0.0;
    for (std::size_t i = 0; i < coefs.size(); ++i) {
      coef_prefix[i + 1] = coef_prefix[i] + coefs[i];
    }
  }

  [[nodiscard]] double log_density(double rate) const {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      return -std::numeric_limits<double>::infinity();
    }
    double v = (prior.shape - 1.0 + child_count) * std::log(rate) -
               (prior.rate + child_lag_sum) * rate;
    // Terms with rate * tau > 45 have 1 - exp(-rate tau) equal to one in
    // double precision, so their coefficients are charged via the prefix
    // sum and only the unsaturated suffix is evaluated.
    const double tau_cut = 45.0 / rate;
    const auto it = std::lower_bound(taus.begin(), taus.end(), tau_cut,
                                     std::greater<double>());
    const auto idx = static_cast<std::size_t>(it - taus.begin());
    v -= coef_prefix[idx];
    for (std::size_t i = idx; i < taus.size(); ++i) {
      v += coefs[i] * std::expm1(-rate * taus[i]);
    }
    return v;
  }
};

// Builds the diagonal-rate and off-diagonal-rate conditionals for the kernel
// attached to `mat` over the given parent set.
inline std::pair<RateConditional, RateConditional> build_rate_conditionals(
    const EventLog& log, const BranchingState& state,
    const InfluenceMatrix& mat, ParentSet set, const GammaPrior& prior) {
  if (mat.dims() != log.num_dims()) {
    throw contract_error("influence matrix dimension count mismatch");
  }
  RateConditional diag;
  RateConditional off;
  diag.prior = prior;
  off.prior = prior;
  const double horizon = log.horizon();
  for (int j = 0; j < log.size(); ++j) {
    if (!in_parent_set(set, state.is_immigrant(j))) continue;
    const int from = log.dim(j);
    const double tau = horizon - log.time(j);
    if (tau > 0.0) {
      const double cd = mat.get(from, from);
      if (cd > 0.0) {
        diag.taus.push_back(tau);
        diag.coefs.push_back(cd);
      }
      const double co = mat.row_sum_from(from) - cd;
      if (co > 0.0) {
        off.taus.push_back(tau);
        off.coefs.push_back(co);
      }
    }
    for (int c : state.children(j)) {
      const double lag = log.time(c) - log.time(j);
      if (log.dim(c) == from) {
        diag.child_count += 1.0;
        diag.child_lag_sum += lag;
      } else {
        off.child_count += 1.0;
        off.child_lag_sum += lag;
      }
    }
  }
  diag.finalize();
  off.finalize();
  return {std::move(diag), std::move(off)};
}

// One update of a kernel rate: slice sampling on the full conditional, or an
// exact prior draw when the parent set contributes no terms.
inline double sample_kernel_rate(const RateConditional& cond, double current,
                                 const SliceConfig& slice, Rng& rng) {
  if (!cond.informative()) {
    return rng.gamma(cond.prior.shape, cond.prior.rate);
  }
  return slice_sample_positive(
      [&cond](double r) { return cond.log_density(r); }, current, slice, rng);
}

struct SeasonalUpdateReport {
  int prior_only_hours{0};
  int prior_only_weekdays{0};
  int prior_only_months{0};
};

// Gamma-conjugate scan over the seasonal background on its raw scale: the
// per-dimension level first, then each hour, weekday, and month cell. Cells
// of one factor are conditionally independent given the other two, so each
// block's exposure weights are computed once. Cells with zero exposure fall
// back to their prior and are counted in the report. The refreshed draw is
// repackaged through the mean-one constraints before returning.
inline SeasonalUpdateReport sample_seasonal_background(
    const EventLog& log, const BranchingState& state, SeasonalBackground& bg,
    const GammaPrior& alpha_prior, const GammaPrior& theta_prior, Rng& rng,
    const std::vector<int>* event_cells = nullptr) {
  const int dims = log.num_dims();
  if (bg.dims() != dims) {
    throw contract_error("seasonal background dimension count mismatch");
  }
  const ExposureTensor& exposure = bg.grid->exposure();

  std::array<double, kHourBins> hour_count{};
  std::array<double, kWeekdayBins> weekday_count{};
  std::array<double, kMonthBins> month_count{};
  std::vector<double> dim_count(dims, 0.0);
  for (int i = 0; i < log.size(); ++i) {
    if (!state.is_immigrant(i)) continue;
    const int idx =
        event_cells ? (*event_cells)[i] : bg.grid->cell_index_at(log.time(i));
    const CalendarCell cell = calendar_cell_from_index(idx);
    hour_count[cell.hour_bin - 1] += 1.0;
    weekday_count[cell.weekday - 1] += 1.0;
    month_count[cell.month - 1] += 1.0;
    dim_count[log.dim(i)] += 1.0;
  }

  std::vector<double> alpha_raw(dims);
  for (int m = 0; m < dims; ++m) alpha_raw[m] = bg.raw_alpha(m);
  std::array<double, kHourBins> th = bg.theta_hour;
  std::array<double, kWeekdayBins> tw = bg.theta_weekday;
  std::array<double, kMonthBins> tm = bg.theta_month;

  const auto cell_weight = [&exposure](int h, int w, int mo) {
    return exposure.hours[h * kWeekdayBins * kMonthBins + w * kMonthBins + mo];
  };

  double total_mass = 0.0;
  for (int h = 0; h < kHourBins; ++h) {
    for (int w = 0; w < kWeekdayBins; ++w) {
      for (int mo = 0; mo < kMonthBins; ++mo) {
        total_mass += th[h] * tw[w] * tm[mo] * cell_weight(h, w, mo);
      }
    }
  }
  for (int m = 0; m < dims; ++m) {
    alpha_raw[m] = rng.gamma(alpha_prior.shape + dim_count[m],
                             alpha_prior.rate + total_mass);
  }
  double alpha_total = 0.0;
  for (double a : alpha_raw) alpha_total += a;

  SeasonalUpdateReport report;

  std::array<double, kHourBins> hour_mass{};
  for (int h = 0; h < kHourBins; ++h) {
    for (int w = 0; w < kWeekdayBins; ++w) {
      for (int mo = 0; mo < kMonthBins; ++mo) {
        hour_mass[h] += tw[w] * tm[mo] * cell_weight(h, w, mo);
      }
    }
  }
  for (int h = 0; h < kHourBins; ++h) {
    if (!(hour_mass[h] > 0.0)) ++report.prior_only_hours;
    th[h] = rng.gamma(theta_prior.shape + hour_count[h],
                      theta_prior.rate + alpha_total * hour_mass[h]);
  }

  std::array<double, kWeekdayBins> weekday_mass{};
  for (int h = 0; h < kHourBins; ++h) {
    for (int w = 0; w < kWeekdayBins; ++w) {
      for (int mo = 0; mo < kMonthBins; ++mo) {
        weekday_mass[w] += th[h] * tm[mo] * cell_weight(h, w, mo);
      }
    }
  }
  for (int w = 0; w < kWeekdayBins; ++w) {
    if (!(weekday_mass[w] > 0.0)) ++report.prior_only_weekdays;
    tw[w] = rng.gamma(theta_prior.shape + weekday_count[w],
                      theta_prior.rate + alpha_total * weekday_mass[w]);
  }

  std::array<double, kMonthBins> month_mass{};
  for (int h = 0; h < kHourBins; ++h) {
    for (int w = 0; w < kWeekdayBins; ++w) {
      for (int mo = 0; mo < kMonthBins; ++mo) {
        month_mass[mo] += th[h] * tw[w] * cell_weight(h, w, mo);
      }
    }
  }
  for (int mo = 0; mo < kMonthBins; ++mo) {
    if (!(month_mass[mo] > 0.0)) ++report.prior_only_months;
    tm[mo] = rng.gamma(theta_prior.shape + month_count[mo],
                       theta_prior.rate + alpha_total * month_mass[mo]);
  }

  bg.set_from_raw(alpha_raw, th, tw, tm);
  return report;
}

enum class ModelKind { classic, ancestor, ancestor_restricted };
enum class BackgroundKind { constant, piecewise, seasonal };

struct ModelSpec {
  ModelKind model{ModelKind::ancestor};
  BackgroundKind background{BackgroundKind::constant};
  int piecewise_bins{8};
  std::shared_ptr<const CalendarGrid> calendar;
};

struct ChainDraw {
  // Constant: one rate per dimension. Piecewise: dimension-major [dim][bin].
  // Seasonal: the per-dimension average levels.
  std::vector<double> mu;
  std::vector<double> theta_hour, theta_weekday, theta_month;
  InfluenceMatrix K;
  InfluenceMatrix L;
  double g_rate_diag{0.0}, g_rate_off{0.0};
  double h_rate_diag{0.0}, h_rate_off{0.0};
  double rho{0.0};
  int immigrant_total{0};
  std::vector<int> immigrants_per_dim;
};

struct ChainDraws {
  ModelKind model{ModelKind::ancestor};
  BackgroundKind background{BackgroundKind::constant};
  int num_dims{0};
  double horizon{0.0};
  std::vector<double> piecewise_edges;
  std::shared_ptr<const CalendarGrid> calendar;
  McmcConfig config;
  PriorSpec priors;
  SeasonalUpdateReport seasonal_prior_only;
  std::vector<ChainDraw> draws;
  // In-memory convenience only; serialization leaves runtime out so a rerun
  // of the same configuration reproduces its outputs byte for byte.
  double wall_seconds{0.0};

  [[nodiscard]] int size() const { return static_cast<int>(draws.size()); }

  [[nodiscard]] int piecewise_bins() const {
    return piecewise_edges.empty()
               ? 0
               : static_cast<int>(piecewise_edges.size()) - 1;
  }

  [[nodiscard]] std::vector<std::string> column_names() const {
    std::vector<std::string> cols;
    const auto dim_tag = [](int i) { return std::to_string(i + 1); };
    switch (background) {
      case BackgroundKind::constant:
        for (int m = 0; m < num_dims; ++m) cols.push_back("mu_" + dim_tag(m));
        break;
      case BackgroundKind::piecewise:
        for (int m = 0; m < num_dims; ++m) {
          for (int b = 0; b < piecewise_bins(); ++b) {
            cols.push_back("mu_" + dim_tag(m) + "_" + std::to_string(b + 1));
          }
        }
        break;
      case BackgroundKind::seasonal:
        for (int m = 0; m < num_dims; ++m) {
          cols.push_back("alpha_" + dim_tag(m));
        }
        for (int i = 0; i < kHourBins; ++i) {
          cols.push_back("theta_hour_" + std::to_string(i + 1));
        }
        for (int i = 0; i < kWeekdayBins; ++i) {
          cols.push_back("theta_weekday_" + std::to_string(i + 1));
        }
        for (int i = 0; i < kMonthBins; ++i) {
          cols.push_back("theta_month_" + std::to_string(i + 1));
        }
        break;
    }
    for (int from = 0; from < num_dims; ++from) {
      for (int to = 0; to < num_dims; ++to) {
        cols.push_back("K_" + dim_tag(from) + "_" + dim_tag(to));
      }
    }
    if (model == ModelKind::classic) {
      cols.emplace_back("beta_diag");
      cols.emplace_back("beta_off");
      cols.emplace_back("rho_K");
    } else {
      for (int from = 0; from < num_dims; ++from) {
        for (int to = 0; to < num_dims; ++to) {
          cols.push_back("L_" + dim_tag(from) + "_" + dim_tag(to));
        }
      }
      cols.emplace_back("beta_diag");
      cols.emplace_back("beta_off");
      cols.emplace_back("gamma_diag");
      cols.emplace_back("gamma_off");
      cols.emplace_back("rho_L");
    }
    cols.emplace_back("n_immigrants");
    for (int m = 0; m < num_dims; ++m) {
      cols.push_back("n_immigrants_" + dim_tag(m));
    }
    return cols;
  }

  [[nodiscard]] std::vector<double> row_values(const ChainDraw& d) const {
    std::vector<double> row;
    row.insert(row.end(), d.mu.begin(), d.mu.end());
    if (background == BackgroundKind::seasonal) {
      row.insert(row.end(), d.theta_hour.begin(), d.theta_hour.end());
      row.insert(row.end(), d.theta_weekday.begin(), d.theta_weekday.end());
      row.insert(row.end(), d.theta_month.begin(), d.theta_month.end());
    }
    for (int from = 0; from < num_dims; ++from) {
      for (int to = 0; to < num_dims; ++to) row.push_back(d.K.get(from, to));
    }
    if (model == ModelKind::classic) {
      row.push_back(d.g_rate_diag);
      row.push_back(d.g_rate_off);
      row.push_back(d.rho);
    } else {
      for (int from = 0; from < num_dims; ++from) {
        for (int to = 0; to < num_dims; ++to) row.push_back(d.L.get(from, to));
      }
      row.push_back(d.g_rate_diag);
      row.push_back(d.g_rate_off);
      row.push_back(d.h_rate_diag);
      row.push_back(d.h_rate_off);
      row.push_back(d.rho);
    }
    row.push_back(static_cast<double>(d.immigrant_total));
    for (int m = 0; m < num_dims; ++m) {
      row.push_back(static_cast<double>(d.immigrants_per_dim[m]));
    }
    return row;
  }

  [[nodiscard]] Background background_at(const ChainDraw& d) const {
    switch (background) {
      case BackgroundKind::constant:
        return ConstantBackground(d.mu);
      case BackgroundKind::piecewise: {
        const int bins = piecewise_bins();
        std::vector<std::vector<double>> rates(num_dims,
                                               std::vector<double>(bins));
        for (int m = 0; m < num_dims; ++m) {
          for (int b = 0; b < bins; ++b) rates[m][b] = d.mu[m * bins + b];
        }
        return PiecewiseBackground(piecewise_edges, std::move(rates));
      }
      case BackgroundKind::seasonal: {
        SeasonalBackground bg(d.mu, calendar);
        std::array<double, kHourBins> th{};
        std::array<double, kWeekdayBins> tw{};
        std::array<double, kMonthBins> tm{};
        std::copy(d.theta_hour.begin(), d.theta_hour.end(), th.begin());
        std::copy(d.theta_weekday.begin(), d.theta_weekday.end(), tw.begin());
        std::copy(d.theta_month.begin(), d.theta_month.end(), tm.begin());
        bg.set_factors(th, tw, tm);
        return bg;
      }
    }
    throw contract_error("unknown background kind");
  }

  [[nodiscard]] AncestorParams ancestor_params_at(int idx) const {
    if (model == ModelKind::classic) {
      throw contract_error("chain holds classic draws, not two-kernel draws");
    }
    const ChainDraw& d = draws.at(idx);
    return AncestorParams(background_at(d), d.K, d.L,
                          ExponentialKernel(d.g_rate_diag, d.g_rate_off),
                          ExponentialKernel(d.h_rate_diag, d.h_rate_off),
                          model == ModelKind::ancestor_restricted);
  }

  [[nodiscard]] ClassicParams classic_params_at(int idx) const {
    if (model != ModelKind::classic) {
      throw contract_error("chain holds two-kernel draws, not classic draws");
    }
    const ChainDraw& d = draws.at(idx);
    return ClassicParams(background_at(d), d.K,
                         ExponentialKernel(d.g_rate_diag, d.g_rate_off));
  }
};

// Runs the latent-branching Gibbs sampler: parent assignments, then the
// background block, the influence matrices, and the kernel rates, in that
// order every iteration. Initialization is all-immigrant branching with every
// parameter at its prior mean. Draw retention follows burnin and thinning.
inline ChainDraws run_chain(const EventLog& log, const ModelSpec& spec,
                            const PriorSpec& priors,
                            const McmcConfig& config) {
  config.validate();
  priors.validate();
  const int dims = log.num_dims();
  const double horizon = log.horizon();
  const bool classic = spec.model == ModelKind::classic;
  const bool restricted = spec.model == ModelKind::ancestor_restricted;

  Background bg = ConstantBackground(dims, priors.mu.mean());
  std::vector<int> event_cells;
  switch (spec.background) {
    case BackgroundKind::constant:
      break;
    case BackgroundKind::piecewise: {
      if (spec.piecewise_bins < 1) {
        throw config_error("piecewise background needs >= 1 bin");
      }
      const auto edges = detail::uniform_edges(horizon, spec.piecewise_bins);
      bg = PiecewiseBackground(
          edges, std::vector<std::vector<double>>(
                     dims, std::vector<double>(spec.piecewise_bins,
                                               priors.mu.mean())));
      break;
    }
    case BackgroundKind::seasonal: {
      if (!spec.calendar) {
        throw config_error("seasonal background needs a calendar window");
      }
      const double grid_h = spec.calendar->horizon_hours();
      if (std::abs(grid_h - horizon) > 1e-6 * std::max(1.0, horizon)) {
        throw config_error("calendar window must match the event horizon");
      }
      bg = SeasonalBackground(std::vector<double>(dims, priors.alpha.mean()),
                              spec.calendar);
      event_cells.resize(log.size());
      for (int i = 0; i < log.size(); ++i) {
        event_cells[i] = spec.calendar->cell_index_at(log.time(i));
      }
      break;
    }
  }

  InfluenceMatrix K(dims, priors.influence_K.mean());
  InfluenceMatrix L;
  if (!classic) {
    L = InfluenceMatrix(dims, restricted ? 0.0 : priors.influence_L.mean());
    if (restricted) {
      for (int m = 0; m < dims; ++m) L.set(m, m, priors.influence_L.mean());
    }
  }
  ExponentialKernel g(priors.rate_g.mean(), priors.rate_g.mean());
  ExponentialKernel h(priors.rate_h.mean(), priors.rate_h.mean());

  BranchingState state = all_immigrant_state(log);
  Rng rng(config.seed);
  detail::SweepWorkspace ws;

  ChainDraws out;
  out.model = spec.model;
  out.background = spec.background;
  out.num_dims = dims;
  out.horizon = horizon;
  out.calendar = spec.calendar;
  out.config = config;
  out.priors = priors;
  if (spec.background == BackgroundKind::piecewise) {
    out.piecewise_edges = std::get<PiecewiseBackground>(bg).edges;
  }
  out.draws.reserve(config.retained());

  for (int it = 0; it < config.iterations; ++it) {
    if (classic) {
      state = classic_sample_branching(
          log, ClassicParams(bg, K, g), config.branching_log_cutoff, rng, ws);
    } else {
      ancestor_sample_branching(log,
                                AncestorParams(bg, K, L, g, h, restricted),
                                state, config.branching_log_cutoff, rng, ws);
    }

    switch (spec.background) {
      case BackgroundKind::constant:
        std::get<ConstantBackground>(bg).mu =
            sample_mu_constant(log, state, priors.mu, rng);
        break;
      case BackgroundKind::piecewise: {
        auto& pb = std::get<PiecewiseBackground>(bg);
        pb.mu = sample_mu_piecewise(log, state, pb, priors.mu, rng);
        break;
      }
      case BackgroundKind::seasonal:
        out.seasonal_prior_only = sample_seasonal_background(
            log, state, std::get<SeasonalBackground>(bg), priors.alpha,
            priors.theta, rng, &event_cells);
        break;
    }

    K = sample_influence(log, state, g,
                         classic ? ParentSet::all : ParentSet::immigrants,
                         priors.influence_K, false, rng);
    if (!classic) {
      L = sample_influence(log, state, h, ParentSet::triggered,
                           priors.influence_L, restricted, rng);
    }

    {
      const auto [cond_diag, cond_off] = build_rate_conditionals(
          log, state, K, classic ? ParentSet::all : ParentSet::immigrants,
          priors.rate_g);
      g.rate_diag = sample_kernel_rate(cond_diag, g.rate_diag, config.slice,
                                       rng);
      g.rate_off = sample_kernel_rate(cond_off, g.rate_off, config.slice, rng);
    }
    if (!classic) {
      const auto [cond_diag, cond_off] = build_rate_conditionals(
          log, state, L, ParentSet::triggered, priors.rate_h);
      h.rate_diag = sample_kernel_rate(cond_diag, h.rate_diag, config.slice,
                                       rng);
      h.rate_off = sample_kernel_rate(cond_off, h.rate_off, config.slice, rng);
    }

    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, ConstantBackground>) {
            for (double v : b.mu) detail::ensure_finite(v, "background", it);
          } else if constexpr (std::is_same_v<T, PiecewiseBackground>) {
            for (const auto& row : b.mu) {
              for (double v : row) detail::ensure_finite(v, "background", it);
            }
          } else {
            for (double v : b.alpha) detail::ensure_finite(v, "background", it);
            for (double v : b.theta_hour) {
              detail::ensure_finite(v, "background", it);
            }
            for (double v : b.theta_weekday) {
              detail::ensure_finite(v, "background", it);
            }
            for (double v : b.theta_month) {
              detail::ensure_finite(v, "background", it);
            }
          }
        },
        bg);
    for (int m = 0; m < dims; ++m) {
      for (int to = 0; to < dims; ++to) {
        detail::ensure_finite(K.get(m, to), "influence", it);
        if (!classic) detail::ensure_finite(L.get(m, to), "influence", it);
      }
    }
    detail::ensure_finite(g.rate_diag, "kernel rate", it);
    detail::ensure_finite(g.rate_off, "kernel rate", it);
    if (!classic) {
      detail::ensure_finite(h.rate_diag, "kernel rate", it);
      detail::ensure_finite(h.rate_off, "kernel rate", it);
    }

    if (it >= config.burnin && (it - config.burnin) % config.thin == 0) {
      ChainDraw d;
      switch (spec.background) {
        case BackgroundKind::constant:
          d.mu = std::get<ConstantBackground>(bg).mu;
          break;
        case BackgroundKind::piecewise: {
          const auto& pb = std::get<PiecewiseBackground>(bg);
          d.mu.reserve(static_cast<std::size_t>(dims) * pb.bins());
          for (int m = 0; m < dims; ++m) {
            d.mu.insert(d.mu.end(), pb.mu[m].begin(), pb.mu[m].end());
          }
          break;
        }
        case BackgroundKind::seasonal: {
          const auto& sb = std::get<SeasonalBackground>(bg);
          d.mu = sb.alpha;
          d.theta_hour.assign(sb.theta_hour.begin(), sb.theta_hour.end());
          d.theta_weekday.assign(sb.theta_weekday.begin(),
                                 sb.theta_weekday.end());
          d.theta_month.assign(sb.theta_month.begin(), sb.theta_month.end());
          break;
        }
      }
      d.K = K;
      d.g_rate_diag = g.rate_diag;
      d.g_rate_off = g.rate_off;
      if (!classic) {
        d.L = L;
        d.h_rate_diag = h.rate_diag;
        d.h_rate_off = h.rate_off;
      }
      d.rho = spectral_radius(classic ? K : L);
      d.immigrant_total = state.immigrant_count();
      d.immigrants_per_dim = state.immigrant_counts_per_dim();
      out.draws.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace hawkes
