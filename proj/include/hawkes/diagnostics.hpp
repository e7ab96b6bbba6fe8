#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/gibbs.hpp"
#include "hawkes/matrix.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/stability.hpp"
#include "hawkes/summary_stats.hpp"

namespace hawkes {

struct PpcConfig {
  int replicates{200};
  std::uint64_t seed{0};
  bool per_dim{false};

  void validate() const {
    if (replicates < 1) throw config_error("replicates must be >= 1");
  }
};

struct PpcStat {
  std::string name;
  double observed{0.0};
  bool observed_defined{false};
  std::vector<double> replicated;
  double p_upper{1.0};
  double p_lower{1.0};
  double p_two_sided{1.0};
};

inline constexpr std::array<double, 5> kEnvelopeQuantiles{0.025, 0.25, 0.5,
                                                          0.75, 0.975};

// Cumulative event-count envelope over a fixed time grid: the observed curve
// against per-quantile bands of the replicated curves.
struct PpcEnvelope {
  std::vector<double> grid;
  std::vector<double> observed;
  std::array<std::vector<double>, 5> bands;
};

struct PpcResult {
  std::vector<PpcStat> stats;
  PpcEnvelope envelope;
  int unstable_skipped{0};
};

namespace detail {

struct StatProbe {
  std::string name;
  int dim;  // -1 pooled, otherwise a single dimension
  double (*value)(const SummaryStats&);
  bool (*defined)(const SummaryStats&);
};

inline std::vector<StatProbe> stat_probes(int num_dims, bool per_dim) {
  const auto count_v = [](const SummaryStats& s) {
    return static_cast<double>(s.event_count);
  };
  const auto count_d = [](const SummaryStats&) { return true; };
  const auto tail_v = [](const SummaryStats& s) {
    return s.upper_tail_mean_iet;
  };
  const auto tail_d = [](const SummaryStats& s) {
    return s.upper_tail_defined;
  };
  const auto acf_v = [](const SummaryStats& s) { return s.lag1_acf; };
  const auto acf_d = [](const SummaryStats& s) { return s.acf_defined; };
  const auto rip_v = [](const SummaryStats& s) { return s.ripley_k2; };
  const auto rip_d = [](const SummaryStats& s) { return s.ripley_defined; };

  std::vector<StatProbe> probes{
      {"event_count", -1, count_v, count_d},
      {"upper_tail_mean_iet", -1, tail_v, tail_d},
      {"lag1_acf", -1, acf_v, acf_d},
      {"ripley_k_2h", -1, rip_v, rip_d},
  };
  if (per_dim) {
    for (int m = 0; m < num_dims; ++m) {
      const std::string suffix = "_dim_" + std::to_string(m + 1);
      probes.push_back({"event_count" + suffix, m, count_v, count_d});
      probes.push_back({"upper_tail_mean_iet" + suffix, m, tail_v, tail_d});
      probes.push_back({"lag1_acf" + suffix, m, acf_v, acf_d});
      probes.push_back({"ripley_k_2h" + suffix, m, rip_v, rip_d});
    }
  }
  return probes;
}

inline std::vector<SummaryStats> probe_inputs(const EventLog& log,
                                              bool per_dim) {
  std::vector<SummaryStats> out{summary_statistics(log)};
  if (per_dim) {
    const auto dims = per_dim_summary(log);
    out.insert(out.end(), dims.begin(), dims.end());
  }
  return out;
}

inline std::vector<double> cumulative_curve(const EventLog& log,
                                            const std::vector<double>& grid) {
  std::vector<double> out(grid.size(), 0.0);
  int idx = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (idx < log.size() && log.time(idx) <= grid[g]) ++idx;
    out[g] = static_cast<double>(idx);
  }
  return out;
}

}  // namespace detail

// Posterior predictive check: draws parameter vectors without replacement
// from the retained chain, simulates one replicate window per vector, and
// compares clustering statistics of the observed sequence against the
// replicated distribution. Unstable parameter draws are skipped and counted.
// Tail probabilities use the add-one estimator and the two-sided value is
// twice the smaller tail, capped at one.
inline PpcResult posterior_predictive(const ChainDraws& chain,
                                      const EventLog& observed,
                                      const PpcConfig& config) {
  config.validate();
  if (chain.size() < config.replicates) {
    throw config_error("chain holds fewer retained draws than the requested "
                       "replicate count");
  }
  if (chain.num_dims != observed.num_dims()) {
    throw contract_error("chain and event log dimension counts differ");
  }
  const bool classic = chain.model == ModelKind::classic;
  const double horizon = observed.horizon();

  std::vector<int> order(chain.size());
  std::iota(order.begin(), order.end(), 0);
  Rng select_rng = Rng(config.seed).substream(0);
  for (int i = chain.size() - 1; i > 0; --i) {
    const auto j = static_cast<int>(select_rng.below(i + 1));
    std::swap(order[i], order[j]);
  }

  const auto probes = detail::stat_probes(observed.num_dims(),
                                          config.per_dim);
  const auto observed_inputs = detail::probe_inputs(observed, config.per_dim);

  PpcResult out;
  out.envelope.grid.resize(101);
  for (int g = 0; g <= 100; ++g) {
    out.envelope.grid[g] = horizon * static_cast<double>(g) / 100.0;
  }
  out.envelope.observed = detail::cumulative_curve(observed,
                                                   out.envelope.grid);
  out.stats.resize(probes.size());
  for (std::size_t s = 0; s < probes.size(); ++s) {
    out.stats[s].name = probes[s].name;
    const SummaryStats& in = observed_inputs[probes[s].dim + 1];
    out.stats[s].observed = probes[s].value(in);
    out.stats[s].observed_defined = probes[s].defined(in);
    out.stats[s].replicated.reserve(config.replicates);
  }

  std::vector<std::vector<double>> curves;
  curves.reserve(config.replicates);

  int accepted = 0;
  for (int pos = 0; pos < chain.size() && accepted < config.replicates;
       ++pos) {
    const ChainDraw& draw = chain.draws[order[pos]];
    const double rho = spectral_radius(classic ? draw.K : draw.L);
    if (rho >= 1.0) {
      ++out.unstable_skipped;
      continue;
    }
    const std::uint64_t sim_seed =
        Rng(config.seed).substream(1 + accepted).base_seed();
    EventLog replica = [&] {
      if (classic) {
        return simulate(chain.classic_params_at(order[pos]), horizon,
                        std::nullopt, sim_seed)
            .log;
      }
      SimulationRequest req;
      req.params = chain.ancestor_params_at(order[pos]);
      req.horizon = horizon;
      req.seed = sim_seed;
      return simulate(req).log;
    }();
    ++accepted;

    const auto inputs = detail::probe_inputs(replica, config.per_dim);
    for (std::size_t s = 0; s < probes.size(); ++s) {
      const SummaryStats& in = inputs[probes[s].dim + 1];
      if (probes[s].defined(in)) {
        out.stats[s].replicated.push_back(probes[s].value(in));
      }
    }
    curves.push_back(detail::cumulative_curve(replica, out.envelope.grid));
  }
  if (accepted < config.replicates) {
    throw sampler_error("not enough stable posterior draws for the requested "
                        "replicate count");
  }

  for (PpcStat& stat : out.stats) {
    if (!stat.observed_defined || stat.replicated.empty()) continue;
    double ge = 0.0, le = 0.0;
    for (double v : stat.replicated) {
      if (v >= stat.observed) ge += 1.0;
      if (v <= stat.observed) le += 1.0;
    }
    const double n = static_cast<double>(stat.replicated.size());
    stat.p_upper = (1.0 + ge) / (n + 1.0);
    stat.p_lower = (1.0 + le) / (n + 1.0);
    stat.p_two_sided = std::min(1.0, 2.0 * std::min(stat.p_upper,
                                                    stat.p_lower));
  }

  std::vector<double> column(curves.size());
  for (std::size_t g = 0; g < out.envelope.grid.size(); ++g) {
    for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r][g];
    for (std::size_t q = 0; q < kEnvelopeQuantiles.size(); ++q) {
      out.envelope.bands[q].push_back(
          detail::quantile_type7(column, kEnvelopeQuantiles[q]));
    }
  }
  return out;
}

inline std::vector<double> posterior_mean_mu(const ChainDraws& chain) {
  if (chain.draws.empty()) throw contract_error("chain holds no draws");
  std::vector<double> out(chain.draws.front().mu.size(), 0.0);
  for (const ChainDraw& d : chain.draws) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d.mu[i];
  }
  for (double& v : out) v /= static_cast<double>(chain.size());
  return out;
}

inline InfluenceMatrix posterior_mean_K(const ChainDraws& chain) {
  if (chain.draws.empty()) throw contract_error("chain holds no draws");
  InfluenceMatrix out(chain.num_dims, 0.0);
  for (const ChainDraw& d : chain.draws) {
    for (int from = 0; from < chain.num_dims; ++from) {
      for (int to = 0; to < chain.num_dims; ++to) {
        out.set(from, to, out.get(from, to) + d.K.get(from, to));
      }
    }
  }
  for (int from = 0; from < chain.num_dims; ++from) {
    for (int to = 0; to < chain.num_dims; ++to) {
      out.set(from, to, out.get(from, to) / chain.size());
    }
  }
  return out;
}

inline InfluenceMatrix posterior_mean_L(const ChainDraws& chain) {
  if (chain.model == ModelKind::classic) {
    throw contract_error("classic chains carry no second influence matrix");
  }
  if (chain.draws.empty()) throw contract_error("chain holds no draws");
  InfluenceMatrix out(chain.num_dims, 0.0);
  for (const ChainDraw& d : chain.draws) {
    for (int from = 0; from < chain.num_dims; ++from) {
      for (int to = 0; to < chain.num_dims; ++to) {
        out.set(from, to, out.get(from, to) + d.L.get(from, to));
      }
    }
  }
  for (int from = 0; from < chain.num_dims; ++from) {
    for (int to = 0; to < chain.num_dims; ++to) {
      out.set(from, to, out.get(from, to) / chain.size());
    }
  }
  return out;
}

// Pearson correlation across matrix entries, flattened source-major.
inline double entrywise_correlation(const InfluenceMatrix& a,
                                    const InfluenceMatrix& b) {
  if (a.dims() != b.dims() || a.empty()) {
    throw contract_error("correlation needs two matrices of equal size");
  }
  double ma = 0.0, mb = 0.0;
  const int n = a.dims() * a.dims();
  for (int from = 0; from < a.dims(); ++from) {
    for (int to = 0; to < a.dims(); ++to) {
      ma += a.get(from, to);
      mb += b.get(from, to);
    }
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int from = 0; from < a.dims(); ++from) {
    for (int to = 0; to < a.dims(); ++to) {
      const double da = a.get(from, to) - ma;
      const double db = b.get(from, to) - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw contract_error("correlation of a constant matrix");
  }
  return sab / std::sqrt(saa * sbb);
}

inline double entrywise_rmse(const InfluenceMatrix& a,
                             const InfluenceMatrix& b) {
  if (a.dims() != b.dims() || a.empty()) {
    throw contract_error("rmse needs two matrices of equal size");
  }
  double s = 0.0;
  for (int from = 0; from < a.dims(); ++from) {
    for (int to = 0; to < a.dims(); ++to) {
      const double d = a.get(from, to) - b.get(from, to);
      s += d * d;
    }
  }
  return std::sqrt(s / (a.dims() * a.dims()));
}

// Scalar chain health indicators per serialized column: moments, lag-1
// autocorrelation, and a crude split-half drift z-score (large magnitudes
// point at an unconverged or still-drifting chain).
struct TraceDiagnostic {
  std::string name;
  double mean{0.0};
  double sd{0.0};
  double lag1_autocorr{0.0};
  double split_drift_z{0.0};
};

inline std::vector<TraceDiagnostic> trace_diagnostics(
    const ChainDraws& chain) {
  if (chain.size() < 4) {
    throw contract_error("trace diagnostics need at least four draws");
  }
  const auto names = chain.column_names();
  std::vector<std::vector<double>> rows;
  rows.reserve(chain.size());
  for (const ChainDraw& d : chain.draws) rows.push_back(chain.row_values(d));

  std::vector<TraceDiagnostic> out(names.size());
  const int n = chain.size();
  for (std::size_t c = 0; c < names.size(); ++c) {
    TraceDiagnostic& t = out[c];
    t.name = names[c];
    double m = 0.0;
    for (const auto& row : rows) m += row[c];
    m /= n;
    double var = 0.0, cov = 0.0;
    for (int i = 0; i < n; ++i) {
      var += (rows[i][c] - m) * (rows[i][c] - m);
      if (i + 1 < n) cov += (rows[i][c] - m) * (rows[i + 1][c] - m);
    }
    t.mean = m;
    t.sd = std::sqrt(var / (n - 1));
    if (var > 0.0) {
      t.lag1_autocorr = cov / var;
      const int half = n / 2;
      double m1 = 0.0, m2 = 0.0;
      for (int i = 0; i < half; ++i) m1 += rows[i][c];
      for (int i = half; i < n; ++i) m2 += rows[i][c];
      m1 /= half;
      m2 /= n - half;
      t.split_drift_z = (m2 - m1) / (t.sd * std::sqrt(1.0 / half +
                                                      1.0 / (n - half)));
    }
  }
  return out;
}

inline std::vector<double> column_trace(const ChainDraws& chain,
                                        const std::string& column) {
  const auto names = chain.column_names();
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) {
    throw contract_error("unknown chain column '" + column + "'");
  }
  const auto idx = static_cast<std::size_t>(it - names.begin());
  std::vector<double> out;
  out.reserve(chain.size());
  for (const ChainDraw& d : chain.draws) out.push_back(chain.row_values(d)[idx]);
  return out;
}

}  // namespace hawkes
