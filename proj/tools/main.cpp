#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hawkes/config.hpp"
#include "hawkes/csv_io.hpp"
#include "hawkes/diagnostics.hpp"
#include "hawkes/gibbs.hpp"
#include "hawkes/ingest.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/summary_stats.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void emit_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump()
            << '\n';
}

hawkes::RunConfig load_effective_config(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const auto env = hawkes::default_config_path()) path = *env;
  }
  if (path.empty()) return {};
  return hawkes::load_run_config(path);
}

void echo_run(const hawkes::RunConfig& cfg) {
  std::cout << "seed: " << cfg.seed << '\n'
            << "config_hash: " << hawkes::config_hash_hex(cfg) << '\n';
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / name).string();
}

std::string first_line(const std::string& path) {
  auto is = hawkes::detail::open_for_read(path);
  std::string line;
  hawkes::detail::next_line(is, line);
  return line;
}

// Accepts "scenario3" and "Scenario 1" style spellings on top of the
// canonical names.
std::string normalize_preset(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
  if (name.rfind("scenario", 0) == 0) return name.substr(8);
  return name;
}

struct WindowSpec {
  hawkes::CivilDateTime start_civil;
  hawkes::CivilDateTime end_civil;
  hawkes::TimeZone zone;
  std::int64_t start_utc;
  std::int64_t end_utc;
};

WindowSpec window_from_config(const hawkes::RunConfig& cfg) {
  if (cfg.window_start.empty() || cfg.window_end.empty()) {
    throw hawkes::config_error(
        "this operation needs window.start and window.end in the config");
  }
  WindowSpec w{hawkes::parse_civil_datetime(cfg.window_start),
               hawkes::parse_civil_datetime(cfg.window_end),
               hawkes::TimeZone::parse(cfg.timezone), 0, 0};
  w.start_utc = w.zone.local_to_utc(w.start_civil);
  w.end_utc = w.zone.local_to_utc(w.end_civil);
  return w;
}

json value_or_null(double value, bool defined) {
  return defined ? json(value) : json(nullptr);
}

json stats_json(const hawkes::SummaryStats& s) {
  return json{
      {"event_count", s.event_count},
      {"upper_tail_mean_iet",
       value_or_null(s.upper_tail_mean_iet, s.upper_tail_defined)},
      {"lag1_acf", value_or_null(s.lag1_acf, s.acf_defined)},
      {"ripley_k_2h", value_or_null(s.ripley_k2, s.ripley_defined)},
  };
}

std::string default_meta_path(const std::string& chain_path) {
  const std::string tail = "draws.csv";
  if (chain_path.size() > tail.size() &&
      chain_path.compare(chain_path.size() - tail.size(), tail.size(),
                         tail) == 0) {
    return chain_path.substr(0, chain_path.size() - tail.size()) +
           "meta.json";
  }
  return chain_path + ".meta.json";
}

bool is_constant_matrix(const hawkes::InfluenceMatrix& m) {
  for (int from = 0; from < m.dims(); ++from) {
    for (int to = 0; to < m.dims(); ++to) {
      if (m.get(from, to) != m.get(0, 0)) return false;
    }
  }
  return true;
}

// Correlation against a constant truth matrix is undefined; the report
// carries null there and leans on the rmse column instead.
json corr_or_null(const hawkes::InfluenceMatrix& a,
                  const hawkes::InfluenceMatrix& b) {
  if (is_constant_matrix(a) || is_constant_matrix(b)) return nullptr;
  return hawkes::entrywise_correlation(a, b);
}

json matrix_json(const hawkes::InfluenceMatrix& m) {
  json rows = json::array();
  for (int to = 0; to < m.dims(); ++to) {
    json row = json::array();
    for (int from = 0; from < m.dims(); ++from) row.push_back(m.get(from, to));
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_simulate(const hawkes::RunConfig& cfg, const std::string& scenario_arg,
                 std::optional<int> events, std::optional<double> horizon,
                 const std::string& out_dir) {
  const hawkes::Scenario scenario =
      hawkes::scenario_by_name(normalize_preset(scenario_arg));
  hawkes::SimulationRequest req;
  req.params = scenario.params;
  req.seed = cfg.seed;
  if (events) {
    req.target_events = *events;
  } else {
    req.horizon = horizon ? *horizon : scenario.default_horizon;
  }
  const hawkes::SimulatedData data = hawkes::simulate(req);

  hawkes::write_events_csv(out_path(out_dir, "events.csv"), data.log);
  hawkes::write_truth_csv(out_path(out_dir, "truth.csv"),
                          data.truth.parents());
  echo_run(cfg);
  std::cout << "scenario: " << scenario.name << '\n'
            << "events: " << data.log.size() << '\n'
            << "horizon: " << hawkes::detail::format_double(
                                  data.log.horizon())
            << '\n';
  return 0;
}

int run_fit(hawkes::RunConfig cfg, const std::string& data_path,
            std::optional<double> horizon, std::optional<int> dims,
            const std::string& out_dir) {
  cfg.validate();
  hawkes::ModelSpec spec;
  spec.model = cfg.model_kind();
  spec.background = cfg.background_kind();
  spec.piecewise_bins = cfg.piecewise_bins;

  std::vector<std::string> senders;
  std::optional<hawkes::IngestResult> ingest;
  const hawkes::EventLog log = [&] {
    if (first_line(data_path) == hawkes::kMessagesCsvHeader) {
      const WindowSpec w = window_from_config(cfg);
      ingest = hawkes::ingest_messages(data_path, w.start_civil, w.end_civil,
                                       w.zone);
      senders = ingest->senders;
      return ingest->log;
    }
    return hawkes::read_events_csv(data_path, horizon, dims);
  }();

  if (spec.background == hawkes::BackgroundKind::seasonal) {
    const WindowSpec w = window_from_config(cfg);
    spec.calendar = std::make_shared<const hawkes::CalendarGrid>(
        w.start_utc, w.end_utc, w.zone);
  }
  hawkes::McmcConfig mcmc = cfg.mcmc;
  mcmc.seed = cfg.seed;
  const hawkes::ChainDraws chain =
      hawkes::run_chain(log, spec, cfg.priors, mcmc);

  hawkes::write_chain(out_path(out_dir, "chain_draws.csv"),
                      out_path(out_dir, "chain_meta.json"), chain);
  if (ingest) {
    hawkes::write_events_csv(out_path(out_dir, "events.csv"), log);
    auto os = hawkes::detail::open_for_write(out_path(out_dir, "senders.csv"));
    os << "dimension,sender\n";
    for (std::size_t m = 0; m < senders.size(); ++m) {
      os << m + 1 << ',' << senders[m] << '\n';
    }
  }
  echo_run(cfg);
  if (ingest) {
    std::cout << "ingested: " << log.size() << " events from "
              << senders.size() << " senders\n"
              << "dropped: " << ingest->dropped_before << " before window, "
              << ingest->dropped_after << " after\n";
    if (ingest->empty_window) {
      std::cout << "warning: no events inside the window\n";
    }
  }
  std::cout << "events: " << log.size() << '\n'
            << "retained draws: " << chain.size() << '\n';
  return 0;
}

int run_ppc(hawkes::RunConfig cfg, const std::string& data_path,
            const std::string& chain_path, std::string meta_path,
            bool per_dim, const std::string& out_dir) {
  if (meta_path.empty()) meta_path = default_meta_path(chain_path);
  const hawkes::ChainDraws chain = hawkes::read_chain(chain_path, meta_path);
  const hawkes::EventLog observed =
      hawkes::read_events_csv(data_path, chain.horizon, chain.num_dims);

  hawkes::PpcConfig pc;
  pc.replicates = cfg.replicates;
  pc.seed = cfg.seed;
  pc.per_dim = per_dim;
  const hawkes::PpcResult res =
      hawkes::posterior_predictive(chain, observed, pc);

  json stats = json::array();
  for (const hawkes::PpcStat& s : res.stats) {
    stats.push_back({{"name", s.name},
                     {"observed", value_or_null(s.observed,
                                                s.observed_defined)},
                     {"p_upper", s.p_upper},
                     {"p_lower", s.p_lower},
                     {"p_two_sided", s.p_two_sided},
                     {"replicated", s.replicated}});
  }
  {
    auto os =
        hawkes::detail::open_for_write(out_path(out_dir, "ppc_stats.json"));
    os << json{{"replicates", pc.replicates},
               {"unstable_skipped", res.unstable_skipped},
               {"stats", std::move(stats)}}
              .dump(2)
       << '\n';
  }
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t g = 0; g < res.envelope.grid.size(); ++g) {
      rows.push_back({res.envelope.grid[g], res.envelope.observed[g],
                      res.envelope.bands[0][g], res.envelope.bands[1][g],
                      res.envelope.bands[2][g], res.envelope.bands[3][g],
                      res.envelope.bands[4][g]});
    }
    auto os =
        hawkes::detail::open_for_write(out_path(out_dir, "ppc_envelope.csv"));
    hawkes::write_table_csv(
        os, {"time", "observed", "q2_5", "q25", "q50", "q75", "q97_5"}, rows);
  }
  echo_run(cfg);
  std::cout << "replicates: " << pc.replicates << '\n'
            << "unstable_skipped: " << res.unstable_skipped << '\n';
  return 0;
}

int run_summarize(const hawkes::RunConfig& cfg, const std::string& data_path,
                  std::optional<double> horizon, std::optional<int> dims,
                  const std::string& out_dir) {
  const hawkes::EventLog log =
      hawkes::read_events_csv(data_path, horizon, dims);
  json per_dim = json::array();
  for (const hawkes::SummaryStats& s : hawkes::per_dim_summary(log)) {
    per_dim.push_back(stats_json(s));
  }
  auto os = hawkes::detail::open_for_write(out_path(out_dir, "summary.json"));
  os << json{{"horizon", log.horizon()},
             {"num_dims", log.num_dims()},
             {"pooled", stats_json(hawkes::summary_statistics(log))},
             {"per_dim", std::move(per_dim)}}
            .dump(2)
     << '\n';
  echo_run(cfg);
  std::cout << "events: " << log.size() << '\n';
  return 0;
}

int run_recover(hawkes::RunConfig cfg, const std::string& preset,
                std::optional<int> events, std::optional<double> horizon,
                const std::string& out_dir) {
  const hawkes::Scenario scenario =
      hawkes::scenario_by_name(normalize_preset(preset));
  const hawkes::AncestorParams& truth = scenario.params;

  hawkes::ModelSpec spec;
  spec.model = cfg.model_kind();
  if (std::holds_alternative<hawkes::SeasonalBackground>(truth.background)) {
    spec.background = hawkes::BackgroundKind::seasonal;
    spec.calendar =
        std::get<hawkes::SeasonalBackground>(truth.background).grid;
  } else if (std::holds_alternative<hawkes::PiecewiseBackground>(
                 truth.background)) {
    spec.background = hawkes::BackgroundKind::piecewise;
    spec.piecewise_bins = cfg.piecewise_bins;
  } else {
    spec.background = hawkes::BackgroundKind::constant;
  }
  const bool classic_fit = spec.model == hawkes::ModelKind::classic;

  hawkes::InfluenceMatrix k_sum(truth.K.dims());
  hawkes::InfluenceMatrix l_sum(truth.K.dims());
  json replicate_rows = json::array();
  for (int rep = 0; rep < cfg.replicates; ++rep) {
    hawkes::SimulationRequest req;
    req.params = truth;
    req.seed = hawkes::Rng(cfg.seed).substream(1 + rep).base_seed();
    if (events) {
      req.target_events = *events;
    } else {
      req.horizon = horizon ? *horizon : scenario.default_horizon;
    }
    const hawkes::EventLog log = hawkes::simulate(req).log;

    hawkes::McmcConfig mcmc = cfg.mcmc;
    mcmc.seed = hawkes::Rng(cfg.seed).substream(10000 + rep).base_seed();
    const hawkes::ChainDraws chain =
        hawkes::run_chain(log, spec, cfg.priors, mcmc);

    const hawkes::InfluenceMatrix k_hat = hawkes::posterior_mean_K(chain);
    json row{{"replicate", rep + 1},
             {"events", log.size()},
             {"corr_K", corr_or_null(truth.K, k_hat)},
             {"rmse_K", hawkes::entrywise_rmse(truth.K, k_hat)}};
    for (int from = 0; from < k_hat.dims(); ++from) {
      for (int to = 0; to < k_hat.dims(); ++to) {
        k_sum.set(from, to, k_sum.get(from, to) + k_hat.get(from, to));
      }
    }
    if (!classic_fit) {
      const hawkes::InfluenceMatrix l_hat = hawkes::posterior_mean_L(chain);
      row["corr_L"] = corr_or_null(truth.L, l_hat);
      row["rmse_L"] = hawkes::entrywise_rmse(truth.L, l_hat);
      for (int from = 0; from < l_hat.dims(); ++from) {
        for (int to = 0; to < l_hat.dims(); ++to) {
          l_sum.set(from, to, l_sum.get(from, to) + l_hat.get(from, to));
        }
      }
    }
    replicate_rows.push_back(std::move(row));
  }

  const double n = static_cast<double>(cfg.replicates);
  for (int from = 0; from < k_sum.dims(); ++from) {
    for (int to = 0; to < k_sum.dims(); ++to) {
      k_sum.set(from, to, k_sum.get(from, to) / n);
      l_sum.set(from, to, l_sum.get(from, to) / n);
    }
  }
  json report{{"preset", scenario.name},
              {"model", cfg.model},
              {"replicates", cfg.replicates},
              {"truth_K", matrix_json(truth.K)},
              {"mean_posterior_K", matrix_json(k_sum)},
              {"corr_K_of_mean", corr_or_null(truth.K, k_sum)},
              {"rmse_K_of_mean", hawkes::entrywise_rmse(truth.K, k_sum)},
              {"per_replicate", std::move(replicate_rows)}};
  if (!classic_fit) {
    report["truth_L"] = matrix_json(truth.L);
    report["mean_posterior_L"] = matrix_json(l_sum);
    report["corr_L_of_mean"] = corr_or_null(truth.L, l_sum);
    report["rmse_L_of_mean"] = hawkes::entrywise_rmse(truth.L, l_sum);
  }
  auto os = hawkes::detail::open_for_write(out_path(out_dir, "recovery.json"));
  os << report.dump(2) << '\n';
  echo_run(cfg);
  std::cout << "preset: " << scenario.name << '\n'
            << "rmse_K_of_mean: "
            << hawkes::detail::format_double(
                   report["rmse_K_of_mean"].get<double>())
            << '\n';
  return 0;
}

int run_traces(const hawkes::RunConfig& cfg, const std::string& chain_path,
               std::string meta_path, const std::string& out_dir) {
  if (meta_path.empty()) meta_path = default_meta_path(chain_path);
  const hawkes::ChainDraws chain = hawkes::read_chain(chain_path, meta_path);

  {
    auto os = hawkes::detail::open_for_write(out_path(out_dir, "traces.csv"));
    os << "draw";
    for (const std::string& name : chain.column_names()) os << ',' << name;
    os << '\n';
    for (int d = 0; d < chain.size(); ++d) {
      os << d + 1;
      for (double v : chain.row_values(chain.draws[d])) {
        os << ',' << hawkes::detail::format_double(v);
      }
      os << '\n';
    }
  }
  {
    auto os =
        hawkes::detail::open_for_write(out_path(out_dir, "trace_stats.csv"));
    os << "name,mean,sd,lag1_autocorr,split_drift_z\n";
    for (const hawkes::TraceDiagnostic& t : hawkes::trace_diagnostics(chain)) {
      os << t.name << ',' << hawkes::detail::format_double(t.mean) << ','
         << hawkes::detail::format_double(t.sd) << ','
         << hawkes::detail::format_double(t.lag1_autocorr) << ','
         << hawkes::detail::format_double(t.split_drift_z) << '\n';
    }
  }
  echo_run(cfg);
  std::cout << "draws: " << chain.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-exciting event sequence toolkit: simulation, "
               "latent-branching Gibbs fitting, and predictive checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string data_path;
  std::string chain_path;
  std::string meta_path;
  std::string scenario_arg;
  std::string preset_arg;
  std::string model_arg;
  std::string background_arg;
  std::uint64_t seed_arg = 0;
  int events_arg = 0;
  double horizon_arg = 0.0;
  int dims_arg = 0;
  int bins_arg = 0;
  int iters_arg = 0;
  int burnin_arg = -1;
  int thin_arg = 0;
  int replicates_arg = 0;
  bool per_dim = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON");
    cmd->add_option("--out-dir", out_dir, "output directory");
    return cmd->add_option("--seed", seed_arg, "random seed");
  };
  const auto add_mcmc = [&](CLI::App* cmd) {
    cmd->add_option("--iters", iters_arg, "total iterations");
    cmd->add_option("--burnin", burnin_arg, "burn-in iterations");
    cmd->add_option("--thin", thin_arg, "thinning interval");
  };

  CLI::App* sim = app.add_subcommand(
      "simulate", "simulate a preset scenario to events.csv + truth.csv");
  auto* sim_seed = add_common(sim);
  sim->add_option("--scenario", scenario_arg, "scenario name or number")
      ->required();
  auto* sim_events = sim->add_option("--events", events_arg,
                                     "stop after this many events");
  auto* sim_horizon =
      sim->add_option("--horizon", horizon_arg, "window length in hours");

  CLI::App* fit = app.add_subcommand(
      "fit", "run the Gibbs sampler on an event or message CSV");
  auto* fit_seed = add_common(fit);
  fit->add_option("--data", data_path, "events or raw messages CSV")
      ->required();
  auto* fit_model =
      fit->add_option("--model", model_arg,
                      "classic | ancestor | ancestor-restricted");
  auto* fit_background = fit->add_option(
      "--background", background_arg, "constant | piecewise | seasonal");
  auto* fit_bins =
      fit->add_option("--bins", bins_arg, "piecewise background bins");
  auto* fit_horizon = fit->add_option("--horizon", horizon_arg,
                                      "window length for events CSV input");
  auto* fit_dims =
      fit->add_option("--dims", dims_arg, "dimension count for events CSV");
  add_mcmc(fit);

  CLI::App* ppc = app.add_subcommand(
      "ppc", "posterior predictive checks for a fitted chain");
  auto* ppc_seed = add_common(ppc);
  ppc->add_option("--data", data_path, "observed events CSV")->required();
  ppc->add_option("--chain", chain_path, "chain draws CSV")->required();
  ppc->add_option("--meta", meta_path, "chain metadata JSON");
  auto* ppc_reps =
      ppc->add_option("--replicates", replicates_arg, "predictive draws");
  ppc->add_flag("--per-dim", per_dim, "also check per-dimension statistics");

  CLI::App* summarize = app.add_subcommand(
      "summarize", "clustering statistics of an events CSV");
  auto* sum_seed = add_common(summarize);
  summarize->add_option("--data", data_path, "events CSV")->required();
  auto* sum_horizon =
      summarize->add_option("--horizon", horizon_arg, "window length");
  auto* sum_dims =
      summarize->add_option("--dims", dims_arg, "dimension count");

  CLI::App* recover = app.add_subcommand(
      "recover", "simulate-and-refit report against a preset truth");
  auto* rec_seed = add_common(recover);
  recover->add_option("--preset", preset_arg, "scenario used as truth")
      ->required();
  auto* rec_model = recover->add_option(
      "--model", model_arg, "model to fit against the preset truth");
  auto* rec_reps = recover->add_option("--replicates", replicates_arg,
                                       "simulate-and-refit rounds");
  auto* rec_events = recover->add_option("--events", events_arg,
                                         "events per simulated replicate");
  auto* rec_horizon = recover->add_option("--horizon", horizon_arg,
                                          "window length per replicate");
  add_mcmc(recover);

  CLI::App* traces = app.add_subcommand(
      "traces", "per-parameter traces and drift statistics of a chain");
  auto* traces_seed = add_common(traces);
  traces->add_option("--chain", chain_path, "chain draws CSV")->required();
  traces->add_option("--meta", meta_path, "chain metadata JSON");

  try {
    app.parse(argc, argv);

    hawkes::RunConfig cfg = load_effective_config(config_path);
    if (*fit_model || *rec_model) cfg.model = model_arg;
    if (*fit_background) cfg.background = background_arg;
    if (*fit_bins) cfg.piecewise_bins = bins_arg;
    if (iters_arg > 0) cfg.mcmc.iterations = iters_arg;
    if (burnin_arg >= 0) cfg.mcmc.burnin = burnin_arg;
    if (thin_arg > 0) cfg.mcmc.thin = thin_arg;
    if (*ppc_reps || *rec_reps) cfg.replicates = replicates_arg;
    if (*sim_seed || *fit_seed || *ppc_seed || *rec_seed || *sum_seed ||
        *traces_seed) {
      cfg.seed = seed_arg;
    }

    const auto opt_events = [&](CLI::Option* o) {
      return *o ? std::optional<int>(events_arg) : std::nullopt;
    };
    const auto opt_horizon = [&](CLI::Option* o) {
      return *o ? std::optional<double>(horizon_arg) : std::nullopt;
    };
    const auto opt_dims = [&](CLI::Option* o) {
      return *o ? std::optional<int>(dims_arg) : std::nullopt;
    };

    if (*sim) {
      return run_simulate(cfg, scenario_arg, opt_events(sim_events),
                          opt_horizon(sim_horizon), out_dir);
    }
    if (*fit) {
      return run_fit(cfg, data_path, opt_horizon(fit_horizon),
                     opt_dims(fit_dims), out_dir);
    }
    if (*ppc) {
      return run_ppc(cfg, data_path, chain_path, meta_path, per_dim, out_dir);
    }
    if (*summarize) {
      return run_summarize(cfg, data_path, opt_horizon(sum_horizon),
                           opt_dims(sum_dims), out_dir);
    }
    if (*recover) {
      return run_recover(cfg, preset_arg, opt_events(rec_events),
                         opt_horizon(rec_horizon), out_dir);
    }
    if (*traces) {
      return run_traces(cfg, chain_path, meta_path, out_dir);
    }
    emit_error("cli", "no subcommand selected");
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("cli", e.what());
    return 1;
  } catch (const hawkes::error& e) {
    emit_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}
