#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/calendar.hpp"
#include "hawkes/config.hpp"
#include "hawkes/csv_io.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/gibbs.hpp"
#include "hawkes/ingest.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/matrix.hpp"
#include "hawkes/params.hpp"
#include "hawkes/simulate.hpp"

using namespace hawkes;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& test_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / "hawkes_io_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("missing file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_path,
            const fs::path& stderr_path) {
  const std::string cmd = std::string(HAWKES_CLI_PATH) + " " + args + " >" +
                          stdout_path.string() + " 2>" + stderr_path.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

EventLog random_log(std::mt19937& gen, int n, int dims) {
  std::exponential_distribution<double> gap(1.0);
  std::uniform_int_distribution<int> dim_dist(0, dims - 1);
  std::vector<Event> events;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += gap(gen) + 1e-9;
    events.push_back({t, dim_dist(gen)});
  }
  return EventLog(std::move(events), t + 1.0, dims);
}

void require_logs_identical(const EventLog& a, const EventLog& b) {
  REQUIRE(a.size() == b.size());
  REQUIRE(a.num_dims() == b.num_dims());
  REQUIRE(a.horizon() == b.horizon());
  for (int i = 0; i < a.size(); ++i) {
    REQUIRE(a.time(i) == b.time(i));
    REQUIRE(a.dim(i) == b.dim(i));
  }
}

void require_chains_identical(const ChainDraws& a, const ChainDraws& b) {
  REQUIRE(a.model == b.model);
  REQUIRE(a.background == b.background);
  REQUIRE(a.num_dims == b.num_dims);
  REQUIRE(a.horizon == b.horizon);
  REQUIRE(a.piecewise_edges == b.piecewise_edges);
  REQUIRE(a.config.iterations == b.config.iterations);
  REQUIRE(a.config.burnin == b.config.burnin);
  REQUIRE(a.config.thin == b.config.thin);
  REQUIRE(a.config.seed == b.config.seed);
  REQUIRE(a.config.branching_log_cutoff == b.config.branching_log_cutoff);
  REQUIRE(a.priors.mu.shape == b.priors.mu.shape);
  REQUIRE(a.priors.influence_K.rate == b.priors.influence_K.rate);
  REQUIRE(a.priors.rate_h.shape == b.priors.rate_h.shape);
  REQUIRE(static_cast<bool>(a.calendar) == static_cast<bool>(b.calendar));
  if (a.calendar) {
    REQUIRE(a.calendar->start_utc() == b.calendar->start_utc());
    REQUIRE(a.calendar->end_utc() == b.calendar->end_utc());
    REQUIRE(a.calendar->zone().name() == b.calendar->zone().name());
    REQUIRE(a.seasonal_prior_only.prior_only_hours ==
            b.seasonal_prior_only.prior_only_hours);
    REQUIRE(a.seasonal_prior_only.prior_only_weekdays ==
            b.seasonal_prior_only.prior_only_weekdays);
    REQUIRE(a.seasonal_prior_only.prior_only_months ==
            b.seasonal_prior_only.prior_only_months);
  }
  REQUIRE(a.size() == b.size());
  REQUIRE(a.column_names() == b.column_names());
  for (int d = 0; d < a.size(); ++d) {
    REQUIRE(a.row_values(a.draws[d]) == b.row_values(b.draws[d]));
  }
}

AncestorParams two_dim_params() {
  ConstantBackground bg(std::vector<double>{0.3, 0.4});
  InfluenceMatrix K(2, 0.35);
  InfluenceMatrix L(2, 0.1);
  L.set(0, 0, 0.4);
  L.set(1, 1, 0.35);
  return AncestorParams(bg, K, L, ExponentialKernel(2.0, 1.4),
                        ExponentialKernel(0.8, 0.6));
}

}  // namespace

TEST_CASE("number formatting round-trips doubles exactly") {
  std::mt19937 gen(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> mag(-12, 12);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(gen) * std::pow(10.0, mag(gen));
    const std::string text = detail::format_double(v);
    REQUIRE(std::strtod(text.c_str(), nullptr) == v);
  }
  REQUIRE(detail::format_double(0.0) == "0");
  REQUIRE(std::strtod(detail::format_double(8.500000001).c_str(), nullptr) ==
          8.500000001);
}

TEST_CASE("events files round-trip exactly") {
  std::mt19937 gen(61);
  const EventLog log = random_log(gen, 180, 4);

  std::stringstream buffer;
  write_events_csv(buffer, log);
  const EventLog back = read_events_csv(buffer, log.horizon(), 4);
  require_logs_identical(log, back);

  SECTION("horizon and dimension count can be inferred") {
    std::stringstream again;
    write_events_csv(again, log);
    const EventLog inferred = read_events_csv(again);
    REQUIRE(inferred.horizon() == log.time(log.size() - 1));
    REQUIRE(inferred.num_dims() <= 4);
    REQUIRE(inferred.size() == log.size());
  }

  SECTION("empty log keeps its window") {
    const EventLog empty({}, 25.0, 2);
    std::stringstream s;
    write_events_csv(s, empty);
    const EventLog back_empty = read_events_csv(s, 25.0, 2);
    require_logs_identical(empty, back_empty);
  }
}

TEST_CASE("events files reject malformed input") {
  const auto read_text = [](const std::string& text) {
    std::stringstream s(text);
    return read_events_csv(s);
  };
  REQUIRE_THROWS_AS(read_text("time,sender\n1.5,1\n"), data_error);
  REQUIRE_THROWS_AS(read_text("time_hours,dimension\n1.5\n"), data_error);
  REQUIRE_THROWS_AS(read_text("time_hours,dimension\nabc,1\n"), data_error);
  REQUIRE_THROWS_AS(read_text("time_hours,dimension\n1.5,x\n"), data_error);
  REQUIRE_THROWS_AS(read_text("time_hours,dimension\n1.5,0\n"), data_error);
  std::stringstream s("time_hours,dimension\n1.5,3\n");
  REQUIRE_THROWS_AS(read_events_csv(s, std::nullopt, 2), data_error);
}

TEST_CASE("branching files store immigrants as parent zero") {
  const std::vector<int> parents{-1, 0, 0, 2, -1, 3, -1};
  std::stringstream buffer;
  write_truth_csv(buffer, parents);
  const std::string text = buffer.str();
  REQUIRE(text.rfind(kTruthCsvHeader, 0) == 0);
  REQUIRE(text.find("1,0\n") != std::string::npos);
  REQUIRE(text.find("4,3\n") != std::string::npos);

  std::stringstream again(text);
  REQUIRE(read_truth_csv(again) == parents);

  const auto read_text = [](const std::string& t) {
    std::stringstream s(t);
    return read_truth_csv(s);
  };
  REQUIRE_THROWS_AS(read_text("event_index,parent_index\n2,0\n"), data_error);
  REQUIRE_THROWS_AS(read_text("event_index,parent_index\n1,1\n"), data_error);
  REQUIRE_THROWS_AS(read_text("event_index,parent_index\n1,0\n2,3\n"),
                    data_error);
}

TEST_CASE("raw message ingestion") {
  const TimeZone paris = TimeZone::parse("Europe/Paris");

  SECTION("maps senders by first appearance and converts to hours") {
    std::stringstream s(
        "timestamp,sender\n"
        "2021-04-05 12:00:00,bob\n"
        "2021-04-05 01:30:00,alice\n"
        "2021-04-05 12:00:00,alice\n");
    const auto res = ingest_messages(s, parse_civil_datetime("2021-04-05 00:00:00"),
                                     parse_civil_datetime("2021-04-06 00:00:00"),
                                     paris);
    REQUIRE(res.log.num_dims() == 2);
    REQUIRE(res.log.size() == 3);
    REQUIRE(res.senders == std::vector<std::string>{"alice", "bob"});
    REQUIRE(res.log.time(0) == 1.5);
    REQUIRE(res.log.time(1) == 12.0);
    REQUIRE(res.log.time(2) == 12.0 + 1e-9);
    REQUIRE(res.log.dim(0) == 0);
    REQUIRE(res.log.dim(1) == 1);
    REQUIRE(res.log.dim(2) == 0);
    REQUIRE(res.ties_adjusted == 1);
    REQUIRE(res.log.horizon() == 24.0);
  }

  SECTION("drops and counts events outside the window") {
    std::stringstream s(
        "timestamp,sender\n"
        "2021-04-04 23:59:59,early\n"
        "2021-04-05 10:00:00,kept\n"
        "2021-04-06 00:00:00,at_end\n"
        "2021-04-07 08:00:00,late\n");
    const auto res = ingest_messages(s, parse_civil_datetime("2021-04-05 00:00:00"),
                                     parse_civil_datetime("2021-04-06 00:00:00"),
                                     paris);
    REQUIRE(res.log.size() == 1);
    REQUIRE(res.dropped_before == 1);
    REQUIRE(res.dropped_after == 2);
    REQUIRE(res.senders == std::vector<std::string>{"kept"});
  }

  SECTION("daylight-saving gap maps into the post-transition hour") {
    const auto window_start = parse_civil_datetime("2021-03-28 00:00:00");
    const auto window_end = parse_civil_datetime("2021-03-29 00:00:00");
    std::stringstream gap(
        "timestamp,sender\n"
        "2021-03-28 02:30:00,a\n");
    std::stringstream explicit_time(
        "timestamp,sender\n"
        "2021-03-28 03:30:00,a\n");
    const auto from_gap =
        ingest_messages(gap, window_start, window_end, paris);
    const auto from_explicit =
        ingest_messages(explicit_time, window_start, window_end, paris);
    REQUIRE(from_gap.log.time(0) == from_explicit.log.time(0));

    std::stringstream spanning(
        "timestamp,sender\n"
        "2021-03-28 01:30:00,a\n"
        "2021-03-28 03:30:00,a\n");
    const auto res =
        ingest_messages(spanning, window_start, window_end, paris);
    REQUIRE(res.log.time(1) - res.log.time(0) == 1.0);
    REQUIRE(res.log.horizon() == 23.0);
  }

  SECTION("empty window is flagged, not fatal") {
    std::stringstream s("timestamp,sender\n2022-01-01 00:00:00,a\n");
    const auto res = ingest_messages(s, parse_civil_datetime("2021-04-05 00:00:00"),
                                     parse_civil_datetime("2021-04-06 00:00:00"),
                                     paris);
    REQUIRE(res.empty_window);
    REQUIRE(res.log.size() == 0);
    REQUIRE(res.dropped_after == 1);
  }

  SECTION("parse failures carry the line number") {
    std::stringstream s(
        "timestamp,sender\n"
        "2021-04-05 10:00:00,ok\n"
        "2021-04-05 99:00:00,bad\n");
    try {
      ingest_messages(s, parse_civil_datetime("2021-04-05 00:00:00"),
                      parse_civil_datetime("2021-04-06 00:00:00"), paris);
      FAIL("expected data_error");
    } catch (const data_error& e) {
      REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::stringstream missing("timestamp,sender\nnocomma\n");
    REQUIRE_THROWS_AS(
        ingest_messages(missing, parse_civil_datetime("2021-04-05 00:00:00"),
                        parse_civil_datetime("2021-04-06 00:00:00"), paris),
        data_error);
  }
}

TEST_CASE("chain files round-trip bit for bit") {
  const fs::path dir = test_root() / "chains";
  fs::create_directories(dir);

  const auto roundtrip = [&](const ChainDraws& chain, const std::string& tag) {
    const std::string draws = (dir / (tag + "_draws.csv")).string();
    const std::string meta = (dir / (tag + "_meta.json")).string();
    write_chain(draws, meta, chain);
    const ChainDraws back = read_chain(draws, meta);
    require_chains_identical(chain, back);

    const std::string draws2 = (dir / (tag + "_again_draws.csv")).string();
    const std::string meta2 = (dir / (tag + "_again_meta.json")).string();
    write_chain(draws2, meta2, back);
    REQUIRE(read_file(draws) == read_file(draws2));
    REQUIRE(read_file(meta) == read_file(meta2));
  };

  SECTION("two-kernel model, constant background") {
    SimulationRequest req;
    req.params = two_dim_params();
    req.horizon = 90.0;
    req.seed = 11;
    const EventLog log = simulate(req).log;
    ModelSpec spec;
    spec.model = ModelKind::ancestor;
    McmcConfig mcmc;
    mcmc.iterations = 120;
    mcmc.burnin = 40;
    mcmc.thin = 2;
    mcmc.seed = 3;
    roundtrip(run_chain(log, spec, PriorSpec{}, mcmc), "ancestor_constant");
  }

  SECTION("classic model, piecewise background") {
    ConstantBackground bg(std::vector<double>{0.5});
    const ClassicParams params(bg, InfluenceMatrix(1, 0.4),
                               ExponentialKernel(1.5, 1.5));
    const EventLog log = simulate(params, 60.0, std::nullopt, 4).log;
    ModelSpec spec;
    spec.model = ModelKind::classic;
    spec.background = BackgroundKind::piecewise;
    spec.piecewise_bins = 3;
    McmcConfig mcmc;
    mcmc.iterations = 100;
    mcmc.burnin = 20;
    mcmc.thin = 1;
    mcmc.seed = 5;
    mcmc.branching_log_cutoff = std::numeric_limits<double>::infinity();
    roundtrip(run_chain(log, spec, PriorSpec{}, mcmc), "classic_piecewise");
  }

  SECTION("restricted model, seasonal background") {
    const TimeZone utc = TimeZone::utc();
    const auto start = civil_to_epoch_seconds(
        parse_civil_datetime("2021-05-03 00:00:00"));
    const auto grid = std::make_shared<const CalendarGrid>(
        start, start + 72 * 3600, utc);
    SimulationRequest req;
    req.params = two_dim_params();
    req.horizon = 72.0;
    req.seed = 13;
    const EventLog log = simulate(req).log;
    ModelSpec spec;
    spec.model = ModelKind::ancestor_restricted;
    spec.background = BackgroundKind::seasonal;
    spec.calendar = grid;
    McmcConfig mcmc;
    mcmc.iterations = 80;
    mcmc.burnin = 30;
    mcmc.thin = 1;
    mcmc.seed = 7;
    roundtrip(run_chain(log, spec, PriorSpec{}, mcmc), "restricted_seasonal");
  }

  SECTION("mismatched header is rejected") {
    SimulationRequest req;
    req.params = two_dim_params();
    req.horizon = 40.0;
    req.seed = 2;
    ModelSpec spec;
    spec.model = ModelKind::ancestor;
    McmcConfig mcmc;
    mcmc.iterations = 30;
    mcmc.burnin = 10;
    mcmc.thin = 1;
    const ChainDraws chain =
        run_chain(simulate(req).log, spec, PriorSpec{}, mcmc);
    const std::string draws = (dir / "bad_draws.csv").string();
    const std::string meta = (dir / "bad_meta.json").string();
    write_chain(draws, meta, chain);
    json m = json::parse(read_file(meta));
    m["model"] = "classic";
    {
      std::ofstream os(meta);
      os << m.dump(2) << '\n';
    }
    REQUIRE_THROWS_AS(read_chain(draws, meta), data_error);
  }
}

TEST_CASE("run configuration parsing") {
  SECTION("partial documents keep defaults") {
    const RunConfig c = run_config_from_json(json{{"seed", 9}});
    REQUIRE(c.seed == 9);
    REQUIRE(c.model == "ancestor");
    REQUIRE(c.background == "constant");
    REQUIRE(c.mcmc.iterations == 20000);
    REQUIRE(c.mcmc.burnin == 5000);
    REQUIRE(c.priors.influence_K.rate == 10.0);
  }

  SECTION("nested overrides apply") {
    const RunConfig c = run_config_from_json(json{
        {"model", "classic"},
        {"priors", {{"mu", {{"shape", 4.0}, {"rate", 8.0}}}}},
        {"mcmc", {{"iterations", 600}, {"burnin", 100}, {"thin", 5}}},
    });
    REQUIRE(c.model_kind() == ModelKind::classic);
    REQUIRE(c.priors.mu.shape == 4.0);
    REQUIRE(c.priors.mu.rate == 8.0);
    REQUIRE(c.priors.theta.shape == 1.0);
    REQUIRE(c.mcmc.iterations == 600);
    REQUIRE(c.mcmc.thin == 5);
  }

  SECTION("unknown keys and tags are rejected") {
    REQUIRE_THROWS_AS(run_config_from_json(json{{"sede", 9}}), config_error);
    REQUIRE_THROWS_AS(
        run_config_from_json(json{{"mcmc", {{"iterationz", 10}}}}),
        config_error);
    RunConfig c;
    c.model = "bogus";
    REQUIRE_THROWS_AS(c.validate(), config_error);
    c = RunConfig{};
    c.background = "seasonal";
    REQUIRE_THROWS_AS(c.validate(), config_error);
    c.window_start = "2021-01-01 00:00:00";
    c.window_end = "2021-02-01 00:00:00";
    c.validate();
  }

  SECTION("null branching cutoff means no cutoff") {
    const RunConfig c = run_config_from_json(
        json{{"mcmc", {{"branching_log_cutoff", nullptr}}}});
    REQUIRE(std::isinf(c.mcmc.branching_log_cutoff));
    REQUIRE(run_config_to_json(c)["mcmc"]["branching_log_cutoff"].is_null());
  }

  SECTION("hash is stable and input-sensitive") {
    RunConfig a;
    RunConfig b;
    REQUIRE(config_hash_hex(a) == config_hash_hex(b));
    b.seed = 1;
    REQUIRE(config_hash_hex(a) != config_hash_hex(b));
    const RunConfig back = run_config_from_json(run_config_to_json(b));
    REQUIRE(config_hash_hex(back) == config_hash_hex(b));
  }

  SECTION("environment variable supplies the default config path") {
    unsetenv("HAWKES_CONFIG");
    REQUIRE_FALSE(default_config_path().has_value());
    setenv("HAWKES_CONFIG", "/tmp/some_config.json", 1);
    REQUIRE(default_config_path() == std::string("/tmp/some_config.json"));
    unsetenv("HAWKES_CONFIG");
  }
}

TEST_CASE("command line runs are deterministic") {
  const fs::path dir = test_root() / "cli";
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";

  const auto path_of = [&](const std::string& sub) {
    return (dir / sub).string();
  };

  REQUIRE(run_cli("simulate --scenario 1 --events 120 --seed 7 --out-dir " +
                      path_of("sim_a"),
                  out, err) == 0);
  const std::string echo = read_file(out);
  REQUIRE(echo.find("seed: 7") != std::string::npos);
  REQUIRE(echo.find("config_hash: ") != std::string::npos);
  REQUIRE(run_cli("simulate --scenario 1 --events 120 --seed 7 --out-dir " +
                      path_of("sim_b"),
                  out, err) == 0);
  REQUIRE(read_file(dir / "sim_a/events.csv") ==
          read_file(dir / "sim_b/events.csv"));
  REQUIRE(read_file(dir / "sim_a/truth.csv") ==
          read_file(dir / "sim_b/truth.csv"));

  REQUIRE(run_cli("simulate --scenario 1 --events 120 --seed 8 --out-dir " +
                      path_of("sim_c"),
                  out, err) == 0);
  REQUIRE(read_file(dir / "sim_a/events.csv") !=
          read_file(dir / "sim_c/events.csv"));

  const std::string fit_args =
      "fit --data " + path_of("sim_a/events.csv") +
      " --model ancestor --dims 3 --iters 150 --burnin 50 --thin 2 --seed 3 ";
  REQUIRE(run_cli(fit_args + "--out-dir " + path_of("fit_a"), out, err) == 0);
  REQUIRE(run_cli(fit_args + "--out-dir " + path_of("fit_b"), out, err) == 0);
  REQUIRE(read_file(dir / "fit_a/chain_draws.csv") ==
          read_file(dir / "fit_b/chain_draws.csv"));
  REQUIRE(read_file(dir / "fit_a/chain_meta.json") ==
          read_file(dir / "fit_b/chain_meta.json"));

  const std::string ppc_args = "ppc --data " + path_of("sim_a/events.csv") +
                               " --chain " + path_of("fit_a/chain_draws.csv") +
                               " --replicates 20 --seed 5 ";
  REQUIRE(run_cli(ppc_args + "--out-dir " + path_of("ppc_a"), out, err) == 0);
  REQUIRE(run_cli(ppc_args + "--out-dir " + path_of("ppc_b"), out, err) == 0);
  REQUIRE(read_file(dir / "ppc_a/ppc_stats.json") ==
          read_file(dir / "ppc_b/ppc_stats.json"));
  REQUIRE(read_file(dir / "ppc_a/ppc_envelope.csv") ==
          read_file(dir / "ppc_b/ppc_envelope.csv"));

  const std::string sum_args =
      "summarize --data " + path_of("sim_a/events.csv") + " ";
  REQUIRE(run_cli(sum_args + "--out-dir " + path_of("sum_a"), out, err) == 0);
  REQUIRE(run_cli(sum_args + "--out-dir " + path_of("sum_b"), out, err) == 0);
  REQUIRE(read_file(dir / "sum_a/summary.json") ==
          read_file(dir / "sum_b/summary.json"));

  const std::string tr_args =
      "traces --chain " + path_of("fit_a/chain_draws.csv") + " ";
  REQUIRE(run_cli(tr_args + "--out-dir " + path_of("tr_a"), out, err) == 0);
  REQUIRE(run_cli(tr_args + "--out-dir " + path_of("tr_b"), out, err) == 0);
  REQUIRE(read_file(dir / "tr_a/traces.csv") ==
          read_file(dir / "tr_b/traces.csv"));
  REQUIRE(read_file(dir / "tr_a/trace_stats.csv") ==
          read_file(dir / "tr_b/trace_stats.csv"));

  const std::string rec_args =
      "recover --preset scenario1 --replicates 1 --events 100 --iters 80 "
      "--burnin 30 --thin 1 --seed 17 ";
  REQUIRE(run_cli(rec_args + "--out-dir " + path_of("rec_a"), out, err) == 0);
  REQUIRE(run_cli(rec_args + "--out-dir " + path_of("rec_b"), out, err) == 0);
  REQUIRE(read_file(dir / "rec_a/recovery.json") ==
          read_file(dir / "rec_b/recovery.json"));

  SECTION("fitted chain matches an in-process run") {
    const EventLog log =
        read_events_csv(path_of("sim_a/events.csv"), std::nullopt, 3);
    ModelSpec spec;
    spec.model = ModelKind::ancestor;
    McmcConfig mcmc;
    mcmc.iterations = 150;
    mcmc.burnin = 50;
    mcmc.thin = 2;
    mcmc.seed = 3;
    const ChainDraws direct = run_chain(log, spec, PriorSpec{}, mcmc);
    const ChainDraws from_files =
        read_chain(path_of("fit_a/chain_draws.csv"),
                   path_of("fit_a/chain_meta.json"));
    require_chains_identical(direct, from_files);
  }
}

TEST_CASE("command line reports machine-readable errors") {
  const fs::path dir = test_root() / "cli_errors";
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";

  const auto error_kind = [&](const std::string& args) {
    REQUIRE(run_cli(args, out, err) != 0);
    const json parsed = json::parse(read_file(err));
    return parsed.at("error").at("kind").get<std::string>();
  };

  REQUIRE(error_kind("fit --data " + (dir / "missing.csv").string()) ==
          "data");
  REQUIRE(error_kind("simulate --scenario nope --out-dir " +
                     (dir / "x").string()) == "config");
  REQUIRE(error_kind("simulate --nonsense") == "cli");
  REQUIRE(error_kind("frobnicate") == "cli");

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << "{\"sede\": 4}\n";
  }
  REQUIRE(error_kind("simulate --scenario 1 --events 10 --config " +
                     (dir / "bad.json").string() + " --out-dir " +
                     (dir / "y").string()) == "config");

  {
    std::ofstream msgs(dir / "raw.csv");
    msgs << "timestamp,sender\n2021-01-01 10:00:00,a\n";
  }
  REQUIRE(error_kind("fit --data " + (dir / "raw.csv").string() +
                     " --iters 50 --burnin 10") == "config");
}
