#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/csv_io.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/gibbs.hpp"
#include "hawkes/params.hpp"

namespace hawkes {

// One JSON document drives a whole run: model and background tags, priors,
// sampler settings, the calendar window and zone for seasonal fits, and the
// seed. Command-line flags override individual fields.
struct RunConfig {
  std::string model{"ancestor"};
  std::string background{"constant"};
  int piecewise_bins{8};
  std::string timezone{"UTC"};
  std::string window_start;
  std::string window_end;
  PriorSpec priors;
  McmcConfig mcmc;
  int replicates{200};
  std::uint64_t seed{0};

  [[nodiscard]] ModelKind model_kind() const {
    return detail::model_from_tag(model);
  }

  [[nodiscard]] BackgroundKind background_kind() const {
    return detail::background_from_tag(background);
  }

  void validate() const {
    static_cast<void>(model_kind());
    const BackgroundKind bg = background_kind();
    if (piecewise_bins < 1) {
      throw config_error("piecewise_bins must be >= 1");
    }
    priors.validate();
    mcmc.validate();
    if (replicates < 1) throw config_error("replicates must be >= 1");
    if (bg == BackgroundKind::seasonal) {
      if (window_start.empty() || window_end.empty()) {
        throw config_error("seasonal background needs window.start and "
                           "window.end");
      }
      TimeZone::parse(timezone);
      parse_civil_datetime(window_start);
      parse_civil_datetime(window_end);
    }
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                const std::vector<std::string>& known,
                                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw config_error("unknown key '" + item.key() + "' in " + where);
    }
  }
}

inline GammaPrior partial_prior(const nlohmann::json& j,
                                const std::string& name) {
  reject_unknown_keys(j, {"shape", "rate"}, "priors." + name);
  GammaPrior p;
  p.shape = j.value("shape", p.shape);
  p.rate = j.value("rate", p.rate);
  return p;
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j,
      {"schema_version", "model", "background", "piecewise_bins", "timezone",
       "window", "priors", "mcmc", "replicates", "seed"},
      "config");
  if (j.value("schema_version", 1) != 1) {
    throw config_error("unsupported config schema version");
  }
  RunConfig c;
  c.model = j.value("model", c.model);
  c.background = j.value("background", c.background);
  c.piecewise_bins = j.value("piecewise_bins", c.piecewise_bins);
  c.timezone = j.value("timezone", c.timezone);
  if (j.contains("window")) {
    const auto& w = j.at("window");
    detail::reject_unknown_keys(w, {"start", "end"}, "window");
    c.window_start = w.value("start", c.window_start);
    c.window_end = w.value("end", c.window_end);
  }
  if (j.contains("priors")) {
    const auto& p = j.at("priors");
    detail::reject_unknown_keys(p,
                                {"mu", "alpha", "theta", "influence_K",
                                 "influence_L", "rate_g", "rate_h"},
                                "priors");
    if (p.contains("mu")) c.priors.mu = detail::partial_prior(p.at("mu"), "mu");
    if (p.contains("alpha")) {
      c.priors.alpha = detail::partial_prior(p.at("alpha"), "alpha");
    }
    if (p.contains("theta")) {
      c.priors.theta = detail::partial_prior(p.at("theta"), "theta");
    }
    if (p.contains("influence_K")) {
      c.priors.influence_K =
          detail::partial_prior(p.at("influence_K"), "influence_K");
    }
    if (p.contains("influence_L")) {
      c.priors.influence_L =
          detail::partial_prior(p.at("influence_L"), "influence_L");
    }
    if (p.contains("rate_g")) {
      c.priors.rate_g = detail::partial_prior(p.at("rate_g"), "rate_g");
    }
    if (p.contains("rate_h")) {
      c.priors.rate_h = detail::partial_prior(p.at("rate_h"), "rate_h");
    }
  }
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    detail::reject_unknown_keys(m,
                                {"iterations", "burnin", "thin",
                                 "branching_log_cutoff", "slice"},
                                "mcmc");
    c.mcmc.iterations = m.value("iterations", c.mcmc.iterations);
    c.mcmc.burnin = m.value("burnin", c.mcmc.burnin);
    c.mcmc.thin = m.value("thin", c.mcmc.thin);
    if (m.contains("branching_log_cutoff")) {
      const auto& cutoff = m.at("branching_log_cutoff");
      c.mcmc.branching_log_cutoff =
          cutoff.is_null() ? std::numeric_limits<double>::infinity()
                           : cutoff.get<double>();
    }
    if (m.contains("slice")) {
      const auto& s = m.at("slice");
      detail::reject_unknown_keys(
          s, {"initial_width", "max_doublings", "max_shrinks"}, "mcmc.slice");
      c.mcmc.slice.initial_width =
          s.value("initial_width", c.mcmc.slice.initial_width);
      c.mcmc.slice.max_doublings =
          s.value("max_doublings", c.mcmc.slice.max_doublings);
      c.mcmc.slice.max_shrinks =
          s.value("max_shrinks", c.mcmc.slice.max_shrinks);
    }
  }
  c.replicates = j.value("replicates", c.replicates);
  c.seed = j.value("seed", c.seed);
  return c;
}

// Canonical full form: every field spelled out, keys in sorted order, so the
// dump is a stable fingerprint of the effective configuration.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j{
      {"schema_version", 1},
      {"model", c.model},
      {"background", c.background},
      {"piecewise_bins", c.piecewise_bins},
      {"timezone", c.timezone},
      {"window", {{"start", c.window_start}, {"end", c.window_end}}},
      {"priors", detail::priors_json(c.priors)},
      {"replicates", c.replicates},
      {"seed", c.seed},
  };
  nlohmann::json m{
      {"iterations", c.mcmc.iterations},
      {"burnin", c.mcmc.burnin},
      {"thin", c.mcmc.thin},
      {"slice",
       {{"initial_width", c.mcmc.slice.initial_width},
        {"max_doublings", c.mcmc.slice.max_doublings},
        {"max_shrinks", c.mcmc.slice.max_shrinks}}},
  };
  if (std::isinf(c.mcmc.branching_log_cutoff)) {
    m["branching_log_cutoff"] = nullptr;
  } else {
    m["branching_log_cutoff"] = c.mcmc.branching_log_cutoff;
  }
  j["mcmc"] = std::move(m);
  return j;
}

inline RunConfig load_run_config(const std::string& path) {
  auto is = detail::open_for_read(path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("cannot parse '" + path + "': " + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("bad config in '" + path + "': " + e.what());
  }
}

// FNV-1a over the canonical serialized form.
inline std::string config_hash_hex(const RunConfig& c) {
  const std::string text = run_config_to_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline std::optional<std::string> default_config_path() {
  const char* env = std::getenv("HAWKES_CONFIG");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::string(env);
}

}  // namespace hawkes
