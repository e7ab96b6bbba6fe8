#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Base error with a stable machine-readable kind tag. The CLI maps kind()
// onto its JSON error schema; library users can catch subclasses directly.
class error : public std::runtime_error {
 public:
  error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Caller violated a documented precondition (bad argument, bad index, t < 0).
class contract_error : public error {
 public:
  explicit contract_error(const std::string& message)
      : error("contract", message) {}
};

// A branching structure or event log is internally inconsistent.
class structural_error : public error {
 public:
  explicit structural_error(const std::string& message)
      : error("structural", message) {}
};

// Parameter set outside the stable regime where an operation is defined.
class stability_error : public error {
 public:
  explicit stability_error(const std::string& message)
      : error("stability", message) {}
};

// MCMC failure: non-finite state, degenerate slice interval, chain abort.
class sampler_error : public error {
 public:
  explicit sampler_error(const std::string& message)
      : error("sampler", message) {}
};

// Malformed input data (CSV parse failures, bad timestamps, bad schema).
class data_error : public error {
 public:
  explicit data_error(const std::string& message)
      : error("data", message) {}
};

// Invalid or inconsistent run configuration.
class config_error : public error {
 public:
  explicit config_error(const std::string& message)
      : error("config", message) {}
};

// A statistic was requested on a log with too few events to define it.
class insufficient_data_error : public error {
 public:
  explicit insufficient_data_error(const std::string& message)
      : error("insufficient_data", message) {}
};

}  // namespace hawkes
