#pragma once

#include <cmath>
#include <string>

#include "hawkes/errors.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

// Normalised exponential excitation kernel with one decay rate for
// within-dimension pairs and one for cross-dimension pairs. The density
// integrates to one, so excitation magnitudes carry all of the mass:
//   density(z)   = rate * exp(-rate * z)
//   primitive(z) = 1 - exp(-rate * z)
struct ExponentialKernel {
  double rate_diag{1.0};
  double rate_off{1.0};

  ExponentialKernel() = default;
  ExponentialKernel(double diag, double off) : rate_diag(diag), rate_off(off) {
    validate();
  }

  void validate() const {
    if (!(rate_diag > 0.0) || !std::isfinite(rate_diag) || !(rate_off > 0.0) ||
        !std::isfinite(rate_off)) {
      throw contract_error("kernel decay rates must be finite and > 0");
    }
  }

  [[nodiscard]] double rate(int from, int to) const noexcept {
    return from == to ? rate_diag : rate_off;
  }

  [[nodiscard]] double density(int from, int to, double lag) const {
    if (!(lag >= 0.0)) throw contract_error("kernel lag must be >= 0");
    const double b = rate(from, to);
    return b * std::exp(-b * lag);
  }

  [[nodiscard]] double log_density(int from, int to, double lag) const {
    if (!(lag >= 0.0)) throw contract_error("kernel lag must be >= 0");
    const double b = rate(from, to);
    return std::log(b) - b * lag;
  }

  // Integral of the density over [0, z].
  [[nodiscard]] double primitive(int from, int to, double z) const {
    if (!(z >= 0.0)) throw contract_error("kernel primitive needs z >= 0");
    return -std::expm1(-rate(from, to) * z);
  }

  // Lag drawn from the kernel conditioned to (lo, hi], by inverse CDF.
  [[nodiscard]] double sample_lag_in(int from, int to, double lo, double hi,
                                     Rng& rng) const {
    if (!(0.0 <= lo && lo < hi)) {
      throw contract_error("truncated kernel sample needs 0 <= lo < hi");
    }
    const double b = rate(from, to);
    const double u = rng.uniform();
    // F(z | lo < z <= hi) inverted on the survival scale for accuracy.
    const double s_lo = std::exp(-b * lo);
    const double s_hi = std::exp(-b * hi);
    const double s = s_lo - u * (s_lo - s_hi);
    double z = -std::log(s) / b;
    if (z <= lo) z = std::nextafter(lo, hi);
    if (z > hi) z = hi;
    return z;
  }
};

}  // namespace hawkes
