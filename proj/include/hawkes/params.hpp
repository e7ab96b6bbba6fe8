#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "hawkes/background.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/matrix.hpp"

namespace hawkes {

// Full parameter set of the ancestor process. Immigrant events reproduce
// through (K, g); triggered events reproduce through (L, h). The restricted
// variant pins every off-diagonal L entry at zero.
struct AncestorParams {
  Background background;
  InfluenceMatrix K;
  InfluenceMatrix L;
  ExponentialKernel g;
  ExponentialKernel h;
  bool restricted{false};

  AncestorParams() = default;
  AncestorParams(Background bg, InfluenceMatrix k_mat, InfluenceMatrix l_mat,
                 ExponentialKernel g_kernel, ExponentialKernel h_kernel,
                 bool restrict_l = false)
      : background(std::move(bg)),
        K(std::move(k_mat)),
        L(std::move(l_mat)),
        g(g_kernel),
        h(h_kernel),
        restricted(restrict_l) {
    validate();
  }

  [[nodiscard]] int dims() const { return background_dims(background); }

  void validate() const {
    const int m = background_dims(background);
    if (K.dims() != m || L.dims() != m) {
      throw contract_error("influence matrices must match the background "
                           "dimension count");
    }
    g.validate();
    h.validate();
    if (restricted) {
      for (int from = 0; from < m; ++from) {
        for (int to = 0; to < m; ++to) {
          if (from != to && L.get(from, to) != 0.0) {
            throw contract_error("restricted variant requires zero "
                                 "off-diagonal L entries");
          }
        }
      }
    }
  }
};

// Parameters of the classic self-exciting process: one reproduction law
// (K, g) for every event regardless of generation.
struct ClassicParams {
  Background background;
  InfluenceMatrix K;
  ExponentialKernel g;

  ClassicParams() = default;
  ClassicParams(Background bg, InfluenceMatrix k_mat,
                ExponentialKernel g_kernel)
      : background(std::move(bg)), K(std::move(k_mat)), g(g_kernel) {
    validate();
  }

  [[nodiscard]] int dims() const { return background_dims(background); }

  void validate() const {
    if (K.dims() != background_dims(background)) {
      throw contract_error("influence matrix must match the background "
                           "dimension count");
    }
    g.validate();
  }

  // The classic model is the ancestor model with both generations sharing
  // one reproduction law; used so simulation and intensity code exist once.
  [[nodiscard]] AncestorParams as_ancestor() const {
    return AncestorParams(background, K, K, g, g);
  }
};

// Shape-rate gamma prior.
struct GammaPrior {
  double shape{1.0};
  double rate{1.0};

  [[nodiscard]] double mean() const { return shape / rate; }

  void validate(const std::string& what) const {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) ||
        !std::isfinite(rate)) {
      throw contract_error("gamma prior for " + what +
                           " needs positive finite shape and rate");
    }
  }
};

// Independent priors for every sampled block.
struct PriorSpec {
  GammaPrior mu{1.0, 1.0};          // constant / piecewise background rates
  GammaPrior alpha{1.0, 1.0};       // seasonal average rates
  GammaPrior theta{1.0, 1.0};       // seasonal factor cells
  GammaPrior influence_K{1.0, 10.0};
  GammaPrior influence_L{1.0, 10.0};
  GammaPrior rate_g{2.0, 1.0};      // immigrant kernel decay, diag and off
  GammaPrior rate_h{2.0, 1.0};      // triggered kernel decay, diag and off

  void validate() const {
    mu.validate("mu");
    alpha.validate("alpha");
    theta.validate("theta");
    influence_K.validate("K");
    influence_L.validate("L");
    rate_g.validate("g decay");
    rate_h.validate("h decay");
  }
};

}  // namespace hawkes
