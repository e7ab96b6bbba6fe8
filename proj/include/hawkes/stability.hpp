#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "hawkes/matrix.hpp"
#include "hawkes/params.hpp"

namespace hawkes {

namespace detail {

// Dense copy in the convention used by the stationarity algebra: row =
// target dimension, column = source dimension.
inline Eigen::MatrixXd to_target_major(const InfluenceMatrix& mat) {
  const int m = mat.dims();
  Eigen::MatrixXd out(m, m);
  for (int to = 0; to < m; ++to) {
    for (int from = 0; from < m; ++from) {
      out(to, from) = mat.get(from, to);
    }
  }
  return out;
}

inline double spectral_radius_dense(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  double rho = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    rho = std::max(rho, std::abs(solver.eigenvalues()[i]));
  }
  return rho;
}

}  // namespace detail

// Largest eigenvalue modulus of a nonnegative influence matrix. Power
// iteration runs on I + A, whose dominant eigenvalue 1 + rho(A) is strictly
// modulus-dominant for nonnegative A even when A itself is periodic. Falls
// back to a dense eigensolve if the iteration has not settled to `tol`.
inline double spectral_radius(const InfluenceMatrix& mat, double tol = 1e-10) {
  const int m = mat.dims();
  if (m == 0) throw contract_error("spectral radius of an empty matrix");
  const Eigen::MatrixXd a = detail::to_target_major(mat);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
  x /= x.norm();
  double lambda = 1.0;
  const int max_iters = 20000;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = x + a * x;
    const double norm = y.norm();
    if (!(norm > 0.0)) return detail::spectral_radius_dense(a);
    y /= norm;
    const double next = y.dot(y + a * y);
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      return std::max(0.0, next - 1.0);
    }
    lambda = next;
    x = y;
  }
  return detail::spectral_radius_dense(a);
}

// Stability and, when defined, long-run rates of a parameter set.
//
// The ancestor process is stable exactly when rho(L) < 1: after the first
// generation every lineage reproduces through L, so K inflates cluster sizes
// by a constant factor without affecting criticality. With a constant
// background the triggered rate solves (I - L) r = K mu and the total rate
// is lambda_bar = mu + r; for other backgrounds only the radii are reported.
struct StabilityReport {
  double spectral_radius_K{0.0};
  double spectral_radius_L{0.0};
  bool stable{false};
  std::optional<std::vector<double>> triggered_rate;
  std::optional<std::vector<double>> total_rate;
};

namespace detail {

inline void fill_stationary_rates(StabilityReport& report,
                                  const Background& background,
                                  const InfluenceMatrix& K,
                                  const InfluenceMatrix& L) {
  if (!report.stable) return;
  const auto* constant = std::get_if<ConstantBackground>(&background);
  if (constant == nullptr) return;
  const int m = K.dims();
  const Eigen::Map<const Eigen::VectorXd> mu(constant->mu.data(), m);
  const Eigen::MatrixXd k = to_target_major(K);
  const Eigen::MatrixXd l = to_target_major(L);
  const Eigen::VectorXd r =
      (Eigen::MatrixXd::Identity(m, m) - l).colPivHouseholderQr().solve(k *
                                                                        mu);
  std::vector<double> triggered(m);
  std::vector<double> total(m);
  for (int d = 0; d < m; ++d) {
    triggered[d] = r[d];
    total[d] = constant->mu[d] + r[d];
  }
  report.triggered_rate = std::move(triggered);
  report.total_rate = std::move(total);
}

}  // namespace detail

inline StabilityReport stability_report(const AncestorParams& params) {
  StabilityReport report;
  report.spectral_radius_K = spectral_radius(params.K);
  report.spectral_radius_L = spectral_radius(params.L);
  report.stable = report.spectral_radius_L < 1.0;
  detail::fill_stationary_rates(report, params.background, params.K, params.L);
  return report;
}

inline StabilityReport stability_report(const ClassicParams& params) {
  StabilityReport report;
  report.spectral_radius_K = spectral_radius(params.K);
  report.spectral_radius_L = report.spectral_radius_K;
  report.stable = report.spectral_radius_K < 1.0;
  detail::fill_stationary_rates(report, params.background, params.K, params.K);
  return report;
}

}  // namespace hawkes
