#pragma once

// Shared statistical utilities for the test suites. Everything here is
// deliberately independent of the library implementation so it can serve as
// an oracle: plain formulas, no shared code paths with include/hawkes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty vector");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

inline double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sd needs >= 2 values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / (xs.size() - 1));
}

// Type-7 quantile (the linear-interpolation default of most stat packages)
// on an already sorted sample.
inline double quantile_type7_sorted(const std::vector<double>& sorted,
                                    double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

inline double quantile_type7(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  return quantile_type7_sorted(xs, p);
}

inline double pearson_correlation(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("correlation needs two equal-length samples");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("correlation of a constant sample");
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double rmse(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("rmse needs two equal-length samples");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s += (xs[i] - ys[i]) * (xs[i] - ys[i]);
  }
  return std::sqrt(s / xs.size());
}

// Kolmogorov distribution tail Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

// One-sample KS test against U(0, 1), p-value via Stephens' transform.
inline double ks_uniform_pvalue(std::vector<double> xs) {
  if (xs.size() < 5) throw std::invalid_argument("ks needs >= 5 values");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = std::min(1.0, std::max(0.0, xs[i]));
    d = std::max(d, (i + 1.0) / n - u);
    d = std::max(d, u - i / n);
  }
  const double z = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  return kolmogorov_tail(z);
}

// Two-sample KS p-value with the usual effective-size transform.
inline double ks_two_sample_pvalue(std::vector<double> xs,
                                   std::vector<double> ys) {
  if (xs.size() < 5 || ys.size() < 5) {
    throw std::invalid_argument("ks needs >= 5 values per sample");
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / xs.size() -
                             static_cast<double>(j) / ys.size()));
  }
  const double ne = static_cast<double>(xs.size()) * ys.size() /
                    (xs.size() + ys.size());
  const double z = d * (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne));
  return kolmogorov_tail(z);
}

// Adaptive Simpson quadrature, an oracle for compensator integrals.
template <typename F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-10,
                        int depth = 30) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  struct Rec {
    double a, b, fa, fm, fb, whole;
    int depth;
  };
  auto simpson = [](double a_, double b_, double fa_, double fm_, double fb_) {
    return (b_ - a_) / 6.0 * (fa_ + 4.0 * fm_ + fb_);
  };
  double total = 0.0;
  std::vector<Rec> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), depth}};
  while (!stack.empty()) {
    const Rec r = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (r.a + r.b);
    const double lm = 0.5 * (r.a + mid);
    const double rm = 0.5 * (mid + r.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(r.a, mid, r.fa, flm, r.fm);
    const double right = simpson(mid, r.b, r.fm, frm, r.fb);
    if (r.depth <= 0 || std::abs(left + right - r.whole) < 15.0 * tol) {
      total += left + right + (left + right - r.whole) / 15.0;
    } else {
      stack.push_back({r.a, mid, r.fa, flm, r.fm, left, r.depth - 1});
      stack.push_back({mid, r.b, r.fm, frm, r.fb, right, r.depth - 1});
    }
  }
  return total;
}

}  // namespace testutil
