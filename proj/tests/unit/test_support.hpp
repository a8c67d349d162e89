#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fpdeconv/rng.hpp"
#include "fpdeconv/transforms.hpp"

namespace fpdeconv::testing {

using transforms::Complex;

// Hand-rolled generators for property tests.
struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }
  double cauchy(double scale) { return std::cauchy_distribution<double>(0.0, scale)(rng); }

  // A mixture of well-spread, clustered and heavy-tailed atoms.
  std::vector<double> atoms(std::size_t n) {
    std::vector<double> a(n);
    const int kind = static_cast<int>(index(0, 2));
    for (auto& x : a) {
      if (kind == 0) x = uniform(-10.0, 10.0);
      else if (kind == 1) x = 0.01 * normal();
      else x = cauchy(3.0);
    }
    return a;
  }

  Complex upper(double min_im, double max_im, double re_span = 10.0) {
    return {uniform(-re_span, re_span), uniform(min_im, max_im)};
  }

  Rng rng;
};

// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// Sum over all compositions p_0 + ... + p_{parts-1} = total of
// x_{p_0} ... x_{p_{parts-1}}, by direct enumeration.
inline double composition_sum(const std::vector<double>& x, int parts, int total) {
  if (parts == 1) return total < static_cast<int>(x.size()) ? x[total] : 0.0;
  double sum = 0.0;
  for (int first = 0; first <= total; ++first) sum += x[first] * composition_sum(x, parts - 1, total - first);
  return sum;
}

// M_i = x_i + c sum_{j<i} alpha (alpha-1) .. (alpha-j) / (j+1)! * composition_sum(x, j+1, i-j-1),
// and M_0 = x_0 + c.
inline double expansion_residual(const std::vector<double>& x, double c, double alpha, int i) {
  if (i == 0) return x[0] + c;
  double sum = 0.0;
  for (int j = 0; j < i; ++j) {
    double coeff = 1.0;
    for (int q = 0; q <= j; ++q) coeff *= (alpha - q) / (q + 1);
    sum += coeff * composition_sum(x, j + 1, i - j - 1);
  }
  return x[i] + c * sum;
}

}  // namespace fpdeconv::testing
