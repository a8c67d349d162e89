#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"

namespace fpdeconv::bandwidth {

// Cross-validation over a bandwidth grid H with V random half-splits.
struct CVConfig {
  std::vector<double> grid = default_grid();
  std::size_t partitions = 10;
  std::uint64_t seed = 0;

  // 50 equispaced points in [0.25, 2.7].
  static std::vector<double> default_grid();
  static std::vector<double> equispaced(double h_min, double h_max, std::size_t count);
  // Throws std::invalid_argument if H is not strictly increasing and positive
  // or V < 2.
  void validate() const;
};

struct CVReport {
  std::vector<double> grid;
  std::vector<double> crit;
  double selected_h = 0.0;
  std::size_t selected_index = 0;
  std::vector<std::uint64_t> partition_seeds;
  // Index dropped to make n even, if any.
  std::optional<std::size_t> dropped_index;
};

// For each split (E, E^c), with A_j(h) = ||Re p_h^E||^2 and
// B_j(h, h') = \int Re p_h^E Re p_h'^{E^c},
//   Crit(h) = min_{h' != h} (1/V) sum_j [A_j(h) - 2 B_j(h, h')]
// and the selected bandwidth is argmin_h Crit(h). An odd sample first loses
// one uniformly chosen eigenvalue.
CVReport cv_select(const dbm::SpectralSample& sample, const CVConfig& cv, const deconv::EstimatorConfig& estimator);

// J(h) = ||Re p_h||^2 - 2 \int Re p_h p0 on the spatial grid.
double oracle_j(const dbm::SpectralSample& sample, double h, const std::function<double(double)>& p0,
                const deconv::EstimatorConfig& estimator);
// J over a whole grid, reusing the h-independent stages.
std::vector<double> oracle_j_curve(const dbm::SpectralSample& sample, const std::vector<double>& grid,
                                   const std::function<double(double)>& p0, const deconv::EstimatorConfig& estimator);

// J(h) for an estimate that is already assembled.
double j_criterion(const deconv::DensityEstimate& estimate, const std::function<double(double)>& p0);

// Supersmooth class S(a, r, L): \int |p0*(xi)|^2 e^{2a|xi|^r} dxi <= L.
struct SmoothnessClass {
  double a = 1.0;
  double r = 1.0;
  double L = 1.0;
  void validate() const;
};

// k with k/(k+1) < min(r, 1/r) <= (k+1)/(k+2). Undefined (throws) for r == 1.
int expansion_order(double r);

// Coefficients b*_0..b*_k solving the triangular system that zeroes M_0..M_k
// for r < 1:
//   b*_i = -c sum_{j<i} binom(r, j+1) sum_{p_0+..+p_j = i-j-1} b*_{p_0}..b*_{p_j},
// with c = 2a / (2 gamma)^r and b*_0 = -c.
std::vector<double> b_star(double a, double r, double gamma, int k);
// Same system for r > 1 with c = 2 gamma / (2a)^{1/r} and binom(1/r, j+1).
std::vector<double> d_star(double a, double r, double gamma, int k);

// r = 1: 2 (a + gamma) / log n. r < 1 and r > 1 use the log-n expansions
// with the b* and d* coefficients. Requires n >= 3 and a valid class.
double theoretical_bandwidth(const SmoothnessClass& smoothness, double gamma, std::size_t n);

enum class RateRegime { kPolynomial, kBiasDominated, kVarianceDominated };

struct RateDescriptor {
  RateRegime regime;
  // MISE = O(n^{-exponent}); set only in the polynomial (r = 1) regime.
  std::optional<double> exponent;
  std::string description;
};

RateDescriptor predicted_rate(const SmoothnessClass& smoothness, double gamma);

// CSV `h,crit`, plus `j_oracle` when oracle values are supplied.
void write_cv_csv(std::ostream& out, const CVReport& report, const std::vector<double>* j_oracle = nullptr);

}  // namespace fpdeconv::bandwidth
