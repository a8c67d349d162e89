#pragma once

// Classical deconvolution stage. Given the estimated density of mu0 * C_gamma
// on a spatial grid, the estimate of p0 is defined through its Fourier
// transform
//   p0_hat*(xi) = e^{gamma |xi|} K*(h xi) f_conv*(xi),
// and brought back by the inverse transform (1/2pi) \int e^{-i x xi} (.) dxi.
// Both transforms are Riemann sums on uniform grids.

#include <complex>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpdeconv/keyvalue.hpp"
#include "fpdeconv/subordination.hpp"
#include "fpdeconv/transforms.hpp"

namespace fpdeconv::deconv {

using transforms::Complex;

class SpatialGrid {
 public:
  // Requires m >= 2 and x_min < x_max (std::invalid_argument).
  SpatialGrid(double x_min, double x_max, std::size_t m);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return m_; }
  double spacing() const noexcept { return (x_max_ - x_min_) / static_cast<double>(m_ - 1); }
  double point(std::size_t j) const noexcept;
  std::vector<double> points() const;

 private:
  double x_min_;
  double x_max_;
  std::size_t m_;
};

// Symmetric uniform grid on [-xi_max, xi_max].
class FrequencyGrid {
 public:
  FrequencyGrid(double xi_max, std::size_t m);

  double xi_max() const noexcept { return xi_max_; }
  std::size_t size() const noexcept { return m_; }
  double spacing() const noexcept { return 2.0 * xi_max_ / static_cast<double>(m_ - 1); }
  double point(std::size_t k) const noexcept;
  std::vector<double> points() const;

 private:
  double xi_max_;
  std::size_t m_;
};

// Regularizing kernel, described by its Fourier transform K* supported in
// [-1, 1] and bounded by C_K.
class Kernel {
 public:
  // K*(xi) = 1 on the closed interval [-1, 1], 0 outside (K = sinc).
  static Kernel sinc();
  // User-supplied K*. Values outside [-1, 1] are forced to 0; a value above
  // bound in magnitude throws std::domain_error on evaluation.
  static Kernel custom(std::string name, std::function<double(double)> fourier, double bound);

  double fourier(double xi) const;
  const std::string& name() const noexcept { return name_; }
  double bound() const noexcept { return bound_; }

 private:
  Kernel(std::string name, std::function<double(double)> fourier, double bound);

  std::string name_;
  std::function<double(double)> fourier_;
  double bound_;
};

// K*(xi).
double kernel_ft(const Kernel& kernel, double xi);

// dx * sum_j f(x_j) e^{i x_j xi}.
Complex riemann_fourier(std::span<const double> samples, const SpatialGrid& grid, double xi);

// Forward and inverse Riemann-sum Fourier transforms between a spatial and a
// frequency grid, sharing one precomputed phase table e^{i x_j xi_k}.
class FourierQuadrature {
 public:
  FourierQuadrature(SpatialGrid spatial, FrequencyGrid frequency);

  const SpatialGrid& spatial() const noexcept { return spatial_; }
  const FrequencyGrid& frequency() const noexcept { return frequency_; }

  // g*(xi_k) = dx sum_j g(x_j) e^{i x_j xi_k}.
  std::vector<Complex> forward(std::span<const Complex> spatial_values) const;
  std::vector<Complex> forward(std::span<const double> spatial_values) const;
  // g(x_j) = dxi / (2 pi) sum_k G(xi_k) e^{-i x_j xi_k}. Frequencies with
  // G(xi_k) == 0 are skipped.
  std::vector<Complex> inverse(std::span<const Complex> frequency_values) const;

 private:
  enum class Direction { kForward, kInverse };
  std::vector<Complex> transform(std::span<const Complex> values, Direction direction) const;

  SpatialGrid spatial_;
  FrequencyGrid frequency_;
  std::vector<Complex> phase_;  // row k: e^{i x_j xi_k}, j = 0..m-1
};

struct EstimatorConfig {
  double gamma = 2.01;
  double t = 1.0;
  SpatialGrid spatial{-150.0, 150.0, 1501};
  FrequencyGrid frequency{4.0, 801};
  Kernel kernel = Kernel::sinc();
  subordination::SolverOptions solver;
  unsigned threads = 1;
};

struct DensityEstimate {
  SpatialGrid grid;
  std::vector<double> values;  // Re(p0_hat) on grid
  double max_abs_imag = 0.0;   // max |Im(p0_hat)|, a discretization diagnostic
  double h = 0.0;
  double gamma = 0.0;
  double t = 0.0;
  std::size_t n = 0;
  std::string kernel;
  double mean_solver_iterations = 0.0;
  int max_solver_iterations = 0;
};

// Stages (1)-(2): the h-independent part of the estimator.
struct ConvolvedSpectrum {
  std::vector<double> convolved;   // (gamma - Im w(x_j + i gamma)) / (pi t)
  std::vector<Complex> spectrum;   // its Riemann Fourier transform on the frequency grid
  std::size_t n = 0;
  double mean_solver_iterations = 0.0;
  int max_solver_iterations = 0;
};

class Deconvolver {
 public:
  // Throws std::invalid_argument unless gamma > 2 sqrt(t).
  explicit Deconvolver(EstimatorConfig config);

  const EstimatorConfig& config() const noexcept { return config_; }
  const FourierQuadrature& quadrature() const noexcept { return *quadrature_; }

  ConvolvedSpectrum prepare(const transforms::WeightedAtomMeasure& measure) const;
  // Stages (3)-(5). Throws std::invalid_argument when xi_max < 1/h.
  DensityEstimate assemble(const ConvolvedSpectrum& prepared, double h) const;
  DensityEstimate estimate(const transforms::WeightedAtomMeasure& measure, double h) const;

 private:
  EstimatorConfig config_;
  std::shared_ptr<const FourierQuadrature> quadrature_;
};

DensityEstimate estimate_p0(const transforms::WeightedAtomMeasure& measure, double h, double gamma, double t,
                            const SpatialGrid& spatial, const FrequencyGrid& frequency,
                            const subordination::SolverOptions& solver = {}, const Kernel& kernel = Kernel::sinc(),
                            unsigned threads = 1);

// Riemann sum over the estimate's grid of (estimate - p0)^2.
double ise(const DensityEstimate& estimate, const std::function<double(double)>& p0);

// Riemann sum of the squared estimate.
double squared_norm(const DensityEstimate& estimate);
// Riemann sum of the product of two estimates on the same grid.
double inner_product(const DensityEstimate& a, const DensityEstimate& b);

// Presentation helper: negative values clipped to 0, then rescaled to unit
// Riemann mass. The core estimator never clips.
DensityEstimate clip_and_renormalize(DensityEstimate estimate);

// CSV `x,p0_hat`.
void write_estimate_csv(std::ostream& out, const DensityEstimate& estimate);
// Keys h, gamma, t, n, grids, kernel, max_abs_imag.
KeyValueDocument estimate_metadata(const DensityEstimate& estimate, const FrequencyGrid& frequency);

}  // namespace fpdeconv::deconv
