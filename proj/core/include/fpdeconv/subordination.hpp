#pragma once

// Subordination fixed points for deconvolution by the semicircle law.
//
// For z with Im(z) > 2 sqrt(t) the subordination function w_fp(z) solves
//   w = z + t G_{mu_t}(w),
// and recovers the initial law through G_{mu0}(z) = (w_fp(z) - z) / t. The
// empirical solver replaces G_{mu_t} by the Cauchy transform of the observed
// spectrum; the oracle solver iterates the map
//   L_z(w) = t G_{sigma_t}(w + 1/G_{mu_t}(w) - z) + z
// given a closed-form G_{mu_t}. Both iterations start at w0 = z and stay in
// {Im(w) > Im(z)/2, |w - z| <= sqrt(t)}.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fpdeconv/transforms.hpp"

namespace fpdeconv::subordination {

using transforms::Complex;
using transforms::UpperHalfPoint;
using transforms::WeightedAtomMeasure;

enum class Acceleration {
  kNone,
  // Newton steps on w - z - t G(w) = 0, falling back to the plain map when a
  // Newton step leaves {Im(w) > Im(z)/2}. Empirical solver only.
  kNewton,
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  Acceleration acceleration = Acceleration::kNone;
  // Overrides the starting point w0 = z; must satisfy Im(w0) > Im(z)/2.
  std::optional<Complex> initial = std::nullopt;
  // Called with (iteration, iterate) after each update.
  std::function<void(int, Complex)> observer;
};

struct SubordinationResult {
  UpperHalfPoint z;
  Complex w;
  int iterations = 0;
  double residual = 0.0;  // |L(w) - w| at the returned iterate
  double t = 0.0;
};

using TransformEvaluator = std::function<Complex(Complex)>;

// Throws std::domain_error when Im(z) <= 2 sqrt(t), std::invalid_argument on
// bad options and NonConvergenceError when max_iter is exhausted.
SubordinationResult solve_empirical(const WeightedAtomMeasure& measure, UpperHalfPoint z, double t,
                                    const SolverOptions& options = {});

// Additionally throws NumericalError if Im(w + 1/G(w) - z) <= 0 along the
// iteration, which cannot happen for a genuine Cauchy transform.
SubordinationResult solve_oracle(const TransformEvaluator& g_mu_t, UpperHalfPoint z, double t,
                                 const SolverOptions& options = {});

// G_{mu0}(z) = (w - z) / t.
Complex recover_initial_transform(const SubordinationResult& result);

// (gamma - Im w(x + i gamma)) / (pi t): the density of mu0 * C_gamma at x,
// estimated from the empirical fixed point.
double convolved_density_at(const WeightedAtomMeasure& measure, double x, double gamma, double t,
                            const SolverOptions& options = {});

struct ConvolvedDensityGrid {
  std::vector<double> values;
  int max_iterations = 0;
  double mean_iterations = 0.0;
};

// convolved_density_at over many points, parallel across points.
ConvolvedDensityGrid convolved_density_on(const WeightedAtomMeasure& measure, std::span<const double> xs,
                                          double gamma, double t, const SolverOptions& options = {},
                                          unsigned threads = 1);

}  // namespace fpdeconv::subordination
