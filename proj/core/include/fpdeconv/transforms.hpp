#pragma once

// Complex-analytic building blocks: the Im >= 0 square root, the semicircle
// law, and Cauchy (Stieltjes) transforms G(z) = \int dmu(x) / (z - x) for
// closed-form and atomic measures.

#include <complex>
#include <span>
#include <vector>

namespace fpdeconv::transforms {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// A point of the open upper half-plane.
class UpperHalfPoint {
 public:
  // Throws std::invalid_argument unless im > 0 and both parts are finite.
  UpperHalfPoint(double re, double im);
  explicit UpperHalfPoint(Complex z) : UpperHalfPoint(z.real(), z.imag()) {}

  double re() const noexcept { return re_; }
  double im() const noexcept { return im_; }
  Complex value() const noexcept { return {re_, im_}; }

 private:
  double re_;
  double im_;
};

// Square root with Im(result) >= 0 on the whole plane. On the upper half-plane
// this is the principal branch a + ib with a = sqrt((|z|+u)/2) and
// b = sqrt((|z|-u)/2); below the real axis a takes the sign of Im(z).
Complex principal_sqrt(Complex z) noexcept;

class SemicircleLaw {
 public:
  // Variance parameter t > 0; support [-2 sqrt(t), 2 sqrt(t)].
  explicit SemicircleLaw(double t);

  double t() const noexcept { return t_; }
  double edge() const noexcept;
  double density(double x) const noexcept;
  double cdf(double x) const noexcept;
  // G(z) = (z - sqrt(z^2 - 4t)) / (2t).
  Complex cauchy(UpperHalfPoint z) const noexcept;

 private:
  double t_;
};

Complex semicircle_cauchy(UpperHalfPoint z, double t);
double semicircle_density(double x, double t);

// Finite measure sum_j w_j delta_{a_j} with nonnegative weights summing to 1.
class WeightedAtomMeasure {
 public:
  // Uniform weights 1/n on `atoms` (the empirical measure of a sample).
  static WeightedAtomMeasure uniform(std::vector<double> atoms);
  // Throws std::invalid_argument on size mismatch, negative weights, or a
  // total mass differing from 1 by more than 1e-12.
  WeightedAtomMeasure(std::vector<double> atoms, std::vector<double> weights);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool is_uniform() const noexcept { return uniform_; }
  // Compensated (Neumaier) sum of the weights.
  double total_mass() const noexcept;

 private:
  WeightedAtomMeasure() = default;

  std::vector<double> atoms_;
  std::vector<double> weights_;
  bool uniform_ = false;
};

// sum_j w_j / (z - a_j). Accepts any z off the real line.
Complex empirical_cauchy(const WeightedAtomMeasure& m, Complex z) noexcept;
inline Complex empirical_cauchy(const WeightedAtomMeasure& m, UpperHalfPoint z) noexcept {
  return empirical_cauchy(m, z.value());
}

// Cauchy transform of the centered Cauchy law with scale s: 1 / (z + i s).
Complex cauchy_law_transform(UpperHalfPoint z, double s);

// F = 1 / G. Throws std::domain_error when |g| < 1e-300.
Complex reciprocal_f(Complex g);

}  // namespace fpdeconv::transforms
