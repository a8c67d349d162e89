#include "fpdeconv/transforms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpdeconv::transforms {

UpperHalfPoint::UpperHalfPoint(double re, double im) : re_(re), im_(im) {
  if (!std::isfinite(re) || !std::isfinite(im) || !(im > 0.0)) {
    throw std::invalid_argument("UpperHalfPoint: imaginary part must be finite and > 0, got " +
                                std::to_string(im));
  }
}

Complex principal_sqrt(Complex z) noexcept {
  const double u = z.real();
  const double v = z.imag();
  const double modulus = std::hypot(u, v);
  if (modulus == 0.0) return {0.0, 0.0};
  // Compute the larger of |a|, b directly and recover the other from
  // a * b = v / 2 to avoid cancellation.
  double a = 0.0;
  double b = 0.0;
  if (u >= 0.0) {
    a = std::sqrt(0.5 * (modulus + u));
    b = std::abs(v) / (2.0 * a);
  } else {
    b = std::sqrt(0.5 * (modulus - u));
    a = std::abs(v) / (2.0 * b);
  }
  return {std::signbit(v) ? -a : a, b};
}

SemicircleLaw::SemicircleLaw(double t) : t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("SemicircleLaw: t must be > 0");
  }
}

double SemicircleLaw::edge() const noexcept { return 2.0 * std::sqrt(t_); }

double SemicircleLaw::density(double x) const noexcept {
  const double r = 4.0 * t_ - x * x;
  if (r <= 0.0) return 0.0;
  return std::sqrt(r) / (2.0 * kPi * t_);
}

double SemicircleLaw::cdf(double x) const noexcept {
  const double e = edge();
  if (x <= -e) return 0.0;
  if (x >= e) return 1.0;
  return 0.5 + x * std::sqrt(4.0 * t_ - x * x) / (4.0 * kPi * t_) + std::asin(x / e) / kPi;
}

Complex SemicircleLaw::cauchy(UpperHalfPoint z) const noexcept {
  const Complex w = z.value();
  return (w - principal_sqrt(w * w - 4.0 * t_)) / (2.0 * t_);
}

Complex semicircle_cauchy(UpperHalfPoint z, double t) { return SemicircleLaw(t).cauchy(z); }

double semicircle_density(double x, double t) { return SemicircleLaw(t).density(x); }

WeightedAtomMeasure WeightedAtomMeasure::uniform(std::vector<double> atoms) {
  if (atoms.empty()) throw std::invalid_argument("WeightedAtomMeasure: no atoms");
  WeightedAtomMeasure m;
  const double w = 1.0 / static_cast<double>(atoms.size());
  m.weights_.assign(atoms.size(), w);
  m.atoms_ = std::move(atoms);
  m.uniform_ = true;
  return m;
}

WeightedAtomMeasure::WeightedAtomMeasure(std::vector<double> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) {
    throw std::invalid_argument("WeightedAtomMeasure: atoms and weights must be non-empty and of equal size");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("WeightedAtomMeasure: negative weight");
  }
  if (std::abs(total_mass() - 1.0) > 1e-12) {
    throw std::invalid_argument("WeightedAtomMeasure: weights must sum to 1");
  }
}

double WeightedAtomMeasure::total_mass() const noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double w : weights_) {
    const double next = sum + w;
    if (std::abs(sum) >= std::abs(w)) {
      carry += (sum - next) + w;
    } else {
      carry += (w - next) + sum;
    }
    sum = next;
  }
  return sum + carry;
}

Complex empirical_cauchy(const WeightedAtomMeasure& m, Complex z) noexcept {
  // 1/(z - a) = (x - a - i y) / ((x - a)^2 + y^2), accumulated in real
  // arithmetic so the loop vectorizes.
  const double x = z.real();
  const double y = z.imag();
  const double y2 = y * y;
  const auto atoms = m.atoms();
  double re = 0.0;
  double im = 0.0;
  if (m.is_uniform()) {
    for (double a : atoms) {
      const double dx = x - a;
      const double inv = 1.0 / (dx * dx + y2);
      re += dx * inv;
      im += inv;
    }
    const double w = m.weights()[0];
    return {w * re, -w * y * im};
  }
  const auto weights = m.weights();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double dx = x - atoms[j];
    const double inv = weights[j] / (dx * dx + y2);
    re += dx * inv;
    im += inv;
  }
  return {re, -y * im};
}

Complex cauchy_law_transform(UpperHalfPoint z, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("cauchy_law_transform: scale must be > 0");
  return 1.0 / (z.value() + Complex(0.0, s));
}

Complex reciprocal_f(Complex g) {
  if (std::abs(g) < 1e-300) {
    throw std::domain_error("reciprocal_f: Cauchy transform value vanishes (|g| < 1e-300)");
  }
  return 1.0 / g;
}

}  // namespace fpdeconv::transforms
