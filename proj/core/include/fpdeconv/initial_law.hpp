#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "fpdeconv/rng.hpp"
#include "fpdeconv/transforms.hpp"

namespace fpdeconv::dbm {

using transforms::Complex;

struct CauchyLaw {
  double scale = 1.0;
};

struct GaussianLaw {
  double sd = 1.0;
};

struct PointMassLaw {
  double at = 0.0;
};

// a1 with probability p, a2 otherwise.
struct TwoPointMixtureLaw {
  double a1 = -1.0;
  double a2 = 1.0;
  double p = 0.5;
};

// Extension point: any law given by a sampler plus whatever oracles exist.
struct CustomLaw {
  std::string name;
  std::function<double(Rng&)> sampler;
  std::function<double(double)> density;                // optional
  std::function<double(double)> cdf;                    // optional
  std::function<Complex(Complex)> initial_transform;    // optional, G_{mu0}
  std::function<Complex(Complex, double)> transform_at_time;  // optional, G_{mu0 [+] sigma_t}
};

// Initial distribution mu0 of the diagonal entries of X^n(0). Parameters are
// validated on construction (std::invalid_argument).
class InitialLaw {
 public:
  using Variant = std::variant<CauchyLaw, GaussianLaw, PointMassLaw, TwoPointMixtureLaw, CustomLaw>;

  InitialLaw(CauchyLaw law);
  InitialLaw(GaussianLaw law);
  InitialLaw(PointMassLaw law);
  InitialLaw(TwoPointMixtureLaw law);
  InitialLaw(CustomLaw law);

  const Variant& variant() const noexcept { return law_; }

  double sample(Rng& rng) const;

  // Present only for absolutely continuous laws.
  std::optional<double> density(double x) const;
  std::optional<double> cdf(double x) const;

  // G_{mu0}(z).
  std::optional<Complex> initial_transform(Complex z) const;
  // G_{mu_t}(z) with mu_t = mu0 [+] sigma_t. For the Cauchy family this is
  // G_{sigma_t}(z + i s), by stability of Cauchy laws under free convolution.
  std::optional<Complex> cauchy_transform_at_time(Complex z, double t) const;
  // Density of mu0 * C_alpha (classical convolution with a centered Cauchy law).
  std::optional<double> convolved_density_with_cauchy(double x, double alpha) const;

  // Short identifier, e.g. "cauchy(scale=5)".
  std::string describe() const;

 private:
  Variant law_;
};

}  // namespace fpdeconv::dbm
