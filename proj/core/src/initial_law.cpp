#include "fpdeconv/initial_law.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fpdeconv::dbm {

namespace {

using transforms::kPi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double cauchy_density(double x, double scale) { return scale / (kPi * (x * x + scale * scale)); }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

InitialLaw::InitialLaw(CauchyLaw law) : law_(law) {
  require(law.scale > 0.0 && std::isfinite(law.scale), "CauchyLaw: scale must be > 0");
}

InitialLaw::InitialLaw(GaussianLaw law) : law_(law) {
  require(law.sd > 0.0 && std::isfinite(law.sd), "GaussianLaw: sd must be > 0");
}

InitialLaw::InitialLaw(PointMassLaw law) : law_(law) {
  require(std::isfinite(law.at), "PointMassLaw: location must be finite");
}

InitialLaw::InitialLaw(TwoPointMixtureLaw law) : law_(law) {
  require(std::isfinite(law.a1) && std::isfinite(law.a2), "TwoPointMixtureLaw: atoms must be finite");
  require(law.p >= 0.0 && law.p <= 1.0, "TwoPointMixtureLaw: p must lie in [0, 1]");
}

InitialLaw::InitialLaw(CustomLaw law) : law_(std::move(law)) {
  const auto& custom = std::get<CustomLaw>(law_);
  require(static_cast<bool>(custom.sampler), "CustomLaw: a sampler is required");
  require(!custom.name.empty(), "CustomLaw: a name is required");
}

double InitialLaw::sample(Rng& rng) const {
  return std::visit(
      Overloaded{
          [&](const CauchyLaw& l) { return std::cauchy_distribution<double>(0.0, l.scale)(rng); },
          [&](const GaussianLaw& l) { return std::normal_distribution<double>(0.0, l.sd)(rng); },
          [&](const PointMassLaw& l) { return l.at; },
          [&](const TwoPointMixtureLaw& l) {
            return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < l.p ? l.a1 : l.a2;
          },
          [&](const CustomLaw& l) { return l.sampler(rng); },
      },
      law_);
}

std::optional<double> InitialLaw::density(double x) const {
  return std::visit(
      Overloaded{
          [&](const CauchyLaw& l) -> std::optional<double> { return cauchy_density(x, l.scale); },
          [&](const GaussianLaw& l) -> std::optional<double> {
            const double u = x / l.sd;
            return std::exp(-0.5 * u * u) / (l.sd * std::sqrt(2.0 * kPi));
          },
          [](const PointMassLaw&) -> std::optional<double> { return std::nullopt; },
          [](const TwoPointMixtureLaw&) -> std::optional<double> { return std::nullopt; },
          [&](const CustomLaw& l) -> std::optional<double> {
            if (!l.density) return std::nullopt;
            return l.density(x);
          },
      },
      law_);
}

std::optional<double> InitialLaw::cdf(double x) const {
  return std::visit(
      Overloaded{
          [&](const CauchyLaw& l) -> std::optional<double> { return 0.5 + std::atan(x / l.scale) / kPi; },
          [&](const GaussianLaw& l) -> std::optional<double> {
            return 0.5 * std::erfc(-x / (l.sd * std::sqrt(2.0)));
          },
          [&](const PointMassLaw& l) -> std::optional<double> { return x >= l.at ? 1.0 : 0.0; },
          [&](const TwoPointMixtureLaw& l) -> std::optional<double> {
            return (x >= l.a1 ? l.p : 0.0) + (x >= l.a2 ? 1.0 - l.p : 0.0);
          },
          [&](const CustomLaw& l) -> std::optional<double> {
            if (!l.cdf) return std::nullopt;
            return l.cdf(x);
          },
      },
      law_);
}

std::optional<Complex> InitialLaw::initial_transform(Complex z) const {
  return std::visit(
      Overloaded{
          [&](const CauchyLaw& l) -> std::optional<Complex> { return 1.0 / (z + Complex(0.0, l.scale)); },
          [](const GaussianLaw&) -> std::optional<Complex> { return std::nullopt; },
          [&](const PointMassLaw& l) -> std::optional<Complex> { return 1.0 / (z - l.at); },
          [&](const TwoPointMixtureLaw& l) -> std::optional<Complex> {
            return l.p / (z - l.a1) + (1.0 - l.p) / (z - l.a2);
          },
          [&](const CustomLaw& l) -> std::optional<Complex> {
            if (!l.initial_transform) return std::nullopt;
            return l.initial_transform(z);
          },
      },
      law_);
}

std::optional<Complex> InitialLaw::cauchy_transform_at_time(Complex z, double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("cauchy_transform_at_time: t must be > 0");
  const transforms::SemicircleLaw semicircle(t);
  return std::visit(
      Overloaded{
          [&](const CauchyLaw& l) -> std::optional<Complex> {
            return semicircle.cauchy(transforms::UpperHalfPoint(z + Complex(0.0, l.scale)));
          },
          [](const GaussianLaw&) -> std::optional<Complex> { return std::nullopt; },
          [&](const PointMassLaw& l) -> std::optional<Complex> {
            return semicircle.cauchy(transforms::UpperHalfPoint(z - l.at));
          },
          [](const TwoPointMixtureLaw&) -> std::optional<Complex> { return std::nullopt; },
          [&](const CustomLaw& l) -> std::optional<Complex> {
            if (!l.transform_at_time) return std::nullopt;
            return l.transform_at_time(z, t);
          },
      },
      law_);
}

std::optional<double> InitialLaw::convolved_density_with_cauchy(double x, double alpha) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("convolved_density_with_cauchy: alpha must be > 0");
  // f_{mu * C_alpha}(x) = -Im G_mu(x + i alpha) / pi whenever G_mu is known.
  const auto g = initial_transform(Complex(x, alpha));
  if (!g) return std::nullopt;
  return -g->imag() / kPi;
}

std::string InitialLaw::describe() const {
  return std::visit(
      Overloaded{
          [](const CauchyLaw& l) { return "cauchy(scale=" + format_number(l.scale) + ")"; },
          [](const GaussianLaw& l) { return "gaussian(sd=" + format_number(l.sd) + ")"; },
          [](const PointMassLaw& l) { return "point(at=" + format_number(l.at) + ")"; },
          [](const TwoPointMixtureLaw& l) {
            return "two_point(a1=" + format_number(l.a1) + ",a2=" + format_number(l.a2) +
                   ",p=" + format_number(l.p) + ")";
          },
          [](const CustomLaw& l) { return "custom(" + l.name + ")"; },
      },
      law_);
}

}  // namespace fpdeconv::dbm
