#include "fpdeconv/deconv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fpdeconv/errors.hpp"

namespace fpdeconv::deconv {

using transforms::kPi;

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t m) : x_min_(x_min), x_max_(x_max), m_(m) {
  if (m < 2) throw std::invalid_argument("SpatialGrid: need at least 2 points");
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("SpatialGrid: require finite x_min < x_max");
  }
}

double SpatialGrid::point(std::size_t j) const noexcept {
  // Measured from the midpoint so that x_j = -x_{m-1-j} exactly on a
  // symmetric grid; endpoints are hit exactly.
  if (j == 0) return x_min_;
  if (j + 1 == m_) return x_max_;
  const double offset = static_cast<double>(j) - 0.5 * static_cast<double>(m_ - 1);
  return 0.5 * (x_min_ + x_max_) + offset * spacing();
}

std::vector<double> SpatialGrid::points() const {
  std::vector<double> xs(m_);
  for (std::size_t j = 0; j < m_; ++j) xs[j] = point(j);
  return xs;
}

FrequencyGrid::FrequencyGrid(double xi_max, std::size_t m) : xi_max_(xi_max), m_(m) {
  if (m < 2) throw std::invalid_argument("FrequencyGrid: need at least 2 points");
  if (!(xi_max > 0.0) || !std::isfinite(xi_max)) throw std::invalid_argument("FrequencyGrid: xi_max must be > 0");
}

double FrequencyGrid::point(std::size_t k) const noexcept {
  // Symmetric construction: xi_k = -xi_{m-1-k} exactly.
  const double offset = static_cast<double>(k) - 0.5 * static_cast<double>(m_ - 1);
  return offset * spacing();
}

std::vector<double> FrequencyGrid::points() const {
  std::vector<double> xi(m_);
  for (std::size_t k = 0; k < m_; ++k) xi[k] = point(k);
  return xi;
}

Kernel::Kernel(std::string name, std::function<double(double)> fourier, double bound)
    : name_(std::move(name)), fourier_(std::move(fourier)), bound_(bound) {}

Kernel Kernel::sinc() {
  return Kernel("sinc", [](double xi) { return std::abs(xi) <= 1.0 ? 1.0 : 0.0; }, 1.0);
}

Kernel Kernel::custom(std::string name, std::function<double(double)> fourier, double bound) {
  if (!fourier) throw std::invalid_argument("Kernel::custom: Fourier transform required");
  if (!(bound > 0.0) || !std::isfinite(bound)) throw std::invalid_argument("Kernel::custom: bound must be > 0");
  return Kernel(std::move(name), std::move(fourier), bound);
}

double Kernel::fourier(double xi) const {
  if (!(std::abs(xi) <= 1.0)) return 0.0;
  const double value = fourier_(xi);
  if (!(std::abs(value) <= bound_)) {
    std::ostringstream os;
    os << "kernel '" << name_ << "': |K*(" << xi << ")| = " << std::abs(value) << " exceeds C_K = " << bound_;
    throw std::domain_error(os.str());
  }
  return value;
}

double kernel_ft(const Kernel& kernel, double xi) { return kernel.fourier(xi); }

Complex riemann_fourier(std::span<const double> samples, const SpatialGrid& grid, double xi) {
  if (samples.size() != grid.size()) throw std::invalid_argument("riemann_fourier: sample count != grid size");
  Complex sum = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) sum += samples[j] * std::polar(1.0, grid.point(j) * xi);
  return grid.spacing() * sum;
}

FourierQuadrature::FourierQuadrature(SpatialGrid spatial, FrequencyGrid frequency)
    : spatial_(spatial), frequency_(frequency), phase_(spatial.size() * frequency.size()) {
  const auto xs = spatial_.points();
  const auto xis = frequency_.points();
  for (std::size_t k = 0; k < xis.size(); ++k) {
    Complex* row = phase_.data() + k * xs.size();
    for (std::size_t j = 0; j < xs.size(); ++j) row[j] = std::polar(1.0, xs[j] * xis[k]);
  }
}

std::vector<Complex> FourierQuadrature::forward(std::span<const Complex> spatial_values) const {
  return transform(spatial_values, Direction::kForward);
}

std::vector<Complex> FourierQuadrature::forward(std::span<const double> spatial_values) const {
  std::vector<Complex> values(spatial_values.begin(), spatial_values.end());
  return transform(values, Direction::kForward);
}

std::vector<Complex> FourierQuadrature::inverse(std::span<const Complex> frequency_values) const {
  return transform(frequency_values, Direction::kInverse);
}

std::vector<Complex> FourierQuadrature::transform(std::span<const Complex> values, Direction direction) const {
  const std::size_t m = spatial_.size();
  const std::size_t mf = frequency_.size();
  if (direction == Direction::kForward) {
    if (values.size() != m) throw std::invalid_argument("FourierQuadrature::forward: size mismatch");
    std::vector<Complex> out(mf);
    const double weight = spatial_.spacing();
    for (std::size_t k = 0; k < mf; ++k) {
      const Complex* row = phase_.data() + k * m;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) sum += values[j] * row[j];
      out[k] = weight * sum;
    }
    return out;
  }
  if (values.size() != mf) throw std::invalid_argument("FourierQuadrature::inverse: size mismatch");
  std::vector<Complex> out(m, Complex(0.0));
  const double weight = frequency_.spacing() / (2.0 * kPi);
  for (std::size_t k = 0; k < mf; ++k) {
    const Complex v = values[k];
    if (v == Complex(0.0)) continue;
    const Complex* row = phase_.data() + k * m;
    for (std::size_t j = 0; j < m; ++j) out[j] += v * std::conj(row[j]);
  }
  for (auto& o : out) o *= weight;
  return out;
}

Deconvolver::Deconvolver(EstimatorConfig config)
    : config_(std::move(config)),
      quadrature_(std::make_shared<const FourierQuadrature>(config_.spatial, config_.frequency)) {
  if (!(config_.t > 0.0)) throw std::invalid_argument("Deconvolver: t must be > 0");
  if (!(config_.gamma > 2.0 * std::sqrt(config_.t))) {
    std::ostringstream os;
    os << "Deconvolver: gamma = " << config_.gamma << " must exceed 2 sqrt(t) = " << 2.0 * std::sqrt(config_.t);
    throw std::invalid_argument(os.str());
  }
}

ConvolvedSpectrum Deconvolver::prepare(const transforms::WeightedAtomMeasure& measure) const {
  const auto xs = config_.spatial.points();
  auto grid = subordination::convolved_density_on(measure, xs, config_.gamma, config_.t, config_.solver,
                                                  config_.threads);
  ConvolvedSpectrum prepared;
  prepared.spectrum = quadrature_->forward(std::span<const double>(grid.values));
  prepared.convolved = std::move(grid.values);
  prepared.n = measure.size();
  prepared.mean_solver_iterations = grid.mean_iterations;
  prepared.max_solver_iterations = grid.max_iterations;
  return prepared;
}

DensityEstimate Deconvolver::assemble(const ConvolvedSpectrum& prepared, double h) const {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth h must be > 0");
  const auto& freq = config_.frequency;
  if (freq.xi_max() < 1.0 / h) {
    std::ostringstream os;
    os << "frequency grid too narrow: xi_max = " << freq.xi_max() << " < 1/h = " << 1.0 / h;
    throw std::invalid_argument(os.str());
  }
  if (prepared.spectrum.size() != freq.size()) throw std::invalid_argument("assemble: spectrum size mismatch");

  std::vector<Complex> regularized(freq.size());
  for (std::size_t k = 0; k < freq.size(); ++k) {
    const double xi = freq.point(k);
    const double kstar = config_.kernel.fourier(h * xi);
    if (kstar == 0.0) continue;
    regularized[k] = std::exp(config_.gamma * std::abs(xi)) * kstar * prepared.spectrum[k];
  }
  const auto inverse = quadrature_->inverse(regularized);

  DensityEstimate estimate{config_.spatial, {}, 0.0, h, config_.gamma, config_.t, prepared.n,
                           config_.kernel.name(), prepared.mean_solver_iterations,
                           prepared.max_solver_iterations};
  estimate.values.resize(inverse.size());
  for (std::size_t j = 0; j < inverse.size(); ++j) {
    estimate.values[j] = inverse[j].real();
    estimate.max_abs_imag = std::max(estimate.max_abs_imag, std::abs(inverse[j].imag()));
    if (!std::isfinite(estimate.values[j])) throw NumericalError("estimate_p0: non-finite density value");
  }
  return estimate;
}

DensityEstimate Deconvolver::estimate(const transforms::WeightedAtomMeasure& measure, double h) const {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth h must be > 0");
  if (config_.frequency.xi_max() < 1.0 / h) {
    throw std::invalid_argument("frequency grid too narrow: xi_max < 1/h");
  }
  return assemble(prepare(measure), h);
}

DensityEstimate estimate_p0(const transforms::WeightedAtomMeasure& measure, double h, double gamma, double t,
                            const SpatialGrid& spatial, const FrequencyGrid& frequency,
                            const subordination::SolverOptions& solver, const Kernel& kernel, unsigned threads) {
  EstimatorConfig config{gamma, t, spatial, frequency, kernel, solver, threads};
  return Deconvolver(std::move(config)).estimate(measure, h);
}

double ise(const DensityEstimate& estimate, const std::function<double(double)>& p0) {
  double sum = 0.0;
  for (std::size_t j = 0; j < estimate.values.size(); ++j) {
    const double diff = estimate.values[j] - p0(estimate.grid.point(j));
    sum += diff * diff;
  }
  return estimate.grid.spacing() * sum;
}

double squared_norm(const DensityEstimate& estimate) { return inner_product(estimate, estimate); }

double inner_product(const DensityEstimate& a, const DensityEstimate& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("inner_product: grid mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) sum += a.values[j] * b.values[j];
  return a.grid.spacing() * sum;
}

DensityEstimate clip_and_renormalize(DensityEstimate estimate) {
  double mass = 0.0;
  for (double& v : estimate.values) {
    v = std::max(v, 0.0);
    mass += v;
  }
  mass *= estimate.grid.spacing();
  if (mass > 0.0) {
    for (double& v : estimate.values) v /= mass;
  }
  return estimate;
}

void write_estimate_csv(std::ostream& out, const DensityEstimate& estimate) {
  out << "x,p0_hat\n";
  for (std::size_t j = 0; j < estimate.values.size(); ++j) {
    out << format_double(estimate.grid.point(j)) << ',' << format_double(estimate.values[j]) << '\n';
  }
}

KeyValueDocument estimate_metadata(const DensityEstimate& estimate, const FrequencyGrid& frequency) {
  KeyValueDocument meta;
  meta.set("h", estimate.h);
  meta.set("gamma", estimate.gamma);
  meta.set("t", estimate.t);
  meta.set("n", static_cast<unsigned long long>(estimate.n));
  meta.set("x_min", estimate.grid.x_min());
  meta.set("x_max", estimate.grid.x_max());
  meta.set("x_points", static_cast<unsigned long long>(estimate.grid.size()));
  meta.set("xi_max", frequency.xi_max());
  meta.set("xi_points", static_cast<unsigned long long>(frequency.size()));
  meta.set("kernel", estimate.kernel);
  meta.set("max_abs_imag", estimate.max_abs_imag);
  return meta;
}

}  // namespace fpdeconv::deconv
