#include "fpdeconv/subordination.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpdeconv/errors.hpp"
#include "fpdeconv/parallel.hpp"

namespace fpdeconv::subordination {

namespace {

void validate(UpperHalfPoint z, double t, const SolverOptions& options) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("subordination: t must be > 0");
  if (!(z.im() > 2.0 * std::sqrt(t))) {
    std::ostringstream os;
    os << "subordination: Im(z) = " << z.im() << " must exceed 2 sqrt(t) = " << 2.0 * std::sqrt(t);
    throw std::domain_error(os.str());
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("subordination: tol must be > 0");
  if (options.max_iter < 1) throw std::invalid_argument("subordination: max_iter must be >= 1");
  if (options.initial && !(options.initial->imag() > 0.5 * z.im())) {
    throw std::invalid_argument("subordination: initial iterate must satisfy Im(w0) > Im(z)/2");
  }
}

[[noreturn]] void fail_to_converge(const char* solver, UpperHalfPoint z, double t, double residual, int iterations) {
  std::ostringstream os;
  os << solver << ": no convergence after " << iterations << " iterations at z = (" << z.re() << ", "
     << z.im() << "), t = " << t << "; last residual " << residual;
  throw NonConvergenceError(os.str(), residual, iterations);
}

// G(w) and G'(w) of an atomic measure in one pass.
std::pair<Complex, Complex> transform_and_derivative(const WeightedAtomMeasure& m, Complex w) {
  const auto atoms = m.atoms();
  const auto weights = m.weights();
  Complex g = 0.0;
  Complex dg = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const Complex inv = 1.0 / (w - atoms[j]);
    g += weights[j] * inv;
    dg -= weights[j] * inv * inv;
  }
  return {g, dg};
}

}  // namespace

SubordinationResult solve_empirical(const WeightedAtomMeasure& measure, UpperHalfPoint z, double t,
                                    const SolverOptions& options) {
  validate(z, t, options);
  const Complex zv = z.value();
  Complex w = options.initial.value_or(zv);
  double residual = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= options.max_iter; ++k) {
    Complex next;
    if (options.acceleration == Acceleration::kNewton) {
      const auto [g, dg] = transform_and_derivative(measure, w);
      const Complex mapped = zv + t * g;
      next = w - (w - mapped) / (1.0 - t * dg);
      if (!(next.imag() > 0.5 * z.im()) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
        next = mapped;
      }
    } else {
      next = zv + t * transforms::empirical_cauchy(measure, w);
    }
    residual = std::abs(next - w);
    w = next;
    if (options.observer) options.observer(k, w);
    if (residual <= options.tol) {
      return SubordinationResult{z, w, k, std::abs(zv + t * transforms::empirical_cauchy(measure, w) - w), t};
    }
  }
  fail_to_converge("solve_empirical", z, t, residual, options.max_iter);
}

SubordinationResult solve_oracle(const TransformEvaluator& g_mu_t, UpperHalfPoint z, double t,
                                 const SolverOptions& options) {
  validate(z, t, options);
  const transforms::SemicircleLaw semicircle(t);
  const Complex zv = z.value();

  auto map = [&](Complex w) {
    const Complex shifted = w + transforms::reciprocal_f(g_mu_t(w)) - zv;
    if (!(shifted.imag() > 0.0)) {
      std::ostringstream os;
      os << "solve_oracle: Im(w + F(w) - z) = " << shifted.imag()
         << " <= 0; the supplied evaluator is not a Cauchy transform";
      throw NumericalError(os.str());
    }
    return t * semicircle.cauchy(UpperHalfPoint(shifted)) + zv;
  };

  Complex w = options.initial.value_or(zv);
  double residual = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= options.max_iter; ++k) {
    const Complex next = map(w);
    residual = std::abs(next - w);
    w = next;
    if (options.observer) options.observer(k, w);
    if (residual <= options.tol) return SubordinationResult{z, w, k, std::abs(map(w) - w), t};
  }
  fail_to_converge("solve_oracle", z, t, residual, options.max_iter);
}

Complex recover_initial_transform(const SubordinationResult& result) {
  return (result.w - result.z.value()) / result.t;
}

double convolved_density_at(const WeightedAtomMeasure& measure, double x, double gamma, double t,
                            const SolverOptions& options) {
  const auto result = solve_empirical(measure, UpperHalfPoint(x, gamma), t, options);
  return (gamma - result.w.imag()) / (transforms::kPi * t);
}

ConvolvedDensityGrid convolved_density_on(const WeightedAtomMeasure& measure, std::span<const double> xs,
                                          double gamma, double t, const SolverOptions& options,
                                          unsigned threads) {
  ConvolvedDensityGrid grid;
  grid.values.resize(xs.size());
  std::vector<int> iterations(xs.size());
  parallel_for(xs.size(), threads, [&](std::size_t i) {
    const auto result = solve_empirical(measure, UpperHalfPoint(xs[i], gamma), t, options);
    grid.values[i] = (gamma - result.w.imag()) / (transforms::kPi * t);
    iterations[i] = result.iterations;
  });
  long long total = 0;
  for (int it : iterations) {
    total += it;
    grid.max_iterations = std::max(grid.max_iterations, it);
  }
  grid.mean_iterations = xs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(xs.size());
  return grid;
}

}  // namespace fpdeconv::subordination
