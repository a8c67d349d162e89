#include "fpdeconv/dbm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fpdeconv/errors.hpp"

namespace fpdeconv::dbm {

namespace {

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& matrix, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver failed on " << what << " (n=" << matrix.rows()
       << ", frobenius_norm=" << matrix.norm() << ", all_finite=" << matrix.allFinite() << ")";
    throw NumericalError(os.str());
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end());
  return out;
}

void validate_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("simulation time t must be > 0");
}

double min_gap(std::span<const double> sorted) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
  return gap;
}

class SdeIntegrator {
 public:
  SdeIntegrator(std::vector<double> state, Rng& rng, const SdeOptions& options)
      : state_(std::move(state)),
        rng_(rng),
        options_(options),
        inv_n_(1.0 / static_cast<double>(state_.size())),
        inv_sqrt_n_(1.0 / std::sqrt(static_cast<double>(state_.size()))),
        drift_(state_.size()),
        trial_(state_.size()) {}

  void advance(double dt) {
    std::vector<double> dw(state_.size());
    const double sd = std::sqrt(dt);
    for (double& x : dw) x = sd * normal_(rng_);
    advance(dt, dw, 0);
  }

  std::vector<double> release() && { return std::move(state_); }

 private:
  void advance(double dt, const std::vector<double>& dw, int depth) {
    if (try_step(dt, dw)) return;
    if (depth >= options_.max_halvings) {
      std::ostringstream os;
      os << "SDE backend: particle collision persists after " << options_.max_halvings
         << " step halvings (dt=" << dt << "); increase the number of steps";
      throw NumericalError(os.str());
    }
    // Brownian bridge: split the increment over [0, dt] at dt / 2.
    const double half = 0.5 * dt;
    const double bridge_sd = 0.5 * std::sqrt(dt);
    std::vector<double> first(dw.size());
    std::vector<double> second(dw.size());
    for (std::size_t i = 0; i < dw.size(); ++i) {
      first[i] = 0.5 * dw[i] + bridge_sd * normal_(rng_);
      second[i] = dw[i] - first[i];
    }
    advance(half, first, depth + 1);
    advance(half, second, depth + 1);
  }

  bool try_step(double dt, const std::vector<double>& dw) {
    const std::size_t n = state_.size();
    std::fill(drift_.begin(), drift_.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double inv = 1.0 / (state_[i] - state_[j]);
        drift_[i] += inv;
        drift_[j] -= inv;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      trial_[i] = state_[i] + inv_n_ * drift_[i] * dt + inv_sqrt_n_ * dw[i];
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(trial_[i] - trial_[i - 1] >= options_.collision_floor)) return false;
    }
    state_.swap(trial_);
    return true;
  }

  std::vector<double> state_;
  Rng& rng_;
  SdeOptions options_;
  double inv_n_;
  double inv_sqrt_n_;
  std::vector<double> drift_;
  std::vector<double> trial_;
  std::normal_distribution<double> normal_;
};

}  // namespace

std::string to_string(Backend backend) { return backend == Backend::kMatrix ? "matrix" : "sde"; }

Backend backend_from_string(const std::string& name) {
  if (name == "matrix") return Backend::kMatrix;
  if (name == "sde") return Backend::kSde;
  throw std::invalid_argument("unknown backend '" + name + "' (expected matrix or sde)");
}

std::vector<double> SpectralSample::initial_order_statistics() const {
  std::vector<double> sorted = initial_values;
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

std::vector<double> sample_initial(const InitialLaw& law, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_initial: n must be >= 1");
  std::vector<double> draws(n);
  for (double& d : draws) d = law.sample(rng);
  std::sort(draws.begin(), draws.end());
  return draws;
}

SpectralSample simulate_dyson_matrix_from(std::vector<double> initial_values, double t, Rng& rng,
                                          const MatrixOptions& options) {
  validate_time(t);
  const std::size_t n = initial_values.size();
  if (n == 0) throw std::invalid_argument("simulate_dyson_matrix: n must be >= 1");

  // Only the lower triangle is read by the eigensolver.
  Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  draw_hermitian_brownian(n, t, rng, [&matrix](std::size_t row, std::size_t col, std::complex<double> value) {
    matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = value;
  });

  SpectralSample sample;
  sample.n = n;
  sample.t = t;
  sample.backend = Backend::kMatrix;
  if (options.record_eta_star) {
    const auto h_values = hermitian_eigenvalues(matrix, "H^n(t)");
    sample.eta_star = std::max(std::abs(h_values.front()), std::abs(h_values.back()));
  }

  std::vector<double> ordered = initial_values;
  std::sort(ordered.begin(), ordered.end());
  for (Eigen::Index k = 0; k < matrix.cols(); ++k) matrix(k, k) += ordered[static_cast<std::size_t>(k)];

  sample.eigenvalues = hermitian_eigenvalues(matrix, "X^n(0) + H^n(t)");
  sample.initial_values = std::move(initial_values);
  return sample;
}

SpectralSample simulate_dyson_matrix(const InitialLaw& law, std::size_t n, double t, Rng& rng,
                                     const MatrixOptions& options) {
  if (n == 0) throw std::invalid_argument("simulate_dyson_matrix: n must be >= 1");
  validate_time(t);
  std::vector<double> draws(n);
  for (double& d : draws) d = law.sample(rng);
  return simulate_dyson_matrix_from(std::move(draws), t, rng, options);
}

SpectralSample simulate_dyson_sde_from(std::vector<double> initial_values, double t, Rng& rng,
                                       const SdeOptions& options) {
  validate_time(t);
  const std::size_t n = initial_values.size();
  if (n == 0) throw std::invalid_argument("simulate_dyson_sde: n must be >= 1");
  if (options.steps == 0) throw std::invalid_argument("simulate_dyson_sde: steps must be >= 1");

  std::vector<double> state = initial_values;
  std::sort(state.begin(), state.end());
  const double dt = t / static_cast<double>(options.steps);
  if (n > 1) {
    const double gap = min_gap(state);
    if (!(dt < 0.25 * gap * gap)) {
      std::ostringstream os;
      os << "simulate_dyson_sde: dt = " << dt << " is not below (min initial gap)^2 / 4 = "
         << 0.25 * gap * gap << "; use more steps";
      throw std::invalid_argument(os.str());
    }
  }

  SdeIntegrator integrator(std::move(state), rng, options);
  for (std::size_t step = 0; step < options.steps; ++step) integrator.advance(dt);

  SpectralSample sample;
  sample.n = n;
  sample.t = t;
  sample.backend = Backend::kSde;
  sample.eigenvalues = std::move(integrator).release();
  sample.initial_values = std::move(initial_values);
  return sample;
}

SpectralSample simulate_dyson_sde(const InitialLaw& law, std::size_t n, double t, Rng& rng,
                                  const SdeOptions& options) {
  if (n == 0) throw std::invalid_argument("simulate_dyson_sde: n must be >= 1");
  std::vector<double> draws(n);
  for (double& d : draws) d = law.sample(rng);
  return simulate_dyson_sde_from(std::move(draws), t, rng, options);
}

SpectralSample simulate(const InitialLaw& law, std::size_t n, double t, std::uint64_t seed,
                        std::uint64_t replicate, const SimulationOptions& options) {
  Rng rng = make_stream(seed, replicate);
  SpectralSample sample = options.backend == Backend::kMatrix
                              ? simulate_dyson_matrix(law, n, t, rng, options.matrix)
                              : simulate_dyson_sde(law, n, t, rng, options.sde);
  sample.seed = seed;
  sample.replicate = replicate;
  sample.law = law.describe();
  return sample;
}

transforms::WeightedAtomMeasure empirical_measure(const SpectralSample& sample) {
  return transforms::WeightedAtomMeasure::uniform(sample.eigenvalues);
}

std::optional<bool> satisfies_weyl_interlacing(const SpectralSample& sample) {
  if (!sample.eta_star) return std::nullopt;
  const double eta = *sample.eta_star;
  const auto initial = sample.initial_order_statistics();
  for (std::size_t j = 0; j < sample.eigenvalues.size(); ++j) {
    const double lambda = sample.eigenvalues[j];
    if (lambda < initial[j] - eta || lambda > initial[j] + eta) return false;
  }
  return true;
}

}  // namespace fpdeconv::dbm
