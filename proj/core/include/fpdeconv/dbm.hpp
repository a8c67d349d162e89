#pragma once

// Observation model X^n(t) = X^n(0) + H^n(t): a diagonal matrix of ordered
// i.i.d. draws from mu0 plus a Hermitian Brownian motion at time t. The matrix
// backend is canonical; the eigenvalue SDE backend exists to cross-check it.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpdeconv/initial_law.hpp"
#include "fpdeconv/rng.hpp"
#include "fpdeconv/transforms.hpp"

namespace fpdeconv::dbm {

enum class Backend { kMatrix, kSde };

std::string to_string(Backend backend);
Backend backend_from_string(const std::string& name);

struct SpectralSample {
  std::size_t n = 0;
  double t = 0.0;
  std::vector<double> eigenvalues;     // nondecreasing
  std::vector<double> initial_values;  // the draws d_i in sampling order
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  Backend backend = Backend::kMatrix;
  std::string law;
  // Spectral radius of H^n(t); present when the backend computed it.
  std::optional<double> eta_star;

  // lambda_j(0): the sorted initial values.
  std::vector<double> initial_order_statistics() const;
};

struct MatrixOptions {
  // Computing eta* costs a second Hermitian eigensolve of the same size.
  bool record_eta_star = true;
};

struct SdeOptions {
  std::size_t steps = 100000;
  double collision_floor = 1e-9;
  int max_halvings = 60;
};

// Draws the lower triangle of H^n(t), column by column with the diagonal
// entry first, and passes each entry to sink(row, col, value): diagonal
// entries are sqrt(t/n) N(0,1), off-diagonal ones sqrt(t/(2n)) (N + iN').
template <typename Sink>
void draw_hermitian_brownian(std::size_t n, double t, Rng& rng, Sink&& sink) {
  const double nd = static_cast<double>(n);
  const double off_scale = std::sqrt(t / (2.0 * nd));
  const double diag_scale = std::sqrt(t / nd);
  std::normal_distribution<double> normal;
  for (std::size_t col = 0; col < n; ++col) {
    sink(col, col, std::complex<double>(diag_scale * normal(rng), 0.0));
    for (std::size_t row = col + 1; row < n; ++row) {
      const double re = normal(rng);
      const double im = normal(rng);
      sink(row, col, std::complex<double>(off_scale * re, off_scale * im));
    }
  }
}

// Sorted i.i.d. draws from the law. Requires n >= 1.
std::vector<double> sample_initial(const InitialLaw& law, std::size_t n, Rng& rng);

// Eigenvalues of diag(initial) + H^n(t). Off-diagonal entries of H^n(t) are
// sqrt(t) (B + i B~) / sqrt(2n), diagonal entries sqrt(t) B / sqrt(n).
SpectralSample simulate_dyson_matrix(const InitialLaw& law, std::size_t n, double t, Rng& rng,
                                     const MatrixOptions& options = {});
SpectralSample simulate_dyson_matrix_from(std::vector<double> initial_values, double t, Rng& rng,
                                          const MatrixOptions& options = {});

// Euler-Maruyama on
//   d lambda_i = d beta_i / sqrt(n) + (1/n) sum_{j != i} dt / (lambda_i - lambda_j).
// A step that would bring two particles closer than the collision floor is
// rejected and split in two with a Brownian bridge; more than max_halvings
// nested splits abort with NumericalError. Requires t / steps below a quarter
// of the squared minimal initial gap (std::invalid_argument otherwise).
SpectralSample simulate_dyson_sde(const InitialLaw& law, std::size_t n, double t, Rng& rng,
                                  const SdeOptions& options = {});
SpectralSample simulate_dyson_sde_from(std::vector<double> initial_values, double t, Rng& rng,
                                       const SdeOptions& options = {});

struct SimulationOptions {
  Backend backend = Backend::kMatrix;
  MatrixOptions matrix;
  SdeOptions sde;
};

// Simulates replicate `replicate` on the stream hash(seed, replicate) and
// stamps seed, replicate and law on the sample.
SpectralSample simulate(const InitialLaw& law, std::size_t n, double t, std::uint64_t seed,
                        std::uint64_t replicate, const SimulationOptions& options = {});

transforms::WeightedAtomMeasure empirical_measure(const SpectralSample& sample);

// lambda_j(0) - eta* <= lambda_j(t) <= lambda_j(0) + eta* for every j. Returns
// nullopt when the sample carries no eta*.
std::optional<bool> satisfies_weyl_interlacing(const SpectralSample& sample);

}  // namespace fpdeconv::dbm
