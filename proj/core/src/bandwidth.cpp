#include "fpdeconv/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fpdeconv/keyvalue.hpp"
#include "fpdeconv/parallel.hpp"
#include "fpdeconv/rng.hpp"

namespace fpdeconv::bandwidth {

namespace {

constexpr std::uint64_t kDropStream = 0x6f64642d64726f70ULL;
constexpr int kMaxExpansionOrder = 500;

// binom(alpha, j + 1) = alpha (alpha - 1) ... (alpha - j) / (j + 1)!
double generalized_binomial(double alpha, int j) {
  double value = 1.0;
  for (int q = 0; q <= j; ++q) value *= (alpha - q) / static_cast<double>(q + 1);
  return value;
}

// Shared triangular solve for both expansions:
//   x_0 = -c,  x_i = -c sum_{j<i} binom(alpha, j+1) [u^{i-j-1}] X(u)^{j+1}.
// powers[m][d] holds [u^d] X(u)^m and is filled one degree at a time, since
// degree d only involves x_0..x_d.
std::vector<double> triangular_coefficients(double c, double alpha, int k) {
  if (k < 0) throw std::invalid_argument("expansion order must be >= 0");
  const int max_power = k + 1;
  std::vector<double> x(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(max_power) + 1,
                                          std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0));
  powers[0][0] = 1.0;

  auto fill_degree = [&](int d) {
    for (int m = 1; m <= max_power; ++m) {
      double sum = 0.0;
      for (int e = 0; e <= d; ++e) sum += x[e] * powers[m - 1][d - e];
      powers[m][d] = sum;
    }
  };

  x[0] = -c;
  fill_degree(0);
  for (int i = 1; i <= k; ++i) {
    double sum = 0.0;
    for (int j = 0; j < i; ++j) sum += generalized_binomial(alpha, j) * powers[j + 1][i - j - 1];
    x[i] = -c * sum;
    fill_degree(i);
  }
  return x;
}

}  // namespace

std::vector<double> CVConfig::default_grid() { return equispaced(0.25, 2.7, 50); }

std::vector<double> CVConfig::equispaced(double h_min, double h_max, std::size_t count) {
  if (count < 2 || !(h_min > 0.0) || !(h_max > h_min)) {
    throw std::invalid_argument("bandwidth grid: need count >= 2 and 0 < h_min < h_max");
  }
  std::vector<double> grid(count);
  const double step = (h_max - h_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = h_min + static_cast<double>(i) * step;
  grid.back() = h_max;
  return grid;
}

void CVConfig::validate() const {
  if (grid.size() < 2) throw std::invalid_argument("CVConfig: bandwidth grid needs at least 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("CVConfig: bandwidths must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("CVConfig: grid must be strictly increasing");
  }
  if (partitions < 2) throw std::invalid_argument("CVConfig: need at least 2 partitions");
}

CVReport cv_select(const dbm::SpectralSample& sample, const CVConfig& cv, const deconv::EstimatorConfig& estimator) {
  cv.validate();
  std::vector<double> atoms = sample.eigenvalues;
  if (atoms.size() < 2) throw std::invalid_argument("cv_select: need at least 2 eigenvalues");

  CVReport report;
  report.grid = cv.grid;
  if (atoms.size() % 2 == 1) {
    Rng rng = make_stream(cv.seed, kDropStream);
    const std::size_t drop = std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng);
    atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(drop));
    report.dropped_index = drop;
  }
  const std::size_t half = atoms.size() / 2;
  // V <= C(n, n/2) only matters for tiny samples.
  if (half < 4) {
    double combinations = 1.0;
    for (std::size_t q = 0; q < half; ++q) {
      combinations *= static_cast<double>(atoms.size() - q) / static_cast<double>(q + 1);
    }
    if (static_cast<double>(cv.partitions) > combinations) {
      throw std::invalid_argument("cv_select: more partitions requested than balanced splits exist");
    }
  }

  const deconv::Deconvolver deconvolver(estimator);
  const std::size_t hs = cv.grid.size();
  // score[h][h'] accumulates A_j(h) - 2 B_j(h, h') over partitions.
  std::vector<double> score(hs * hs, 0.0);

  std::vector<std::size_t> order(atoms.size());
  for (std::size_t j = 0; j < cv.partitions; ++j) {
    const std::uint64_t partition_seed = stream_seed(cv.seed, j + 1);
    report.partition_seeds.push_back(partition_seed);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(partition_seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> first;
    std::vector<double> second;
    first.reserve(half);
    second.reserve(half);
    for (std::size_t q = 0; q < atoms.size(); ++q) (q < half ? first : second).push_back(atoms[order[q]]);

    const auto spectrum_e = deconvolver.prepare(transforms::WeightedAtomMeasure::uniform(std::move(first)));
    const auto spectrum_ec = deconvolver.prepare(transforms::WeightedAtomMeasure::uniform(std::move(second)));

    std::vector<std::optional<deconv::DensityEstimate>> est_e(hs);
    std::vector<std::optional<deconv::DensityEstimate>> est_ec(hs);
    parallel_for(hs, estimator.threads, [&](std::size_t i) {
      est_e[i] = deconvolver.assemble(spectrum_e, cv.grid[i]);
      est_ec[i] = deconvolver.assemble(spectrum_ec, cv.grid[i]);
    });
    for (std::size_t a = 0; a < hs; ++a) {
      const double norm = deconv::squared_norm(*est_e[a]);
      for (std::size_t b = 0; b < hs; ++b) {
        score[a * hs + b] += norm - 2.0 * deconv::inner_product(*est_e[a], *est_ec[b]);
      }
    }
  }

  const double inv_v = 1.0 / static_cast<double>(cv.partitions);
  report.crit.assign(hs, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < hs; ++a) {
    for (std::size_t b = 0; b < hs; ++b) {
      if (b == a) continue;
      report.crit[a] = std::min(report.crit[a], inv_v * score[a * hs + b]);
    }
  }
  report.selected_index = static_cast<std::size_t>(
      std::distance(report.crit.begin(), std::min_element(report.crit.begin(), report.crit.end())));
  report.selected_h = cv.grid[report.selected_index];
  return report;
}

double j_criterion(const deconv::DensityEstimate& estimate, const std::function<double(double)>& p0) {
  double cross = 0.0;
  for (std::size_t j = 0; j < estimate.values.size(); ++j) cross += estimate.values[j] * p0(estimate.grid.point(j));
  return deconv::squared_norm(estimate) - 2.0 * estimate.grid.spacing() * cross;
}

double oracle_j(const dbm::SpectralSample& sample, double h, const std::function<double(double)>& p0,
                const deconv::EstimatorConfig& estimator) {
  const deconv::Deconvolver deconvolver(estimator);
  return j_criterion(deconvolver.estimate(dbm::empirical_measure(sample), h), p0);
}

std::vector<double> oracle_j_curve(const dbm::SpectralSample& sample, const std::vector<double>& grid,
                                   const std::function<double(double)>& p0, const deconv::EstimatorConfig& estimator) {
  const deconv::Deconvolver deconvolver(estimator);
  const auto prepared = deconvolver.prepare(dbm::empirical_measure(sample));
  std::vector<double> j(grid.size());
  parallel_for(grid.size(), estimator.threads,
               [&](std::size_t i) { j[i] = j_criterion(deconvolver.assemble(prepared, grid[i]), p0); });
  return j;
}

void SmoothnessClass::validate() const {
  if (!(a > 0.0) || !(r > 0.0) || !(L > 0.0) || !std::isfinite(a) || !std::isfinite(r) || !std::isfinite(L)) {
    throw std::invalid_argument("SmoothnessClass: a, r and L must be positive and finite");
  }
}

int expansion_order(double r) {
  if (!(r > 0.0) || r == 1.0) throw std::invalid_argument("expansion_order: requires r > 0 and r != 1");
  const double m = std::min(r, 1.0 / r);
  // k/(k+1) < m <= (k+1)/(k+2)
  int k = 0;
  while (!(static_cast<double>(k) / (k + 1) < m && m <= static_cast<double>(k + 1) / (k + 2))) {
    if (++k > kMaxExpansionOrder) {
      throw std::domain_error("expansion_order: r is too close to 1 for the log-n expansion; use r = 1");
    }
  }
  return k;
}

std::vector<double> b_star(double a, double r, double gamma, int k) {
  if (!(a > 0.0) || !(r > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("b_star: parameters must be > 0");
  return triangular_coefficients(2.0 * a / std::pow(2.0 * gamma, r), r, k);
}

std::vector<double> d_star(double a, double r, double gamma, int k) {
  if (!(a > 0.0) || !(r > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("d_star: parameters must be > 0");
  return triangular_coefficients(2.0 * gamma / std::pow(2.0 * a, 1.0 / r), 1.0 / r, k);
}

double theoretical_bandwidth(const SmoothnessClass& smoothness, double gamma, std::size_t n) {
  smoothness.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("theoretical_bandwidth: gamma must be > 0");
  if (n < 3) throw std::invalid_argument("theoretical_bandwidth: need n >= 3");
  const double a = smoothness.a;
  const double r = smoothness.r;
  const double log_n = std::log(static_cast<double>(n));
  if (r == 1.0) return 2.0 * (a + gamma) / log_n;

  const int k = expansion_order(r);
  double denominator = log_n;
  if (r < 1.0) {
    const auto b = b_star(a, r, gamma, k);
    denominator += (r - 1.0) * std::log(log_n);
    for (int i = 0; i <= k; ++i) denominator += b[i] * std::pow(log_n, r + i * (r - 1.0));
  } else {
    const auto d = d_star(a, r, gamma, k);
    denominator += (r - 1.0) / r * std::log(log_n);
    for (int i = 0; i <= k; ++i) denominator += d[i] * std::pow(log_n, 1.0 / r - i * (r - 1.0) / r);
  }
  if (!(denominator > 0.0)) {
    std::ostringstream os;
    os << "theoretical_bandwidth: log-n expansion is not positive at n = " << n << "; n is too small";
    throw std::domain_error(os.str());
  }
  return r < 1.0 ? 2.0 * gamma / denominator : std::pow(2.0 * a / denominator, 1.0 / r);
}

RateDescriptor predicted_rate(const SmoothnessClass& smoothness, double gamma) {
  smoothness.validate();
  if (!(gamma > 0.0)) throw std::invalid_argument("predicted_rate: gamma must be > 0");
  if (smoothness.r == 1.0) {
    const double exponent = smoothness.a / (smoothness.a + gamma);
    return {RateRegime::kPolynomial, exponent, "r=1, polynomial rate n^-" + format_double(exponent)};
  }
  if (smoothness.r < 1.0) return {RateRegime::kBiasDominated, std::nullopt, "r<1, bias-dominated"};
  return {RateRegime::kVarianceDominated, std::nullopt, "r>1, variance-dominated"};
}

void write_cv_csv(std::ostream& out, const CVReport& report, const std::vector<double>* j_oracle) {
  out << (j_oracle ? "h,crit,j_oracle\n" : "h,crit\n");
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    out << format_double(report.grid[i]) << ',' << format_double(report.crit[i]);
    if (j_oracle) out << ',' << format_double((*j_oracle)[i]);
    out << '\n';
  }
}

}  // namespace fpdeconv::bandwidth
