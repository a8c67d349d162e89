#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"
#include "test_support.hpp"

using namespace fpdeconv;
using namespace fpdeconv::deconv;
using fpdeconv::testing::Gen;
using transforms::kPi;

namespace {

double cauchy_density(double x, double s) { return s / (kPi * (s * s + x * x)); }

std::vector<double> sample_on(const SpatialGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = f(grid.point(j));
  return v;
}

DensityEstimate on_grid(const SpatialGrid& grid, std::vector<double> values) {
  DensityEstimate est{grid, std::move(values), 0.0, 0.0, 0.0, 0.0, 0, "", 0.0, 0};
  return est;
}

std::vector<double> symmetric_atoms(Gen& gen, std::size_t pairs) {
  std::vector<double> atoms;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = gen.cauchy(5.0);
    atoms.push_back(a);
    atoms.push_back(-a);
  }
  return atoms;
}

}  // namespace

TEST(Grids, ValidationAndPoints) {
  EXPECT_THROW(SpatialGrid(0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(SpatialGrid(1.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(SpatialGrid(2.0, 1.0, 10), std::invalid_argument);
  EXPECT_THROW(FrequencyGrid(0.0, 10), std::invalid_argument);
  EXPECT_THROW(FrequencyGrid(1.0, 1), std::invalid_argument);

  const SpatialGrid grid(-30.0, 30.0, 1201);
  EXPECT_DOUBLE_EQ(grid.spacing(), 0.05);
  EXPECT_EQ(grid.point(0), -30.0);
  EXPECT_EQ(grid.point(1200), 30.0);
  EXPECT_EQ(grid.point(600), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) ASSERT_EQ(grid.point(j), -grid.point(grid.size() - 1 - j));

  const FrequencyGrid freq(4.0, 801);
  EXPECT_DOUBLE_EQ(freq.spacing(), 0.01);
  for (std::size_t k = 0; k < freq.size(); ++k) ASSERT_EQ(freq.point(k), -freq.point(freq.size() - 1 - k));
  EXPECT_DOUBLE_EQ(freq.point(0), -4.0);
}

TEST(RiemannFourier, IndicatorExamples) {
  const SpatialGrid grid(-2.0, 2.0, 4001);
  const auto f = sample_on(grid, [](double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; });
  const Complex at_zero = riemann_fourier(f, grid, 0.0);
  EXPECT_NEAR(at_zero.real(), 2.0, 2e-3);
  EXPECT_NEAR(at_zero.imag(), 0.0, 2e-3);
  const Complex at_pi = riemann_fourier(f, grid, kPi);
  EXPECT_NEAR(at_pi.real(), 2.0 * std::sin(kPi) / kPi, 2e-3);
  EXPECT_NEAR(at_pi.imag(), 0.0, 2e-3);
  EXPECT_THROW(riemann_fourier(std::vector<double>(10, 1.0), grid, 0.0), std::invalid_argument);
}

TEST(RiemannFourier, PropertyLinearity) {
  Gen gen(31);
  const SpatialGrid grid(-10.0, 10.0, 401);
  const FourierQuadrature quad(grid, FrequencyGrid(3.0, 61));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(grid.size()), g(grid.size()), combo(grid.size());
    const double a = gen.uniform(-3.0, 3.0);
    const double b = gen.uniform(-3.0, 3.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      f[j] = gen.normal();
      g[j] = gen.normal();
      combo[j] = a * f[j] + b * g[j];
    }
    const double xi = gen.uniform(-5.0, 5.0);
    const Complex lhs = riemann_fourier(combo, grid, xi);
    const Complex rhs = a * riemann_fourier(f, grid, xi) + b * riemann_fourier(g, grid, xi);
    ASSERT_LE(std::abs(lhs - rhs), 1e-12);

    const auto fq = quad.forward(f);
    const auto gq = quad.forward(g);
    const auto cq = quad.forward(combo);
    for (std::size_t k = 0; k < cq.size(); ++k) ASSERT_LE(std::abs(cq[k] - (a * fq[k] + b * gq[k])), 1e-12);
  }
}

TEST(FourierQuadrature, MatchesPointwiseTransformAndInverts) {
  const SpatialGrid grid(-30.0, 30.0, 1201);
  const FrequencyGrid freq(10.0, 1001);
  const FourierQuadrature quad(grid, freq);
  const auto gauss = sample_on(grid, [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); });
  const auto forward = quad.forward(gauss);
  for (std::size_t k = 0; k < freq.size(); k += 37) {
    const double xi = freq.point(k);
    EXPECT_LE(std::abs(forward[k] - riemann_fourier(gauss, grid, xi)), 1e-12);
    EXPECT_NEAR(forward[k].real(), std::exp(-0.5 * xi * xi), 1e-10);
  }
  const auto back = quad.inverse(forward);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ASSERT_NEAR(back[j].real(), gauss[j], 1e-8);
    ASSERT_NEAR(back[j].imag(), 0.0, 1e-8);
  }
}

TEST(KernelFt, SincExamples) {
  const Kernel sinc = Kernel::sinc();
  EXPECT_EQ(kernel_ft(sinc, 0.5), 1.0);
  EXPECT_EQ(kernel_ft(sinc, 1.5), 0.0);
  EXPECT_EQ(kernel_ft(sinc, 1.0), 1.0);
  EXPECT_EQ(kernel_ft(sinc, -1.0), 1.0);
  EXPECT_EQ(kernel_ft(sinc, -1.0000001), 0.0);
  EXPECT_EQ(sinc.name(), "sinc");
}

TEST(KernelFt, CustomKernel) {
  const Kernel tri = Kernel::custom("triangle", [](double xi) { return 1.0 - std::abs(xi); }, 1.0);
  EXPECT_DOUBLE_EQ(kernel_ft(tri, 0.25), 0.75);
  EXPECT_EQ(kernel_ft(tri, 2.0), 0.0);
  const Kernel wide = Kernel::custom("wide", [](double) { return 3.0; }, 1.0);
  EXPECT_EQ(kernel_ft(wide, 2.0), 0.0);
  EXPECT_THROW(kernel_ft(wide, 0.5), std::domain_error);
  EXPECT_THROW(Kernel::custom("none", nullptr, 1.0), std::invalid_argument);
  EXPECT_THROW(Kernel::custom("bad", [](double) { return 0.0; }, 0.0), std::invalid_argument);
}

TEST(Estimator, RecoversCauchyFromExactConvolvedDensity) {
  // mu0 * C_gamma is Cauchy with scale 5 + gamma; feeding its exact density
  // through stages (3)-(5) isolates quadrature and truncation error.
  const double gamma = 2.01;
  const Deconvolver deconvolver(EstimatorConfig{});
  const auto& grid = deconvolver.config().spatial;
  ConvolvedSpectrum exact;
  exact.convolved = sample_on(grid, [&](double x) { return cauchy_density(x, 5.0 + gamma); });
  exact.spectrum = deconvolver.quadrature().forward(exact.convolved);
  exact.n = 1;
  const auto p0 = [](double x) { return cauchy_density(x, 5.0); };
  for (const double h : {0.5, 1.0, 2.0}) {
    const auto est = deconvolver.assemble(exact, h);
    // Bias of the sinc kernel: (1/pi) \int_{1/h}^inf e^{-10 xi} dxi.
    const double bias = std::exp(-10.0 / h) / (10.0 * kPi);
    EXPECT_LE(ise(est, p0), bias + 1e-4 / (10.0 * kPi)) << "h=" << h;
  }
}

TEST(Estimator, CutoffInvarianceWhenEnlargingFrequencyRange) {
  Gen gen(32);
  const auto m = transforms::WeightedAtomMeasure::uniform(gen.atoms(200));
  EstimatorConfig narrow;
  EstimatorConfig wide;
  wide.frequency = FrequencyGrid(8.0, 1601);
  const Deconvolver a(narrow);
  const Deconvolver b(wide);
  const auto prepared_a = a.prepare(m);
  const auto prepared_b = b.prepare(m);
  for (const double h : {0.25, 0.7, 2.7}) {
    const auto ea = a.assemble(prepared_a, h);
    const auto eb = b.assemble(prepared_b, h);
    for (std::size_t j = 0; j < ea.values.size(); ++j) ASSERT_NEAR(ea.values[j], eb.values[j], 1e-10);
  }
}

TEST(Estimator, PropertySymmetricAtomsGiveSymmetricEstimate) {
  Gen gen(33);
  EstimatorConfig cfg;
  cfg.spatial = SpatialGrid(-40.0, 40.0, 401);
  const Deconvolver deconvolver(cfg);
  for (int trial = 0; trial < 5; ++trial) {
    auto atoms = symmetric_atoms(gen, 20 + 10 * trial);
    if (trial % 2 == 0) atoms.push_back(0.0);
    const auto est = deconvolver.estimate(transforms::WeightedAtomMeasure::uniform(atoms), gen.uniform(0.3, 2.0));
    const std::size_t m = est.values.size();
    for (std::size_t j = 0; j < m; ++j) ASSERT_NEAR(est.values[j], est.values[m - 1 - j], 1e-10);
  }
}

TEST(Estimator, ImaginaryPartIsSmallDiagnostic) {
  const auto sample = dbm::simulate(dbm::InitialLaw(dbm::CauchyLaw{5.0}), 500, 1.0, 7, 0);
  const Deconvolver deconvolver(EstimatorConfig{});
  const auto est = deconvolver.estimate(dbm::empirical_measure(sample), 1.0);
  double max_re = 0.0;
  for (const double v : est.values) max_re = std::max(max_re, std::abs(v));
  EXPECT_LE(est.max_abs_imag, 0.1 * max_re);
  EXPECT_EQ(est.n, 500u);
  EXPECT_EQ(est.h, 1.0);
  EXPECT_EQ(est.kernel, "sinc");
  EXPECT_GT(est.max_solver_iterations, 0);
}

TEST(Estimator, LargeBandwidthFlattensEstimate) {
  const auto sample = dbm::simulate(dbm::InitialLaw(dbm::CauchyLaw{5.0}), 300, 1.0, 8, 0);
  const auto est = Deconvolver(EstimatorConfig{}).estimate(dbm::empirical_measure(sample), 1e3);
  double sup = 0.0;
  for (const double v : est.values) sup = std::max(sup, std::abs(v));
  EXPECT_LE(sup, 0.01);
}

TEST(Estimator, SingleAtomSmoke) {
  const auto est = estimate_p0(transforms::WeightedAtomMeasure::uniform({0.0}), 1.0, 2.01, 1.0,
                               SpatialGrid(-30.0, 30.0, 1201), FrequencyGrid(4.0, 801));
  EXPECT_EQ(est.values.size(), 1201u);
  for (const double v : est.values) ASSERT_TRUE(std::isfinite(v));
  EXPECT_EQ(est.n, 1u);
}

TEST(Estimator, RejectsBadConfigurations) {
  EstimatorConfig low_gamma;
  low_gamma.gamma = 2.0;
  EXPECT_THROW(Deconvolver{low_gamma}, std::invalid_argument);
  low_gamma.gamma = 1.9;
  EXPECT_THROW(Deconvolver{low_gamma}, std::invalid_argument);

  const Deconvolver deconvolver(EstimatorConfig{});
  const auto prepared = deconvolver.prepare(transforms::WeightedAtomMeasure::uniform({-1.0, 1.0}));
  EXPECT_THROW(deconvolver.assemble(prepared, 0.2), std::invalid_argument);
  EXPECT_NO_THROW(deconvolver.assemble(prepared, 0.25));
}

TEST(Estimator, PrepareThenAssembleMatchesOneShot) {
  Gen gen(34);
  const auto m = transforms::WeightedAtomMeasure::uniform(gen.atoms(100));
  EstimatorConfig cfg;
  cfg.threads = 3;
  const Deconvolver threaded(cfg);
  const Deconvolver serial(EstimatorConfig{});
  const auto one_shot = serial.estimate(m, 0.8);
  const auto staged = threaded.assemble(threaded.prepare(m), 0.8);
  EXPECT_EQ(one_shot.values, staged.values);
}

TEST(Ise, Examples) {
  const SpatialGrid grid(-30.0, 30.0, 1201);
  const auto p0 = [](double x) { return cauchy_density(x, 5.0); };
  DensityEstimate exact = on_grid(grid, sample_on(grid, p0));
  EXPECT_EQ(ise(exact, p0), 0.0);

  DensityEstimate zero = on_grid(grid, std::vector<double>(grid.size(), 0.0));
  // Closed form of \int_{-30}^{30} p0^2 for the Cauchy law with scale 5.
  const double s = 5.0;
  const double truncated = (std::atan(30.0 / s) + s * 30.0 / (s * s + 900.0)) / (kPi * kPi * s);
  EXPECT_NEAR(ise(zero, p0), truncated, 0.02 * truncated);
  EXPECT_NEAR(ise(zero, p0), 0.0314, 0.02 * 0.0314);

  Gen gen(35);
  DensityEstimate random = on_grid(grid, std::vector<double>(grid.size()));
  for (double& v : random.values) v = gen.normal();
  DensityEstimate doubled = random;
  for (double& v : doubled.values) v *= 2.0;
  const auto nothing = [](double) { return 0.0; };
  EXPECT_NEAR(ise(doubled, nothing), 4.0 * ise(random, nothing), 1e-12 * ise(doubled, nothing));
  EXPECT_DOUBLE_EQ(squared_norm(random), ise(random, nothing));
  EXPECT_DOUBLE_EQ(inner_product(random, random), squared_norm(random));
}

TEST(ClipAndRenormalize, NonNegativeUnitMass) {
  const SpatialGrid grid(-5.0, 5.0, 101);
  DensityEstimate est = on_grid(grid, sample_on(grid, [](double x) { return std::cos(x) + 0.3; }));
  const auto clipped = clip_and_renormalize(est);
  double mass = 0.0;
  for (const double v : clipped.values) {
    ASSERT_GE(v, 0.0);
    mass += v;
  }
  EXPECT_NEAR(mass * grid.spacing(), 1.0, 1e-12);
}

TEST(EstimateSerialization, CsvAndMetadata) {
  const auto est = estimate_p0(transforms::WeightedAtomMeasure::uniform({-1.0, 1.0}), 1.0, 2.01, 1.0,
                               SpatialGrid(-10.0, 10.0, 21), FrequencyGrid(4.0, 801));
  std::ostringstream out;
  write_estimate_csv(out, est);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,p0_hat");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    ASSERT_NE(comma, std::string::npos);
    EXPECT_EQ(std::stod(line.substr(0, comma)), est.grid.point(rows));
    EXPECT_EQ(std::stod(line.substr(comma + 1)), est.values[rows]);
    ++rows;
  }
  EXPECT_EQ(rows, 21u);

  const auto meta = estimate_metadata(est, FrequencyGrid(4.0, 801));
  for (const char* key : {"h", "gamma", "t", "n", "x_min", "x_max", "x_points", "xi_max", "xi_points", "kernel"}) {
    EXPECT_TRUE(meta.contains(key)) << key;
  }
  EXPECT_EQ(*meta.get("kernel"), "sinc");
  EXPECT_EQ(*meta.get("n"), "2");
}
