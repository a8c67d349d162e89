#include <gtest/gtest.h>

#include <cmath>

#include "fpdeconv/dbm.hpp"
#include "fpdeconv/errors.hpp"
#include "fpdeconv/subordination.hpp"
#include "test_support.hpp"

using namespace fpdeconv;
using namespace fpdeconv::subordination;
using fpdeconv::testing::Gen;
using transforms::kPi;

namespace {

// Root of (w - a)^2 - (z - a)(w - a) - t = 0 with Im w >= Im z / 2: the
// fixed point for a single atom at a.
Complex single_atom_fixed_point(double a, Complex z, double t) {
  const Complex zc = z - a;
  const Complex disc = std::sqrt(zc * zc + 4.0 * t);
  Complex root = a + 0.5 * (zc + disc);
  if (root.imag() < 0.5 * z.imag()) root = a + 0.5 * (zc - disc);
  return root;
}

TransformEvaluator semicircle_evaluator(double t) {
  return [t](Complex w) { return transforms::semicircle_cauchy(UpperHalfPoint(w), t); };
}

}  // namespace

TEST(SolveEmpirical, SingleAtomExample) {
  const auto r = solve_empirical(WeightedAtomMeasure::uniform({0.0}), UpperHalfPoint(0.0, 3.0), 1.0);
  EXPECT_NEAR(r.w.real(), 0.0, 1e-12);
  EXPECT_NEAR(r.w.imag(), (3.0 + std::sqrt(5.0)) / 2.0, 1e-10);
  EXPECT_NEAR(r.w.imag(), 2.618034, 1e-6);
  EXPECT_LE(r.residual, 1e-12);
  EXPECT_GT(r.iterations, 0);
}

TEST(SolveEmpirical, PropertySingleAtomMatchesQuadraticRoot) {
  Gen gen(21);
  for (int i = 0; i < 1000; ++i) {
    const double t = gen.uniform(0.05, 4.0);
    const double a = gen.uniform(-10.0, 10.0);
    const Complex z = gen.upper(2.0 * std::sqrt(t) * 1.001, 12.0);
    const auto r = solve_empirical(WeightedAtomMeasure::uniform({a}), UpperHalfPoint(z), t);
    ASSERT_LE(std::abs(r.w - single_atom_fixed_point(a, z, t)), 1e-10) << "t=" << t << " z=" << z;
  }
}

TEST(SolveEmpirical, SmallTimeLimit) {
  const double t = 1e-8;
  for (const double lambda : {-3.0, 0.0, 7.5}) {
    const UpperHalfPoint z(0.4, 0.5);
    const auto r = solve_empirical(WeightedAtomMeasure::uniform({lambda}), z, t);
    EXPECT_LE(std::abs(r.w - z.value()), 1e-4);
    // Free deconvolution vanishes: the recovered transform is the raw one.
    const Complex raw = transforms::empirical_cauchy(WeightedAtomMeasure::uniform({lambda}), z);
    EXPECT_NEAR(std::abs(recover_initial_transform(r) - raw), 0.0, 1e-3);
  }
}

TEST(SolveEmpirical, AgreesWithOracleSolverOnSameAtoms) {
  const auto sample = dbm::simulate(dbm::InitialLaw(dbm::PointMassLaw{0.0}), 2000, 1.0, 3, 0);
  const auto measure = dbm::empirical_measure(sample);
  const UpperHalfPoint z(0.0, 3.0);
  const auto empirical = solve_empirical(measure, z, 1.0);
  const auto oracle =
      solve_oracle([&measure](Complex w) { return transforms::empirical_cauchy(measure, w); }, z, 1.0);
  EXPECT_LE(std::abs(empirical.w - oracle.w), 1e-10);
}

TEST(SolveEmpirical, PropertyInvariantsHoldAtEveryIterate) {
  Gen gen(22);
  for (int i = 0; i < 10000; ++i) {
    const double t = gen.uniform(0.01, 5.0);
    const auto atoms = gen.atoms(gen.index(1, 60));
    const Complex z = gen.upper(2.02 * std::sqrt(t), 2.0 * std::sqrt(t) + 10.0);
    const double im_z = z.imag();
    bool ok = true;
    SolverOptions options;
    options.observer = [&](int, Complex w) {
      ok = ok && w.imag() >= im_z / 2.0 && std::abs(w - z) <= std::sqrt(t);
    };
    const auto r = solve_empirical(WeightedAtomMeasure::uniform(atoms), UpperHalfPoint(z), t, options);
    ASSERT_TRUE(ok) << "t=" << t << " z=" << z;
    ASSERT_GE(r.w.imag(), im_z / 2.0);
    ASSERT_LE(std::abs(r.w - z), std::sqrt(t));
    ASSERT_LE(std::abs(r.w - z - t * transforms::empirical_cauchy(WeightedAtomMeasure::uniform(atoms), r.w)), 1e-10);
  }
}

TEST(SolveEmpirical, UniqueFixedPointFromRandomStarts) {
  Gen gen(23);
  const auto measure = WeightedAtomMeasure::uniform(gen.atoms(50));
  const double t = 1.0;
  const UpperHalfPoint z(0.3, 2.01);
  const auto reference = solve_empirical(measure, z, t);
  SolverOptions options;
  for (int i = 0; i < 20; ++i) {
    options.initial = Complex(gen.uniform(-20.0, 20.0), gen.uniform(z.im() / 2.0 + 1e-6, 30.0));
    const auto r = solve_empirical(measure, z, t, options);
    EXPECT_LE(std::abs(r.w - reference.w), 10.0 * options.tol);
  }
}

TEST(SolveEmpirical, NewtonAccelerationAgreesWithPlainIteration) {
  Gen gen(24);
  SolverOptions newton;
  newton.acceleration = Acceleration::kNewton;
  for (int i = 0; i < 300; ++i) {
    const auto measure = WeightedAtomMeasure::uniform(gen.atoms(gen.index(1, 100)));
    const double t = gen.uniform(0.1, 3.0);
    const UpperHalfPoint z(gen.upper(2.0 * std::sqrt(t) + 1e-3, 10.0));
    const auto plain = solve_empirical(measure, z, t);
    const auto fast = solve_empirical(measure, z, t, newton);
    ASSERT_LE(std::abs(plain.w - fast.w), 1e-10);
  }
}

TEST(SolveEmpirical, Errors) {
  const auto m = WeightedAtomMeasure::uniform({0.0, 1.0});
  EXPECT_THROW(solve_empirical(m, UpperHalfPoint(0.0, 2.0), 1.0), std::domain_error);
  EXPECT_THROW(solve_empirical(m, UpperHalfPoint(0.0, 1.0), 1.0), std::domain_error);
  EXPECT_THROW(solve_empirical(m, UpperHalfPoint(0.0, 3.0), 0.0), std::invalid_argument);
  SolverOptions bad_tol;
  bad_tol.tol = 0.0;
  EXPECT_THROW(solve_empirical(m, UpperHalfPoint(0.0, 3.0), 1.0, bad_tol), std::invalid_argument);
  SolverOptions bad_start;
  bad_start.initial = Complex(0.0, 1.0);
  EXPECT_THROW(solve_empirical(m, UpperHalfPoint(0.0, 3.0), 1.0, bad_start), std::invalid_argument);

  SolverOptions short_run;
  short_run.max_iter = 2;
  try {
    solve_empirical(m, UpperHalfPoint(0.0, 2.001), 1.0, short_run);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.last_residual(), short_run.tol);
  }
}

TEST(SolveOracle, PointMassExamples) {
  const double t = 1.0;
  const UpperHalfPoint z(0.0, 3.0);
  const auto r = solve_oracle(semicircle_evaluator(t), z, t);
  EXPECT_NEAR(std::abs(r.w - Complex(0.0, 8.0 / 3.0)), 0.0, 1e-10);
  EXPECT_NEAR(r.w.imag(), 2.666667, 1e-6);
  const Complex g = transforms::semicircle_cauchy(UpperHalfPoint(r.w), t);
  EXPECT_NEAR(std::abs(g - Complex(0.0, -1.0 / 3.0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(recover_initial_transform(r) - Complex(0.0, -1.0 / 3.0)), 0.0, 1e-10);
}

TEST(SolveOracle, PropertyPointMassClosedForm) {
  Gen gen(25);
  for (int i = 0; i < 200; ++i) {
    const double t = gen.uniform(0.1, 4.0);
    const Complex z = gen.upper(2.0 * std::sqrt(t) + 0.01, 15.0);
    const auto r = solve_oracle(semicircle_evaluator(t), UpperHalfPoint(z), t);
    ASSERT_LE(std::abs(r.w - (z + t / z)), 1e-10);
  }
}

TEST(SolveOracle, CauchyFamilyRecoversInitialTransform) {
  const double t = 1.0;
  const double gamma = 2.01;
  const dbm::InitialLaw law(dbm::CauchyLaw{5.0});
  for (const double x : {-10.0, 0.0, 10.0}) {
    const UpperHalfPoint z(x, gamma);
    const auto r = solve_oracle([&](Complex w) { return *law.cauchy_transform_at_time(w, t); }, z, t);
    EXPECT_NEAR(std::abs(recover_initial_transform(r) - transforms::cauchy_law_transform(z, 5.0)), 0.0, 1e-6);
    // Closed form of the subordination point for the Cauchy family.
    EXPECT_NEAR(std::abs(r.w - (z.value() + t / (z.value() + Complex(0.0, 5.0)))), 0.0, 1e-10);
  }
}

TEST(SolveOracle, RejectsNonTransformInput) {
  // G(w) = -1/w is not a Cauchy transform: Im(w + F(w) - z) = -Im z < 0.
  const auto bogus = [](Complex w) { return -1.0 / w; };
  EXPECT_THROW(solve_oracle(bogus, UpperHalfPoint(0.0, 3.0), 1.0), NumericalError);
}

TEST(RecoverInitialTransform, PropertyTransformBound) {
  Gen gen(26);
  for (int i = 0; i < 2000; ++i) {
    const double t = gen.uniform(0.1, 4.0);
    const Complex z = gen.upper(2.0 * std::sqrt(t) + 1e-6, 10.0);
    const auto r = solve_empirical(WeightedAtomMeasure::uniform(gen.atoms(gen.index(1, 30))), UpperHalfPoint(z), t);
    const Complex g = recover_initial_transform(r);
    ASSERT_LT(g.imag(), 0.0);
    // The empirical recovery is a Cauchy transform evaluated at w, not z.
    ASSERT_LE(std::abs(g), (1.0 + 1e-9) / r.w.imag());
    ASSERT_LE(std::abs(g), 2.0 / z.imag());
  }
}

TEST(RecoverInitialTransform, EmpiricalCanExceedOneOverImZ) {
  // One atom at 0, z = 3i: G = 1/w with Im w < 3.
  const auto r = solve_empirical(WeightedAtomMeasure::uniform({0.0}), UpperHalfPoint(0.0, 3.0), 1.0);
  EXPECT_GT(std::abs(recover_initial_transform(r)), 1.0 / 3.0);
}

TEST(RecoverInitialTransform, OracleRecoveryIsBoundedByOneOverImZ) {
  Gen gen(29);
  const dbm::InitialLaw law(dbm::CauchyLaw{2.0});
  for (int i = 0; i < 500; ++i) {
    const double t = gen.uniform(0.1, 4.0);
    const UpperHalfPoint z(gen.upper(2.0 * std::sqrt(t) + 1e-3, 10.0));
    const auto r = solve_oracle([&](Complex w) { return *law.cauchy_transform_at_time(w, t); }, z, t);
    const Complex g = recover_initial_transform(r);
    ASSERT_LT(g.imag(), 0.0);
    ASSERT_LE(std::abs(g), (1.0 + 1e-9) / z.im());
  }
}

TEST(ConvolvedDensity, SingleAtomQuadratic) {
  const double t = 1.0;
  const double gamma = 2.01;
  const Complex w = single_atom_fixed_point(0.0, Complex(0.0, gamma), t);
  const double value = convolved_density_at(WeightedAtomMeasure::uniform({0.0}), 0.0, gamma, t);
  EXPECT_NEAR(value, (gamma - w.imag()) / kPi, 1e-10);
}

TEST(ConvolvedDensity, SymmetricSampleGivesSymmetricValues) {
  Gen gen(27);
  std::vector<double> atoms;
  for (int i = 0; i < 40; ++i) {
    const double a = gen.cauchy(5.0);
    atoms.push_back(a);
    atoms.push_back(-a);
  }
  const auto m = WeightedAtomMeasure::uniform(atoms);
  for (const double x : {0.5, 3.0, 12.0}) {
    const double left = convolved_density_at(m, -x, 2.01, 1.0);
    const double right = convolved_density_at(m, x, 2.01, 1.0);
    EXPECT_NEAR(left, right, 1e-10);
  }
}

TEST(ConvolvedDensity, GridMatchesPointwiseAndIsBounded) {
  Gen gen(28);
  const auto m = WeightedAtomMeasure::uniform(gen.atoms(200));
  std::vector<double> xs;
  for (int i = -20; i <= 20; ++i) xs.push_back(0.5 * i);
  const double gamma = 2.01;
  const double t = 1.0;
  const auto serial = convolved_density_on(m, xs, gamma, t, {}, 1);
  const auto threaded = convolved_density_on(m, xs, gamma, t, {}, 4);
  EXPECT_EQ(serial.values, threaded.values);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(serial.values[i], convolved_density_at(m, xs[i], gamma, t));
    EXPECT_GE(serial.values[i], -1e-12);
    EXPECT_LE(serial.values[i], gamma / (2.0 * kPi * t));
  }
  EXPECT_GT(serial.max_iterations, 0);
  EXPECT_GE(serial.max_iterations, serial.mean_iterations);
}
