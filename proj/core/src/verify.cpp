#include "fpdeconv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <iomanip>
#include <sstream>

#include "fpdeconv/bandwidth.hpp"
#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"
#include "fpdeconv/keyvalue.hpp"
#include "fpdeconv/parallel.hpp"
#include "fpdeconv/rng.hpp"
#include "fpdeconv/subordination.hpp"
#include "fpdeconv/transforms.hpp"

namespace fpdeconv::harness {

namespace {

using transforms::Complex;
using transforms::UpperHalfPoint;

struct Check {
  std::string name;
  std::function<InvariantResult(Rng&)> run;
};

InvariantResult result(std::string name, bool passed, const std::string& detail) {
  return {std::move(name), passed, detail};
}

std::string worst(double value) { return "worst " + format_double(value); }

InvariantResult semicircle_identities(Rng& rng) {
  double err = 0.0;
  for (const double t : {0.25, 1.0, 4.0}) {
    std::uniform_real_distribution<double> re(-10.0, 10.0);
    std::uniform_real_distribution<double> im(2.0 * std::sqrt(t) + 0.1, 12.0);
    for (int i = 0; i < 300; ++i) {
      const UpperHalfPoint z(re(rng), im(rng));
      const Complex g = transforms::semicircle_cauchy(z, t);
      err = std::max(err, std::abs(t * g * g - z.value() * g + 1.0));
      err = std::max(err, std::abs(z.value() - 1.0 / g - t * g));
    }
  }
  return result("semicircle self-consistency", err <= 1e-10, worst(err));
}

InvariantResult point_mass_oracle(Rng& rng) {
  const double t = 1.0;
  std::uniform_real_distribution<double> re(-5.0, 5.0);
  std::uniform_real_distribution<double> im(2.1, 8.0);
  double err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const UpperHalfPoint z(re(rng), im(rng));
    const auto g = [t](Complex w) { return transforms::semicircle_cauchy(UpperHalfPoint(w), t); };
    const auto solved = subordination::solve_oracle(g, z, t);
    err = std::max(err, std::abs(solved.w - (z.value() + t / z.value())));
  }
  return result("delta_0 oracle: w = z + t/z", err <= 1e-10, worst(err));
}

InvariantResult single_atom_quadratic(Rng& rng) {
  std::uniform_real_distribution<double> re(-5.0, 5.0);
  std::uniform_real_distribution<double> im(2.1, 8.0);
  const double t = 1.0;
  double err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = re(rng);
    const UpperHalfPoint z(re(rng), im(rng));
    const auto measure = transforms::WeightedAtomMeasure::uniform({a});
    const Complex w = subordination::solve_empirical(measure, z, t).w;
    // (w - a)^2 - (z - a)(w - a) - t = 0, root with Im >= Im z / 2.
    const Complex zc = z.value() - a;
    const Complex disc = transforms::principal_sqrt(zc * zc + 4.0 * t);
    Complex root = 0.5 * (zc + disc);
    if (root.imag() < 0.5 * z.im()) root = 0.5 * (zc - disc);
    err = std::max(err, std::abs(w - a - root));
  }
  return result("single atom: quadratic root", err <= 1e-10, worst(err));
}

InvariantResult fixed_point_bounds(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::cauchy_distribution<double> atom(0.0, 3.0);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t = 0.1 + 3.9 * unit(rng);
    const std::size_t n = 1 + static_cast<std::size_t>(unit(rng) * 40);
    std::vector<double> atoms(n);
    for (auto& a : atoms) a = atom(rng);
    const UpperHalfPoint z(20.0 * unit(rng) - 10.0, 2.0 * std::sqrt(t) * (1.0 + 1e-6 + 2.0 * unit(rng)));
    const auto r = subordination::solve_empirical(transforms::WeightedAtomMeasure::uniform(atoms), z, t);
    if (!(r.w.imag() >= z.im() / 2.0) || !(std::abs(r.w - z.value()) <= std::sqrt(t))) ++violations;
  }
  return result("fixed point: Im w >= Im z/2, |w - z| <= sqrt(t)", violations == 0,
                std::to_string(violations) + " violations / 1000");
}

InvariantResult transform_bounds(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> atoms(1 + static_cast<std::size_t>(unit(rng) * 20));
    for (auto& a : atoms) a = 20.0 * unit(rng) - 10.0;
    const auto m = transforms::WeightedAtomMeasure::uniform(atoms);
    const double alpha = 0.05 + 3.0 * unit(rng);
    const Complex z1(20.0 * unit(rng) - 10.0, alpha + 3.0 * unit(rng));
    const Complex z2(20.0 * unit(rng) - 10.0, alpha + 3.0 * unit(rng));
    const Complex g1 = transforms::empirical_cauchy(m, z1);
    const Complex g2 = transforms::empirical_cauchy(m, z2);
    const double slack = 1.0 + 4.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(g1) > slack / alpha || std::abs(g1 - g2) > slack * std::abs(z1 - z2) / (alpha * alpha)) ++violations;
  }
  return result("Cauchy transform: |G| <= 1/a, Lipschitz 1/a^2", violations == 0,
                std::to_string(violations) + " violations / 1000");
}

InvariantResult weyl_interlacing(Rng& rng) {
  const dbm::InitialLaw law(dbm::CauchyLaw{5.0});
  std::size_t failures = 0;
  for (std::size_t r = 0; r < 20; ++r) {
    auto sample = dbm::simulate_dyson_matrix(law, 60, 1.0, rng);
    if (!dbm::satisfies_weyl_interlacing(sample).value_or(false)) ++failures;
  }
  return result("simulator: Weyl interlacing", failures == 0, std::to_string(failures) + " failures / 20");
}

InvariantResult simulation_determinism(Rng&) {
  const dbm::InitialLaw law(dbm::GaussianLaw{1.0});
  const auto a = dbm::simulate(law, 80, 1.0, 42, 3);
  const auto b = dbm::simulate(law, 80, 1.0, 42, 3);
  const auto c = dbm::simulate(law, 80, 1.0, 42, 4);
  const bool ok = a.eigenvalues == b.eigenvalues && a.eigenvalues != c.eigenvalues;
  return result("simulator: (seed, replicate) determinism", ok, ok ? "identical" : "mismatch");
}

InvariantResult estimator_checks(Rng&) {
  const dbm::InitialLaw law(dbm::CauchyLaw{5.0});
  auto sample = dbm::simulate(law, 400, 1.0, 11, 0);
  deconv::EstimatorConfig cfg;
  const deconv::Deconvolver deconvolver(cfg);
  const auto estimate = deconvolver.estimate(dbm::empirical_measure(sample), 1.0);
  const auto p0 = [&law](double x) { return *law.density(x); };
  // Squared norm of p0 by the same grid rule as ISE and J.
  double norm_p0 = 0.0;
  for (std::size_t j = 0; j < estimate.grid.size(); ++j) norm_p0 += p0(estimate.grid.point(j)) * p0(estimate.grid.point(j));
  norm_p0 *= estimate.grid.spacing();
  const double gap = std::abs(bandwidth::j_criterion(estimate, p0) + norm_p0 - deconv::ise(estimate, p0));
  bool finite = true;
  for (const double v : estimate.values) finite = finite && std::isfinite(v);
  const bool ok = finite && gap <= 1e-8 && estimate.max_abs_imag <= 1e-8;
  std::ostringstream detail;
  detail << "|J + |p0|^2 - ISE| = " << format_double(gap) << ", max |Im| = " << format_double(estimate.max_abs_imag);
  return result("estimator: finite, real, J identity", ok, detail.str());
}

InvariantResult recursion_residuals(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = 0.2 + 2.0 * unit(rng);
    const double gamma = 2.0 + unit(rng);
    const bool below = i % 2 == 0;
    const double r = below ? 0.05 + 0.9 * unit(rng) : 1.0 / (0.05 + 0.9 * unit(rng));
    const double alpha = below ? r : 1.0 / r;
    const double c = below ? 2.0 * a / std::pow(2.0 * gamma, r) : 2.0 * gamma / std::pow(2.0 * a, 1.0 / r);
    const int k = std::min(4, bandwidth::expansion_order(r));
    const auto x = below ? bandwidth::b_star(a, r, gamma, k) : bandwidth::d_star(a, r, gamma, k);
    // M_i = x_i + c sum_j binom(alpha, j+1) [u^{i-j-1}] X(u)^{j+1}
    std::vector<std::vector<double>> powers(static_cast<std::size_t>(k) + 2, std::vector<double>(k + 1, 0.0));
    powers[0][0] = 1.0;
    for (int m = 1; m <= k + 1; ++m) {
      for (int d = 0; d <= k; ++d) {
        for (int e = 0; e <= d; ++e) powers[m][d] += x[e] * powers[m - 1][d - e];
      }
    }
    for (int q = 0; q <= k; ++q) {
      double m_q = x[q];
      if (q == 0) m_q += c;
      for (int j = 0; j < q; ++j) {
        double binom = 1.0;
        for (int s = 0; s <= j; ++s) binom *= (alpha - s) / (s + 1);
        m_q += c * binom * powers[j + 1][q - j - 1];
      }
      err = std::max(err, std::abs(m_q));
    }
  }
  return result("bandwidth: recursion residuals M_i = 0", err <= 1e-10, worst(err));
}

}  // namespace

std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed, unsigned threads) {
  const std::vector<Check> checks{
      {"semicircle", semicircle_identities},   {"point_mass", point_mass_oracle},
      {"single_atom", single_atom_quadratic},  {"bounds", fixed_point_bounds},
      {"transform", transform_bounds},         {"weyl", weyl_interlacing},
      {"determinism", simulation_determinism}, {"estimator", estimator_checks},
      {"recursion", recursion_residuals},
  };
  std::vector<InvariantResult> results(checks.size());
  parallel_for(checks.size(), threads, [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    try {
      results[i] = checks[i].run(rng);
    } catch (const std::exception& e) {
      results[i] = {checks[i].name, false, std::string("threw: ") + e.what()};
    }
  });
  return results;
}

void print_invariant_table(std::ostream& out, const std::vector<InvariantResult>& results) {
  std::size_t width = 9;
  for (const auto& r : results) width = std::max(width, r.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "invariant" << "  result  detail\n";
  for (const auto& r : results) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.passed ? "PASS" : "FAIL") << "    "
        << r.detail << '\n';
  }
}

}  // namespace fpdeconv::harness
