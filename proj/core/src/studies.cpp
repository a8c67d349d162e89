#include "fpdeconv/studies.hpp"

#include <cmath>
#include <numeric>

#include "fpdeconv/errors.hpp"
#include "fpdeconv/parallel.hpp"

namespace fpdeconv::harness {

namespace {

// Outcome of one replicate: a value or the failure that excluded it.
template <typename T>
struct Outcome {
  std::optional<T> value;
  std::optional<ReplicateFailure> failure;
};

template <typename T, typename Fn>
std::vector<Outcome<T>> run_replicates(std::size_t n, std::size_t replicates, unsigned threads, Fn&& fn) {
  std::vector<Outcome<T>> outcomes(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    try {
      outcomes[r].value = fn(static_cast<std::uint64_t>(r));
    } catch (const StageError& e) {
      if (e.config_problem()) throw;
      outcomes[r].failure = ReplicateFailure{n, r, e.stage(), e.what()};
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      outcomes[r].failure = ReplicateFailure{n, r, "replicate", e.what()};
    }
  });
  return outcomes;
}

template <typename T>
std::vector<T> collect(std::vector<Outcome<T>>& outcomes, std::vector<ReplicateFailure>& failures, std::size_t n) {
  std::vector<T> values;
  std::size_t failed = 0;
  for (auto& o : outcomes) {
    if (o.value) {
      values.push_back(std::move(*o.value));
    } else {
      ++failed;
      failures.push_back(*o.failure);
    }
  }
  if (10 * failed > outcomes.size()) {
    throw NumericalError("study failed: " + std::to_string(failed) + " of " + std::to_string(outcomes.size()) +
                         " replicates failed at n = " + std::to_string(n) + " (first: " +
                         failures[failures.size() - failed].message + ")");
  }
  return values;
}

ExperimentConfig inner_config(const ExperimentConfig& cfg) {
  ExperimentConfig inner = cfg;
  inner.threads = 1;
  return inner;
}

SampleSource resolve_source(const ExperimentConfig& cfg, const SampleSource& source) {
  return source ? source : simulation_source(cfg);
}

}  // namespace

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope: need >= 2 paired points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log_log_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("log_log_slope: x values must not all coincide");
  return sxy / sxx;
}

MiseStudy run_mise_study(const ExperimentConfig& cfg, const SampleSource& source) {
  if (!cfg.law.build().density(0.0)) throw ConfigError("mise study needs a law with a known density");
  const auto inner = inner_config(cfg);
  const auto simulate = resolve_source(cfg, source);
  MiseStudy study;
  for (const std::size_t n : cfg.n_list) {
    auto outcomes = run_replicates<MetricsRow>(n, cfg.replicates, cfg.threads, [&](std::uint64_t r) {
      return run_estimate(inner, n, r, simulate).metrics;
    });
    const auto metrics = collect(outcomes, study.failures, n);
    MiseRow row;
    row.n = n;
    row.replicates = metrics.size();
    for (const auto& m : metrics) row.mean_ise += *m.ise;
    row.mean_ise /= static_cast<double>(metrics.size());
    if (metrics.size() > 1) {
      double ss = 0.0;
      for (const auto& m : metrics) ss += (*m.ise - row.mean_ise) * (*m.ise - row.mean_ise);
      row.sd_ise = std::sqrt(ss / static_cast<double>(metrics.size() - 1));
    }
    study.rows.push_back(row);
    study.metrics.insert(study.metrics.end(), metrics.begin(), metrics.end());
  }
  if (study.rows.size() >= 2) {
    std::vector<double> ns;
    std::vector<double> mise;
    for (const auto& row : study.rows) {
      ns.push_back(static_cast<double>(row.n));
      mise.push_back(row.mean_ise);
    }
    study.log_log_slope = log_log_slope(ns, mise);
  }
  return study;
}

void write_mise_csv(std::ostream& out, const MiseStudy& study) {
  out << "n,mean_ise,sd_ise,replicates\n";
  for (const auto& row : study.rows) {
    if (!std::isfinite(row.mean_ise) || !std::isfinite(row.sd_ise)) throw NumericalError("non-finite MISE value");
    out << row.n << ',' << format_double(row.mean_ise) << ',' << format_double(row.sd_ise) << ',' << row.replicates
        << '\n';
  }
}

transforms::Complex reference_subordination(const dbm::InitialLaw& law, transforms::Complex z, double t,
                                            const subordination::SolverOptions& options) {
  const transforms::UpperHalfPoint point(z.real(), z.imag());
  if (law.cauchy_transform_at_time(z, t)) {
    return subordination::solve_oracle([&law, t](transforms::Complex w) { return *law.cauchy_transform_at_time(w, t); },
                                       point, t, options)
        .w;
  }
  if (const auto g0 = law.initial_transform(z)) return z + t * *g0;
  throw ConfigError("law '" + law.describe() + "' has no transform oracle for the fluctuation study");
}

FluctuationStudy run_fluctuation_study(const ExperimentConfig& cfg, const SampleSource& source) {
  const auto law = cfg.law.build();
  const auto options = cfg.solver_options();
  std::vector<transforms::Complex> reference;
  for (const auto& z : cfg.fluct_z) reference.push_back(reference_subordination(law, z, cfg.t, options));

  const auto simulate = resolve_source(cfg, source);
  FluctuationStudy study;
  for (const std::size_t n : cfg.n_list) {
    auto outcomes = run_replicates<std::vector<double>>(n, cfg.replicates, cfg.threads, [&](std::uint64_t r) {
      dbm::SpectralSample sample;
      try {
        sample = simulate(n, r);
      } catch (const std::invalid_argument& e) {
        throw StageError("simulate", e.what(), true);
      } catch (const std::exception& e) {
        throw StageError("simulate", e.what(), false);
      }
      const auto measure = dbm::empirical_measure(sample);
      std::vector<double> sq(cfg.fluct_z.size());
      for (std::size_t k = 0; k < cfg.fluct_z.size(); ++k) {
        const transforms::UpperHalfPoint z(cfg.fluct_z[k].real(), cfg.fluct_z[k].imag());
        try {
          sq[k] = std::norm(subordination::solve_empirical(measure, z, cfg.t, options).w - reference[k]);
        } catch (const std::exception& e) {
          throw StageError("subordination", e.what(), false);
        }
      }
      return sq;
    });
    const auto values = collect(outcomes, study.failures, n);
    for (std::size_t k = 0; k < cfg.fluct_z.size(); ++k) {
      FluctuationRow row;
      row.n = n;
      row.z = cfg.fluct_z[k];
      row.replicates = values.size();
      for (const auto& v : values) row.mean_sq += v[k];
      row.mean_sq /= static_cast<double>(values.size());
      row.n_mean_sq = static_cast<double>(n) * row.mean_sq;
      study.rows.push_back(row);
    }
  }
  return study;
}

void write_fluctuation_csv(std::ostream& out, const FluctuationStudy& study) {
  out << "n,z_re,z_im,mean_sq,n_mean_sq\n";
  for (const auto& row : study.rows) {
    if (!std::isfinite(row.mean_sq)) throw NumericalError("non-finite fluctuation statistic");
    out << row.n << ',' << format_double(row.z.real()) << ',' << format_double(row.z.imag()) << ','
        << format_double(row.mean_sq) << ',' << format_double(row.n_mean_sq) << '\n';
  }
}

VarianceStudy run_variance_study(const ExperimentConfig& cfg, const SampleSource& source) {
  if (cfg.replicates < 2) throw ConfigError("variance study needs replicates >= 2");
  auto inner = inner_config(cfg);
  inner.bandwidth = BandwidthMode::kFixed;
  inner.validate();
  const auto simulate = resolve_source(cfg, source);
  VarianceStudy study;
  for (const std::size_t n : cfg.n_list) {
    auto outcomes = run_replicates<std::vector<double>>(n, cfg.replicates, cfg.threads, [&](std::uint64_t r) {
      return run_estimate(inner, n, r, simulate).estimate.values;
    });
    const auto values = collect(outcomes, study.failures, n);
    if (values.size() < 2) throw NumericalError("variance study: fewer than 2 successful replicates");
    const std::size_t m = values.front().size();
    std::vector<double> mean(m, 0.0);
    for (const auto& v : values) {
      for (std::size_t j = 0; j < m; ++j) mean[j] += v[j];
    }
    for (auto& x : mean) x /= static_cast<double>(values.size());
    const double dx = inner.estimator_config().spatial.spacing();
    double total = 0.0;
    for (const auto& v : values) {
      double sq = 0.0;
      for (std::size_t j = 0; j < m; ++j) sq += (v[j] - mean[j]) * (v[j] - mean[j]);
      total += sq * dx;
    }
    study.rows.push_back({n, cfg.h, total / static_cast<double>(values.size() - 1), values.size()});
  }
  if (study.rows.size() >= 2) study.ratio = study.rows.back().var_proxy / study.rows.front().var_proxy;
  return study;
}

void write_variance_csv(std::ostream& out, const VarianceStudy& study) {
  out << "n,var_proxy\n";
  for (const auto& row : study.rows) {
    if (!std::isfinite(row.var_proxy)) throw NumericalError("non-finite variance proxy");
    out << row.n << ',' << format_double(row.var_proxy) << '\n';
  }
}

}  // namespace fpdeconv::harness
