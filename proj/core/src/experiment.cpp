#include "fpdeconv/experiment.hpp"

#include <chrono>
#include <cmath>

#include "fpdeconv/rng.hpp"

namespace fpdeconv::harness {

namespace {

constexpr std::uint64_t kCvStream = 0x63762d73706c6974ULL;

template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw StageError(stage, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), false);
  }
}

std::function<double(double)> density_of(const dbm::InitialLaw& law) {
  if (!law.density(0.0)) return nullptr;
  return [law](double x) { return *law.density(x); };
}

}  // namespace

SampleSource simulation_source(const ExperimentConfig& cfg) {
  const dbm::InitialLaw law = cfg.law.build();
  const auto options = cfg.simulation_options();
  const double t = cfg.t;
  const std::uint64_t seed = cfg.seed;
  return [law, options, t, seed](std::size_t n, std::uint64_t replicate) {
    return dbm::simulate(law, n, t, seed, replicate, options);
  };
}

void write_metrics_header(std::ostream& out) {
  out << "experiment,replicate,n,h,gamma,ise,runtime_s,mean_solver_iter,max_solver_iter,max_abs_imag,status\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& row) {
  out << row.experiment << ',' << row.replicate << ',' << row.n << ',' << format_double(row.h) << ','
      << format_double(row.gamma) << ',' << (row.ise ? format_double(*row.ise) : std::string()) << ','
      << format_double(row.runtime_seconds) << ',' << format_double(row.mean_solver_iterations) << ','
      << row.max_solver_iterations << ',' << format_double(row.max_abs_imag) << ',' << row.status << '\n';
}

std::uint64_t cv_seed(std::uint64_t seed, std::uint64_t replicate) {
  return stream_seed(stream_seed(seed, replicate), kCvStream);
}

double resolve_bandwidth(const ExperimentConfig& cfg, std::size_t n) {
  switch (cfg.bandwidth) {
    case BandwidthMode::kFixed: return cfg.h;
    case BandwidthMode::kTheoretical: return bandwidth::theoretical_bandwidth(cfg.smoothness, cfg.gamma, n);
    case BandwidthMode::kCv: break;
  }
  throw std::logic_error("resolve_bandwidth: CV bandwidth depends on the sample");
}

EstimateRun run_estimate_on(const ExperimentConfig& cfg, dbm::SpectralSample sample, std::uint64_t replicate,
                            bool truth_known) {
  const auto start = std::chrono::steady_clock::now();
  const dbm::InitialLaw law = cfg.law.build();
  const auto p0 = truth_known ? density_of(law) : nullptr;
  const auto estimator = cfg.estimator_config();
  const deconv::Deconvolver deconvolver = staged("estimate", [&] { return deconv::Deconvolver(estimator); });

  const std::size_t n = sample.eigenvalues.size();
  const auto prepared = staged("subordination", [&] { return deconvolver.prepare(dbm::empirical_measure(sample)); });

  std::optional<bandwidth::CVReport> cv_report;
  std::optional<std::vector<double>> j_oracle;
  double h = 0.0;
  if (cfg.bandwidth == BandwidthMode::kCv) {
    auto cv = cfg.cv_config();
    cv.seed = cv_seed(cfg.seed, replicate);
    cv_report = staged("cv", [&] { return bandwidth::cv_select(sample, cv, estimator); });
    h = cv_report->selected_h;
    if (p0) {
      j_oracle = staged("oracle", [&] {
        std::vector<double> j(cv.grid.size());
        for (std::size_t i = 0; i < cv.grid.size(); ++i) {
          j[i] = bandwidth::j_criterion(deconvolver.assemble(prepared, cv.grid[i]), p0);
        }
        return j;
      });
    }
  } else {
    h = staged("bandwidth", [&] { return resolve_bandwidth(cfg, n); });
  }

  auto estimate = staged("estimate", [&] {
    auto e = deconvolver.assemble(prepared, h);
    return cfg.clip ? deconv::clip_and_renormalize(std::move(e)) : e;
  });
  EstimateRun run{std::move(sample), std::move(estimate), {}, std::move(cv_report), std::move(j_oracle)};

  MetricsRow& m = run.metrics;
  m.experiment = cfg.experiment;
  m.replicate = replicate;
  m.n = n;
  m.h = h;
  m.gamma = cfg.gamma;
  if (p0) m.ise = deconv::ise(run.estimate, p0);
  m.mean_solver_iterations = run.estimate.mean_solver_iterations;
  m.max_solver_iterations = run.estimate.max_solver_iterations;
  m.max_abs_imag = run.estimate.max_abs_imag;
  m.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

EstimateRun run_estimate(const ExperimentConfig& cfg, std::size_t n, std::uint64_t replicate,
                         const SampleSource& source) {
  const auto start = std::chrono::steady_clock::now();
  const SampleSource simulate = source ? source : simulation_source(cfg);
  auto sample = staged("simulate", [&] { return simulate(n, replicate); });
  auto run = run_estimate_on(cfg, std::move(sample), replicate);
  run.metrics.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

void write_estimate_with_truth_csv(std::ostream& out, const deconv::DensityEstimate& estimate,
                                   const dbm::InitialLaw* law) {
  out << "x,p0,p0_hat\n";
  for (std::size_t j = 0; j < estimate.values.size(); ++j) {
    const double x = estimate.grid.point(j);
    const double value = estimate.values[j];
    const auto truth = law ? law->density(x) : std::nullopt;
    if (!std::isfinite(value) || (truth && !std::isfinite(*truth))) {
      throw NumericalError("non-finite density value at x = " + format_double(x));
    }
    out << format_double(x) << ',' << (truth ? format_double(*truth) : std::string()) << ',' << format_double(value)
        << '\n';
  }
}

std::string version() { return FPDECONV_VERSION; }

KeyValueDocument plot_spec(const std::string& command) {
  KeyValueDocument doc;
  doc.set("data", command + ".csv");
  if (command == "estimate") {
    doc.set("x", "x");
    doc.set("y", "p0,p0_hat");
    doc.set("kind", "line");
  } else if (command == "cv") {
    doc.set("x", "h");
    doc.set("y", "crit,j_oracle");
    doc.set("kind", "line");
  } else if (command == "mise") {
    doc.set("x", "n");
    doc.set("y", "mean_ise");
    doc.set("error", "sd_ise");
    doc.set("scale", "loglog");
  } else if (command == "fluct") {
    doc.set("x", "n");
    doc.set("y", "n_mean_sq");
    doc.set("group", "z_re,z_im");
    doc.set("scale", "logx");
  } else if (command == "var") {
    doc.set("x", "n");
    doc.set("y", "var_proxy");
    doc.set("scale", "loglog");
  } else if (command == "spectrum") {
    doc.set("x", "lambda_0");
    doc.set("y", "lambda_t");
    doc.set("kind", "scatter");
  }
  return doc;
}

}  // namespace fpdeconv::harness
