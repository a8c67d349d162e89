#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpdeconv/bandwidth.hpp"
#include "fpdeconv/config.hpp"
#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"
#include "fpdeconv/errors.hpp"

namespace fpdeconv::harness {

// Failure inside one pipeline stage ("simulate", "cv", "estimate", ...).
// config_problem is set when the underlying error was an invalid argument
// rather than a numerical failure.
class StageError : public NumericalError {
 public:
  StageError(std::string stage, const std::string& message, bool config_problem)
      : NumericalError(stage + ": " + message), stage_(std::move(stage)), config_problem_(config_problem) {}
  const std::string& stage() const noexcept { return stage_; }
  bool config_problem() const noexcept { return config_problem_; }

 private:
  std::string stage_;
  bool config_problem_;
};

// Produces the spectral sample of replicate r at size n.
using SampleSource = std::function<dbm::SpectralSample(std::size_t n, std::uint64_t replicate)>;

// Simulates from the configured law, backend and base seed.
SampleSource simulation_source(const ExperimentConfig& cfg);

struct MetricsRow {
  std::string experiment;
  std::uint64_t replicate = 0;
  std::size_t n = 0;
  double h = 0.0;
  double gamma = 0.0;
  std::optional<double> ise;  // only when p0 is known
  double runtime_seconds = 0.0;
  double mean_solver_iterations = 0.0;
  int max_solver_iterations = 0;
  double max_abs_imag = 0.0;
  std::string status = "ok";  // or "failed:<stage>"
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

struct EstimateRun {
  dbm::SpectralSample sample;
  deconv::DensityEstimate estimate;
  MetricsRow metrics;
  std::optional<bandwidth::CVReport> cv;
  // J(h) over the CV grid, when p0 is known and the bandwidth came from CV.
  std::optional<std::vector<double>> j_oracle;
};

// CV partitions for replicate r are drawn from a stream derived from
// (seed, r), so replicates stay independent.
std::uint64_t cv_seed(std::uint64_t seed, std::uint64_t replicate);

// simulate -> (CV | theoretical | fixed h) -> estimate -> metrics, for
// replicate `replicate` at size `n`. Stage failures throw StageError.
EstimateRun run_estimate(const ExperimentConfig& cfg, std::size_t n, std::uint64_t replicate,
                         const SampleSource& source = nullptr);
// Same, on a fixed eigenvalue sample. With truth_known = false (imported
// data) no ISE or J oracle is computed.
EstimateRun run_estimate_on(const ExperimentConfig& cfg, dbm::SpectralSample sample, std::uint64_t replicate = 0,
                            bool truth_known = true);

// The bandwidth used for a sample of size n when the mode is not CV.
double resolve_bandwidth(const ExperimentConfig& cfg, std::size_t n);

// CSV `x,p0,p0_hat`; p0 is left empty when law is null or has no density.
// Throws NumericalError on a non-finite value.
void write_estimate_with_truth_csv(std::ostream& out, const deconv::DensityEstimate& estimate,
                                   const dbm::InitialLaw* law);

// Library version string.
std::string version();

// Column roles for external plotting tools.
KeyValueDocument plot_spec(const std::string& command);

}  // namespace fpdeconv::harness
