#pragma once

// Monte Carlo studies over replicates. Replicate r at size n always uses
// the sample source's stream (seed, r); replicates run concurrently and
// results are gathered in replicate order, so the output does not depend on
// the thread count. A failed replicate is excluded and counted; more than
// 10% failures at any n fails the whole study with NumericalError.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fpdeconv/config.hpp"
#include "fpdeconv/experiment.hpp"

namespace fpdeconv::harness {

struct ReplicateFailure {
  std::size_t n = 0;
  std::uint64_t replicate = 0;
  std::string stage;
  std::string message;
};

struct MiseRow {
  std::size_t n = 0;
  double mean_ise = 0.0;
  double sd_ise = 0.0;
  std::size_t replicates = 0;  // successful replicates
};

struct MiseStudy {
  std::vector<MiseRow> rows;
  std::vector<MetricsRow> metrics;
  std::vector<ReplicateFailure> failures;
  // Least-squares slope of log(mean ISE) against log(n); needs >= 2 rows.
  std::optional<double> log_log_slope;
};

// Requires a law with a known density (ConfigError otherwise).
MiseStudy run_mise_study(const ExperimentConfig& cfg, const SampleSource& source = nullptr);
void write_mise_csv(std::ostream& out, const MiseStudy& study);

struct FluctuationRow {
  std::size_t n = 0;
  transforms::Complex z;
  double mean_sq = 0.0;    // mean over replicates of |w_hat(z) - w(z)|^2
  double n_mean_sq = 0.0;  // n * mean_sq
  std::size_t replicates = 0;
};

struct FluctuationStudy {
  std::vector<FluctuationRow> rows;  // n-major, then the order of cfg.fluct_z
  std::vector<ReplicateFailure> failures;
};

// The subordination point of the true law at z: solved against
// G_{mu_t} when the law provides it, else z + t G_{mu0}(z). ConfigError when
// neither is available.
transforms::Complex reference_subordination(const dbm::InitialLaw& law, transforms::Complex z, double t,
                                            const subordination::SolverOptions& options = {});

FluctuationStudy run_fluctuation_study(const ExperimentConfig& cfg, const SampleSource& source = nullptr);
void write_fluctuation_csv(std::ostream& out, const FluctuationStudy& study);

struct VarianceRow {
  std::size_t n = 0;
  double h = 0.0;
  double var_proxy = 0.0;  // (1/(R-1)) sum_r ||p_r - p_mean||^2
  std::size_t replicates = 0;
};

struct VarianceStudy {
  std::vector<VarianceRow> rows;
  std::vector<ReplicateFailure> failures;
  // var_proxy at the last n divided by var_proxy at the first n.
  std::optional<double> ratio;
};

// Uses the fixed bandwidth cfg.h for every n in cfg.n_list. Needs R >= 2.
VarianceStudy run_variance_study(const ExperimentConfig& cfg, const SampleSource& source = nullptr);
void write_variance_csv(std::ostream& out, const VarianceStudy& study);

// Ordinary least-squares slope of log(y) on log(x). Requires >= 2 points
// and positive values.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fpdeconv::harness
