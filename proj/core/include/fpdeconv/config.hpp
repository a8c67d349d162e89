#pragma once

// Experiment configuration: a flat `key = value` file with typed keys.
// A `preset = <name>` line pulls in a named base configuration first; keys in
// the file override it regardless of their position.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fpdeconv/bandwidth.hpp"
#include "fpdeconv/dbm.hpp"
#include "fpdeconv/deconv.hpp"
#include "fpdeconv/initial_law.hpp"
#include "fpdeconv/keyvalue.hpp"

namespace fpdeconv::harness {

enum class BandwidthMode { kFixed, kCv, kTheoretical };

std::string to_string(BandwidthMode mode);

struct LawSpec {
  std::string name = "cauchy";  // cauchy | gaussian | point_mass | two_point
  double scale = 5.0;
  double sd = 1.0;
  double at = 0.0;
  double a1 = -1.0;
  double a2 = 1.0;
  double p = 0.5;

  // Throws ConfigError for an unknown name or invalid parameters.
  dbm::InitialLaw build() const;
};

struct ExperimentConfig {
  std::string experiment = "run";
  LawSpec law;
  std::size_t n = 4000;
  std::vector<std::size_t> n_list{500, 1000, 2000, 4000};
  double t = 1.0;
  double gamma = 2.01;
  std::string kernel = "sinc";

  double x_min = -150.0;
  double x_max = 150.0;
  std::size_t x_points = 1501;
  double xi_max = 4.0;
  std::size_t xi_points = 801;

  BandwidthMode bandwidth = BandwidthMode::kCv;
  double h = 1.0;
  bandwidth::SmoothnessClass smoothness{1.0, 1.0, 1.0};
  std::size_t cv_partitions = 10;
  double cv_h_min = 0.25;
  double cv_h_max = 2.7;
  std::size_t cv_h_count = 50;

  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  dbm::Backend backend = dbm::Backend::kMatrix;
  std::size_t sde_steps = 100000;
  bool record_eta_star = false;

  double solver_tol = 1e-12;
  int solver_max_iter = 10000;
  subordination::Acceleration acceleration = subordination::Acceleration::kNone;

  std::vector<transforms::Complex> fluct_z{{5.0, 2.010201}, {-5.0, 2.010201}, {0.0, 2.5}};
  bool clip = false;

  // Not part of the file format; results do not depend on it.
  unsigned threads = 1;

  // Throws ConfigError on any inconsistency, including gamma <= 2 sqrt(t).
  void validate() const;

  deconv::EstimatorConfig estimator_config() const;
  bandwidth::CVConfig cv_config() const;
  dbm::SimulationOptions simulation_options() const;
  subordination::SolverOptions solver_options() const;

  // Every key with its resolved value, in a fixed order.
  KeyValueDocument to_document() const;
};

// Names accepted by `preset`.
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown preset.
KeyValueDocument preset_document(const std::string& name);

// Applies, in order: the preset named by `preset` (if any), the preset named
// inside `doc` (if any), then the remaining keys of `doc`. Missing gamma
// defaults to 2 sqrt(t) + 0.01. The result is validated.
ExperimentConfig resolve_config(const KeyValueDocument& doc, const std::optional<std::string>& preset = std::nullopt);

// Reads and parses a config file; a missing or unreadable file throws
// ConfigError naming the path.
KeyValueDocument read_config_file(const std::filesystem::path& path);

}  // namespace fpdeconv::harness
