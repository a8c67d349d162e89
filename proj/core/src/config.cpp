#include "fpdeconv/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fpdeconv/errors.hpp"

namespace fpdeconv::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(s);
  while (std::getline(is, part, sep)) parts.push_back(trim(part));
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc() || result.ptr != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite number");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc() || result.ptr != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(to_u64(key, value));
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

// "re:im" pairs separated by commas.
std::vector<transforms::Complex> to_points(const std::string& key, const std::string& value) {
  std::vector<transforms::Complex> points;
  for (const auto& item : split(value, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) bad_value(key, value, "comma-separated re:im pairs");
    points.emplace_back(to_double(key, trim(item.substr(0, colon))), to_double(key, trim(item.substr(colon + 1))));
  }
  if (points.empty()) bad_value(key, value, "at least one re:im pair");
  return points;
}

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

std::string join_points(const std::vector<transforms::Complex>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? "," : "") + format_double(values[i].real()) + ":" + format_double(values[i].imag());
  }
  return out;
}

BandwidthMode bandwidth_mode_from_string(const std::string& key, const std::string& value) {
  if (value == "fixed") return BandwidthMode::kFixed;
  if (value == "cv") return BandwidthMode::kCv;
  if (value == "theoretical") return BandwidthMode::kTheoretical;
  bad_value(key, value, "fixed, cv or theoretical");
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value, bool& gamma_set) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "law") cfg.law.name = value;
  else if (key == "law.scale") cfg.law.scale = to_double(key, value);
  else if (key == "law.sd") cfg.law.sd = to_double(key, value);
  else if (key == "law.at") cfg.law.at = to_double(key, value);
  else if (key == "law.a1") cfg.law.a1 = to_double(key, value);
  else if (key == "law.a2") cfg.law.a2 = to_double(key, value);
  else if (key == "law.p") cfg.law.p = to_double(key, value);
  else if (key == "n") cfg.n = to_size(key, value);
  else if (key == "n_list") {
    cfg.n_list.clear();
    for (const auto& item : split(value, ',')) cfg.n_list.push_back(to_size(key, item));
  } else if (key == "t") cfg.t = to_double(key, value);
  else if (key == "gamma") {
    cfg.gamma = to_double(key, value);
    gamma_set = true;
  } else if (key == "kernel") cfg.kernel = value;
  else if (key == "x_min") cfg.x_min = to_double(key, value);
  else if (key == "x_max") cfg.x_max = to_double(key, value);
  else if (key == "x_points") cfg.x_points = to_size(key, value);
  else if (key == "xi_max") cfg.xi_max = to_double(key, value);
  else if (key == "xi_points") cfg.xi_points = to_size(key, value);
  else if (key == "bandwidth") cfg.bandwidth = bandwidth_mode_from_string(key, value);
  else if (key == "h") cfg.h = to_double(key, value);
  else if (key == "smooth.a") cfg.smoothness.a = to_double(key, value);
  else if (key == "smooth.r") cfg.smoothness.r = to_double(key, value);
  else if (key == "smooth.L") cfg.smoothness.L = to_double(key, value);
  else if (key == "cv.partitions") cfg.cv_partitions = to_size(key, value);
  else if (key == "cv.h_min") cfg.cv_h_min = to_double(key, value);
  else if (key == "cv.h_max") cfg.cv_h_max = to_double(key, value);
  else if (key == "cv.h_count") cfg.cv_h_count = to_size(key, value);
  else if (key == "replicates") cfg.replicates = to_size(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "backend") {
    try {
      cfg.backend = dbm::backend_from_string(value);
    } catch (const std::invalid_argument&) {
      bad_value(key, value, "matrix or sde");
    }
  } else if (key == "sde.steps") cfg.sde_steps = to_size(key, value);
  else if (key == "record_eta_star") cfg.record_eta_star = to_bool(key, value);
  else if (key == "solver.tol") cfg.solver_tol = to_double(key, value);
  else if (key == "solver.max_iter") cfg.solver_max_iter = static_cast<int>(to_u64(key, value));
  else if (key == "solver.acceleration") {
    if (value == "none") cfg.acceleration = subordination::Acceleration::kNone;
    else if (value == "newton") cfg.acceleration = subordination::Acceleration::kNewton;
    else bad_value(key, value, "none or newton");
  } else if (key == "fluct.z") cfg.fluct_z = to_points(key, value);
  else if (key == "clip") cfg.clip = to_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

KeyValueDocument cauchy_n4000() {
  KeyValueDocument doc;
  doc.set("experiment", "cauchy-n4000");
  doc.set("law", "cauchy");
  doc.set("law.scale", 5.0);
  doc.set("n", 4000ULL);
  doc.set("n_list", "500,1000,2000,4000");
  doc.set("t", 1.0);
  doc.set("gamma", 2.01);
  doc.set("kernel", "sinc");
  doc.set("bandwidth", "cv");
  doc.set("cv.partitions", 10ULL);
  doc.set("cv.h_min", 0.25);
  doc.set("cv.h_max", 2.7);
  doc.set("cv.h_count", 50ULL);
  doc.set("smooth.a", 1.0);
  doc.set("smooth.r", 1.0);
  doc.set("backend", "matrix");
  return doc;
}

KeyValueDocument smoke() {
  KeyValueDocument doc = cauchy_n4000();
  doc.set("experiment", "smoke");
  doc.set("n", 200ULL);
  doc.set("n_list", "100,200");
  doc.set("replicates", 2ULL);
  doc.set("cv.partitions", 2ULL);
  doc.set("cv.h_count", 10ULL);
  return doc;
}

}  // namespace

std::string to_string(BandwidthMode mode) {
  switch (mode) {
    case BandwidthMode::kFixed: return "fixed";
    case BandwidthMode::kCv: return "cv";
    case BandwidthMode::kTheoretical: return "theoretical";
  }
  return "unknown";
}

dbm::InitialLaw LawSpec::build() const {
  try {
    if (name == "cauchy") return dbm::InitialLaw(dbm::CauchyLaw{scale});
    if (name == "gaussian") return dbm::InitialLaw(dbm::GaussianLaw{sd});
    if (name == "point_mass") return dbm::InitialLaw(dbm::PointMassLaw{at});
    if (name == "two_point") return dbm::InitialLaw(dbm::TwoPointMixtureLaw{a1, a2, p});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("law: ") + e.what());
  }
  throw ConfigError("unknown law '" + name + "' (expected cauchy, gaussian, point_mass or two_point)");
}

void ExperimentConfig::validate() const {
  if (!(t > 0.0)) throw ConfigError("t must be > 0");
  if (!(gamma > 2.0 * std::sqrt(t))) {
    throw ConfigError("gamma = " + format_double(gamma) + " must exceed 2 sqrt(t) = " + format_double(2.0 * std::sqrt(t)));
  }
  if (n < 2) throw ConfigError("n must be >= 2");
  if (n_list.empty()) throw ConfigError("n_list must not be empty");
  for (const auto m : n_list) {
    if (m < 2) throw ConfigError("every n in n_list must be >= 2");
  }
  if (kernel != "sinc") throw ConfigError("unknown kernel '" + kernel + "' (expected sinc)");
  if (!(x_max > x_min) || x_points < 2) throw ConfigError("spatial grid needs x_min < x_max and x_points >= 2");
  if (!(xi_max > 0.0) || xi_points < 2) throw ConfigError("frequency grid needs xi_max > 0 and xi_points >= 2");
  if (!(h > 0.0)) throw ConfigError("h must be > 0");
  if (bandwidth == BandwidthMode::kFixed && xi_max < 1.0 / h) {
    throw ConfigError("xi_max must be >= 1/h for the fixed bandwidth");
  }
  if (bandwidth == BandwidthMode::kCv && xi_max < 1.0 / cv_h_min) {
    throw ConfigError("xi_max must be >= 1/cv.h_min");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (!(solver_tol > 0.0) || solver_max_iter < 1) throw ConfigError("solver.tol and solver.max_iter must be positive");
  if (sde_steps < 1) throw ConfigError("sde.steps must be >= 1");
  for (const auto& z : fluct_z) {
    if (!(z.imag() > 2.0 * std::sqrt(t))) throw ConfigError("every fluct.z point needs Im z > 2 sqrt(t)");
  }
  try {
    smoothness.validate();
    cv_config().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  (void)law.build();
}

deconv::EstimatorConfig ExperimentConfig::estimator_config() const {
  deconv::EstimatorConfig cfg;
  cfg.gamma = gamma;
  cfg.t = t;
  cfg.spatial = deconv::SpatialGrid(x_min, x_max, x_points);
  cfg.frequency = deconv::FrequencyGrid(xi_max, xi_points);
  cfg.kernel = deconv::Kernel::sinc();
  cfg.solver = solver_options();
  cfg.threads = threads;
  return cfg;
}

bandwidth::CVConfig ExperimentConfig::cv_config() const {
  bandwidth::CVConfig cv;
  if (cv_h_count < 2 || !(cv_h_min > 0.0) || !(cv_h_max > cv_h_min)) {
    throw ConfigError("cv grid needs cv.h_count >= 2 and 0 < cv.h_min < cv.h_max");
  }
  cv.grid = bandwidth::CVConfig::equispaced(cv_h_min, cv_h_max, cv_h_count);
  cv.partitions = cv_partitions;
  cv.seed = seed;
  return cv;
}

dbm::SimulationOptions ExperimentConfig::simulation_options() const {
  dbm::SimulationOptions options;
  options.backend = backend;
  options.matrix.record_eta_star = record_eta_star;
  options.sde.steps = sde_steps;
  return options;
}

subordination::SolverOptions ExperimentConfig::solver_options() const {
  subordination::SolverOptions options;
  options.tol = solver_tol;
  options.max_iter = solver_max_iter;
  options.acceleration = acceleration;
  return options;
}

KeyValueDocument ExperimentConfig::to_document() const {
  KeyValueDocument doc;
  doc.set("experiment", experiment);
  doc.set("law", law.name);
  if (law.name == "cauchy") doc.set("law.scale", law.scale);
  if (law.name == "gaussian") doc.set("law.sd", law.sd);
  if (law.name == "point_mass") doc.set("law.at", law.at);
  if (law.name == "two_point") {
    doc.set("law.a1", law.a1);
    doc.set("law.a2", law.a2);
    doc.set("law.p", law.p);
  }
  doc.set("n", static_cast<unsigned long long>(n));
  doc.set("n_list", join_sizes(n_list));
  doc.set("t", t);
  doc.set("gamma", gamma);
  doc.set("kernel", kernel);
  doc.set("x_min", x_min);
  doc.set("x_max", x_max);
  doc.set("x_points", static_cast<unsigned long long>(x_points));
  doc.set("xi_max", xi_max);
  doc.set("xi_points", static_cast<unsigned long long>(xi_points));
  doc.set("bandwidth", to_string(bandwidth));
  doc.set("h", h);
  doc.set("smooth.a", smoothness.a);
  doc.set("smooth.r", smoothness.r);
  doc.set("smooth.L", smoothness.L);
  doc.set("cv.partitions", static_cast<unsigned long long>(cv_partitions));
  doc.set("cv.h_min", cv_h_min);
  doc.set("cv.h_max", cv_h_max);
  doc.set("cv.h_count", static_cast<unsigned long long>(cv_h_count));
  doc.set("replicates", static_cast<unsigned long long>(replicates));
  doc.set("seed", static_cast<unsigned long long>(seed));
  doc.set("backend", dbm::to_string(backend));
  doc.set("sde.steps", static_cast<unsigned long long>(sde_steps));
  doc.set("record_eta_star", record_eta_star);
  doc.set("solver.tol", solver_tol);
  doc.set("solver.max_iter", static_cast<long long>(solver_max_iter));
  doc.set("solver.acceleration", acceleration == subordination::Acceleration::kNewton ? "newton" : "none");
  doc.set("fluct.z", join_points(fluct_z));
  doc.set("clip", clip);
  return doc;
}

std::vector<std::string> preset_names() { return {"cauchy-n4000", "paper-sec5", "smoke"}; }

KeyValueDocument preset_document(const std::string& name) {
  // "paper-sec5" is kept as an alias because scripts already use it.
  if (name == "cauchy-n4000" || name == "paper-sec5") return cauchy_n4000();
  if (name == "smoke") return smoke();
  std::string known;
  for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

ExperimentConfig resolve_config(const KeyValueDocument& doc, const std::optional<std::string>& preset) {
  KeyValueDocument merged;
  auto merge = [&merged](const KeyValueDocument& source) {
    for (const auto& [k, v] : source.entries()) {
      if (k != "preset") merged.set(k, v);
    }
  };
  if (preset) merge(preset_document(*preset));
  if (const auto inner = doc.get("preset")) merge(preset_document(*inner));
  merge(doc);

  ExperimentConfig cfg;
  bool gamma_set = false;
  for (const auto& [k, v] : merged.entries()) apply(cfg, k, v, gamma_set);
  if (!gamma_set) cfg.gamma = 2.0 * std::sqrt(cfg.t) + 0.01;
  cfg.validate();
  return cfg;
}

KeyValueDocument read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return KeyValueDocument::parse(in, path.string());
}

}  // namespace fpdeconv::harness
