// fpdeconv command line: simulate, estimate, cv, mise, fluct, var, verify.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fpdeconv/bandwidth.hpp"
#include "fpdeconv/config.hpp"
#include "fpdeconv/errors.hpp"
#include "fpdeconv/experiment.hpp"
#include "fpdeconv/parallel.hpp"
#include "fpdeconv/spectrum_io.hpp"
#include "fpdeconv/studies.hpp"
#include "fpdeconv/verify.hpp"

namespace fs = std::filesystem;
using namespace fpdeconv;
using namespace fpdeconv::harness;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out = "runs";
  std::optional<std::string> preset;
  unsigned threads = default_thread_count();
  std::optional<std::string> eigenvalues;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool eigenvalues) {
  cmd->add_option("--config", o.config, "Configuration file (key = value)");
  cmd->add_option("--seed", o.seed, "Base seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--preset", o.preset, "Named base configuration")
      ->check(CLI::IsMember(preset_names()));
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  if (eigenvalues) cmd->add_option("--eigenvalues", o.eigenvalues, "Use eigenvalues from a CSV instead of simulating");
}

ExperimentConfig load(const CommonOptions& o) {
  KeyValueDocument doc = o.config ? read_config_file(*o.config) : KeyValueDocument{};
  if (o.seed) doc.set("seed", static_cast<unsigned long long>(*o.seed));
  auto cfg = resolve_config(doc, o.preset);
  cfg.threads = o.threads;
  return cfg;
}

class Output {
 public:
  Output(const std::string& dir, std::string command) : dir_(dir), command_(std::move(command)) {
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    f.precision(17);
    return f;
  }

  // Writes the data CSV through `fn`; the file only appears once complete.
  template <typename Fn>
  void csv(const std::string& stem, Fn&& fn) const {
    const fs::path tmp = dir_ / (stem + ".csv.tmp");
    {
      std::ofstream f(tmp);
      if (!f) throw std::runtime_error("cannot write " + tmp.string());
      try {
        fn(f);
      } catch (...) {
        f.close();
        fs::remove(tmp);
        throw;
      }
    }
    fs::rename(tmp, dir_ / (stem + ".csv"));
    auto spec = open(stem + ".plot");
    plot_spec(stem).write(spec);
  }

  void meta(const ExperimentConfig& cfg, const KeyValueDocument& extra) const {
    KeyValueDocument doc;
    doc.set("command", command_);
    doc.set("version", version());
    const auto resolved = cfg.to_document();
    for (const auto& [k, v] : resolved.entries()) doc.set(k, v);
    for (const auto& [k, v] : extra.entries()) doc.set(k, v);
    auto f = open("meta");
    doc.write(f);
  }

 private:
  fs::path dir_;
  std::string command_;
};

dbm::SpectralSample sample_for(const ExperimentConfig& cfg, const CommonOptions& o) {
  if (!o.eigenvalues) return simulation_source(cfg)(cfg.n, 0);
  dbm::SpectralSample sample;
  sample.eigenvalues = dbm::read_eigenvalues_csv(*o.eigenvalues);
  std::sort(sample.eigenvalues.begin(), sample.eigenvalues.end());
  sample.n = sample.eigenvalues.size();
  sample.t = cfg.t;
  sample.seed = cfg.seed;
  sample.law = "imported";
  return sample;
}

int cmd_simulate(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto sample = simulation_source(cfg)(cfg.n, 0);
  const Output out(o.out, "simulate");
  out.csv("spectrum", [&](std::ostream& f) { dbm::write_spectrum_csv(f, sample); });
  out.meta(cfg, dbm::spectrum_metadata(sample));
  std::cout << "simulated n = " << sample.n << " eigenvalues (" << dbm::to_string(sample.backend) << ")\n";
  return 0;
}

int cmd_estimate(const CommonOptions& o) {
  const auto cfg = load(o);
  const bool imported = o.eigenvalues.has_value();
  const auto run = run_estimate_on(cfg, sample_for(cfg, o), 0, !imported);
  const auto law = cfg.law.build();
  const Output out(o.out, "estimate");
  out.csv("estimate", [&](std::ostream& f) { write_estimate_with_truth_csv(f, run.estimate, imported ? nullptr : &law); });
  {
    auto f = out.open("metrics.csv");
    write_metrics_header(f);
    write_metrics_row(f, run.metrics);
  }
  auto extra = deconv::estimate_metadata(run.estimate, cfg.estimator_config().frequency);
  if (run.metrics.ise) extra.set("ise", *run.metrics.ise);
  if (imported) extra.set("eigenvalues", *o.eigenvalues);
  out.meta(cfg, extra);
  std::cout << "h = " << format_double(run.metrics.h);
  if (run.metrics.ise) std::cout << ", ISE = " << format_double(*run.metrics.ise);
  std::cout << '\n';
  return 0;
}

int cmd_cv(const CommonOptions& o) {
  const auto cfg = load(o);
  const bool imported = o.eigenvalues.has_value();
  const auto sample = sample_for(cfg, o);
  auto cv = cfg.cv_config();
  cv.seed = cv_seed(cfg.seed, 0);
  const auto estimator = cfg.estimator_config();
  const auto report = bandwidth::cv_select(sample, cv, estimator);
  const auto law = cfg.law.build();
  std::optional<std::vector<double>> j;
  if (!imported && law.density(0.0)) {
    j = bandwidth::oracle_j_curve(sample, cv.grid, [&law](double x) { return *law.density(x); }, estimator);
  }
  const Output out(o.out, "cv");
  out.csv("cv", [&](std::ostream& f) {
    for (const double c : report.crit) {
      if (!std::isfinite(c)) throw NumericalError("non-finite CV criterion");
    }
    bandwidth::write_cv_csv(f, report, j ? &*j : nullptr);
  });
  KeyValueDocument extra;
  extra.set("selected_h", report.selected_h);
  extra.set("cv_seed", static_cast<unsigned long long>(cv.seed));
  if (report.dropped_index) extra.set("dropped_index", static_cast<unsigned long long>(*report.dropped_index));
  out.meta(cfg, extra);
  std::cout << "selected h = " << format_double(report.selected_h) << '\n';
  return 0;
}

KeyValueDocument failure_summary(const std::vector<ReplicateFailure>& failures) {
  KeyValueDocument extra;
  extra.set("failed_replicates", static_cast<unsigned long long>(failures.size()));
  for (std::size_t i = 0; i < failures.size(); ++i) {
    extra.set("failure." + std::to_string(i),
              "n=" + std::to_string(failures[i].n) + " replicate=" + std::to_string(failures[i].replicate) + " " +
                  failures[i].message);
  }
  return extra;
}

int cmd_mise(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto study = run_mise_study(cfg);
  const Output out(o.out, "mise");
  out.csv("mise", [&](std::ostream& f) { write_mise_csv(f, study); });
  {
    auto f = out.open("metrics.csv");
    write_metrics_header(f);
    for (const auto& m : study.metrics) write_metrics_row(f, m);
  }
  auto extra = failure_summary(study.failures);
  if (study.log_log_slope) extra.set("log_log_slope", *study.log_log_slope);
  const auto rate = bandwidth::predicted_rate(cfg.smoothness, cfg.gamma);
  extra.set("predicted_rate", rate.description);
  out.meta(cfg, extra);
  for (const auto& row : study.rows) std::cout << "n = " << row.n << "  MISE = " << format_double(row.mean_ise) << '\n';
  return 0;
}

int cmd_fluct(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto study = run_fluctuation_study(cfg);
  const Output out(o.out, "fluct");
  out.csv("fluct", [&](std::ostream& f) { write_fluctuation_csv(f, study); });
  out.meta(cfg, failure_summary(study.failures));
  std::cout << study.rows.size() << " (n, z) rows\n";
  return 0;
}

int cmd_var(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto study = run_variance_study(cfg);
  const Output out(o.out, "var");
  out.csv("var", [&](std::ostream& f) { write_variance_csv(f, study); });
  auto extra = failure_summary(study.failures);
  if (study.ratio) extra.set("ratio", *study.ratio);
  out.meta(cfg, extra);
  if (study.ratio) std::cout << "variance ratio (last n / first n) = " << format_double(*study.ratio) << '\n';
  return 0;
}

int cmd_verify(const CommonOptions& o) {
  const std::uint64_t seed = o.seed.value_or(0);
  const auto results = run_invariant_suite(seed, o.threads);
  print_invariant_table(std::cout, results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density recovery from Dyson Brownian motion spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  CommonOptions options;
  struct Command {
    const char* name;
    const char* help;
    bool eigenvalues;
    int (*run)(const CommonOptions&);
  };
  const Command commands[] = {
      {"simulate", "Simulate one spectrum and write spectrum.csv", false, cmd_simulate},
      {"estimate", "Estimate p0 and write estimate.csv", true, cmd_estimate},
      {"cv", "Cross-validation criterion over the bandwidth grid", true, cmd_cv},
      {"mise", "Monte Carlo MISE across n_list", false, cmd_mise},
      {"fluct", "Fluctuations of the empirical subordination point", false, cmd_fluct},
      {"var", "Replicate-variance proxy across n_list at fixed h", false, cmd_var},
      {"verify", "Run the invariant suite", false, cmd_verify},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), options, c.eigenvalues);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      return c.run(options);
    } catch (const StageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.config_problem() ? kExitConfig : kExitNumerical;
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::invalid_argument& e) {
      std::cerr << "invalid argument: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    }
  }
  return kExitConfig;
}
