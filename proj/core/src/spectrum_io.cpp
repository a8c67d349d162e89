#include "fpdeconv/spectrum_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fpdeconv/errors.hpp"

namespace fpdeconv::dbm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const SpectralSample& sample) {
  const auto initial = sample.initial_order_statistics();
  out << "index,lambda_t,lambda_0\n";
  for (std::size_t j = 0; j < sample.eigenvalues.size(); ++j) {
    out << j << ',' << format_double(sample.eigenvalues[j]) << ','
        << (j < initial.size() ? format_double(initial[j]) : std::string("nan")) << '\n';
  }
}

KeyValueDocument spectrum_metadata(const SpectralSample& sample) {
  KeyValueDocument meta;
  meta.set("n", static_cast<unsigned long long>(sample.n));
  meta.set("t", sample.t);
  meta.set("seed", static_cast<unsigned long long>(sample.seed));
  meta.set("replicate", static_cast<unsigned long long>(sample.replicate));
  meta.set("backend", to_string(sample.backend));
  meta.set("law", sample.law.empty() ? std::string("unknown") : sample.law);
  meta.set("eta_star", sample.eta_star ? format_double(*sample.eta_star) : std::string("none"));
  return meta;
}

std::vector<double> read_eigenvalues_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open eigenvalue file '" + path.string() + "'");

  std::vector<double> values;
  std::string line;
  std::size_t column = 0;
  bool first_line = true;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (first_line) {
      first_line = false;
      double probe = 0.0;
      if (fields.empty() || !parse_double(fields[0], probe)) {
        // Header row.
        for (std::size_t k = 0; k < fields.size(); ++k) {
          if (fields[k] == "lambda_t") column = k;
        }
        continue;
      }
    }
    double value = 0.0;
    if (column >= fields.size() || !parse_double(fields[column], value)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": not a number");
    }
    values.push_back(value);
  }
  if (values.empty()) throw ConfigError("eigenvalue file '" + path.string() + "' holds no values");
  return values;
}

}  // namespace fpdeconv::dbm
