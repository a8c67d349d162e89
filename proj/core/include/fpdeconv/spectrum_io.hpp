#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "fpdeconv/dbm.hpp"
#include "fpdeconv/keyvalue.hpp"

namespace fpdeconv::dbm {

// CSV with header `index,lambda_t,lambda_0`; lambda_0 is the ordered
// initial statistic paired with the j-th eigenvalue.
void write_spectrum_csv(std::ostream& out, const SpectralSample& sample);

// Sidecar keys: n, t, seed, replicate, backend, law, eta_star.
KeyValueDocument spectrum_metadata(const SpectralSample& sample);

// Reads eigenvalues from a CSV file. Uses the `lambda_t` column when a header
// names it, otherwise the first column. Throws ConfigError when the file
// cannot be read or holds no values.
std::vector<double> read_eigenvalues_csv(const std::filesystem::path& path);

}  // namespace fpdeconv::dbm
