#pragma once

// Quick self-check of the numerical invariants, run by `fpdeconv verify`.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fpdeconv::harness {

struct InvariantResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed, unsigned threads = 1);

// Fixed-width table, one line per invariant.
void print_invariant_table(std::ostream& out, const std::vector<InvariantResult>& results);

}  // namespace fpdeconv::harness
