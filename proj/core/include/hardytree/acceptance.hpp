#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hardytree/io.hpp"

namespace hardytree {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // key measured numbers, deterministic formatting
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
};

// Runs the full verification suite: analytic spectra, the asymptotic law,
// partition counts against closed forms, two-sided sandwich checks, the
// exhaustive-cover ratio on random instances, root invariance, weight
// Lipschitz bounds, the norm sandwich, level-band inequalities, endpoint
// exponent bounds, and a byte-level determinism probe. One progress line per
// criterion goes to `log` as it completes.
AcceptanceReport run_acceptance(std::uint64_t seed, std::ostream& log);

// The report as an artifact table (columns: criterion, name, pass, detail).
Table acceptance_table(const AcceptanceReport& rep);

}  // namespace hardytree
