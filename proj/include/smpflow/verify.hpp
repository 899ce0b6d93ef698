#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smpflow/options.hpp"

namespace smpflow {

struct InvariantResult {
  std::string suite;
  std::string name;
  int cases = 0;
  double worst = 0.0;      // worst residual (or worst margin, see name)
  double threshold = 0.0;  // passes when worst <= threshold
  bool pass = false;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<InvariantResult> results;
  bool all_pass() const;
  std::string to_json() const;
  std::string to_text() const;
};

/// Suites: spectral, core, flow, ks, uniformization, or all. Deterministic for a fixed seed.
std::vector<std::string> verify_suites();
VerifyReport run_verify(const std::string& suite, std::uint64_t seed, const NumericOptions& opt = {});

}  // namespace smpflow
