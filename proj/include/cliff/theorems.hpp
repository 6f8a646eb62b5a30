#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cliff/group.hpp"
#include "cliff/multivector.hpp"

namespace cliff {

struct TheoremReport {
  std::string theorem;
  MetricSignature signature{0, 0, 0};
  long trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  std::string to_line() const;
  std::string to_json() const;
};

// Verifies that products of a random orthogonal basis expand with only
// grade-|J| blades and coefficients equal to the minor determinants of
// the basis-change matrix.
TheoremReport check_grading_basis_independence(const MetricSignature& sig,
                                               int trials,
                                               std::uint64_t seed);

// Centralizer nullspace rank against the predicted center.
TheoremReport check_center(const MetricSignature& sig);

// Solution space of alpha(y) v = v y against the radical subalgebra.
TheoremReport check_twisted_center(const MetricSignature& sig);

// Every invariant bullet of the twisted-conjugation action, one report
// per bullet, sharing trial samples.
std::vector<TheoremReport> check_rho_identity_suite(const MetricSignature& sig,
                                                    int trials,
                                                    std::uint64_t seed);

std::vector<TheoremReport> run_all_checks(const MetricSignature& sig,
                                          int trials, std::uint64_t seed);

// run_all_checks over several signatures with at most `threads`
// concurrent workers; deterministic in (sigs, trials, seed).
std::vector<TheoremReport> run_all_checks_parallel(
    const std::vector<MetricSignature>& sigs, int trials, std::uint64_t seed,
    int threads);

}  // namespace cliff
