#pragma once

// Self-check suites behind `verify`: sensor algebra, forward model, update
// forms, contraction certificate and Loewner-order inequalities.

#include <functional>
#include <string>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;  // worst deviation (or the reported quantity)
  std::string detail;
};

struct VerifyOptions {
  int seeds = 100;  // random instances per randomized suite
  // Sensor used by the algebra suite; replaceable so a broken sensor can be
  // injected as a negative control.
  std::function<CMatrix(Index r, Index n)> sensor;
};

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

/// Deliberately wrong sensor (T_1 scaled by 1.01) for negative
/// controls of the algebra suite.
CMatrix broken_toeplitz_matrix(Index r, Index n);

}  // namespace qcs
