#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qradon/cases.hpp"

namespace qradon {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct CheckOptions {
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int n_testfns = 10;
  RhoChoice rho = RhoChoice::canonical;
};

struct CheckResult {
  std::string case_id;
  std::string check_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool exact = false;
  bool pass = false;
  double runtime_ms = 0.0;
  std::string details;

  bool skipped() const;
};

struct VerificationReport {
  std::string toolkit_version = kToolkitVersion;
  std::uint64_t seed = 0;
  int quad_order = 0;
  std::vector<CheckResult> results;
  bool all_pass = false;
};

// Check identifiers in canonical execution order.
const std::vector<std::string>& check_registry();

// Run a single check.  Throws UnknownCheck for unknown ids and
// HypothesisViolated when the chain does not satisfy the check's structural
// precondition (callers typically render that as a skip).
CheckResult run_check(const CaseContext& ctx, const std::string& check_id,
                      const CheckOptions& opts);

// A skip row for a check whose precondition failed.
CheckResult skip_result(const CaseContext& ctx, const std::string& check_id,
                        const CheckOptions& opts, const std::string& reason);

// Run every registered check; preconditions that fail become skip rows.
VerificationReport run_suite(const CaseContext& ctx, const CheckOptions& opts);

nlohmann::ordered_json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::ordered_json& j);
std::string render_table(const VerificationReport& report);

}  // namespace qradon
