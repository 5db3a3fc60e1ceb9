#pragma once

#include "neumann/partition.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace neumann {

struct CheckResult {
  std::string claim;   // e.g. "thm1.iv"
  int domain = -1;     // -1 for global scope
  bool applicable = true;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();

  std::string scope() const { return domain < 0 ? "global" : "domain:" + std::to_string(domain); }
};

/// Fixed claim catalogue, in report order.
const std::vector<std::string>& claim_catalogue();

std::vector<CheckResult> verify_theorem1(const Partition& part);
/// Boundary-domain claims; every entry is inapplicable on the torus.
std::vector<CheckResult> verify_theorem2(const Partition& part);
std::vector<CheckResult> verify_counting(const Partition& part);

/// All three suites ordered by (claim, scope). Claims without an applicable scope appear once
/// with applicable = false.
std::vector<CheckResult> verify_all(const Partition& part);

bool all_applicable_passed(const std::vector<CheckResult>& checks);

nlohmann::json to_json(const CheckResult& r);
nlohmann::json ledger_json(const std::vector<CheckResult>& checks);
std::string ledger_table(const std::vector<CheckResult>& checks);

}  // namespace neumann
