#pragma once

// Outcome of one named verification. Anomalies flag a suspected misprint in the
// source formulas that the engine detected and worked around; they are not failures.

#include <optional>
#include <string>
#include <vector>

namespace nbk {

enum class Status { pass, fail, anomaly };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::anomaly: return "anomaly";
  }
  return "?";
}

struct Check {
  std::string name;
  Status status = Status::pass;
  std::string detail;
  std::optional<std::string> counterexample;  // both sides of the broken identity
};

inline Check pass_or_fail(std::string name, bool ok, std::string detail = {},
                          std::optional<std::string> counterexample = std::nullopt) {
  return Check{std::move(name), ok ? Status::pass : Status::fail, std::move(detail),
               ok ? std::nullopt : std::move(counterexample)};
}

inline bool all_passed(const std::vector<Check>& checks, bool strict = false) {
  for (const auto& c : checks) {
    if (c.status == Status::fail) return false;
    if (strict && c.status == Status::anomaly) return false;
  }
  return true;
}

}  // namespace nbk
