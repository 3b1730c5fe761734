#pragma once

// Machine-readable reports for the command-line tool and the commands that
// produce them.

#include "nbk/check.hpp"
#include "nbk/scalar.hpp"
#include "nbk/suites.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nbk {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "nbk-report/1";
const char* tool_version();

struct Report {
  std::string command;
  Json config = Json::object();
  Json payload = Json::object();
  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, std::string>> sections;  // markdown title, body

  bool passed(bool strict = false) const { return all_passed(checks, strict); }
  /// 0 when every check passes (anomalies count only under `strict`), else 1.
  int exit_code(bool strict = false) const { return passed(strict) ? 0 : 1; }

  Json to_json() const;
  std::string json() const;  // two-space indent, trailing newline
  std::string markdown() const;
};

/// Thrown for bad user input; the tool maps it to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cyclotomic order used for folded theta = p/q: lcm(24, 12 q), unless the
/// environment fixes it.
int folded_session_order(const Rational& theta);

Report cmd_scan(const std::vector<std::string>& families, int denominator, int degree_bound = 2);
/// Scans an action read from a file in the declarative format; no table to compare with.
Report cmd_scan_file(const std::string& path, int denominator, int degree_bound = 2);
Report cmd_ktheory(const std::string& family, int epsilon, const std::optional<Rational>& theta = {});
Report cmd_verify(const std::string& suite, const SuiteOptions& opt);
Report cmd_homology(const std::vector<std::string>& families);

}  // namespace nbk
