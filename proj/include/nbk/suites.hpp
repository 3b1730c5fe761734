#pragma once

// Named verification suites over all families; the CLI `verify` command and
// the acceptance checks run these.

#include "nbk/check.hpp"
#include "nbk/scalar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nbk {

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::optional<int> samples;  // overrides the per-suite default
  int degree = 2;
  std::optional<Rational> theta;  // folded rational-theta mode
};

/// algebra, actions, crossed, traces, morita, betastar, homology.
const std::vector<std::string>& suite_names();
/// Throws std::invalid_argument for an unknown suite; "all" runs every suite.
std::vector<Check> run_suite(const std::string& suite, const SuiteOptions& opt = {});

/// Ring axioms, star laws and the cocycle bicharacter on seeded samples.
std::vector<Check> verify_algebra(const SuiteOptions& opt);
/// Order, compatibility and freeness of the built-in actions; homogeneous
/// decomposition on seeded elements.
std::vector<Check> verify_actions(const SuiteOptions& opt);

}  // namespace nbk
