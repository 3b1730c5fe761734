// nbk: cocycle scans, K-groups, verification suites and homology checks.

#include "nbk/actions.hpp"
#include "nbk/ktheory.hpp"
#include "nbk/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Common {
  std::string format = "json";
  std::string out;
  bool strict = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "json or md")->check(CLI::IsMember({"json", "md"}));
  sub->add_option("--out", c.out, "write the report here instead of stdout");
  sub->add_flag("--strict", c.strict, "anomalies fail the run");
}

int emit(const nbk::Report& r, const Common& c) {
  const std::string text = c.format == "md" ? r.markdown() : r.json();
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      std::cerr << "nbk: cannot write " << c.out << "\n";
      return 2;
    }
    f << text;
  }
  return r.exit_code(c.strict);
}

std::optional<nbk::Rational> theta_arg(const std::string& s) {
  if (s.empty()) return std::nullopt;
  nbk::Rational t;
  try {
    t = nbk::parse_rational(s);
  } catch (const std::exception& e) {
    throw nbk::UsageError("bad --theta '" + s + "': " + e.what());
  }
  if (t <= 0 || t >= 1 || t * 2 == 1) throw nbk::UsageError("--theta must lie in (0, 1) and differ from 1/2");
  return t;
}

int epsilon_arg(const std::string& s) {
  if (s == "+1" || s == "1") return 1;
  if (s == "-1") return -1;
  throw nbk::UsageError("--epsilon must be +1 or -1");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations on noncommutative Bieberbach manifolds"};
  app.set_version_flag("--version", std::string(nbk::tool_version()));
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> families;
  std::string family_opt, epsilon = "+1", suite = "all", theta, action_file;
  int denominator = 6, degree = 2;
  std::uint64_t seed = 1;
  std::optional<int> samples;

  auto* scan = app.add_subcommand("scan", "admissible cocycles for the classical actions");
  scan->add_option("families", families, "families (default: all nine)");
  scan->add_option("--family", family_opt, "single family");
  scan->add_option("--denominator", denominator, "grid denominator for fixed entries");
  scan->add_option("--degree", degree, "compatibility degree bound");
  scan->add_option("--action-file", action_file, "scan an action in the declarative text format");
  add_common(scan, common);

  auto* kth = app.add_subcommand("ktheory", "K-groups via the Pimsner-Voiculescu sequence");
  kth->add_option("name", family_opt, "B2, B3, B4 or B6");
  kth->add_option("--family", family_opt, "B2, B3, B4 or B6");
  kth->add_option("--epsilon", epsilon, "+1 or -1 (B2)");
  kth->add_option("--theta", theta, "rational theta: folded mode");
  add_common(kth, common);

  auto* ver = app.add_subcommand("verify", "run verification suites");
  ver->add_option("name", suite, "suite name or all");
  ver->add_option("--suite", suite, "algebra, actions, crossed, traces, morita, betastar, homology or all");
  ver->add_option("--seed", seed, "sampling seed");
  ver->add_option("--samples", samples, "samples per sampled law");
  ver->add_option("--degree", degree, "degree bound for sampled elements and compatibility");
  ver->add_option("--theta", theta, "rational theta: folded mode");
  add_common(ver, common);

  auto* hom = app.add_subcommand("homology", "K_0 against Z + H_1 of the Bieberbach group");
  hom->add_option("families", families, "families (default: B2 B3 B4 B6)");
  hom->add_option("--family", family_opt, "single family");
  add_common(hom, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!family_opt.empty() && app.got_subcommand(scan)) families.push_back(family_opt);
    if (!family_opt.empty() && app.got_subcommand(hom)) families.push_back(family_opt);

    if (app.got_subcommand(scan)) {
      if (!action_file.empty()) return emit(nbk::cmd_scan_file(action_file, denominator, degree), common);
      if (families.empty()) families = nbk::classical_families();
      return emit(nbk::cmd_scan(families, denominator, degree), common);
    }
    if (app.got_subcommand(kth)) {
      if (family_opt.empty()) throw nbk::UsageError("ktheory needs a family");
      const auto t = theta_arg(theta);
      int eps = epsilon_arg(epsilon);
      if (t && kth->count("--epsilon") == 0) eps = nbk::epsilon_for(*t);
      return emit(nbk::cmd_ktheory(family_opt, eps, t), common);
    }
    if (app.got_subcommand(ver)) {
      nbk::SuiteOptions opt;
      opt.seed = seed;
      opt.samples = samples;
      opt.degree = degree;
      opt.theta = theta_arg(theta);
      return emit(nbk::cmd_verify(suite, opt), common);
    }
    if (families.empty()) families = nbk::ktheory_families();
    return emit(nbk::cmd_homology(families), common);
  } catch (const nbk::UsageError& e) {
    std::cerr << "nbk: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "nbk: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nbk: error: " << e.what() << "\n";
    return 1;
  }
}
