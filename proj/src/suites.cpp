#include "nbk/suites.hpp"

#include "nbk/actions.hpp"
#include "nbk/crossed.hpp"
#include "nbk/ktheory.hpp"
#include "nbk/parallel.hpp"
#include "nbk/random.hpp"

#include <functional>
#include <stdexcept>

namespace nbk {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"algebra", "actions", "crossed", "traces", "morita", "betastar", "homology"};
  return s;
}

namespace {

void append(std::vector<Check>& out, const std::vector<Check>& more) { out.insert(out.end(), more.begin(), more.end()); }

ThetaMatrix suite_theta(const SuiteOptions& opt, int dim) {
  ThetaMatrix t = standard_theta(dim);
  return opt.theta ? t.folded(*opt.theta) : t;
}

std::string mode(const SuiteOptions& opt) { return opt.theta ? " at θ=" + opt.theta->get_str() : ""; }

/// One sampled identity: `law` fills `cex` and returns false on a violation.
template <class Sample>
Check sampled(const std::string& name, const std::vector<Sample>& xs,
              const std::function<bool(const Sample&, std::string&)>& law) {
  std::vector<std::string> cex(xs.size());
  const auto bad = first_failure(xs.size(), [&](std::size_t i) { return law(xs[i], cex[i]); });
  return pass_or_fail(name, !bad, std::to_string(xs.size()) + " seeded samples",
                      bad ? std::optional<std::string>(cex[*bad]) : std::nullopt);
}

}  // namespace

std::vector<Check> verify_algebra(const SuiteOptions& opt) {
  std::vector<Check> out;
  const ThetaMatrix theta = suite_theta(opt, 3);
  const TorusPreset preset = generators("paper-3d");
  const auto& labels = preset.labels;
  const int n = opt.samples.value_or(200);
  const std::string tag = "algebra" + mode(opt) + ": ";

  const TorusElement v = preset.generators[1], w = preset.generators[2];
  const TorusElement wv = mul(theta, w, v);
  const TorusElement rhs = mul(theta, v, w) * theta.phase(Rational(2));
  out.push_back(pass_or_fail(tag + "W V = exp(2 pi i theta) V W", wv == rhs, {},
                             "W V = " + wv.str(labels) + ", exp(2 pi i theta) V W = " + rhs.str(labels)));

  Sampler s(opt.seed);
  struct Triple {
    TorusElement x, y, z;
  };
  std::vector<Triple> triples;
  for (int i = 0; i < n; ++i) {
    TorusElement x = s.torus(theta, opt.degree, 3);
    TorusElement y = s.torus(theta, opt.degree, 3);
    TorusElement z = s.torus(theta, opt.degree, 3);
    triples.push_back({std::move(x), std::move(y), std::move(z)});
  }
  auto show = [&](const Triple& t) {
    return "x = " + t.x.str(labels) + ", y = " + t.y.str(labels) + ", z = " + t.z.str(labels);
  };
  out.push_back(sampled<Triple>(tag + "associativity", triples, [&](const Triple& t, std::string& cex) {
    const auto l = mul(theta, mul(theta, t.x, t.y), t.z), r = mul(theta, t.x, mul(theta, t.y, t.z));
    if (l == r) return true;
    cex = show(t) + ": (xy)z = " + l.str(labels) + ", x(yz) = " + r.str(labels);
    return false;
  }));
  out.push_back(sampled<Triple>(tag + "distributivity", triples, [&](const Triple& t, std::string& cex) {
    const auto l = mul(theta, t.x, t.y + t.z), r = mul(theta, t.x, t.y) + mul(theta, t.x, t.z);
    const auto l2 = mul(theta, t.y + t.z, t.x), r2 = mul(theta, t.y, t.x) + mul(theta, t.z, t.x);
    if (l == r && l2 == r2) return true;
    cex = show(t) + ": x(y+z) = " + l.str(labels) + ", xy+xz = " + r.str(labels);
    return false;
  }));
  out.push_back(sampled<Triple>(tag + "star antimultiplicative", triples, [&](const Triple& t, std::string& cex) {
    const auto l = star(theta, mul(theta, t.x, t.y)), r = mul(theta, star(theta, t.y), star(theta, t.x));
    if (l == r) return true;
    cex = show(t) + ": (xy)* = " + l.str(labels) + ", y*x* = " + r.str(labels);
    return false;
  }));
  out.push_back(sampled<Triple>(tag + "star involutive", triples, [&](const Triple& t, std::string& cex) {
    const auto l = star(theta, star(theta, t.x));
    if (l == t.x) return true;
    cex = "x = " + t.x.str(labels) + ": x** = " + l.str(labels);
    return false;
  }));
  out.push_back(sampled<Triple>(tag + "threaded product matches the serial one", triples,
                                [&](const Triple& t, std::string& cex) {
                                  const auto l = mul(theta, t.x, t.y), r = reference::mul(theta, t.x, t.y);
                                  if (l == r) return true;
                                  cex = show(t) + ": " + l.str(labels) + " vs " + r.str(labels);
                                  return false;
                                }));

  struct Mono {
    Monomial a, b, c;
  };
  std::vector<Mono> ms;
  for (int i = 0; i < n; ++i) {
    Monomial a = s.monomial(3, 3), b = s.monomial(3, 3), c = s.monomial(3, 3);
    ms.push_back({a, b, c});
  }
  out.push_back(sampled<Mono>(tag + "cocycle bicharacter", ms, [&](const Mono& m, std::string& cex) {
    const auto l1 = cocycle(theta, m.a + m.b, m.c), r1 = theta.normalize(cocycle(theta, m.a, m.c) * cocycle(theta, m.b, m.c));
    const auto l2 = cocycle(theta, m.a, m.b + m.c), r2 = theta.normalize(cocycle(theta, m.a, m.b) * cocycle(theta, m.a, m.c));
    const auto anti = cocycle(theta, m.a, -m.a);
    if (l1 == r1 && l2 == r2 && anti == PhasedScalar::one()) return true;
    cex = "m = " + m.a.str() + ", n = " + m.b.str() + ", k = " + m.c.str();
    return false;
  }));
  return out;
}

std::vector<Check> verify_actions(const SuiteOptions& opt) {
  std::vector<Check> out;
  const ThetaMatrix zero(3);
  for (const auto& f : classical_families()) {
    const FiniteAction a = classical_spec(f).materialize(zero);
    out.push_back(pass_or_fail("classical " + f + ": order", check_order(a, zero)));
    auto v = find_compatibility_violation(a, zero, opt.degree);
    out.push_back(pass_or_fail("classical " + f + ": compatible at theta = 0", !v,
                               "degree <= " + std::to_string(opt.degree),
                               v ? std::optional<std::string>(v->lhs + " vs " + v->rhs) : std::nullopt));
  }
  const ThetaMatrix theta = suite_theta(opt, 3);
  const int n = opt.samples.value_or(100);
  for (const auto& f : noncommutative_families()) {
    const std::string tag = f + mode(opt) + ": ";
    const FiniteAction a = noncommutative_spec(f).materialize(theta);
    out.push_back(pass_or_fail(tag + "order", check_order(a, theta)));
    auto v = find_compatibility_violation(a, theta, opt.degree);
    out.push_back(pass_or_fail(tag + "compatible with the cocycle", !v, "degree <= " + std::to_string(opt.degree),
                               v ? std::optional<std::string>("g = " + v->generator + ", m = " + v->m.str() + ", n = " +
                                                              v->n.str() + ": " + v->lhs + " vs " + v->rhs)
                                 : std::nullopt));
    const auto fw = freeness_witness(a, theta);
    out.push_back(pass_or_fail(tag + "free", fw.free, fw.generator ? "witness " + *fw.generator : std::string{}));

    Sampler s(opt.seed);
    std::vector<TorusElement> xs;
    for (int i = 0; i < n; ++i) xs.push_back(s.torus(theta, opt.degree, 5));
    const int order = a.order();
    const PhasedScalar lambda(Cyclotomic::root(order, 1));
    out.push_back(sampled<TorusElement>(tag + "homogeneous decomposition", xs, [&](const TorusElement& x, std::string& cex) {
      const auto comps = homogeneous_components(a, theta, x);
      TorusElement sum(3);
      for (std::size_t k = 0; k < comps.size(); ++k) {
        sum += comps[k];
        const auto moved = apply(a, theta, comps[k]);
        const auto want = (comps[k] * lambda.pow(static_cast<long>(k))).normalized(theta);
        if (!(moved == want)) {
          cex = "x = " + x.str(a.labels) + ": component " + std::to_string(k) + " is not homogeneous";
          return false;
        }
      }
      if (sum == x) return true;
      cex = "x = " + x.str(a.labels) + ": sum of components = " + sum.str(a.labels);
      return false;
    }));
  }
  return out;
}

std::vector<Check> run_suite(const std::string& suite, const SuiteOptions& opt) {
  std::vector<Check> out;
  if (suite == "all") {
    for (const auto& s : suite_names()) append(out, run_suite(s, opt));
    return out;
  }
  const auto& fams = ktheory_families();
  if (suite == "algebra") return verify_algebra(opt);
  if (suite == "actions") return verify_actions(opt);
  if (suite == "crossed") {
    for (const auto& f : fams) append(out, verify_projections(f, opt.theta));
    if (!opt.theta)
      for (const auto& f : fams) out.push_back(verify_exchange_iso(f, opt.degree + 1));
    return out;
  }
  if (suite == "traces") {
    const int n = opt.samples.value_or(200);
    const auto c2 = family_context("B2", 2, opt.theta);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const auto closed = TraceFunctional::walters(j, k), lifted = TraceFunctional::walters_base(j, k);
        append(out, verify_trace_laws(c2, closed, n, opt.seed));
        append(out, verify_trace_laws(c2, lifted, n, opt.seed));
        out.push_back(verify_trace_agreement(c2, closed, lifted, n, opt.seed));
      }
    for (const auto& f : fams)
      append(out, verify_trace_laws(family_context(f, 2, opt.theta), TraceFunctional::canonical(), n, opt.seed));
    return out;
  }
  if (suite == "morita") {
    for (const auto& f : fams) append(out, verify_morita(f, opt.samples.value_or(50), 100, opt.seed, opt.theta));
    return out;
  }
  if (suite == "betastar") {
    for (const auto& f : fams) {
      if (opt.theta) {
        append(out, verify_beta_star(f, epsilon_for(*opt.theta), opt.theta));
      } else {
        append(out, verify_beta_star(f, 1));
        if (f == "B2") append(out, verify_beta_star(f, -1));
      }
    }
    return out;
  }
  if (suite == "homology") {
    for (const auto& f : fams) {
      const auto h1 = bieberbach_h1(f);
      const auto k = pv_solve(beta_star_matrix(f, opt.theta ? epsilon_for(*opt.theta) : 1));
      out.push_back(pass_or_fail(f + ": K_0 = Z + H_1", compare_with_k0(f, opt.theta ? epsilon_for(*opt.theta) : 1),
                                 "H_1 = " + h1.str() + ", K_0 = " + k.k0.str(),
                                 "Z + H_1 = " + (AbelianGroup(1, {}) + h1).str() + ", K_0 = " + k.k0.str()));
    }
    return out;
  }
  throw std::invalid_argument("unknown suite: " + suite);
}

}  // namespace nbk
