#include "nbk/crossed.hpp"

#include <doctest.h>

using namespace nbk;

namespace {

bool no_failures(const std::vector<Check>& cs) {
  for (const auto& c : cs)
    if (c.status == Status::fail) {
      MESSAGE(c.name << ": " << c.counterexample.value_or(c.detail));
      return false;
    }
  return true;
}

}  // namespace

TEST_CASE("covariance and the order of p") {
  for (const std::string f : {"B2", "B3", "B4", "B6"})
    for (int dim : {2, 3}) {
      INFO(f << " on the " << dim << "-torus");
      const ContextPtr ctx = family_context(f, dim);
      const CrossedElement p = CrossedElement::p(ctx), one = CrossedElement::one(ctx);
      CHECK(cpow(p, ctx->order()) == one);
      CHECK(cmul(p, cstar(p)) == one);
      for (int i = 0; i < dim; ++i) {
        const CrossedElement g = CrossedElement::generator(ctx, ctx->labels()[static_cast<std::size_t>(i)]);
        const auto [c, target] = ctx->act(Monomial::unit(dim, i), 1);
        CHECK(p * g * cstar(p) == CrossedElement::term(ctx, target, 0, c));
      }
    }
}

TEST_CASE("crossed product is a star algebra") {
  for (const std::string f : {"B2", "B3", "B6"}) {
    const ContextPtr ctx = family_context(f, 2);
    Sampler s(23);
    for (int i = 0; i < 25; ++i) {
      const auto x = random_crossed(ctx, s, 1, 3), y = random_crossed(ctx, s, 1, 3), z = random_crossed(ctx, s, 1, 2);
      CHECK((x * y) * z == x * (y * z));
      CHECK(x * (y + z) == x * y + x * z);
      CHECK(cstar(x * y) == cstar(y) * cstar(x));
      CHECK(cstar(cstar(x)) == x);
      CHECK(beta_hat(x * y) == beta_hat(x) * beta_hat(y));
      CHECK(beta_hat(x, ctx->order()) == x);
      CHECK(beta_hat(cstar(x)) == cstar(beta_hat(x)));
    }
  }
}

TEST_CASE("spectral projections of p") {
  for (const std::string f : {"B2", "B3", "B4", "B6"}) {
    const ContextPtr ctx = family_context(f, 2);
    const int n = ctx->order();
    const CrossedElement p = CrossedElement::p(ctx);
    CrossedElement sum(ctx);
    for (int k = 0; k < n; ++k) {
      const CrossedElement q = q_projector(p, k, n);
      CHECK(q * q == q);
      CHECK(cstar(q) == q);
      CHECK(beta_hat(q) == q_projector(p, (k + n - 1) % n, n));
      sum += q;
    }
    CHECK(sum == CrossedElement::one(ctx));
  }
  const ContextPtr ctx = family_context("B2", 2);
  CHECK_THROWS_AS(q_projector(CrossedElement::generator(ctx, "V"), 0, 2), NotRootOfUnity);
}

TEST_CASE("minimal phase correction") {
  const ContextPtr ctx = family_context("B3", 2);
  const CrossedElement p = CrossedElement::p(ctx);
  const auto x = p * ctx->theta().normalize(phased(make_rational(1, 3), Cyclotomic::root(3, 1)));
  const auto pc = minimal_phase_correction(x, 3);
  REQUIRE(pc);
  CHECK(pc->theta_exponent == make_rational(-1, 3));
  CHECK(cpow(x * pc->factor, 3) == CrossedElement::one(ctx));
  CHECK_FALSE(minimal_phase_correction(p + CrossedElement::one(ctx), 3));
}

TEST_CASE("K0 generator suites") {
  for (const std::string f : {"B2", "B3", "B4", "B6"}) {
    INFO(f);
    CHECK(no_failures(verify_projections(f)));
    CHECK(verify_exchange_iso(f, 2).status == Status::pass);
  }
  const K0Data d = k0_generators("B2");
  CHECK(d.basis.size() == 6);
  CHECK(d.basis.front().label == "[1]");
  CHECK_THROWS(d.element(*d.index_of("M2")));
}

TEST_CASE("traces") {
  const ContextPtr ctx = family_context("B2", 2);
  CHECK(no_failures(verify_trace_laws(ctx, TraceFunctional::canonical(), 40, 3)));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      CHECK(no_failures(verify_trace_laws(ctx, TraceFunctional::walters(j, k), 40, 3)));
      CHECK(verify_trace_agreement(ctx, TraceFunctional::walters(j, k), TraceFunctional::walters_base(j, k), 40, 3)
                .status == Status::pass);
    }
  CHECK(trace_eval(TraceFunctional::canonical(), CrossedElement::one(ctx)) == PhasedScalar::one());
  CHECK(trace_eval(TraceFunctional::canonical(), CrossedElement::p(ctx)).is_zero());
}

TEST_CASE("fixed-point isomorphism") {
  for (const std::string f : {"B2", "B3"}) {
    INFO(f);
    CHECK(no_failures(verify_morita(f, 10, 20, 5)));
  }
  CHECK_THROWS_AS(require_central_u(*family_context("B2", 2)), ContextError);
}

TEST_CASE("folded theta") {
  SessionOrderGuard g(120);
  const ContextPtr ctx = family_context("B4", 2, make_rational(1, 5));
  CHECK(ctx->theta().folded_theta() == make_rational(1, 5));
  CHECK(cpow(CrossedElement::p(ctx), 4) == CrossedElement::one(ctx));
  CHECK(no_failures(verify_projections("B4", make_rational(1, 5))));
}
