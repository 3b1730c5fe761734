#include "nbk/crossed.hpp"

#include "nbk/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace nbk {

// ---------------------------------------------------------------------------
// context

CrossedContext::CrossedContext(ThetaMatrix theta, FiniteAction action)
    : theta_(std::move(theta)), action_(std::move(action)), order_(0) {
  if (!action_.is_cyclic()) throw ContextError("crossed products need a cyclic action");
  if (action_.dim() != theta_.dim()) throw DimensionMismatch("crossed product: action and theta dimensions differ");
  order_ = action_.order();
  const int d = theta_.dim();
  ActionGenerator id{"id", 1, {}};
  for (int i = 0; i < d; ++i) id.images.push_back(GeneratorImage{PhasedScalar::one(), Monomial::unit(d, i)});
  powers_.push_back(id);
  for (int k = 1; k <= order_; ++k) {
    ActionGenerator next{"alpha^" + std::to_string(k), order_, {}};
    for (const auto& img : powers_.back().images) {
      auto [s, t] = apply_monomial(action_.generator(), theta_, img.target);
      next.images.push_back(GeneratorImage{theta_.normalize(img.coeff * s), t});
    }
    if (k == order_) {
      for (int i = 0; i < d; ++i) {
        const auto& img = next.images[static_cast<std::size_t>(i)];
        if (img.target != Monomial::unit(d, i) || !(img.coeff == PhasedScalar::one()))
          throw ContextError("action " + action_.name + " does not have order " + std::to_string(order_));
      }
    } else {
      powers_.push_back(std::move(next));
    }
  }
}

std::pair<PhasedScalar, Monomial> CrossedContext::act(const Monomial& m, long k) const {
  long r = k % order_;
  if (r < 0) r += order_;
  if (r == 0) return {PhasedScalar::one(), m};
  return apply_monomial(powers_[static_cast<std::size_t>(r)], theta_, m);
}

const CrossedContext::Moved& CrossedContext::moved(const Monomial& m, long k) const {
  int r = static_cast<int>(k % order_);
  if (r < 0) r += order_;
  auto key = std::make_tuple(cyclotomic_session_order(), r, m);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto [c, t] = act(m, r);
  Moved mv{c, t, std::nullopt};
  if (c.is_single_term()) {
    const auto& [b, z] = c.terms().front();
    if (auto root = z.as_root_of_unity()) mv.unit = std::make_pair(b, *root);
  }
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(std::move(key), std::move(mv)).first->second;
}

ContextPtr make_context(ThetaMatrix theta, FiniteAction action) {
  return std::make_shared<const CrossedContext>(std::move(theta), std::move(action));
}

ContextPtr family_context(const std::string& family, int dim, const std::optional<Rational>& theta_value) {
  if (dim != 2 && dim != 3) throw DimensionMismatch("family contexts exist in dimension 2 and 3");
  ThetaMatrix theta = standard_theta(dim);
  if (theta_value) theta = theta.folded(*theta_value);
  ActionSpec spec = noncommutative_spec(family);
  if (dim == 2) {
    try {
      spec = spec.without("U");
    } catch (const std::invalid_argument& e) {
      throw ContextError(family + " does not restrict to the V, W torus: " + e.what());
    }
  }
  return make_context(theta, spec.materialize(theta));
}

// ---------------------------------------------------------------------------
// elements

namespace {

long reduce_k(long k, int n) {
  long r = k % n;
  return r < 0 ? r + n : r;
}

}  // namespace

CrossedElement CrossedElement::term(const ContextPtr& ctx, const Monomial& m, long k, const PhasedScalar& c) {
  CrossedElement x(ctx);
  x.add_term(m, k, c);
  return x;
}

CrossedElement CrossedElement::scalar(const ContextPtr& ctx, const PhasedScalar& c) {
  return term(ctx, Monomial(ctx->dim()), 0, c);
}

CrossedElement CrossedElement::p(const ContextPtr& ctx) { return term(ctx, Monomial(ctx->dim()), 1); }

CrossedElement CrossedElement::generator(const ContextPtr& ctx, const std::string& label) {
  const auto& l = ctx->labels();
  auto it = std::find(l.begin(), l.end(), label);
  if (it == l.end()) throw ContextError("no generator " + label);
  return term(ctx, Monomial::unit(ctx->dim(), static_cast<int>(it - l.begin())), 0);
}

CrossedElement CrossedElement::from_torus(const ContextPtr& ctx, const TorusElement& a, long k) {
  CrossedElement x(ctx);
  for (const auto& [m, c] : a.terms()) x.add_term(m, k, c);
  return x;
}

PhasedScalar CrossedElement::coefficient(const Monomial& m, long k) const {
  if (!ctx_) return {};
  auto it = terms_.find(CrossedKey{m, static_cast<int>(reduce_k(k, ctx_->order()))});
  return it == terms_.end() ? PhasedScalar() : it->second;
}

TorusElement CrossedElement::component(long k) const {
  if (!ctx_) return {};
  const int kk = static_cast<int>(reduce_k(k, ctx_->order()));
  TorusElement a(ctx_->dim());
  for (const auto& [key, c] : terms_)
    if (key.k == kk) a.add_term(key.m, c);
  return a;
}

void CrossedElement::add_term(const Monomial& m, long k, const PhasedScalar& c) {
  if (!ctx_) throw ContextError("crossed element without context");
  if (m.dim() != ctx_->dim()) throw DimensionMismatch("crossed term of wrong dimension");
  const PhasedScalar v = ctx_->theta().normalize(c);
  if (v.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(CrossedKey{m, static_cast<int>(reduce_k(k, ctx_->order()))}, v);
  if (!inserted) {
    it->second += v;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void CrossedElement::check_context(const CrossedElement& o) const {
  if (ctx_ && o.ctx_ && ctx_ != o.ctx_) throw ContextError("crossed elements from different contexts");
}

CrossedElement CrossedElement::operator-() const {
  CrossedElement r = *this;
  for (auto& [k, c] : r.terms_) c = -c;
  return r;
}

CrossedElement& CrossedElement::operator+=(const CrossedElement& o) {
  check_context(o);
  if (!ctx_) ctx_ = o.ctx_;
  for (const auto& [key, c] : o.terms_) add_term(key.m, key.k, c);
  return *this;
}

CrossedElement& CrossedElement::operator-=(const CrossedElement& o) {
  check_context(o);
  if (!ctx_) ctx_ = o.ctx_;
  for (const auto& [key, c] : o.terms_) add_term(key.m, key.k, -c);
  return *this;
}

CrossedElement& CrossedElement::operator*=(const PhasedScalar& c) {
  Terms out;
  for (const auto& [key, v] : terms_) {
    PhasedScalar w = ctx_->theta().normalize(v * c);
    if (!w.is_zero()) out.emplace(key, std::move(w));
  }
  terms_ = std::move(out);
  return *this;
}

CrossedElement operator*(const CrossedElement& a, const CrossedElement& b) { return cmul(a, b); }

bool operator==(const CrossedElement& a, const CrossedElement& b) {
  a.check_context(b);
  return a.terms_ == b.terms_;
}

std::string CrossedElement::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (int k = 0; k < ctx_->order(); ++k) {
    const TorusElement a = component(k);
    if (a.is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += k == 0 ? a.str(ctx_->labels()) : "(" + a.str(ctx_->labels()) + ")·p^" + std::to_string(k);
  }
  return out;
}

CrossedElement cmul(const CrossedElement& x, const CrossedElement& y) {
  if (x.context() && y.context() && x.context() != y.context())
    throw ContextError("crossed elements from different contexts");
  const ContextPtr& ctx = x.context() ? x.context() : y.context();
  CrossedElement r(ctx);
  if (!ctx) return r;
  const auto& theta = ctx->theta();
  for (const auto& [kx, cx] : x.terms()) {
    for (const auto& [ky, cy] : y.terms()) {
      const auto& mv = ctx->moved(ky.m, kx.k);
      const auto coc = mv.unit ? cocycle_unit(theta, kx.m, mv.target) : std::nullopt;
      if (coc)
        r.add_term(kx.m + mv.target, kx.k + ky.k,
                   (cx * cy).times_unit(mv.unit->first + coc->first, mv.unit->second + coc->second));
      else
        r.add_term(kx.m + mv.target, kx.k + ky.k, cx * cy * mv.coeff * cocycle(theta, kx.m, mv.target));
    }
  }
  return r;
}

CrossedElement cstar(const CrossedElement& x) {
  CrossedElement r(x.context());
  for (const auto& [key, c] : x.terms()) {
    const auto& mv = x.context()->moved(-key.m, -key.k);
    r.add_term(mv.target, -key.k, mv.unit ? c.conj().times_unit(mv.unit->first, mv.unit->second) : c.conj() * mv.coeff);
  }
  return r;
}

CrossedElement cpow(const CrossedElement& x, long n) {
  if (n < 0) return cpow(cstar(x), -n);
  CrossedElement result = CrossedElement::one(x.context());
  CrossedElement base = x;
  while (n > 0) {
    if (n & 1) result = cmul(result, base);
    n >>= 1;
    if (n) base = cmul(base, base);
  }
  return result;
}

CrossedElement beta_hat(const CrossedElement& x, long times) {
  CrossedElement r(x.context());
  const int n = x.context()->order();
  for (const auto& [key, c] : x.terms())
    r.add_term(key.m, key.k, c * PhasedScalar(Cyclotomic::root(n, -static_cast<long>(key.k) * times)));
  return r;
}

CrossedElement random_crossed(const ContextPtr& ctx, Sampler& s, int degree, int terms) {
  CrossedElement x(ctx);
  const auto n = s.uniform(1, terms);
  for (std::int64_t i = 0; i < n; ++i)
    x.add_term(s.monomial(ctx->dim(), degree), s.uniform(0, ctx->order() - 1), s.scalar(ctx->theta()));
  return x;
}

// ---------------------------------------------------------------------------
// spectral projections

NotRootOfUnity::NotRootOfUnity(const CrossedElement& residual, int n)
    : std::runtime_error("x^" + std::to_string(n) + " != 1; x^" + std::to_string(n) + " - 1 = " + residual.str()),
      residual_(residual) {}

CrossedElement q_projector(const CrossedElement& x, int n, int N, int period) {
  if (N < 1) throw std::invalid_argument("projector needs N >= 1");
  if (period == 0) period = N;
  const auto& ctx = x.context();
  const CrossedElement one = CrossedElement::one(ctx);
  const CrossedElement xn = cpow(x, N);
  if (!(xn == one)) throw NotRootOfUnity(xn - one, N);
  CrossedElement q(ctx), xk = one;
  for (int k = 0; k < N; ++k) {
    q += xk * PhasedScalar(Cyclotomic::root(period, static_cast<long>(n) * k));
    xk = cmul(xk, x);
  }
  return q * PhasedScalar(make_rational(1, N));
}

std::optional<PhaseCorrection> minimal_phase_correction(const CrossedElement& x, int n) {
  const CrossedElement y = cpow(x, n);
  if (y.size() != 1) return std::nullopt;
  const auto& [key, t] = *y.terms().begin();
  if (!key.m.is_zero() || key.k != 0 || !t.is_single_term()) return std::nullopt;
  const auto& [b, c] = t.terms().front();
  const auto u = c.as_root_of_unity();
  if (!u) return std::nullopt;
  const int m = c.field().order();
  for (long r = 0; r < m; ++r) {
    if ((r * n + *u) % m != 0) continue;
    PhaseCorrection pc;
    pc.theta_exponent = -b / n;
    pc.root_index = r;
    pc.field_order = m;
    pc.factor = x.context()->theta().normalize(PhasedScalar::phased(pc.theta_exponent, Cyclotomic::root(m, r)));
    if (cpow(x * pc.factor, n) == CrossedElement::one(x.context())) return pc;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// fixed-point isomorphism

void require_central_u(const CrossedContext& ctx) {
  if (ctx.dim() != 3 || ctx.labels().front() != "U") throw ContextError("needs the 3-torus with generator U first");
  const ThetaEntry zero{Rational(0), Rational(0)};
  if (!ctx.theta().at(0, 1).same_phase(zero) || !ctx.theta().at(0, 2).same_phase(zero))
    throw ContextError("U is not central for this theta");
  const auto& img = ctx.action().generator().images.front();
  if (img.target != Monomial::unit(3, 0) || !(img.coeff == PhasedScalar(Cyclotomic::root(ctx.order(), 1))))
    throw ContextError("action " + ctx.action().name + " does not send U to lambda U");
}

namespace {

CrossedElement u_power(const ContextPtr& ctx, long k) {
  return CrossedElement::term(ctx, k * Monomial::unit(ctx->dim(), 0), 0);
}

CrossedElement p0(const ContextPtr& ctx) {
  CrossedElement s(ctx);
  for (int k = 1; k <= ctx->order(); ++k) s.add_term(Monomial(ctx->dim()), k, PhasedScalar::one());
  return s * PhasedScalar(make_rational(1, ctx->order()));
}

}  // namespace

CrossedElement phat(const ContextPtr& ctx) {
  require_central_u(*ctx);
  const int n = ctx->order();
  return u_power(ctx, 1) + p0(ctx) * (u_power(ctx, 1 - n) - u_power(ctx, 1));
}

CrossedElement psi_u(const ContextPtr& ctx) {
  const CrossedElement ph = phat(ctx);
  return ph + p0(ctx) * ph * (u_power(ctx, ctx->order()) - CrossedElement::one(ctx));
}

std::vector<TorusElement> psi_components(const ContextPtr& ctx, const TorusElement& x) {
  require_central_u(*ctx);
  auto comps = homogeneous_components(ctx->action(), ctx->theta(), x);
  for (std::size_t k = 0; k < comps.size(); ++k)
    comps[k] = mul(ctx->theta(), comps[k], TorusElement::monomial(-static_cast<std::int64_t>(k) * Monomial::unit(3, 0)));
  return comps;
}

CrossedElement psi(const ContextPtr& ctx, const TorusElement& x) {
  const auto comps = psi_components(ctx, x);
  const CrossedElement pu = psi_u(ctx);
  CrossedElement r(ctx), puk = CrossedElement::one(ctx);
  for (const auto& c : comps) {
    r += CrossedElement::from_torus(ctx, c) * puk;
    puk = puk * pu;
  }
  return r;
}

CrossedMatrix matrix_units(const ContextPtr& ctx) {
  const int n = ctx->order();
  const CrossedElement ph = phat(ctx);
  const CrossedElement proj = p0(ctx);
  std::vector<CrossedElement> pw{CrossedElement::one(ctx)};
  for (int i = 1; i < n; ++i) pw.push_back(pw.back() * ph);
  // phat^N = 1, so phat^{-j} = phat^{N-j}
  auto inv = [&](int j) { return j == 0 ? pw[0] : pw[static_cast<std::size_t>(n - j)]; };
  CrossedMatrix e(static_cast<std::size_t>(n), std::vector<CrossedElement>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    const CrossedElement left = pw[static_cast<std::size_t>(i)] * proj;
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = left * inv(j);
  }
  return e;
}

CrossedMatrix psi_matrix(const ContextPtr& ctx, const CrossedMatrix& units, const CrossedElement& x) {
  const std::size_t n = units.size();
  CrossedMatrix a(n, std::vector<CrossedElement>(n, CrossedElement(ctx)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const CrossedElement ex = units[k][i] * x;
      for (std::size_t j = 0; j < n; ++j) a[i][j] += ex * units[j][k];
    }
  }
  return a;
}

CrossedElement psi_inverse(const CrossedMatrix& units, const CrossedMatrix& a) {
  CrossedElement r(units.front().front().context());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) r += a[i][j] * units[i][j];
  return r;
}

CrossedMatrix matmul(const CrossedMatrix& a, const CrossedMatrix& b) {
  const std::size_t n = a.size();
  CrossedMatrix c(n, std::vector<CrossedElement>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

bool is_invariant(const CrossedElement& x) {
  if (x.is_zero()) return true;
  for (const auto& [key, c] : x.terms())
    if (key.k != 0) return false;
  const auto& ctx = *x.context();
  const TorusElement a = x.component(0);
  return apply(ctx.action(), ctx.theta(), a) == a;
}

namespace {

std::string matrix_str(const CrossedMatrix& a) {
  std::string out = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    out += i ? "; " : "";
    for (std::size_t j = 0; j < a.size(); ++j) out += (j ? ", " : "") + a[i][j].str();
  }
  return out + "]";
}

bool matrix_equal(const CrossedMatrix& a, const CrossedMatrix& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (!(a[i][j] == b[i][j])) return false;
  return true;
}

}  // namespace

std::vector<Check> verify_morita(const std::string& family, int samples, int decompositions, std::uint64_t seed,
                                 const std::optional<Rational>& theta_value) {
  std::vector<Check> out;
  const std::string tag = family + ": ";
  const ContextPtr ctx = family_context(family, 3, theta_value);
  const int n = ctx->order();
  const CrossedElement one = CrossedElement::one(ctx);
  const CrossedElement ph = phat(ctx);
  const CrossedElement p = CrossedElement::p(ctx);
  const CrossedElement phn = cpow(ph, n);
  out.push_back(pass_or_fail(tag + "phat^N = 1", phn == one, "N = " + std::to_string(n),
                             "phat^N = " + phn.str()));
  const CrossedElement lhs = p * ph;
  const CrossedElement rhs = ph * p * PhasedScalar(Cyclotomic::root(n, 1));
  out.push_back(pass_or_fail(tag + "p phat = lambda phat p", lhs == rhs, {}, lhs.str() + " vs " + rhs.str()));
  const CrossedElement pu = psi_u(ctx);
  out.push_back(pass_or_fail(tag + "psi(U) = U", pu == u_power(ctx, 1), {}, pu.str()));

  const CrossedMatrix e = matrix_units(ctx);
  bool units_ok = true;
  std::string units_cex;
  CrossedElement diag(ctx);
  for (int i = 0; i < n && units_ok; ++i) {
    diag += e[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    for (int j = 0; j < n && units_ok; ++j)
      for (int k = 0; k < n && units_ok; ++k)
        for (int l = 0; l < n && units_ok; ++l) {
          const CrossedElement prod = e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                                      e[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
          const CrossedElement want = j == k ? e[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] : CrossedElement(ctx);
          if (!(prod == want)) {
            units_ok = false;
            units_cex = "E_" + std::to_string(i) + std::to_string(j) + " E_" + std::to_string(k) + std::to_string(l) +
                        " = " + prod.str();
          }
        }
  }
  if (units_ok && !(diag == one)) {
    units_ok = false;
    units_cex = "sum E_ii = " + diag.str();
  }
  out.push_back(pass_or_fail(tag + "matrix units", units_ok, "E_ij = phat^i P0 phat^-j", units_cex));

  Sampler s(seed);
  std::vector<std::pair<TorusElement, TorusElement>> pairs;
  for (int i = 0; i < samples; ++i) {
    TorusElement x = s.torus(ctx->theta(), 2, 3);
    TorusElement y = s.torus(ctx->theta(), 2, 3);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  std::vector<std::string> cex(pairs.size());
  const auto bad = first_failure(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const auto cx = CrossedElement::from_torus(ctx, x);
    const auto cy = CrossedElement::from_torus(ctx, y);
    const auto ax = psi_matrix(ctx, e, cx);
    const auto ay = psi_matrix(ctx, e, cy);
    const auto axy = psi_matrix(ctx, e, cx * cy);
    for (const auto& row : ax)
      for (const auto& v : row)
        if (!is_invariant(v)) {
          cex[i] = "x = " + x.str(ctx->labels()) + ", non-invariant entry " + v.str();
          return false;
        }
    if (!(psi_inverse(e, ax) == cx)) {
      cex[i] = "x = " + x.str(ctx->labels()) + " not reconstructed";
      return false;
    }
    const auto prod = matmul(ax, ay);
    if (!matrix_equal(axy, prod)) {
      cex[i] = "x = " + x.str(ctx->labels()) + ", y = " + y.str(ctx->labels()) + ": Psi(xy) = " + matrix_str(axy) +
               ", Psi(x)Psi(y) = " + matrix_str(prod);
      return false;
    }
    if (!(psi(ctx, x) == cx)) {
      cex[i] = "x = " + x.str(ctx->labels()) + ": sum_k (x_k U^-k) Psi(U)^k = " + psi(ctx, x).str();
      return false;
    }
    return true;
  });
  out.push_back(pass_or_fail(tag + "Psi multiplicative", !bad, std::to_string(samples) + " seeded pairs of degree <= 2",
                             bad ? std::optional<std::string>(cex[*bad]) : std::nullopt));

  std::vector<TorusElement> xs;
  for (int i = 0; i < decompositions; ++i) xs.push_back(s.torus(ctx->theta(), 2, 5));
  std::vector<std::string> dcex(xs.size());
  const CrossedElement lambda = CrossedElement::scalar(ctx, PhasedScalar(Cyclotomic::root(n, 1)));
  const auto bad_dec = first_failure(xs.size(), [&](std::size_t i) {
    const auto comps = homogeneous_components(ctx->action(), ctx->theta(), xs[i]);
    TorusElement sum(ctx->dim());
    for (std::size_t k = 0; k < comps.size(); ++k) {
      sum += comps[k];
      const auto moved = apply(ctx->action(), ctx->theta(), comps[k]);
      const auto want = (comps[k] * PhasedScalar(Cyclotomic::root(n, static_cast<long>(k)))).normalized(ctx->theta());
      if (!(moved == want)) {
        dcex[i] = "x = " + xs[i].str(ctx->labels()) + ": p |> x_" + std::to_string(k) + " = " + moved.str(ctx->labels());
        return false;
      }
    }
    if (!(sum == xs[i])) {
      dcex[i] = "x = " + xs[i].str(ctx->labels()) + ", sum x_k = " + sum.str(ctx->labels());
      return false;
    }
    for (const auto& c : psi_components(ctx, xs[i]))
      if (!is_invariant(CrossedElement::from_torus(ctx, c))) {
        dcex[i] = "x = " + xs[i].str(ctx->labels()) + ", x_k U^-k not invariant: " + c.str(ctx->labels());
        return false;
      }
    return true;
  });
  out.push_back(pass_or_fail(tag + "homogeneous decomposition", !bad_dec,
                             std::to_string(decompositions) + " seeded elements",
                             bad_dec ? std::optional<std::string>(dcex[*bad_dec]) : std::nullopt));
  return out;
}

// ---------------------------------------------------------------------------
// traces

TraceFunctional TraceFunctional::canonical() { return TraceFunctional{}; }

TraceFunctional TraceFunctional::twisted(std::string name, int s, Base base) {
  TraceFunctional t;
  t.kind = TraceKind::twisted;
  t.name = std::move(name);
  t.s = s;
  t.base = std::move(base);
  return t;
}

TraceFunctional TraceFunctional::walters(int j, int k) {
  TraceFunctional t;
  t.kind = TraceKind::walters;
  t.name = "tau_" + std::to_string(j) + std::to_string(k);
  t.s = 1;
  t.j = j;
  t.k = k;
  return t;
}

TraceFunctional TraceFunctional::walters_base(int j, int k) {
  auto base = [j, k](const ThetaMatrix&, const Monomial& m) {
    const bool hit = ((m[0] % 2) + 2) % 2 == j && ((m[1] % 2) + 2) % 2 == k;
    return hit ? PhasedScalar(4L) : PhasedScalar();
  };
  TraceFunctional t = twisted("tau_" + std::to_string(j) + std::to_string(k) + " lifted", 1, base);
  t.j = j;
  t.k = k;
  return t;
}

namespace {

PhasedScalar base_eval(const TraceFunctional& t, const ThetaMatrix& theta, const TorusElement& a) {
  PhasedScalar r;
  for (const auto& [m, c] : a.terms()) r += c * t.base(theta, m);
  return theta.normalize(r);
}

long mod2(std::int64_t v) { return ((v % 2) + 2) % 2; }

}  // namespace

PhasedScalar trace_eval(const TraceFunctional& t, const CrossedElement& x) {
  if (x.is_zero()) return {};
  const auto& ctx = *x.context();
  const auto& theta = ctx.theta();
  switch (t.kind) {
    case TraceKind::canonical:
      return x.coefficient(Monomial(ctx.dim()), 0);
    case TraceKind::twisted:
      return base_eval(t, theta, x.component(ctx.order() - t.s));
    case TraceKind::walters: {
      if (ctx.order() != 2 || ctx.dim() != 2) throw ContextError("tau_jk lives on T^2 x| Z_2");
      PhasedScalar r;
      for (const auto& [key, c] : x.terms()) {
        if (key.k != 1) continue;
        const std::int64_t iota = key.m[0], kappa = key.m[1];
        if (mod2(iota) != t.j || mod2(kappa) != t.k) continue;
        // delta_m = conj(omega(iota e1, kappa e2)) V^iota W^kappa
        const PhasedScalar to_vw = cocycle(theta, iota * Monomial::unit(2, 0), kappa * Monomial::unit(2, 1)).conj();
        r += c * to_vw * PhasedScalar(4L) * theta.phase(Rational(-iota * kappa));
      }
      return theta.normalize(r);
    }
  }
  return {};
}

std::vector<Check> verify_trace_laws(const ContextPtr& ctx, const TraceFunctional& t, int samples,
                                     std::uint64_t seed) {
  std::vector<Check> out;
  const int n = ctx->order();
  const std::string tag = ctx->action().name + " " + t.name + ": ";
  Sampler s(seed);
  std::vector<std::pair<CrossedElement, CrossedElement>> pairs;
  for (int i = 0; i < samples; ++i) {
    CrossedElement x = random_crossed(ctx, s, 2, 4);
    CrossedElement y = random_crossed(ctx, s, 2, 4);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  std::vector<std::string> cex(pairs.size());
  const auto bad = first_failure(pairs.size(), [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const auto a = trace_eval(t, x * y), b = trace_eval(t, y * x);
    if (a == b) return true;
    cex[i] = "x = " + x.str() + ", y = " + y.str() + ": t(xy) = " + a.str() + ", t(yx) = " + b.str();
    return false;
  });
  out.push_back(pass_or_fail(tag + "tracial", !bad, std::to_string(samples) + " seeded pairs",
                             bad ? std::optional<std::string>(cex[*bad]) : std::nullopt));

  const int s_eff = t.kind == TraceKind::canonical ? 0 : t.s;
  const PhasedScalar factor(Cyclotomic::root(n, s_eff));
  const auto bad_beta = first_failure(pairs.size(), [&](std::size_t i) {
    const auto& x = pairs[i].first;
    const auto a = trace_eval(t, beta_hat(x));
    const auto b = ctx->theta().normalize(factor * trace_eval(t, x));
    if (a == b) return true;
    cex[i] = "x = " + x.str() + ": t(beta(x)) = " + a.str() + ", exp(2 pi i s/N) t(x) = " + b.str();
    return false;
  });
  out.push_back(pass_or_fail(tag + "beta-hat scaling", !bad_beta, "s = " + std::to_string(s_eff),
                             bad_beta ? std::optional<std::string>(cex[*bad_beta]) : std::nullopt));

  if (t.kind == TraceKind::twisted) {
    const auto& theta = ctx->theta();
    const auto& g = ctx->action().generator();
    std::vector<std::pair<TorusElement, TorusElement>> tp;
    for (int i = 0; i < samples; ++i) {
      TorusElement a = s.torus(theta, 2, 4);
      TorusElement b = s.torus(theta, 2, 4);
      tp.emplace_back(std::move(a), std::move(b));
    }
    std::vector<std::string> tcex(tp.size());
    const auto bad_inv = first_failure(tp.size(), [&](std::size_t i) {
      const auto& a = tp[i].first;
      const auto l = base_eval(t, theta, apply(g, theta, a)), r = base_eval(t, theta, a);
      if (l == r) return true;
      tcex[i] = "a = " + a.str(ctx->labels()) + ": Phi(sigma a) = " + l.str() + ", Phi(a) = " + r.str();
      return false;
    });
    out.push_back(pass_or_fail(tag + "sigma invariant", !bad_inv, {},
                               bad_inv ? std::optional<std::string>(tcex[*bad_inv]) : std::nullopt));
    const auto bad_tw = first_failure(tp.size(), [&](std::size_t i) {
      const auto& [a, b] = tp[i];
      const auto l = base_eval(t, theta, mul(theta, a, b));
      const auto r = base_eval(t, theta, mul(theta, apply_power(g, theta, b, t.s), a));
      if (l == r) return true;
      tcex[i] = "a = " + a.str(ctx->labels()) + ", b = " + b.str(ctx->labels()) + ": Phi(ab) = " + l.str() +
                ", Phi(sigma^s(b) a) = " + r.str();
      return false;
    });
    out.push_back(pass_or_fail(tag + "sigma^s twisted", !bad_tw, "s = " + std::to_string(t.s),
                               bad_tw ? std::optional<std::string>(tcex[*bad_tw]) : std::nullopt));
  }
  return out;
}

Check verify_trace_agreement(const ContextPtr& ctx, const TraceFunctional& a, const TraceFunctional& b, int samples,
                             std::uint64_t seed) {
  Sampler s(seed);
  std::vector<CrossedElement> xs;
  for (int i = 0; i < samples; ++i) xs.push_back(random_crossed(ctx, s, 2, 4));
  std::vector<std::string> cex(xs.size());
  const auto bad = first_failure(xs.size(), [&](std::size_t i) {
    const auto l = trace_eval(a, xs[i]), r = trace_eval(b, xs[i]);
    if (l == r) return true;
    cex[i] = "x = " + xs[i].str() + ": " + a.name + " = " + l.str() + ", " + b.name + " = " + r.str();
    return false;
  });
  return pass_or_fail(ctx->action().name + " " + a.name + " = " + b.name, !bad, std::to_string(samples) + " seeded elements",
                      bad ? std::optional<std::string>(cex[*bad]) : std::nullopt);
}

Check verify_exchange_iso(const std::string& family, int degree) {
  const ContextPtr c2 = family_context(family, 2);
  const ContextPtr c3 = family_context(family, 3);
  require_central_u(*c3);
  const int n = c3->order();
  auto embed = [&](const CrossedElement& x) {
    CrossedElement r(c3);
    for (const auto& [key, c] : x.terms()) r.add_term(Monomial{0, key.m[0], key.m[1]}, key.k, c);
    return r;
  };
  const CrossedElement u = u_power(c3, 1), u_inv = u_power(c3, -1);
  const CrossedElement p3 = CrossedElement::p(c3), p3_inv = cpow(p3, n - 1);
  const CrossedElement p2 = CrossedElement::p(c2), p2_inv = cpow(p2, n - 1);
  std::size_t checked = 0;
  const std::string name = family + ": exchange of crossed products";

  const CrossedElement pu = p3 * u * p3_inv;
  const CrossedElement lu = u * PhasedScalar(Cyclotomic::root(n, 1));
  ++checked;
  if (!(pu == lu)) return pass_or_fail(name, false, {}, "p U p^-1 = " + pu.str() + ", lambda U = " + lu.str());

  for (std::int64_t a = -degree; a <= degree; ++a)
    for (std::int64_t b = -degree; b <= degree; ++b)
      for (int k = 0; k < n; ++k) {
        const CrossedElement x = CrossedElement::term(c2, Monomial{a, b}, k);
        const CrossedElement lhs = u * embed(x) * u_inv;
        const CrossedElement rhs = embed(beta_hat(x));
        ++checked;
        if (!(lhs == rhs))
          return pass_or_fail(name, false, {}, "U x U^-1 = " + lhs.str() + ", beta(x) = " + rhs.str() + " for x = " + x.str());
        const CrossedElement l2 = p3 * embed(x) * p3_inv;
        const CrossedElement r2 = embed(p2 * x * p2_inv);
        ++checked;
        if (!(l2 == r2))
          return pass_or_fail(name, false, {}, "p x p^-1 = " + l2.str() + " vs " + r2.str() + " for x = " + x.str());
      }
  return pass_or_fail(name, true, std::to_string(checked) + " relations on monomials of degree <= " + std::to_string(degree));
}

// ---------------------------------------------------------------------------
// K_0 generators

CrossedElement K0Data::projector(int source, int n) const {
  return q_projector(elements.at(static_cast<std::size_t>(source)).element, n, N);
}

CrossedElement K0Data::element(std::size_t i) const {
  const auto& g = basis.at(i);
  switch (g.kind) {
    case K0Generator::Kind::unit: return CrossedElement::one(ctx);
    case K0Generator::Kind::projector: return projector(g.source, g.n);
    case K0Generator::Kind::exotic: break;
  }
  throw std::logic_error(g.label + " is an exotic module with no projection in the algebra");
}

std::optional<std::size_t> K0Data::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i].label == label) return i;
  return std::nullopt;
}

K0Data k0_generators(const std::string& family, const std::optional<Rational>& theta_value) {
  K0Data d;
  d.family = family;
  d.ctx = family_context(family, 2, theta_value);
  d.N = d.ctx->order();
  const auto& ctx = d.ctx;
  const auto& theta = ctx->theta();
  const CrossedElement p = CrossedElement::p(ctx);
  const CrossedElement v = CrossedElement::generator(ctx, "V");
  const CrossedElement w = CrossedElement::generator(ctx, "W");
  auto ph = [&](const Rational& b) { return theta.phase(b); };

  auto add_element = [&](std::string name, const CrossedElement& printed, int order) {
    SpectralElement e{std::move(name), printed, printed, order, std::nullopt, std::nullopt};
    const CrossedElement one = CrossedElement::one(ctx);
    const CrossedElement pw = cpow(printed, order);
    if (!(pw == one)) {
      e.residual = pw - one;
      e.correction = minimal_phase_correction(printed, order);
      if (e.correction) e.element = printed * e.correction->factor;
    }
    d.elements.push_back(std::move(e));
    return static_cast<int>(d.elements.size()) - 1;
  };
  auto unit = [&]() { d.basis.push_back(K0Generator{"[1]", K0Generator::Kind::unit, -1, 0}); };
  auto proj = [&](std::string label, int src, int n) {
    d.basis.push_back(K0Generator{std::move(label), K0Generator::Kind::projector, src, n});
  };
  auto exotic = [&](std::string label) { d.basis.push_back(K0Generator{std::move(label), K0Generator::Kind::exotic, -1, 0}); };

  if (family == "B2") {
    const int sp = add_element("p", p, 2);
    const int sv = add_element("Vp", v * p, 2);
    const int sw = add_element("Wp", w * p, 2);
    const int svw = add_element("e^{i pi theta} VWp", v * w * p * ph(1), 2);
    unit();
    proj("e00", sp, 0);
    proj("e01", sv, 0);
    proj("e10", sw, 0);
    proj("e11", svw, 0);
    exotic("M2");
  } else if (family == "B3") {
    const int sp = add_element("p", p, 3);
    const int sx = add_element("X", v * p * ph(Rational(1, 3)), 3);
    const int sy = add_element("Y", v * v * p * ph(Rational(2, 3)), 3);
    unit();
    for (auto [name, src] : {std::pair{"p", sp}, std::pair{"X", sx}, std::pair{"Y", sy}}) {
      proj(std::string("Q1(") + name + ")", src, 1);
      proj(std::string("Q0(") + name + ")", src, 0);
    }
    exotic("M3");
  } else if (family == "B4") {
    const int sp = add_element("p", p, 4);
    const int sx = add_element("e^{pi i theta/2} Vp", v * p * ph(Rational(1, 2)), 4);
    const int sv = add_element("Vp^2", v * p * p, 2);
    unit();
    for (auto [name, src] : {std::pair{"p", sp}, std::pair{"x", sx}})
      for (int n = 2; n >= 0; --n) proj("Q" + std::to_string(n) + "(" + name + ")", src, n);
    proj("Q0(Vp^2)", sv, 0);
    exotic("M4");
  } else if (family == "B6") {
    const int sp = add_element("p", p, 6);
    const int sy = add_element("y = e^{pi i/3} Vp^2", v * p * p * PhasedScalar(Cyclotomic::root(6, 1)), 3);
    const int sv = add_element("Vp^3", v * p * p * p, 2);
    unit();
    for (int n = 4; n >= 0; --n) proj("Q" + std::to_string(n) + "(p)", sp, n);
    proj("Q2(y)", sy, 2);
    proj("Q0(y)", sy, 0);
    proj("Q0(Vp^3)", sv, 0);
    exotic("M6");
  } else {
    throw std::invalid_argument("no K_0 generator list for family " + family);
  }
  for (const auto& e : d.elements)
    if (e.residual)
      d.notes.push_back(e.name + ": " + e.name + "^" + std::to_string(e.order) + " - 1 = " + e.residual->str() +
                        (e.correction ? "; corrected by the factor " + e.correction->factor.str() : "; no scalar correction"));
  return d;
}

std::vector<Check> verify_projections(const std::string& family, const std::optional<Rational>& theta_value) {
  std::vector<Check> out;
  const K0Data d = k0_generators(family, theta_value);
  const auto& ctx = d.ctx;
  const int n = d.N;
  const std::string tag = family + ": ";
  const CrossedElement one = CrossedElement::one(ctx);

  for (const auto& e : d.elements) {
    const std::string name = tag + e.name + " has order " + std::to_string(e.order);
    if (!e.residual) {
      out.push_back(pass_or_fail(name, true));
    } else if (e.correction) {
      out.push_back(Check{name, Status::anomaly,
                          "as printed, x^" + std::to_string(e.order) + " - 1 = " + e.residual->str() +
                              "; minimal correction factor " + e.correction->factor.str() + " is used instead",
                          std::nullopt});
    } else {
      out.push_back(pass_or_fail(name, false, {}, "x^" + std::to_string(e.order) + " - 1 = " + e.residual->str()));
    }
  }

  for (std::size_t i = 0; i < d.basis.size(); ++i) {
    const auto& g = d.basis[i];
    if (g.kind != K0Generator::Kind::projector) continue;
    try {
      const CrossedElement q = d.element(i);
      const CrossedElement qq = q * q;
      const CrossedElement qs = cstar(q);
      out.push_back(pass_or_fail(tag + g.label + " idempotent", qq == q, {}, "Q = " + q.str() + ", Q^2 = " + qq.str()));
      out.push_back(pass_or_fail(tag + g.label + " self-adjoint", qs == q, {}, "Q = " + q.str() + ", Q* = " + qs.str()));
    } catch (const NotRootOfUnity& err) {
      out.push_back(pass_or_fail(tag + g.label + " projector", false, {}, err.what()));
    }
  }

  for (std::size_t s = 0; s < d.elements.size(); ++s) {
    const auto& e = d.elements[s];
    try {
      std::vector<CrossedElement> qs;
      CrossedElement sum(ctx);
      for (int k = 0; k < n; ++k) {
        qs.push_back(d.projector(static_cast<int>(s), k));
        sum += qs.back();
      }
      bool orth = true;
      std::string cex;
      for (int a = 0; a < n && orth; ++a)
        for (int b = 0; b < n && orth; ++b)
          if (a != b) {
            const auto prod = qs[static_cast<std::size_t>(a)] * qs[static_cast<std::size_t>(b)];
            if (!prod.is_zero()) {
              orth = false;
              cex = "Q" + std::to_string(a) + " Q" + std::to_string(b) + " = " + prod.str();
            }
          }
      out.push_back(pass_or_fail(tag + "spectral completeness for " + e.name, orth && sum == one, {},
                                 orth ? "sum Q_n = " + sum.str() : cex));

      // beta-hat(x) = conj(lambda)^j x shifts Q_n to Q_{n-j}
      const CrossedElement bx = beta_hat(e.element);
      int shift = -1;
      for (int j = 0; j < n; ++j)
        if (bx == e.element * PhasedScalar(Cyclotomic::root(n, -j))) shift = j;
      if (shift < 0) {
        out.push_back(pass_or_fail(tag + "beta-hat on " + e.name, false, {}, "beta-hat(x) = " + bx.str()));
        continue;
      }
      bool ok = true;
      std::string bcex;
      for (int k = 0; k < n && ok; ++k) {
        const auto moved = beta_hat(qs[static_cast<std::size_t>(k)]);
        const auto want = qs[static_cast<std::size_t>(((k - shift) % n + n) % n)];
        if (!(moved == want)) {
          ok = false;
          bcex = "beta-hat(Q" + std::to_string(k) + ") = " + moved.str();
        }
      }
      out.push_back(pass_or_fail(tag + "beta-hat(Q_n(" + e.name + ")) = Q_{n-" + std::to_string(shift) + "}", ok, {}, bcex));
    } catch (const NotRootOfUnity& err) {
      out.push_back(pass_or_fail(tag + "spectral completeness for " + e.name, false, {}, err.what()));
    }
  }

  if (n == 2) {
    bool ok = true;
    std::string cex;
    for (std::size_t i = 0; i < d.basis.size(); ++i) {
      if (d.basis[i].kind != K0Generator::Kind::projector) continue;
      const auto q = d.element(i);
      if (!(beta_hat(q) == one - q)) {
        ok = false;
        cex = d.basis[i].label + ": beta-hat = " + beta_hat(q).str();
      }
    }
    out.push_back(pass_or_fail(tag + "beta-hat(e_jk) = 1 - e_jk", ok, {}, cex));
  }

  if (family == "B6") {
    // the generator theorem writes exp(2 pi n k i / 3) inside a six-term sum
    const auto& p = d.elements.front().element;
    std::vector<CrossedElement> q3, q6;
    bool idem3 = true;
    CrossedElement sum3(ctx), sum6(ctx);
    for (int k = 0; k < n; ++k) {
      q3.push_back(q_projector(p, k, n, 3));
      q6.push_back(q_projector(p, k, n, 6));
      idem3 = idem3 && q3.back() * q3.back() == q3.back();
      sum3 += q3.back();
      sum6 += q6.back();
    }
    const bool complete3 = sum3 == one;
    const bool distinct3 = !(q3[0] == q3[3]);
    const bool six_ok = sum6 == one;
    if (!complete3 || !distinct3) {
      out.push_back(Check{tag + "Q_n period reading", six_ok ? Status::anomaly : Status::fail,
                          std::string("period-3 phases: each Q_n ") + (idem3 ? "is" : "is not") +
                              " idempotent, but Q_0 " + (distinct3 ? "!=" : "=") + " Q_3 and sum Q_n " +
                              (complete3 ? "=" : "!=") + " 1; the period-6 reading satisfies all projector laws",
                          std::nullopt});
    } else {
      out.push_back(pass_or_fail(tag + "Q_n period reading", true, "both readings agree"));
    }
    // beta_*([Q_{n+1}(p)]) = [Q_n(p)] can only hold for n = 0..3 in this basis
    bool ok = true;
    for (int k = 0; k + 1 <= 4 && ok; ++k) ok = beta_hat(q6[static_cast<std::size_t>(k + 1)]) == q6[static_cast<std::size_t>(k)];
    out.push_back(Check{tag + "Q_{n+1}(p) -> Q_n(p) index range", ok ? Status::anomaly : Status::fail,
                        "holds for n = 0..3; n = 4 would need Q_5(p), which is not a generator",
                        std::nullopt});
  }
  return out;
}

}  // namespace nbk
