#pragma once

// Crossed products A x| Z_N of a twisted torus by a cyclic action: elements
// sum c * delta_m p^k, the dual automorphism beta-hat, spectral projections,
// the matrix-unit picture of the fixed-point isomorphism, and traces.

#include "nbk/actions.hpp"
#include "nbk/check.hpp"
#include "nbk/random.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace nbk {

class ContextError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Theta matrix plus a cyclic action, with alpha^k precomputed on generators.
class CrossedContext {
 public:
  CrossedContext(ThetaMatrix theta, FiniteAction action);

  const ThetaMatrix& theta() const { return theta_; }
  const FiniteAction& action() const { return action_; }
  int order() const { return order_; }
  int dim() const { return theta_.dim(); }
  const std::vector<std::string>& labels() const { return action_.labels; }

  /// alpha^k(delta_m) = coeff * delta_target.
  std::pair<PhasedScalar, Monomial> act(const Monomial& m, long k) const;

  struct Moved {
    PhasedScalar coeff;
    Monomial target;
    std::optional<std::pair<Rational, long>> unit;  // coeff as (b, k) when a unit phase
  };
  /// Memoised act; safe to call concurrently.
  const Moved& moved(const Monomial& m, long k) const;

 private:
  ThetaMatrix theta_;
  FiniteAction action_;
  int order_;
  std::vector<ActionGenerator> powers_;  // alpha^k on the torus generators, k < N
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, int, Monomial>, Moved> cache_;  // (session order, k, m)
};

using ContextPtr = std::shared_ptr<const CrossedContext>;

ContextPtr make_context(ThetaMatrix theta, FiniteAction action);
/// Noncommutative family action on the 2-torus (V, W) or the 3-torus (U, V, W);
/// `theta_value` switches to the folded rational-theta algebra.
ContextPtr family_context(const std::string& family, int dim, const std::optional<Rational>& theta_value = {});

struct CrossedKey {
  Monomial m;
  int k = 0;
  friend auto operator<=>(const CrossedKey&, const CrossedKey&) = default;
  friend bool operator==(const CrossedKey&, const CrossedKey&) = default;
};

class CrossedElement {
 public:
  using Terms = std::map<CrossedKey, PhasedScalar>;

  CrossedElement() = default;
  explicit CrossedElement(ContextPtr ctx) : ctx_(std::move(ctx)) {}

  /// c * delta_m p^k.
  static CrossedElement term(const ContextPtr& ctx, const Monomial& m, long k,
                             const PhasedScalar& c = PhasedScalar::one());
  static CrossedElement scalar(const ContextPtr& ctx, const PhasedScalar& c);
  static CrossedElement one(const ContextPtr& ctx) { return scalar(ctx, PhasedScalar::one()); }
  /// The unitary p implementing the action.
  static CrossedElement p(const ContextPtr& ctx);
  /// The torus generator with the given label.
  static CrossedElement generator(const ContextPtr& ctx, const std::string& label);
  /// a * p^k.
  static CrossedElement from_torus(const ContextPtr& ctx, const TorusElement& a, long k = 0);

  const ContextPtr& context() const { return ctx_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  PhasedScalar coefficient(const Monomial& m, long k) const;
  /// a_k in x = sum_k a_k p^k.
  TorusElement component(long k) const;

  void add_term(const Monomial& m, long k, const PhasedScalar& c);

  CrossedElement operator-() const;
  CrossedElement& operator+=(const CrossedElement& o);
  CrossedElement& operator-=(const CrossedElement& o);
  CrossedElement& operator*=(const PhasedScalar& c);
  friend CrossedElement operator+(CrossedElement a, const CrossedElement& b) { return a += b; }
  friend CrossedElement operator-(CrossedElement a, const CrossedElement& b) { return a -= b; }
  friend CrossedElement operator*(CrossedElement a, const PhasedScalar& c) { return a *= c; }
  friend CrossedElement operator*(const PhasedScalar& c, CrossedElement a) { return a *= c; }
  friend CrossedElement operator*(const CrossedElement& a, const CrossedElement& b);
  friend bool operator==(const CrossedElement& a, const CrossedElement& b);

  std::string str() const;

 private:
  void check_context(const CrossedElement& o) const;

  ContextPtr ctx_;
  Terms terms_;
};

/// (a p^k)(b p^j) = a alpha^k(b) p^{k+j}.
CrossedElement cmul(const CrossedElement& x, const CrossedElement& y);
/// (a p^k)* = alpha^{-k}(a*) p^{-k}.
CrossedElement cstar(const CrossedElement& x);
/// x^n for n >= 0; negative n uses x* and is meant for unitaries.
CrossedElement cpow(const CrossedElement& x, long n);
/// a p^k -> conj(lambda)^{k times} a p^k, lambda = exp(2 pi i / N).
CrossedElement beta_hat(const CrossedElement& x, long times = 1);

CrossedElement random_crossed(const ContextPtr& ctx, Sampler& s, int degree, int terms);

class NotRootOfUnity : public std::runtime_error {
 public:
  NotRootOfUnity(const CrossedElement& residual, int n);
  /// x^n - 1.
  const CrossedElement& residual() const { return residual_; }

 private:
  CrossedElement residual_;
};

/// Q_n(x) = (1/N) sum_{k<N} mu^{nk} x^k with mu = exp(2 pi i / period);
/// period defaults to N. Requires x^N = 1.
CrossedElement q_projector(const CrossedElement& x, int n, int N, int period = 0);

/// Scalar c = exp(pi i b theta) zeta_M^r with (c x)^n = 1, for x^n a unit
/// scalar; b is forced, r is the least non-negative choice.
struct PhaseCorrection {
  PhasedScalar factor;
  Rational theta_exponent;  // b
  long root_index = 0;      // r
  int field_order = 0;      // M
};
std::optional<PhaseCorrection> minimal_phase_correction(const CrossedElement& x, int n);

// -- fixed-point isomorphism (3-torus contexts with U central) --

/// Throws ContextError unless U is central and p |> U = lambda U.
void require_central_u(const CrossedContext& ctx);
/// U + P0 (U^{1-N} - U), P0 = (1/N) sum_{k=1..N} p^k.
CrossedElement phat(const ContextPtr& ctx);
/// phat + P0 phat (U^N - 1).
CrossedElement psi_u(const ContextPtr& ctx);
/// x_k U^{-k}: the invariant coefficients in x = sum_k (x_k U^{-k}) U^k.
std::vector<TorusElement> psi_components(const ContextPtr& ctx, const TorusElement& x);
/// sum_k (x_k U^{-k}) psi_u^k.
CrossedElement psi(const ContextPtr& ctx, const TorusElement& x);

using CrossedMatrix = std::vector<std::vector<CrossedElement>>;
/// E_ij = phat^i P0 phat^{-j}.
CrossedMatrix matrix_units(const ContextPtr& ctx);
/// a_ij = sum_k E_ki x E_jk; the entries commute with p and phat.
CrossedMatrix psi_matrix(const ContextPtr& ctx, const CrossedMatrix& units, const CrossedElement& x);
CrossedElement psi_inverse(const CrossedMatrix& units, const CrossedMatrix& a);
CrossedMatrix matmul(const CrossedMatrix& a, const CrossedMatrix& b);

/// Fixed-point algebra membership: p-degree 0 and action invariant.
bool is_invariant(const CrossedElement& x);

std::vector<Check> verify_morita(const std::string& family, int samples, int decompositions, std::uint64_t seed,
                                 const std::optional<Rational>& theta_value = {});

// -- traces --

enum class TraceKind { canonical, twisted, walters };

struct TraceFunctional {
  using Base = std::function<PhasedScalar(const ThetaMatrix&, const Monomial&)>;

  TraceKind kind = TraceKind::canonical;
  std::string name = "tau";
  int s = 0;  // twist; the lifted trace reads a_{N-s}
  Base base;  // Phi_s on delta_m (twisted kind)
  int j = 0, k = 0;

  static TraceFunctional canonical();
  static TraceFunctional twisted(std::string name, int s, Base base);
  /// tau_jk on T^2 x| Z_2 via the closed formula on V^iota W^kappa p^rho.
  static TraceFunctional walters(int j, int k);
  /// tau_jk as a lifted twisted trace: Phi(delta_m) = 4 [m = (j,k) mod 2], s = 1.
  static TraceFunctional walters_base(int j, int k);
};

PhasedScalar trace_eval(const TraceFunctional& t, const CrossedElement& x);

/// Tracial law and beta-hat scaling on crossed samples; for twisted traces also
/// sigma invariance and the sigma^s twist on torus samples.
std::vector<Check> verify_trace_laws(const ContextPtr& ctx, const TraceFunctional& t, int samples,
                                     std::uint64_t seed);

/// The two functionals agree on seeded crossed samples.
Check verify_trace_agreement(const ContextPtr& ctx, const TraceFunctional& a, const TraceFunctional& b, int samples,
                             std::uint64_t seed);

/// (A x|_beta Z) x|_alpha Z_N against (A x|_alpha Z_N) x|_betahat Z on
/// monomials of degree <= `degree`.
Check verify_exchange_iso(const std::string& family, int degree = 3);

// -- K_0 generators of T^2 x| Z_N --

struct SpectralElement {
  std::string name;
  CrossedElement printed;  // as written in the generator theorem
  CrossedElement element;  // printed, or printed times the phase correction
  int order = 1;           // expected order of the unitary
  std::optional<PhaseCorrection> correction;
  std::optional<CrossedElement> residual;  // printed^order - 1 when nonzero
};

struct K0Generator {
  enum class Kind { unit, projector, exotic };
  std::string label;
  Kind kind = Kind::unit;
  int source = -1;  // index into K0Data::elements
  int n = 0;        // Q_n
};

struct K0Data {
  std::string family;
  ContextPtr ctx;
  int N = 0;
  std::vector<SpectralElement> elements;
  std::vector<K0Generator> basis;  // in the order of the id - beta_* display
  std::vector<std::string> notes;

  /// Projection for a non-exotic generator; throws for the exotic module.
  CrossedElement element(std::size_t i) const;
  CrossedElement projector(int source, int n) const;
  std::optional<std::size_t> index_of(const std::string& label) const;
};

K0Data k0_generators(const std::string& family, const std::optional<Rational>& theta_value = {});

/// Idempotency, self-adjointness, spectral completeness, beta-hat transport and
/// the order checks (anomalies) for one family.
std::vector<Check> verify_projections(const std::string& family, const std::optional<Rational>& theta_value = {});

}  // namespace nbk
