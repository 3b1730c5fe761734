#pragma once

// Finite group actions on twisted tori given by phased-monomial images of the
// generators, their multiplicative extension, order/compatibility checks, the
// cocycle scan and the homogeneous decomposition.

#include "nbk/nctorus.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nbk {

/// g |> delta_{e_i} = coeff * delta_target.
struct GeneratorImage {
  PhasedScalar coeff;
  Monomial target;
};

struct ActionGenerator {
  std::string name;
  int order = 1;
  std::vector<GeneratorImage> images;  // one per torus generator
};

/// An action materialised for a fixed theta matrix. Cyclic actions have one
/// group generator; Z_2 x Z_2 actions have two commuting ones.
struct FiniteAction {
  std::string name;
  std::vector<std::string> labels;
  std::vector<ActionGenerator> generators;

  int dim() const { return static_cast<int>(labels.size()); }
  bool is_cyclic() const { return generators.size() == 1; }
  /// Order of the (single) generator; throws for non-cyclic actions.
  int order() const;
  const ActionGenerator& generator() const;
};

class ActionFormatError : public std::runtime_error {
 public:
  ActionFormatError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Theta-independent description of an action, as read from the declarative
/// text format (see docs/action_format.md). Images are ordered words in the
/// torus generators times scalar factors; materialising evaluates the words
/// in the twisted algebra of a given theta matrix.
class ActionSpec {
 public:
  struct Factor {
    int generator = -1;             // index into labels, or -1 for a raw delta
    std::int64_t power = 0;
    std::optional<Monomial> delta;  // explicit delta_m written as [a,b,c]
  };
  /// magnitude * exp(2 pi i turn) * exp(pi i theta_b theta) * word. Kept free of
  /// any cyclotomic field so a parsed spec survives a change of session order.
  struct Image {
    Rational magnitude{1};
    Rational turn{0};
    Rational theta_b{0};
    std::vector<Factor> word;
    PhasedScalar scalar() const;
  };
  struct Generator {
    std::string name;
    int order = 1;
    std::vector<std::optional<Image>> images;
  };

  static ActionSpec parse(std::string_view text);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Generator>& generators() const { return generators_; }
  /// Zero-based (j, k), j < k, of the entry that the cocycle scan keeps symbolic.
  const std::optional<std::pair<int, int>>& free_slot() const { return free_slot_; }

  FiniteAction materialize(const ThetaMatrix& theta) const;
  /// Drops one torus generator; the remaining images must not involve it.
  ActionSpec without(const std::string& label) const;

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<Generator> generators_;
  std::optional<std::pair<int, int>> free_slot_;
};

/// Built-in families. The classical tables (commutative images, used for the
/// cocycle scan) cover B2..B6 and N1..N4; the noncommutative table covers
/// B2, B3, B4, B6, N1, N2.
const std::vector<std::string>& classical_families();
const std::vector<std::string>& noncommutative_families();
const ActionSpec& classical_spec(const std::string& family);
const ActionSpec& noncommutative_spec(const std::string& family);
/// Source text of a built-in family, in the declarative format.
std::string_view builtin_action_text(const std::string& family, bool noncommutative);

/// (g |> delta_m) as coeff * delta_target. Extends the generator images
/// multiplicatively through the ordered product delta_{m_1 e_1} delta_{m_2 e_2}...
std::pair<PhasedScalar, Monomial> apply_monomial(const ActionGenerator& g, const ThetaMatrix& theta,
                                                 const Monomial& m);
TorusElement apply(const ActionGenerator& g, const ThetaMatrix& theta, const TorusElement& x);
/// g^k |> x, k reduced modulo the generator order.
TorusElement apply_power(const ActionGenerator& g, const ThetaMatrix& theta, const TorusElement& x, long k);
/// Applies the generator of a cyclic action.
TorusElement apply(const FiniteAction& action, const ThetaMatrix& theta, const TorusElement& x);

bool check_order(const FiniteAction& action, const ThetaMatrix& theta);

struct CompatibilityViolation {
  std::string generator;
  Monomial m, n;
  std::string lhs, rhs;  // exact renderings of g|>(d_m d_n) and (g|>d_m)(g|>d_n)
};

/// Certifies g |> (d_m d_n) = (g |> d_m)(g |> d_n) for all |m|,|n| <= bound and
/// every group generator (plus commutation of the generators when there are
/// several). Returns the first violation, if any.
std::optional<CompatibilityViolation> find_compatibility_violation(const FiniteAction& action,
                                                                   const ThetaMatrix& theta,
                                                                   int degree_bound);
bool check_compatibility(const FiniteAction& action, const ThetaMatrix& theta, int degree_bound);

/// One admissible assignment of (theta_12, theta_13, theta_23); fixed entries
/// are reduced into [0, 1).
using ThetaTriple = std::array<ThetaEntry, 3>;

struct CocyclePattern {
  std::string family;
  std::optional<std::pair<int, int>> free_slot;
  std::vector<ThetaTriple> admissible;  // sorted, unique

  friend bool operator==(const CocyclePattern& a, const CocyclePattern& b) {
    return a.free_slot == b.free_slot && a.admissible == b.admissible;
  }
  /// Slot-wise value sets when the pattern is a product set.
  std::optional<std::array<std::vector<ThetaEntry>, 3>> as_product() const;
  std::string str() const;
};

bool theta_triple_less(const ThetaTriple& a, const ThetaTriple& b);

/// Enumerates candidate matrices with fixed entries in {k/D : 0 <= k < D} and
/// the family's free slot symbolic, keeping those compatible at degree bound 2.
/// Candidates are checked in parallel.
CocyclePattern scan_cocycles(const ActionSpec& spec, int denominator, int degree_bound = 2);
CocyclePattern scan_cocycles(const std::string& family, int denominator, int degree_bound = 2);

/// The published table of admissible cocycles for a family, restricted to
/// values whose denominator divides `denominator`.
CocyclePattern published_cocycle_table(const std::string& family, int denominator = 6);

namespace reference {
/// Same checks carried out with full exact scalars.
std::optional<CompatibilityViolation> find_compatibility_violation(const FiniteAction& action,
                                                                   const ThetaMatrix& theta,
                                                                   int degree_bound);
bool check_compatibility(const FiniteAction& action, const ThetaMatrix& theta, int degree_bound);
CocyclePattern scan_cocycles(const ActionSpec& spec, int denominator, int degree_bound = 2);
}  // namespace reference

/// x_k = (1/N) sum_j conj(lambda)^{kj} (p^j |> x), lambda = exp(2 pi i / N).
std::vector<TorusElement> homogeneous_components(const FiniteAction& action, const ThetaMatrix& theta,
                                                 const TorusElement& x);

struct FreenessWitness {
  bool free = false;
  std::optional<std::string> generator;  // label of the witnessing unitary
};

/// Looks for a torus generator u with p |> u = zeta u, zeta of full order N.
FreenessWitness freeness_witness(const FiniteAction& action, const ThetaMatrix& theta);

/// The theta matrix of the noncommutative families: theta_23 = -theta (3d).
ThetaMatrix standard_theta(int dim = 3);

}  // namespace nbk
