#pragma once

// id - beta_* on K_0(T^2 x| Z_N), the Pimsner-Voiculescu solve for the
// noncommutative Bieberbach algebras, its consistency checks against the
// crossed-product elements, and H_1 of the classical Bieberbach groups.

#include "nbk/check.hpp"
#include "nbk/smith.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbk {

/// The K-theory families: B2, B3, B4, B6.
const std::vector<std::string>& ktheory_families();

/// +1 for 0 < theta < 1/2 and -1 for 1/2 < theta < 1 (theta taken mod 1).
int epsilon_for(const Rational& theta);

struct BetaStarData {
  std::string family;
  int order = 0;                   // N
  std::vector<std::string> basis;  // labels as in the crossed-product generator list
  IntMatrix m;                     // id - beta_*, columns are images of basis vectors
  std::optional<int> epsilon;      // B2 only
  std::vector<std::string> notes;

  /// beta_* = I - M.
  IntMatrix beta() const { return IntMatrix::identity(m.rows()) - m; }
  std::size_t index_of(std::string_view label) const;
};

/// Assembled from the beta_* rules on each generator. `epsilon` must be +1 or
/// -1 and only matters for B2.
BetaStarData beta_star_matrix(const std::string& family, int epsilon = 1);

class InconsistentData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KGroups {
  AbelianGroup k0, k1;
  SmithForm certificate;  // SNF of id - beta_*
};

/// K_1 = ker(id - beta_*), K_0 = coker(id - beta_*). Throws InconsistentData
/// unless beta_*^N = I and [1] is fixed.
KGroups pv_solve(const BetaStarData& data);

/// K_0 and K_1 as stated for the family.
KGroups published_k_groups(const std::string& family);

// -- displayed matrices --

struct DisplayedMatrix {
  std::string family;
  std::vector<std::string> basis;  // header labels
  IntMatrix m;
};

/// Raw fixture text (plain integer grid, `eps` allowed as an entry).
std::string_view beta_star_fixture_text(const std::string& family);
DisplayedMatrix parse_beta_star_fixture(std::string_view text, int epsilon = 1);
DisplayedMatrix beta_star_fixture(const std::string& family, int epsilon = 1);

struct FixtureComparison {
  Status status = Status::fail;  // pass: equal; anomaly: equal after relabelling
  std::vector<std::size_t> permutation;  // displayed basis position -> assembled index
  std::string detail;
};
/// Compares the assembled matrix with the displayed one, looking for a
/// relabelling of the projector generators when they differ.
FixtureComparison compare_with_fixture(const BetaStarData& data, const DisplayedMatrix& shown);

// -- consistency --

/// Trace pairings for K_0(T^2 x| Z_2) as (constant, theta coefficient) pairs,
/// in the column order tau, tau_00, tau_01, tau_10, tau_11, C.
struct TraceRow {
  std::string generator;
  std::vector<std::pair<Rational, Rational>> values;
};
/// The table rows for [1], M2 and the four e_jk (natural order), sign epsilon.
std::vector<TraceRow> z2_trace_table(int epsilon);

/// (i) beta_*^N = I, [1] fixed; display comparison; (ii) projector columns
/// against beta-hat on the crossed-product elements; (iii) for N = 2 the trace
/// rows. `theta_value` runs layer (ii) in the folded algebra.
std::vector<Check> verify_beta_star(const std::string& family, int epsilon = 1,
                                    const std::optional<Rational>& theta_value = {});

// -- homology --

/// Holonomy of the classical action (3x3 exponent matrix of the generator images).
IntMatrix holonomy(const std::string& family);
/// Abelianisation of <t1,t2,t3,g | [t_i,t_j], g t g^-1 = A t, g^N = t1>.
AbelianGroup bieberbach_h1(const std::string& family);
/// K_0 = Z + H_1.
bool compare_with_k0(const std::string& family, int epsilon = 1);

}  // namespace nbk
