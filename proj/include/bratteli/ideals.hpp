#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/diagram.hpp"
#include "json.hpp"

namespace bratteli {

/// A vertex set satisfying the ideal axioms up to a row horizon:
///  - descendant-closed: every child of a member is a member;
///  - saturated: a vertex whose children are all members is a member.
/// Saturation is not required on the horizon row itself, whose children are
/// not materialized.
struct IdealSubdiagram {
  VertexSet members;
  int horizon = 0;

  friend bool operator==(const IdealSubdiagram&, const IdealSubdiagram&) = default;
};

enum class IdealAxiom { DescendantClosed, Saturated };

struct IdealViolation {
  Vertex vertex;
  IdealAxiom axiom;
  /// For DescendantClosed: the child that is missing from the set.
  std::optional<Vertex> child;
};

std::string to_string(IdealAxiom a);

/// Checks both axioms row by row up to `horizon`; returns the first violation
/// in (row, index) order.
std::optional<IdealViolation> check_ideal(const BratteliDiagram& d, const VertexSet& members,
                                          int horizon);
bool is_ideal_subdiagram(const BratteliDiagram& d, const VertexSet& members, int horizon);

/// Smallest ideal subdiagram containing `seed`.
IdealSubdiagram ideal_closure(const BratteliDiagram& d, const VertexSet& seed, int horizon);

IdealSubdiagram empty_ideal(const BratteliDiagram& d, int horizon);
IdealSubdiagram full_ideal(const BratteliDiagram& d, int horizon);

/// (meet, join): intersection and the least ideal containing the union.
/// Throws std::invalid_argument when the ideals live on different diagrams
/// or horizons.
std::pair<IdealSubdiagram, IdealSubdiagram> meet_join(const BratteliDiagram& d,
                                                      const IdealSubdiagram& a,
                                                      const IdealSubdiagram& b);

/// Largest ideal subdiagram disjoint from the complete connected path `p`
/// (extended by its cycle to `horizon`). Computed as a greatest fixpoint:
/// start from everything off the path and repeatedly drop vertices having a
/// child outside the current set. Throws std::domain_error if p is not
/// complete connected or cannot reach `horizon`.
IdealSubdiagram largest_ideal_avoiding_path(const BratteliDiagram& d, const PathSeq& p,
                                            int horizon);

/// Every descendant of some vertex on the path (rows <= horizon).
VertexSet path_descendant_set(const BratteliDiagram& d, const PathSeq& p, int horizon);

/// Compares the fixpoint ideal with the complement of the path's descendant
/// set. Returns the vertices on which the two readings disagree (empty when
/// they coincide).
std::vector<Vertex> descendant_reading_mismatch(const BratteliDiagram& d, const PathSeq& p,
                                                int horizon);

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

struct PrimeCheck {
  Verdict verdict = Verdict::Unknown;
  std::optional<std::pair<Vertex, Vertex>> witness;
  int horizon = 0;
};

/// Directedness of the complement: every pair of complement vertices on rows
/// <= horizon - delta must share a descendant in the complement by `horizon`.
/// A failing pair is a definite "no" when both vertices sit on rows
/// <= horizon - 2*delta; otherwise the failure is frontier-limited and the
/// verdict is Unknown.
PrimeCheck is_prime_complement(const BratteliDiagram& d, const IdealSubdiagram& ideal,
                               int delta = 2);

/// Central element sum_j alpha^j f_k^j of the row-k subalgebra; absent
/// coefficients are zero.
struct CentralElement {
  int row = 1;
  std::map<int, double> coefficients;

  double at(int index) const;
};

/// Norm of a1 - a2 for central elements on rows k and l, optionally cut down
/// by the corner projection of vertex (m, i) with m <= min(k, l).
///
/// With a corner this is max |alpha_k^{j'} - alpha_l^{j''}| over pairs whose
/// projections overlap inside the corner. Without a corner and k != l the
/// part of the finer row that is not under the coarser row's unit (paths
/// starting at roots between the two rows) contributes |alpha| against zero.
/// An empty overlap set gives 0.
double central_norm_distance(const BratteliDiagram& d, const CentralElement& a1,
                             const CentralElement& a2,
                             std::optional<Vertex> corner = std::nullopt);

/// Quotient norm of the block unit f_n modulo the primitive ideal with
/// subdiagram `ideal`: 1 iff the block vertex set is not contained in it.
int block_unit_quotient_norm(const VertexSet& block_vertices, const IdealSubdiagram& ideal);

/// Independent route for the same quantity: searches the complement for a
/// complete connected sequence that reaches the horizon inside the block set.
bool complement_has_sequence_in(const BratteliDiagram& d, const IdealSubdiagram& ideal,
                                const VertexSet& block_vertices);

nlohmann::json to_json(const IdealSubdiagram& ideal);
IdealSubdiagram ideal_from_json(const BratteliDiagram& d, const nlohmann::json& j);

}  // namespace bratteli
