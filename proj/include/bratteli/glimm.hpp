#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/construct.hpp"
#include "json.hpp"

namespace bratteli {

/// Range of a function on one cell and its value at the cell's leftmost point.
struct CellValue {
  double lo = 0.0;
  double hi = 0.0;
  double sample = 0.0;
};

/// Function given on resolution cells: for block b, the cells on row
/// max(depth, b). Keys are (row, cell position).
struct CellFunction {
  int depth = 1;
  std::map<std::pair<int, int>, CellValue> cells;
  double bound = 0.0;
};

int resolution_row(const CellFunction& g, int block);

/// Hull of g over a cell: the union of its resolution descendants' ranges,
/// or its resolution ancestor's range. The sample is the leftmost value.
CellValue cell_value(const QuotientPresentation& p, const CellFunction& g, int k, int pos);

/// Largest gap between the ranges of two touching cells on the deepest
/// resolution row (0 when g is touch-compatible).
double touch_modulus(const QuotientPresentation& p, const CellFunction& g);
bool touch_compatible(const QuotientPresentation& p, const CellFunction& g);

/// Throws std::invalid_argument when a resolution cell is missing.
void check_cell_function(const QuotientPresentation& p, const CellFunction& g);

CellFunction constant_function(const QuotientPresentation& p, int depth, double value);
/// value_of(block, row, pos) for every resolution cell; ranges collapse to it.
CellFunction cell_constant_function(const QuotientPresentation& p, int depth,
                                    const std::function<double(int, int, int)>& value_of);
CellFunction block_indicator(const QuotientPresentation& p, int depth, int block);
/// Random values in [-1, 1] on multiples of 1/64, constant on each touch
/// component of the deepest resolution row.
CellFunction random_compatible_function(const QuotientPresentation& p, int depth,
                                        std::uint64_t seed);

/// Interval example: continuous piecewise-linear function with knot values
/// knots[i] at i / 2^(depth-1).
CellFunction interval_pl_function(const QuotientPresentation& p, int depth,
                                  const std::vector<double>& knots);
/// Interval example: step function with values[i] on the i-th depth cell.
CellFunction interval_step_function(const QuotientPresentation& p, int depth,
                                    const std::vector<double>& values);
std::vector<double> random_dyadic_values(std::size_t count, std::uint64_t seed);

/// Value of g at a point: the sample of the point's resolution cell.
double point_value(const QuotientPresentation& p, const CellFunction& g, const PointSpec& y);

struct CentralApproximation {
  int horizon = 0;
  int blocks = 0;
  std::vector<CentralElement> a;         // a[k-1] on row k
  std::vector<std::vector<double>> eta;  // eta[k-1][n], n = 0..blocks

  double eta_at(int k, int n) const;
};

/// alpha_k^j = sample of cell j's leftmost point; eta_k^n = largest
/// oscillation of g over a row-k cell of a block <= n.
CentralApproximation central_approximation(const ConstructedDiagram& c, const CellFunction& g);

/// Leftmost pair (k, i_k) of every complement row from the first nonempty one.
std::vector<Vertex> leftmost_complement_path(const BratteliDiagram& d,
                                             const IdealSubdiagram& ideal);

struct GtildeResult {
  std::optional<double> value;
  std::vector<Vertex> path;  // leftmost complement path
  std::optional<PointSpec> point;
  /// Value along the rightmost decreasing complement sequence, when found.
  std::optional<double> alternate;
};

/// g~(Λ) = g(q(y)) for the point y of the leftmost complement path, which
/// must be a decreasing cell sequence; otherwise the value is absent.
GtildeResult gtilde(const ConstructedDiagram& c, const CellFunction& g,
                    const IdealSubdiagram& ideal);

struct CauchyCheck {
  double lhs = 0.0;
  double rhs = 0.0;        // eta_k^m + eta_l^m
  double chained_rhs = 0.0;  // 3 eta_k^m + eta_l^m
  bool holds = false;
  bool chained_holds = false;
  /// Overlapping pairs (j', j'') whose cells share no touching descendants.
  int pairs_without_touch = 0;
};

/// ||a_k f_m^i - a_l f_m^i|| against eta_k^m + eta_l^m for m < k < l.
CauchyCheck verify_strict_cauchy(const ConstructedDiagram& c, const CentralApproximation& ca,
                                 int m, int i, int k, int l);

struct HCheck {
  Verdict status = Verdict::Unknown;
  int m = 0, s = 0, k = 0;
  int block = 0;
  double h = 0.0;
  double gtilde = 0.0;
  double eq7_max = 0.0;  // largest |g~ - alpha| over checked vertices
  int eq7_checked = 0;
  int containment_failures = 0;
};

/// Finds s (oscillation on the leftmost cell < eps) and k >= s
/// (eta_k^n < eps), checks |g~ - alpha_k'^j| < 2 eps on complement
/// descendants of (s, i_s) from row k on, and |h - g~| < 3 eps for the
/// stabilized leftmost alpha h.
HCheck verify_h_equals_gtilde(const ConstructedDiagram& c, const CellFunction& g,
                              const IdealSubdiagram& ideal, double eps, int window = 3);

/// Vertex path with the row from which it is periodic and its period.
struct PrimPath {
  PathSeq path;
  int tail_start = 0;
  int period = 1;
};

PrimPath prim_path(const ConstructedDiagram& c, const PointSpec& y, int horizon);
/// Diagram path extended by its cycle; without a cycle the path is never
/// periodic.
PrimPath prim_path(const ConstructedDiagram& c, const PathSeq& p, int horizon);

enum class GlimmKind { Equivalent, Distinct, Unknown };
std::string to_string(GlimmKind k);

/// g(cell) = min(touch distance to the first path's cell, R) / R on row
/// `depth`; touching cells differ by at most 1/R.
struct SeparatingWitness {
  int depth = 0;
  int radius = 0;  // 0 for unbounded distance
  double value1 = 0.0;
  double value2 = 0.0;
  double modulus = 0.0;
};

struct GlimmVerdict {
  GlimmKind kind = GlimmKind::Unknown;
  std::vector<int> chain;  // node indices: 0 = p1, 1 = p2, 2+ = pool
  std::optional<SeparatingWitness> witness;
  int horizon = 0;
};

/// b absorbs a when every vertex of a up to row H - window is an ancestor of
/// b's horizon vertex; this is ideal containment on the truncated diagram.
bool absorbs(const BratteliDiagram& d, const PrimPath& b, const PrimPath& a, int window);

/// Equivalent when a chain of certified absorptions joins the paths through
/// the pool; distinct when a separating witness exists by the horizon.
GlimmVerdict glimm_equiv(const ConstructedDiagram& c, const PrimPath& p1, const PrimPath& p2,
                         const std::vector<PrimPath>& pool = {}, int window = 3);

struct GlimmClasses {
  std::vector<PrimPath> representatives;
  std::vector<std::vector<int>> partition;
  std::vector<std::pair<int, int>> provenance;  // absorptions used
};

GlimmClasses glimm_classes(const ConstructedDiagram& c, const std::vector<PrimPath>& paths,
                           int window = 3);

struct PairRecord {
  int a = 0, b = 0;
  TouchKind touch = TouchKind::Unknown;
  GlimmKind glimm = GlimmKind::Unknown;
  bool contradiction = false;
};

struct SurjectivityRecord {
  Vertex start;
  bool leftward = true;
  int block_bound = 0;  // least n with D_n not inside the ideal
  bool stable = false;
  std::optional<PointSpec> point;
  bool block_ok = false;
  bool contains = false;
  GlimmKind glimm = GlimmKind::Unknown;
  bool ok() const { return stable && block_ok && contains && glimm == GlimmKind::Equivalent; }
};

struct PsiReport {
  int horizon = 0;
  std::vector<PairRecord> pairs;
  PointClasses touch_classes;
  GlimmClasses glimm;
  bool partitions_match = false;
  /// Decided pairs on which the two partitions disagree.
  int partition_conflicts = 0;
  std::vector<SurjectivityRecord> surjectivity;
  int contradictions = 0;
  int unknown_pairs = 0;
  int surjectivity_failures = 0;
  int surjectivity_unknown = 0;
  bool pass() const { return contradictions == 0 && partition_conflicts == 0 && surjectivity_failures == 0; }
};

/// Paths started at every vertex of row `start_row` (default: 3), climbing
/// to a root by first parents and extended by the leftmost or rightmost child.
std::vector<PathSeq> enumerate_primitive_paths(const BratteliDiagram& d, int start_row);

PsiReport psi_check(const ConstructedDiagram& c, const std::vector<PointSpec>& sample,
                    int window = 3, int start_row = 3);

nlohmann::json to_json(const PsiReport& r);
nlohmann::json to_json(const CellFunction& g);
CellFunction cell_function_from_json(const nlohmann::json& j);

}  // namespace bratteli
