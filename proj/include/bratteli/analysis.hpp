#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bratteli/presentation.hpp"
#include "json.hpp"

namespace bratteli {

enum class Locality { LocallyCompact, NotLocallyCompact, Unknown };
std::string to_string(Locality l);

/// A cell family by (row, position).
using CellFamily = std::vector<std::pair<int, int>>;

/// Canonical cover U_n of the fibre and neighbourhood V_n of the point.
struct ExhaustionStage {
  int n = 0;
  CellFamily cover;          // U_n: birth-row fibre cells of blocks <= n
  CellFamily neighbourhood;  // V_n: row-n fibre cells, plus birth cells of later blocks
};

struct ExhaustionScheme {
  std::vector<ExhaustionStage> stages;  // n = 1 .. horizon
};

/// Fibre of x at the horizon: the row-H cells touching x's row-H cell.
ExhaustionScheme exhaustion_scheme(const QuotientPresentation& p, const PointSpec& x, int horizon);

struct CompactWitness {
  int n0 = 0;
  CellFamily cover;          // cells of U_{n0} whose images contain V_{n0}
  CellFamily neighbourhood;  // V_{n0}
  CellFamily smallest;       // V at the deepest certified stage
};

/// y_n = relative(block n + block_offset, born cell row n + row_offset, ...)
struct FailureRule {
  int block_offset = 0;
  int row_offset = 0;
  std::vector<int> prefix;
  std::vector<int> cycle;
};

struct FailureWitness {
  int first_n = 0;
  int last_n = 0;
  std::vector<PointSpec> points;  // y_n for n = first_n .. last_n
  FailureRule rule;
};

struct ClassificationWitness {
  Locality verdict = Locality::Unknown;
  std::optional<CompactWitness> compact;
  std::optional<FailureWitness> failure;
  int horizon = 0;
};

/// LocallyCompact when some V_{n0} (n0 <= H - window) lies inside the cells
/// of U_{n0}; NotLocallyCompact when escaping points y_n in V_n outside
/// q(U_n) follow one relative rule for at least `threshold` consecutive n up
/// to the last searchable stage. Throws std::logic_error if both witnesses
/// exist.
ClassificationWitness classify_point(const QuotientPresentation& p, const PointSpec& x, int horizon,
                                     int window = 3, int threshold = 5);

struct LabeledSample {
  std::vector<ClassificationWitness> witnesses;
  std::vector<int> locally_compact;  // S estimate
  /// LocallyCompact points whose smallest certified neighbourhood holds a
  /// NotLocallyCompact sample point.
  std::vector<std::pair<int, int>> openness_violations;
  int horizon = 0;
};

LabeledSample locally_compact_set(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                                  int horizon, int window = 3, int threshold = 5);

enum class BaireVerdict { Dense, Misses, Inconclusive };
std::string to_string(BaireVerdict v);

struct BasicOpen {
  int row = 0;
  int cell = 0;  // position
  std::vector<int> members;  // sample indices inside q(cell)
  bool has_locally_compact = false;
};

struct BaireReport {
  BaireVerdict verdict = BaireVerdict::Inconclusive;
  std::vector<BasicOpen> opens;
  std::optional<int> witness;  // index into opens for Misses
  LabeledSample labels;
  int depth = 0;
};

/// Basic opens are the q-images of the row-`depth` cells. A sample point lies
/// in one when its horizon cell touches a horizon descendant of the cell.
BaireReport baire_report(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                         int horizon, int depth = 2, int window = 3, int threshold = 5);

nlohmann::json to_json(const ClassificationWitness& w, const QuotientPresentation& p);
nlohmann::json to_json(const BaireReport& r, const QuotientPresentation& p);

}  // namespace bratteli
