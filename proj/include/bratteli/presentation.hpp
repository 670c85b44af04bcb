#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bratteli {

/// One clopen cell E_k^j of the totally disconnected cover. Block n cells
/// exist on rows k >= n; a cell on its block's birth row has no parent.
struct Cell {
  int id = 0;
  int block = 1;
  std::optional<int> parent;  // id of the containing cell on row k-1
};

struct PresentationRow {
  int k = 1;
  std::vector<Cell> cells;
  /// Unordered pairs of cell ids whose images under the quotient map meet.
  /// Reflexivity and symmetry are implied.
  std::vector<std::pair<int, int>> touch;
};

struct GeneratorInfo {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

/// Finite-horizon presentation of X as a quotient of a disjoint union of
/// clopen-partitioned compact blocks.
///
/// Cells are addressed by (row, position) where position is the cell's slot
/// in the row's input order. The constructor resolves ids and rejects
/// malformed input (rows out of sequence, duplicate or dangling ids); the
/// modeling invariants are checked separately by validate().
class QuotientPresentation {
 public:
  QuotientPresentation() = default;
  QuotientPresentation(int blocks, std::vector<PresentationRow> rows,
                       std::optional<GeneratorInfo> generator = std::nullopt);

  int horizon() const { return static_cast<int>(rows_.size()); }
  int block_count() const { return blocks_; }
  const std::optional<GeneratorInfo>& generator() const { return generator_; }

  const PresentationRow& row(int k) const;
  int cell_count(int k) const;
  const Cell& cell(int k, int pos) const;
  int position_of(int k, int id) const;
  int block_of(int k, int pos) const { return cell(k, pos).block; }

  std::optional<int> parent(int k, int pos) const;
  /// Children on row k+1, in input order.
  std::span<const int> children(int k, int pos) const;
  /// Touch neighbours on row k, ascending, including pos itself.
  std::span<const int> touching(int k, int pos) const;
  bool touch(int k, int a, int b) const;

  /// Within-block ancestor of (k, pos) on row `row` <= k; nullopt when the
  /// block is not yet born there.
  std::optional<int> ancestor(int k, int pos, int row) const;
  /// Within-block descendants of (k, pos) on row `row` >= k, ascending.
  std::vector<int> descendants(int k, int pos, int row) const;

 private:
  int blocks_ = 0;
  std::vector<PresentationRow> rows_;
  std::optional<GeneratorInfo> generator_;
  std::vector<std::vector<std::optional<int>>> parent_;
  std::vector<std::vector<std::vector<int>>> children_;
  std::vector<std::vector<std::vector<int>>> touch_;
  std::vector<std::vector<std::pair<int, int>>> id_index_;  // sorted (id, pos) per row
};

struct PresentationViolation {
  int row = 0;
  std::vector<int> cells;  // cell ids
  std::string rule;
};

struct ValidationReport {
  std::vector<PresentationViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks block placement, the partition rule, and both touch-coherence rules
/// up to the horizon. Total: never throws on a constructed presentation.
ValidationReport validate(const QuotientPresentation& p);

/// Eventually periodic point of block `block`: starts at cell `root` on row
/// `block`, follows `prefix` child ordinals, then repeats `cycle` forever.
/// Ordinals index the parent's children in input order; negative counts from
/// the last child.
struct PointSpec {
  int block = 1;
  int root = 0;
  std::vector<int> prefix;
  std::vector<int> cycle{0};

  friend bool operator==(const PointSpec&, const PointSpec&) = default;
};

/// Row on which the cycle starts applying (the first row chosen by it).
int tail_start_row(const PointSpec& y);

/// Cell positions on rows y.block .. horizon (empty if the block is unborn).
/// Throws std::domain_error if an ordinal has no matching child.
std::vector<int> cell_path(const QuotientPresentation& p, const PointSpec& y, int horizon);

/// Leftmost refinement point of a cell: always the first child.
PointSpec leftmost_point(const QuotientPresentation& p, int k, int pos);

enum class TouchKind { Identified, Separated, Unknown };
std::string to_string(TouchKind k);

struct TouchVerdict {
  TouchKind kind = TouchKind::Unknown;
  int row = 0;  // first non-touching row for Separated; horizon otherwise
};

/// Number of consecutive touching rows inside both periodic tails needed to
/// accept an identification: max(window, 2*lcm(cycle lengths) + 2).
int certification_rows(std::size_t cycle_a, std::size_t cycle_b, int window);

/// Two points are identified when their cells touch on every row up to the
/// horizon and the touching has been observed through enough rows of both
/// periodic tails; a non-touching row separates them for good.
TouchVerdict persistent_touch(const QuotientPresentation& p, const PointSpec& a,
                              const PointSpec& b, int horizon, int window = 3);

struct PointClasses {
  std::vector<std::vector<int>> classes;  // indices into the sample, ascending
  std::vector<std::pair<int, int>> unknown_pairs;
};

/// Transitive closure of the Identified verdicts over a sample.
PointClasses point_classes(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                           int horizon, int window = 3);

/// A finite sampled space: per block, labelled points with function values.
/// Points sharing a label are identified by the quotient map.
struct SamplePoint {
  std::string label;
  std::vector<double> values;
};

struct SampledSpace {
  std::vector<std::vector<SamplePoint>> blocks;
  /// Number of functions used on row k is schedule[k-1]; defaults to min(k, M).
  std::vector<int> schedule;
};

struct IngestResult {
  QuotientPresentation presentation;
  /// members[k-1][pos] lists (block, point index) pairs of the cell.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> members;
};

/// Oscillation partition: row k splits each row k-1 cell (or, on a block's
/// birth row, the whole block) into runs on which every scheduled function
/// oscillates by less than 2^-k. Throws std::invalid_argument for an empty
/// block, ragged function values, or a decreasing schedule.
IngestResult build_from_samples(const SampledSpace& s, int depth);

nlohmann::json to_json(const QuotientPresentation& p);
QuotientPresentation presentation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PointSpec& y);
PointSpec point_from_json(const nlohmann::json& j);
SampledSpace sampled_space_from_json(const nlohmann::json& j);

}  // namespace bratteli
