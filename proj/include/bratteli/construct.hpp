#pragma once

#include <vector>

#include "bratteli/diagram.hpp"
#include "bratteli/ideals.hpp"
#include "bratteli/presentation.hpp"
#include "json.hpp"

namespace bratteli {

/// Row-wise indexing of presentation cells. On row k the cells of block p
/// occupy indices r(k,p-1) < j <= r(k,p).
class IndexTable {
 public:
  IndexTable() = default;
  IndexTable(int blocks, std::vector<std::vector<int>> position_of_index,
             std::vector<std::vector<int>> block_count_upto);

  int horizon() const { return static_cast<int>(position_of_index_.size()); }
  int row_size(int k) const;
  /// r(k, p); p is clamped to [0, blocks].
  int r(int k, int p) const;
  int index_of(int k, int pos) const;     // 1-based vertex index
  int position_of(int k, int j) const;    // presentation cell position

 private:
  int blocks_ = 0;
  std::vector<std::vector<int>> position_of_index_;
  std::vector<std::vector<int>> index_of_position_;
  std::vector<std::vector<int>> r_;
};

/// Per row: blocks in order; a block's birth row keeps input order, later
/// rows group cells by their parent's index and keep input order inside a
/// group. Rows beyond the presentation horizon are not indexed.
IndexTable assign_indices(const QuotientPresentation& p, int horizon);

struct ConstructedDiagram {
  BratteliDiagram diagram;
  IndexTable table;
  QuotientPresentation presentation;

  int horizon() const { return diagram.horizon(); }
  int block_of(Vertex v) const;
  int cell_position(Vertex v) const { return table.position_of(v.row, v.index); }
  Vertex vertex_of(int k, int pos) const { return {k, table.index_of(k, pos)}; }
};

/// Edge (k,j) -> (k+1,h) iff the parent of cell h has index <= j and some
/// child of cell j touches cell h.
ConstructedDiagram build_diagram(const QuotientPresentation& p, const IndexTable& t, int horizon);
ConstructedDiagram construct(const QuotientPresentation& p, int horizon);

/// Vertices of blocks <= n. Throws std::logic_error if the set is not an
/// ideal subdiagram.
IdealSubdiagram block_ideal(const ConstructedDiagram& c, int n);
VertexSet block_vertices(const ConstructedDiagram& c, int n);

/// Vertex path {(k, j_k(y))} of a point, rows y.block .. horizon.
PathSeq point_path(const ConstructedDiagram& c, const PointSpec& y, int horizon);

/// Largest ideal avoiding the point's vertex path. Throws std::runtime_error
/// if its complement is definitely not directed.
IdealSubdiagram varphi(const ConstructedDiagram& c, const PointSpec& y, int horizon);

struct CanonicalPoint {
  bool stable = false;
  PointSpec point;        // complete when stable, prefix-only otherwise
  std::vector<int> cells; // accepted t_l positions from the point's birth row
  int window = 3;
  int horizon = 0;
};

/// Extracts the decreasing cell sequence {E_l^{t_l}} of a complete connected
/// path: t_l is the within-block row-l ancestor of the path's last cells,
/// accepted once it agrees over the final `window` rows. The tail of the
/// child ordinals must show a period observed at least twice.
CanonicalPoint canonical_point(const ConstructedDiagram& c, const PathSeq& p, int horizon,
                               int window = 3);

/// Shortest (prefix, cycle) split under which `ordinals` is eventually
/// periodic with the cycle seen at least twice; nullopt if none.
std::optional<std::pair<std::vector<int>, std::vector<int>>> infer_tail(
    const std::vector<int>& ordinals);

/// Table file: vertex (k,j) <-> (block, cell id) plus the r(k,p) table.
nlohmann::json table_to_json(const ConstructedDiagram& c);

}  // namespace bratteli
