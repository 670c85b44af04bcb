#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace bratteli {

/// A vertex (k, j) of a Bratteli diagram; row and index are both 1-based.
struct Vertex {
  int row = 0;
  int index = 0;
  auto operator<=>(const Vertex&) const = default;
};

std::ostream& operator<<(std::ostream& os, Vertex v);

struct Edge {
  Vertex parent;
  Vertex child;
  auto operator<=>(const Edge&) const = default;
};

/// Finite prefix of a Bratteli diagram with multiplicity-one edges.
///
/// Rows 1..horizon() are materialized. The structure is immutable once built;
/// every query is answered relative to the materialized horizon. Infinite
/// diagrams are produced by regenerating at a larger horizon.
class BratteliDiagram {
 public:
  BratteliDiagram() = default;

  /// Throws std::invalid_argument on out-of-range endpoints, edges that do not
  /// join consecutive rows, repeated edges, or a non-final vertex without a
  /// child.
  BratteliDiagram(std::vector<int> row_sizes, std::vector<Edge> edges);

  int horizon() const { return static_cast<int>(row_sizes_.size()); }
  int row_size(int row) const;
  const std::vector<int>& row_sizes() const { return row_sizes_; }
  int vertex_count() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t edge_count() const { return edge_count_; }

  bool contains(Vertex v) const;
  int id(Vertex v) const;
  Vertex vertex(int id) const;
  /// Offsets of each row in the dense id space; size horizon()+1.
  const std::vector<int>& offsets() const { return offsets_; }

  /// Child indices on row v.row+1, ascending.
  std::span<const int> children(Vertex v) const;
  /// Parent indices on row v.row-1, ascending.
  std::span<const int> parents(Vertex v) const;
  bool has_edge(Vertex parent, Vertex child) const;

  std::vector<Edge> edges() const;
  std::vector<Vertex> row(int k) const;

  friend bool operator==(const BratteliDiagram&, const BratteliDiagram&) = default;

 private:
  void require(Vertex v) const;

  std::vector<int> row_sizes_;
  std::vector<int> offsets_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> parents_;
  std::size_t edge_count_ = 0;
};

/// Dense membership set over the materialized vertices of one diagram.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(const BratteliDiagram& d, bool full = false);

  bool contains(Vertex v) const;
  void insert(Vertex v);
  void erase(Vertex v);
  bool contains_id(int id) const { return bits_[static_cast<std::size_t>(id)] != 0; }
  void set_id(int id, bool on) { bits_[static_cast<std::size_t>(id)] = on ? 1 : 0; }

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  int horizon() const { return static_cast<int>(offsets_.size()) - 1; }
  std::vector<Vertex> to_vector() const;

  bool subset_of(const VertexSet& other) const;
  VertexSet intersection(const VertexSet& other) const;
  VertexSet set_union(const VertexSet& other) const;
  VertexSet complement() const;

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  bool in_range(Vertex v) const;

  std::vector<int> offsets_;
  std::vector<std::uint8_t> bits_;
};

/// A connected sequence of vertices, optionally extended forever by a cyclic
/// child-selection rule: the t-th extension step takes child number
/// cycle[t % cycle.size()] (negative ordinals count from the last child).
struct PathSeq {
  std::vector<Vertex> vertices;
  std::vector<int> cycle;

  int start_row() const { return vertices.empty() ? 0 : vertices.front().row; }
  int end_row() const { return vertices.empty() ? 0 : vertices.back().row; }
  /// Vertex on row k, if the materialized list covers it.
  std::optional<Vertex> at_row(int k) const;
};

/// Picks child number `ordinal` from a sorted child list (negative from end).
int select_ordinal(std::span<const int> options, int ordinal);

/// Extends p by its cycle up to row `horizon` (truncates if longer).
/// Throws std::domain_error if the rule needs a vertex with no such child.
PathSeq extend_path(const BratteliDiagram& d, const PathSeq& p, int horizon);

std::uint64_t dimension(const BratteliDiagram& d, Vertex v);
/// Dimensions of all vertices, indexed by dense id.
std::vector<std::uint64_t> dimensions(const BratteliDiagram& d);

/// Reflexive-transitive closure of the child relation, rows <= up_to_row.
VertexSet descendants(const BratteliDiagram& d, Vertex v, int up_to_row);
/// Reflexive-transitive closure of the parent relation.
VertexSet ancestors(const BratteliDiagram& d, Vertex v);
bool is_descendant(const BratteliDiagram& d, Vertex ancestor, Vertex v);

bool is_complete_connected(const BratteliDiagram& d, const PathSeq& p);

/// Human-readable invariant failure, if any (empty optional when valid).
std::optional<std::string> check_invariants(const BratteliDiagram& d);

std::string to_dot(const BratteliDiagram& d);
nlohmann::json to_json(const BratteliDiagram& d);
BratteliDiagram diagram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PathSeq& p);
PathSeq path_from_json(const nlohmann::json& j);

}  // namespace bratteli
