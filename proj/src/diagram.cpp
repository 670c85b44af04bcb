#include "bratteli/diagram.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bratteli {

std::ostream& operator<<(std::ostream& os, Vertex v) {
  return os << "(" << v.row << "," << v.index << ")";
}

BratteliDiagram::BratteliDiagram(std::vector<int> row_sizes, std::vector<Edge> edges)
    : row_sizes_(std::move(row_sizes)) {
  offsets_.assign(row_sizes_.size() + 1, 0);
  for (std::size_t k = 0; k < row_sizes_.size(); ++k) {
    if (row_sizes_[k] < 0) throw std::invalid_argument("negative row size");
    offsets_[k + 1] = offsets_[k] + row_sizes_[k];
  }
  children_.assign(static_cast<std::size_t>(vertex_count()), {});
  parents_.assign(static_cast<std::size_t>(vertex_count()), {});
  for (const auto& e : edges) {
    if (!contains(e.parent) || !contains(e.child)) {
      std::ostringstream msg;
      msg << "edge endpoint outside diagram: " << e.parent << " -> " << e.child;
      throw std::invalid_argument(msg.str());
    }
    if (e.child.row != e.parent.row + 1) {
      std::ostringstream msg;
      msg << "edge does not join consecutive rows: " << e.parent << " -> " << e.child;
      throw std::invalid_argument(msg.str());
    }
    children_[static_cast<std::size_t>(id(e.parent))].push_back(e.child.index);
    parents_[static_cast<std::size_t>(id(e.child))].push_back(e.parent.index);
  }
  for (auto* adjacency : {&children_, &parents_}) {
    for (auto& list : *adjacency) {
      std::sort(list.begin(), list.end());
      if (std::adjacent_find(list.begin(), list.end()) != list.end())
        throw std::invalid_argument("repeated edge (multiplicities must be one)");
    }
  }
  edge_count_ = edges.size();
  for (int k = 1; k < horizon(); ++k) {
    for (int j = 1; j <= row_size(k); ++j) {
      if (children({k, j}).empty()) {
        std::ostringstream msg;
        msg << "vertex " << Vertex{k, j} << " has no child";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

int BratteliDiagram::row_size(int row) const {
  if (row < 1 || row > horizon()) return 0;
  return row_sizes_[static_cast<std::size_t>(row - 1)];
}

bool BratteliDiagram::contains(Vertex v) const {
  return v.row >= 1 && v.row <= horizon() && v.index >= 1 && v.index <= row_size(v.row);
}

void BratteliDiagram::require(Vertex v) const {
  if (!contains(v)) {
    std::ostringstream msg;
    msg << "unknown vertex " << v;
    throw std::domain_error(msg.str());
  }
}

int BratteliDiagram::id(Vertex v) const {
  require(v);
  return offsets_[static_cast<std::size_t>(v.row - 1)] + v.index - 1;
}

Vertex BratteliDiagram::vertex(int id) const {
  if (id < 0 || id >= vertex_count()) throw std::domain_error("vertex id out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id);
  int row = static_cast<int>(it - offsets_.begin());
  return {row, id - offsets_[static_cast<std::size_t>(row - 1)] + 1};
}

std::span<const int> BratteliDiagram::children(Vertex v) const {
  return children_[static_cast<std::size_t>(id(v))];
}

std::span<const int> BratteliDiagram::parents(Vertex v) const {
  return parents_[static_cast<std::size_t>(id(v))];
}

bool BratteliDiagram::has_edge(Vertex parent, Vertex child) const {
  if (!contains(parent) || !contains(child) || child.row != parent.row + 1) return false;
  auto c = children(parent);
  return std::binary_search(c.begin(), c.end(), child.index);
}

std::vector<Edge> BratteliDiagram::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int k = 1; k < horizon(); ++k)
    for (int j = 1; j <= row_size(k); ++j)
      for (int h : children({k, j})) out.push_back({{k, j}, {k + 1, h}});
  return out;
}

std::vector<Vertex> BratteliDiagram::row(int k) const {
  std::vector<Vertex> out;
  for (int j = 1; j <= row_size(k); ++j) out.push_back({k, j});
  return out;
}

// VertexSet

VertexSet::VertexSet(const BratteliDiagram& d, bool full)
    : offsets_(d.offsets()), bits_(static_cast<std::size_t>(d.vertex_count()), full ? 1 : 0) {
  if (offsets_.empty()) offsets_.push_back(0);
}

bool VertexSet::in_range(Vertex v) const {
  int h = horizon();
  if (v.row < 1 || v.row > h) return false;
  auto k = static_cast<std::size_t>(v.row);
  return v.index >= 1 && v.index <= offsets_[k] - offsets_[k - 1];
}

bool VertexSet::contains(Vertex v) const {
  if (!in_range(v)) return false;
  return bits_[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v.row - 1)] + v.index - 1)] != 0;
}

void VertexSet::insert(Vertex v) {
  if (!in_range(v)) throw std::domain_error("vertex outside set universe");
  bits_[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v.row - 1)] + v.index - 1)] = 1;
}

void VertexSet::erase(Vertex v) {
  if (!in_range(v)) return;
  bits_[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v.row - 1)] + v.index - 1)] = 0;
}

std::size_t VertexSet::size() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<Vertex> VertexSet::to_vector() const {
  std::vector<Vertex> out;
  for (int k = 1; k <= horizon(); ++k) {
    auto lo = offsets_[static_cast<std::size_t>(k - 1)];
    auto hi = offsets_[static_cast<std::size_t>(k)];
    for (int i = lo; i < hi; ++i)
      if (bits_[static_cast<std::size_t>(i)]) out.push_back({k, i - lo + 1});
  }
  return out;
}

bool VertexSet::subset_of(const VertexSet& other) const {
  if (offsets_ != other.offsets_) throw std::invalid_argument("vertex sets over different diagrams");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

VertexSet VertexSet::intersection(const VertexSet& other) const {
  if (offsets_ != other.offsets_) throw std::invalid_argument("vertex sets over different diagrams");
  VertexSet out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & other.bits_[i];
  return out;
}

VertexSet VertexSet::set_union(const VertexSet& other) const {
  if (offsets_ != other.offsets_) throw std::invalid_argument("vertex sets over different diagrams");
  VertexSet out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] | other.bits_[i];
  return out;
}

VertexSet VertexSet::complement() const {
  VertexSet out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

// Paths

std::optional<Vertex> PathSeq::at_row(int k) const {
  if (vertices.empty()) return std::nullopt;
  int offset = k - start_row();
  if (offset < 0 || offset >= static_cast<int>(vertices.size())) return std::nullopt;
  return vertices[static_cast<std::size_t>(offset)];
}

int select_ordinal(std::span<const int> options, int ordinal) {
  auto n = static_cast<int>(options.size());
  int pos = ordinal < 0 ? n + ordinal : ordinal;
  if (pos < 0 || pos >= n) throw std::domain_error("child ordinal out of range");
  return options[static_cast<std::size_t>(pos)];
}

PathSeq extend_path(const BratteliDiagram& d, const PathSeq& p, int horizon) {
  PathSeq out;
  out.cycle = p.cycle;
  for (const auto& v : p.vertices) {
    if (v.row > horizon) break;
    out.vertices.push_back(v);
  }
  if (out.vertices.empty() || p.cycle.empty()) return out;
  if (out.vertices.size() < p.vertices.size()) return out;
  std::size_t step = 0;
  while (out.vertices.back().row < std::min(horizon, d.horizon())) {
    Vertex last = out.vertices.back();
    int next = select_ordinal(d.children(last), p.cycle[step % p.cycle.size()]);
    out.vertices.push_back({last.row + 1, next});
    ++step;
  }
  return out;
}

// Dimensions and ancestry

std::vector<std::uint64_t> dimensions(const BratteliDiagram& d) {
  std::vector<std::uint64_t> dim(static_cast<std::size_t>(d.vertex_count()), 0);
  for (int k = 1; k <= d.horizon(); ++k) {
    for (int j = 1; j <= d.row_size(k); ++j) {
      auto parents = d.parents({k, j});
      std::uint64_t value = 0;
      if (parents.empty()) {
        value = 1;
      } else {
        for (int p : parents) {
          auto add = dim[static_cast<std::size_t>(d.id({k - 1, p}))];
          if (value > std::numeric_limits<std::uint64_t>::max() - add)
            throw std::overflow_error("dimension overflows 64 bits");
          value += add;
        }
      }
      dim[static_cast<std::size_t>(d.id({k, j}))] = value;
    }
  }
  return dim;
}

std::uint64_t dimension(const BratteliDiagram& d, Vertex v) {
  int target = d.id(v);
  return dimensions(d)[static_cast<std::size_t>(target)];
}

VertexSet descendants(const BratteliDiagram& d, Vertex v, int up_to_row) {
  VertexSet out(d);
  out.insert(v);
  int last = std::min(up_to_row, d.horizon());
  for (int k = v.row; k < last; ++k) {
    for (int j = 1; j <= d.row_size(k); ++j) {
      if (!out.contains({k, j})) continue;
      for (int h : d.children({k, j})) out.insert({k + 1, h});
    }
  }
  return out;
}

VertexSet ancestors(const BratteliDiagram& d, Vertex v) {
  VertexSet out(d);
  out.insert(v);
  for (int k = v.row; k > 1; --k) {
    for (int j = 1; j <= d.row_size(k); ++j) {
      if (!out.contains({k, j})) continue;
      for (int p : d.parents({k, j})) out.insert({k - 1, p});
    }
  }
  return out;
}

bool is_descendant(const BratteliDiagram& d, Vertex ancestor, Vertex v) {
  if (v.row < ancestor.row) return false;
  return descendants(d, ancestor, v.row).contains(v);
}

bool is_complete_connected(const BratteliDiagram& d, const PathSeq& p) {
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (!d.contains(p.vertices[i])) return false;
    if (i == 0) continue;
    if (p.vertices[i].row != p.vertices[i - 1].row + 1) return false;
    if (!d.has_edge(p.vertices[i - 1], p.vertices[i])) return false;
  }
  return true;
}

std::optional<std::string> check_invariants(const BratteliDiagram& d) {
  for (int k = 1; k < d.horizon(); ++k)
    for (int j = 1; j <= d.row_size(k); ++j)
      if (d.children({k, j}).empty()) {
        std::ostringstream msg;
        msg << "vertex " << Vertex{k, j} << " has no child";
        return msg.str();
      }
  auto dim = dimensions(d);
  for (int k = 2; k <= d.horizon(); ++k)
    for (int j = 1; j <= d.row_size(k); ++j) {
      auto parents = d.parents({k, j});
      if (parents.empty()) continue;
      std::uint64_t sum = 0;
      for (int p : parents) sum += dim[static_cast<std::size_t>(d.id({k - 1, p}))];
      if (sum != dim[static_cast<std::size_t>(d.id({k, j}))]) return "dimension mismatch";
    }
  return std::nullopt;
}

// Export

std::string to_dot(const BratteliDiagram& d) {
  std::ostringstream os;
  os << "digraph bratteli {\n";
  if (d.vertex_count() > 0) {
    auto dim = dimensions(d);
    os << "  rankdir=TB;\n";
    for (int k = 1; k <= d.horizon(); ++k) {
      os << "  { rank=same;";
      for (int j = 1; j <= d.row_size(k); ++j) os << " \"" << k << ":" << j << "\";";
      os << " }\n";
    }
    for (int k = 1; k <= d.horizon(); ++k)
      for (int j = 1; j <= d.row_size(k); ++j)
        os << "  \"" << k << ":" << j << "\" [label=\"" << k << ":" << j << "/"
           << dim[static_cast<std::size_t>(d.id({k, j}))] << "\"];\n";
    for (const auto& e : d.edges())
      os << "  \"" << e.parent.row << ":" << e.parent.index << "\" -> \"" << e.child.row << ":"
         << e.child.index << "\";\n";
  }
  os << "}\n";
  return os.str();
}

nlohmann::json to_json(const BratteliDiagram& d) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : d.edges())
    edges.push_back({e.parent.row, e.parent.index, e.child.row, e.child.index});
  return {{"rows", d.row_sizes()}, {"edges", edges}, {"horizon", d.horizon()}};
}

BratteliDiagram diagram_from_json(const nlohmann::json& j) {
  auto rows = j.at("rows").get<std::vector<int>>();
  if (j.contains("horizon") && j.at("horizon").get<int>() != static_cast<int>(rows.size()))
    throw std::invalid_argument("diagram horizon does not match row count");
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument("edge must be [k,j,k+1,h]");
    edges.push_back({{e[0].get<int>(), e[1].get<int>()}, {e[2].get<int>(), e[3].get<int>()}});
  }
  return BratteliDiagram(std::move(rows), std::move(edges));
}

nlohmann::json to_json(const PathSeq& p) {
  nlohmann::json vs = nlohmann::json::array();
  for (auto v : p.vertices) vs.push_back({v.row, v.index});
  return {{"vertices", vs}, {"cycle", p.cycle}};
}

PathSeq path_from_json(const nlohmann::json& j) {
  PathSeq p;
  for (const auto& v : j.at("vertices")) p.vertices.push_back({v.at(0).get<int>(), v.at(1).get<int>()});
  if (j.contains("cycle")) p.cycle = j.at("cycle").get<std::vector<int>>();
  return p;
}

}  // namespace bratteli
