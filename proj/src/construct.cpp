#include "bratteli/construct.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bratteli {

IndexTable::IndexTable(int blocks, std::vector<std::vector<int>> position_of_index,
                       std::vector<std::vector<int>> block_count_upto)
    : blocks_(blocks),
      position_of_index_(std::move(position_of_index)),
      r_(std::move(block_count_upto)) {
  for (const auto& row : position_of_index_) {
    std::vector<int> inverse(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j)
      inverse[static_cast<std::size_t>(row[j])] = static_cast<int>(j) + 1;
    index_of_position_.push_back(std::move(inverse));
  }
}

int IndexTable::row_size(int k) const {
  if (k < 1 || k > horizon()) throw std::out_of_range("row not indexed");
  return static_cast<int>(position_of_index_[static_cast<std::size_t>(k - 1)].size());
}

int IndexTable::r(int k, int p) const {
  row_size(k);
  p = std::clamp(p, 0, blocks_);
  return r_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p)];
}

int IndexTable::index_of(int k, int pos) const {
  const auto& row = index_of_position_.at(static_cast<std::size_t>(k - 1));
  return row.at(static_cast<std::size_t>(pos));
}

int IndexTable::position_of(int k, int j) const {
  const auto& row = position_of_index_.at(static_cast<std::size_t>(k - 1));
  if (j < 1 || j > static_cast<int>(row.size())) throw std::out_of_range("vertex index out of range");
  return row[static_cast<std::size_t>(j - 1)];
}

IndexTable assign_indices(const QuotientPresentation& p, int horizon) {
  const int H = std::min(horizon, p.horizon());
  const int N = p.block_count();
  std::vector<std::vector<int>> order;
  std::vector<std::vector<int>> r;
  std::vector<int> prev_index;  // previous row: position -> index
  for (int k = 1; k <= H; ++k) {
    const int n = p.cell_count(k);
    std::vector<int> row;
    std::vector<int> upto(static_cast<std::size_t>(N) + 1, 0);
    for (int b = 1; b <= N; ++b) {
      std::vector<int> members;
      for (int pos = 0; pos < n; ++pos)
        if (p.block_of(k, pos) == b) members.push_back(pos);
      if (b < k) {
        std::stable_sort(members.begin(), members.end(), [&](int x, int y) {
          return prev_index[static_cast<std::size_t>(*p.parent(k, x))] <
                 prev_index[static_cast<std::size_t>(*p.parent(k, y))];
        });
      }
      row.insert(row.end(), members.begin(), members.end());
      upto[static_cast<std::size_t>(b)] = static_cast<int>(row.size());
    }
    prev_index.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t j = 0; j < row.size(); ++j)
      prev_index[static_cast<std::size_t>(row[j])] = static_cast<int>(j) + 1;
    order.push_back(std::move(row));
    r.push_back(std::move(upto));
  }
  return IndexTable(N, std::move(order), std::move(r));
}

int ConstructedDiagram::block_of(Vertex v) const {
  return presentation.block_of(v.row, cell_position(v));
}

ConstructedDiagram build_diagram(const QuotientPresentation& p, const IndexTable& t, int horizon) {
  const int H = std::min({horizon, p.horizon(), t.horizon()});
  std::vector<int> sizes;
  for (int k = 1; k <= H; ++k) sizes.push_back(t.row_size(k));
  std::vector<Edge> edges;
  for (int k = 1; k < H; ++k) {
    for (int j = 1; j <= t.row_size(k); ++j) {
      const int cell = t.position_of(k, j);
      std::vector<int> targets;
      for (int child : p.children(k, cell))
        for (int h : p.touching(k + 1, child)) {
          auto par = p.parent(k + 1, h);
          if (par && t.index_of(k, *par) <= j) targets.push_back(t.index_of(k + 1, h));
        }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      for (int h : targets) edges.push_back({{k, j}, {k + 1, h}});
    }
  }
  return {BratteliDiagram(std::move(sizes), std::move(edges)), t, p};
}

ConstructedDiagram construct(const QuotientPresentation& p, int horizon) {
  return build_diagram(p, assign_indices(p, horizon), horizon);
}

VertexSet block_vertices(const ConstructedDiagram& c, int n) {
  VertexSet s(c.diagram);
  for (int k = 1; k <= c.horizon(); ++k)
    for (int j = 1; j <= c.table.r(k, n); ++j) s.insert({k, j});
  return s;
}

IdealSubdiagram block_ideal(const ConstructedDiagram& c, int n) {
  IdealSubdiagram ideal{block_vertices(c, n), c.horizon()};
  if (auto bad = check_ideal(c.diagram, ideal.members, ideal.horizon))
    throw std::logic_error("block subdiagram " + std::to_string(n) + " violates " +
                           to_string(bad->axiom));
  return ideal;
}

PathSeq point_path(const ConstructedDiagram& c, const PointSpec& y, int horizon) {
  const int H = std::min(horizon, c.horizon());
  auto cells = cell_path(c.presentation, y, H);
  PathSeq path;
  for (std::size_t i = 0; i < cells.size(); ++i)
    path.vertices.push_back(c.vertex_of(y.block + static_cast<int>(i), cells[i]));
  return path;
}

IdealSubdiagram varphi(const ConstructedDiagram& c, const PointSpec& y, int horizon) {
  const int H = std::min(horizon, c.horizon());
  auto ideal = largest_ideal_avoiding_path(c.diagram, point_path(c, y, H), H);
  auto prime = is_prime_complement(c.diagram, ideal);
  if (prime.verdict == Verdict::No)
    throw std::runtime_error("complement of the point's ideal is not directed");
  return ideal;
}

std::optional<std::pair<std::vector<int>, std::vector<int>>> infer_tail(
    const std::vector<int>& ordinals) {
  const int n = static_cast<int>(ordinals.size());
  for (int total = 1; total <= n; ++total) {
    for (int len = 1; len <= total; ++len) {
      const int pre = total - len;
      if (n - pre < 2 * len) continue;
      bool periodic = true;
      for (int i = pre + len; i < n && periodic; ++i)
        periodic = ordinals[static_cast<std::size_t>(i)] == ordinals[static_cast<std::size_t>(i - len)];
      if (!periodic) continue;
      return std::make_pair(std::vector<int>(ordinals.begin(), ordinals.begin() + pre),
                            std::vector<int>(ordinals.begin() + pre, ordinals.begin() + pre + len));
    }
  }
  return std::nullopt;
}

CanonicalPoint canonical_point(const ConstructedDiagram& c, const PathSeq& p, int horizon,
                               int window) {
  const int H = std::min(horizon, c.horizon());
  CanonicalPoint out;
  out.window = window;
  out.horizon = H;
  if (!is_complete_connected(c.diagram, p)) throw std::domain_error("path is not complete connected");
  PathSeq full = extend_path(c.diagram, p, H);
  if (full.end_row() < H) throw std::domain_error("path does not reach the horizon");
  const auto& pres = c.presentation;

  // t_l is read off the last `window` path cells, all strictly below row l.
  const int last = H - window;
  if (last < 1 || last + 1 < full.start_row()) return out;
  const int block = c.block_of(*full.at_row(H));
  for (int m = last + 1; m <= H; ++m)
    if (c.block_of(*full.at_row(m)) != block) return out;
  out.point.block = block;
  if (block > last) return out;

  for (int l = block; l <= last; ++l) {
    std::optional<int> agreed;
    bool stable = true;
    for (int m = last + 1; m <= H && stable; ++m) {
      Vertex v = *full.at_row(m);
      auto a = pres.ancestor(m, c.cell_position(v), l);
      if (!a || (agreed && *agreed != *a)) stable = false;
      agreed = a;
    }
    if (!stable) break;
    out.cells.push_back(*agreed);
  }
  if (out.cells.empty()) return out;
  out.point.root = pres.cell(block, out.cells.front()).id;
  std::vector<int> ordinals;
  for (std::size_t i = 1; i < out.cells.size(); ++i) {
    const int row = block + static_cast<int>(i) - 1;
    auto kids = pres.children(row, out.cells[i - 1]);
    ordinals.push_back(static_cast<int>(std::find(kids.begin(), kids.end(), out.cells[i]) - kids.begin()));
  }
  auto tail = infer_tail(ordinals);
  if (!tail || block + static_cast<int>(out.cells.size()) - 1 < last) {
    out.point.prefix = ordinals;
    out.point.cycle = {0};
    return out;
  }
  out.point.prefix = tail->first;
  out.point.cycle = tail->second;
  out.stable = true;
  return out;
}

nlohmann::json table_to_json(const ConstructedDiagram& c) {
  nlohmann::json rows = nlohmann::json::array();
  const int N = c.presentation.block_count();
  for (int k = 1; k <= c.horizon(); ++k) {
    nlohmann::json vertices = nlohmann::json::array();
    for (int j = 1; j <= c.table.row_size(k); ++j) {
      int pos = c.table.position_of(k, j);
      const auto& cell = c.presentation.cell(k, pos);
      vertices.push_back({{"j", j}, {"block", cell.block}, {"cell", cell.id}});
    }
    nlohmann::json r = nlohmann::json::array();
    for (int p = 0; p <= N; ++p) r.push_back(c.table.r(k, p));
    rows.push_back({{"k", k}, {"r", r}, {"vertices", vertices}});
  }
  return {{"blocks", N}, {"horizon", c.horizon()}, {"rows", rows}};
}

}  // namespace bratteli
