#include "bratteli/presentation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace bratteli {

QuotientPresentation::QuotientPresentation(int blocks, std::vector<PresentationRow> rows,
                                           std::optional<GeneratorInfo> generator)
    : blocks_(blocks), rows_(std::move(rows)), generator_(std::move(generator)) {
  if (blocks_ < 0) throw std::invalid_argument("negative block count");
  const std::size_t n = rows_.size();
  parent_.resize(n);
  children_.resize(n);
  touch_.resize(n);
  id_index_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows_[r];
    if (row.k != static_cast<int>(r) + 1)
      throw std::invalid_argument("rows must be listed as k = 1, 2, ... without gaps");
    auto& index = id_index_[r];
    for (std::size_t pos = 0; pos < row.cells.size(); ++pos)
      index.emplace_back(row.cells[pos].id, static_cast<int>(pos));
    std::sort(index.begin(), index.end());
    for (std::size_t i = 1; i < index.size(); ++i)
      if (index[i].first == index[i - 1].first)
        throw std::invalid_argument("duplicate cell id " + std::to_string(index[i].first) +
                                    " on row " + std::to_string(row.k));
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows_[r];
    const int k = row.k;
    parent_[r].assign(row.cells.size(), std::nullopt);
    children_[r].assign(row.cells.size(), {});
    touch_[r].assign(row.cells.size(), {});
    for (std::size_t pos = 0; pos < row.cells.size(); ++pos) {
      touch_[r][pos].push_back(static_cast<int>(pos));
      const auto& c = row.cells[pos];
      if (!c.parent) continue;
      if (k == 1) throw std::invalid_argument("row 1 cells cannot have parents");
      int pp = position_of(k - 1, *c.parent);
      parent_[r][pos] = pp;
      children_[r - 1][static_cast<std::size_t>(pp)].push_back(static_cast<int>(pos));
    }
    for (auto [a, b] : row.touch) {
      int pa = position_of(k, a);
      int pb = position_of(k, b);
      touch_[r][static_cast<std::size_t>(pa)].push_back(pb);
      touch_[r][static_cast<std::size_t>(pb)].push_back(pa);
    }
    for (auto& t : touch_[r]) {
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
  }
}

const PresentationRow& QuotientPresentation::row(int k) const {
  if (k < 1 || k > horizon()) throw std::out_of_range("row " + std::to_string(k) + " not materialized");
  return rows_[static_cast<std::size_t>(k - 1)];
}

int QuotientPresentation::cell_count(int k) const {
  return static_cast<int>(row(k).cells.size());
}

const Cell& QuotientPresentation::cell(int k, int pos) const {
  const auto& cells = row(k).cells;
  if (pos < 0 || pos >= static_cast<int>(cells.size()))
    throw std::out_of_range("cell position out of range");
  return cells[static_cast<std::size_t>(pos)];
}

int QuotientPresentation::position_of(int k, int id) const {
  row(k);
  const auto& index = id_index_[static_cast<std::size_t>(k - 1)];
  auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(id, -1));
  if (it == index.end() || it->first != id)
    throw std::invalid_argument("unknown cell id " + std::to_string(id) + " on row " +
                                std::to_string(k));
  return it->second;
}

std::optional<int> QuotientPresentation::parent(int k, int pos) const {
  cell(k, pos);
  return parent_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(pos)];
}

std::span<const int> QuotientPresentation::children(int k, int pos) const {
  cell(k, pos);
  return children_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(pos)];
}

std::span<const int> QuotientPresentation::touching(int k, int pos) const {
  cell(k, pos);
  return touch_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(pos)];
}

bool QuotientPresentation::touch(int k, int a, int b) const {
  auto t = touching(k, a);
  return std::binary_search(t.begin(), t.end(), b);
}

std::optional<int> QuotientPresentation::ancestor(int k, int pos, int target) const {
  if (target > k) throw std::invalid_argument("ancestor row below the cell");
  int cur = pos;
  for (int r = k; r > target; --r) {
    auto up = parent(r, cur);
    if (!up) return std::nullopt;
    cur = *up;
  }
  return cur;
}

std::vector<int> QuotientPresentation::descendants(int k, int pos, int target) const {
  if (target < k) throw std::invalid_argument("descendant row above the cell");
  std::vector<int> frontier{pos};
  for (int r = k; r < target; ++r) {
    std::vector<int> next;
    for (int c : frontier)
      for (int ch : children(r, c)) next.push_back(ch);
    frontier = std::move(next);
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

ValidationReport validate(const QuotientPresentation& p) {
  ValidationReport report;
  auto add = [&](int k, std::vector<int> ids, std::string rule) {
    report.violations.push_back({k, std::move(ids), std::move(rule)});
  };
  const int H = p.horizon();
  std::vector<bool> born(static_cast<std::size_t>(p.block_count()) + 1, false);
  for (int k = 1; k <= H; ++k) {
    for (int pos = 0; pos < p.cell_count(k); ++pos) {
      const auto& c = p.cell(k, pos);
      if (c.block < 1 || c.block > p.block_count()) {
        add(k, {c.id}, "block-range");
        continue;
      }
      if (k < c.block) add(k, {c.id}, "birth-row");
      if (k == c.block) {
        born[static_cast<std::size_t>(c.block)] = true;
        if (c.parent) add(k, {c.id}, "root-parent");
      }
      if (k > c.block) {
        auto up = p.parent(k, pos);
        if (!up) add(k, {c.id}, "missing-parent");
        else if (p.block_of(k - 1, *up) != c.block) add(k, {c.id, *c.parent}, "parent-block");
      }
      if (k < H && p.children(k, pos).empty()) add(k, {c.id}, "partition");
    }
  }
  for (int b = 1; b <= std::min(p.block_count(), H); ++b)
    if (!born[static_cast<std::size_t>(b)]) add(b, {}, "block-birth");

  for (int k = 1; k <= H; ++k) {
    for (int a = 0; a < p.cell_count(k); ++a) {
      for (int b : p.touching(k, a)) {
        if (b <= a) continue;
        const int ida = p.cell(k, a).id;
        const int idb = p.cell(k, b).id;
        if (k < H) {
          bool witnessed = false;
          for (int ca : p.children(k, a)) {
            for (int cb : p.children(k, b))
              if (p.touch(k + 1, ca, cb)) {
                witnessed = true;
                break;
              }
            if (witnessed) break;
          }
          if (!witnessed) add(k, {ida, idb}, "downward-coherence");
        }
        auto pa = p.parent(k, a);
        auto pb = p.parent(k, b);
        if (pa && pb && !p.touch(k - 1, *pa, *pb)) add(k, {ida, idb}, "upward-coherence");
      }
    }
  }
  return report;
}

int tail_start_row(const PointSpec& y) {
  return y.block + static_cast<int>(y.prefix.size()) + 1;
}

std::vector<int> cell_path(const QuotientPresentation& p, const PointSpec& y, int horizon) {
  std::vector<int> out;
  if (y.block > horizon) return out;
  int cur = p.position_of(y.block, y.root);
  if (p.block_of(y.block, cur) != y.block || p.parent(y.block, cur))
    throw std::domain_error("root is not a birth cell of block " + std::to_string(y.block));
  out.push_back(cur);
  std::size_t step = 0;
  for (int k = y.block; k < horizon; ++k, ++step) {
    int ordinal;
    if (step < y.prefix.size()) {
      ordinal = y.prefix[step];
    } else {
      if (y.cycle.empty()) throw std::domain_error("point has an empty cycle");
      ordinal = y.cycle[(step - y.prefix.size()) % y.cycle.size()];
    }
    auto kids = p.children(k, cur);
    int n = static_cast<int>(kids.size());
    int idx = ordinal >= 0 ? ordinal : n + ordinal;
    if (idx < 0 || idx >= n)
      throw std::domain_error("ordinal " + std::to_string(ordinal) + " has no child on row " +
                              std::to_string(k + 1));
    cur = kids[static_cast<std::size_t>(idx)];
    out.push_back(cur);
  }
  return out;
}

PointSpec leftmost_point(const QuotientPresentation& p, int k, int pos) {
  const int block = p.block_of(k, pos);
  PointSpec y;
  y.block = block;
  std::vector<int> up;
  int cur = pos;
  for (int r = k; r > block; --r) {
    int par = *p.parent(r, cur);
    auto kids = p.children(r - 1, par);
    up.push_back(static_cast<int>(std::find(kids.begin(), kids.end(), cur) - kids.begin()));
    cur = par;
  }
  y.root = p.cell(block, cur).id;
  y.prefix.assign(up.rbegin(), up.rend());
  y.cycle = {0};
  return y;
}

std::string to_string(TouchKind k) {
  switch (k) {
    case TouchKind::Identified: return "identified";
    case TouchKind::Separated: return "separated";
    case TouchKind::Unknown: return "unknown";
  }
  return "unknown";
}

int certification_rows(std::size_t cycle_a, std::size_t cycle_b, int window) {
  std::size_t l = std::lcm(std::max<std::size_t>(cycle_a, 1), std::max<std::size_t>(cycle_b, 1));
  return std::max(window, static_cast<int>(2 * l + 2));
}

TouchVerdict persistent_touch(const QuotientPresentation& p, const PointSpec& a,
                              const PointSpec& b, int horizon, int window) {
  const int H = std::min(horizon, p.horizon());
  if (a == b) return {TouchKind::Identified, H};
  auto pa = cell_path(p, a, H);
  auto pb = cell_path(p, b, H);
  const int from = std::max(a.block, b.block);
  if (from > H) return {TouchKind::Unknown, H};
  for (int k = from; k <= H; ++k) {
    int ca = pa[static_cast<std::size_t>(k - a.block)];
    int cb = pb[static_cast<std::size_t>(k - b.block)];
    if (!p.touch(k, ca, cb)) return {TouchKind::Separated, k};
  }
  const int tail = std::max({tail_start_row(a), tail_start_row(b), from});
  const int observed = H - tail + 1;
  if (observed >= certification_rows(a.cycle.size(), b.cycle.size(), window))
    return {TouchKind::Identified, H};
  return {TouchKind::Unknown, H};
}

PointClasses point_classes(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                           int horizon, int window) {
  const int n = static_cast<int>(sample.size());
  std::vector<int> root(static_cast<std::size_t>(n));
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[static_cast<std::size_t>(x)] != x)
      x = root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
    return x;
  };
  PointClasses out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto v = persistent_touch(p, sample[static_cast<std::size_t>(i)],
                                sample[static_cast<std::size_t>(j)], horizon, window);
      if (v.kind == TouchKind::Identified) {
        int ri = find(i), rj = find(j);
        if (ri != rj) root[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
      } else if (v.kind == TouchKind::Unknown) {
        out.unknown_pairs.emplace_back(i, j);
      }
    }
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(out.classes.size());
      out.classes.emplace_back();
    }
    out.classes[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
  }
  return out;
}

}  // namespace bratteli
