#include "bratteli/glimm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bratteli {

int resolution_row(const CellFunction& g, int block) { return std::max(g.depth, block); }

namespace {

int deepest_resolution_row(const QuotientPresentation& p, const CellFunction& g) {
  return std::max(g.depth, std::min(p.block_count(), p.horizon()));
}

int leftmost_descendant(const QuotientPresentation& p, int k, int pos, int row) {
  for (int r = k; r < row; ++r) pos = p.children(r, pos).front();
  return pos;
}

}  // namespace

CellValue cell_value(const QuotientPresentation& p, const CellFunction& g, int k, int pos) {
  const int R = resolution_row(g, p.block_of(k, pos));
  if (k >= R) return g.cells.at({R, *p.ancestor(k, pos, R)});
  CellValue out = g.cells.at({R, leftmost_descendant(p, k, pos, R)});
  for (int d : p.descendants(k, pos, R)) {
    const auto& v = g.cells.at({R, d});
    out.lo = std::min(out.lo, v.lo);
    out.hi = std::max(out.hi, v.hi);
  }
  return out;
}

void check_cell_function(const QuotientPresentation& p, const CellFunction& g) {
  if (g.depth < 1 || g.depth > p.horizon())
    throw std::invalid_argument("function depth outside the presentation horizon");
  for (int b = 1; b <= std::min(p.block_count(), p.horizon()); ++b) {
    const int R = resolution_row(g, b);
    if (R > p.horizon()) continue;
    for (int pos = 0; pos < p.cell_count(R); ++pos)
      if (p.block_of(R, pos) == b && !g.cells.count({R, pos}))
        throw std::invalid_argument("function has no value on resolution cell (" +
                                    std::to_string(R) + ", " + std::to_string(pos) + ")");
  }
}

double touch_modulus(const QuotientPresentation& p, const CellFunction& g) {
  const int R = std::min(deepest_resolution_row(p, g), p.horizon());
  double gap = 0.0;
  for (int a = 0; a < p.cell_count(R); ++a) {
    auto va = cell_value(p, g, R, a);
    for (int b : p.touching(R, a)) {
      if (b <= a) continue;
      auto vb = cell_value(p, g, R, b);
      gap = std::max(gap, std::max(va.lo, vb.lo) - std::min(va.hi, vb.hi));
    }
  }
  return gap;
}

bool touch_compatible(const QuotientPresentation& p, const CellFunction& g) {
  return touch_modulus(p, g) <= 0.0;
}

CellFunction cell_constant_function(const QuotientPresentation& p, int depth,
                                    const std::function<double(int, int, int)>& value_of) {
  CellFunction g;
  g.depth = depth;
  for (int b = 1; b <= std::min(p.block_count(), p.horizon()); ++b) {
    const int R = resolution_row(g, b);
    if (R > p.horizon()) continue;
    for (int pos = 0; pos < p.cell_count(R); ++pos) {
      if (p.block_of(R, pos) != b) continue;
      double v = value_of(b, R, pos);
      g.cells[{R, pos}] = {v, v, v};
      g.bound = std::max(g.bound, std::abs(v));
    }
  }
  return g;
}

CellFunction constant_function(const QuotientPresentation& p, int depth, double value) {
  return cell_constant_function(p, depth, [value](int, int, int) { return value; });
}

CellFunction block_indicator(const QuotientPresentation& p, int depth, int block) {
  return cell_constant_function(p, depth,
                                [block](int b, int, int) { return b == block ? 1.0 : 0.0; });
}

CellFunction random_compatible_function(const QuotientPresentation& p, int depth,
                                        std::uint64_t seed) {
  CellFunction shape;
  shape.depth = depth;
  const int R = std::min(deepest_resolution_row(p, shape), p.horizon());
  const int n = p.cell_count(R);
  std::vector<int> root(static_cast<std::size_t>(n));
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[static_cast<std::size_t>(x)] != x) x = root[static_cast<std::size_t>(x)];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) root[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  };
  for (int a = 0; a < n; ++a)
    for (int b : p.touching(R, a)) unite(a, b);
  // Cells under one resolution cell share its value.
  for (int pos = 0; pos < n; ++pos) {
    const int res = resolution_row(shape, p.block_of(R, pos));
    auto first = p.descendants(res, *p.ancestor(R, pos, res), R).front();
    unite(pos, first);
  }
  std::mt19937_64 rng(seed);
  std::vector<double> value(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> drawn(static_cast<std::size_t>(n), false);
  for (int pos = 0; pos < n; ++pos) {
    int r = find(pos);
    if (!drawn[static_cast<std::size_t>(r)]) {
      value[static_cast<std::size_t>(r)] = (static_cast<double>(rng() % 129) - 64.0) / 64.0;
      drawn[static_cast<std::size_t>(r)] = true;
    }
  }
  return cell_constant_function(p, depth, [&](int, int row, int pos) {
    return value[static_cast<std::size_t>(find(p.descendants(row, pos, R).front()))];
  });
}

std::vector<double> random_dyadic_values(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = (static_cast<double>(rng() % 129) - 64.0) / 64.0;
  return out;
}

namespace {

void require_interval_row(const QuotientPresentation& p, int depth, std::size_t cells) {
  if (depth < 1 || depth > p.horizon() || p.block_count() != 1 ||
      static_cast<std::size_t>(p.cell_count(depth)) != cells)
    throw std::invalid_argument("not an interval presentation at this depth");
}

}  // namespace

CellFunction interval_pl_function(const QuotientPresentation& p, int depth,
                                  const std::vector<double>& knots) {
  if (knots.size() < 2) throw std::invalid_argument("need at least two knots");
  require_interval_row(p, depth, knots.size() - 1);
  CellFunction g;
  g.depth = depth;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    g.cells[{depth, static_cast<int>(i)}] = {std::min(knots[i], knots[i + 1]),
                                             std::max(knots[i], knots[i + 1]), knots[i]};
    g.bound = std::max({g.bound, std::abs(knots[i]), std::abs(knots[i + 1])});
  }
  return g;
}

CellFunction interval_step_function(const QuotientPresentation& p, int depth,
                                    const std::vector<double>& values) {
  require_interval_row(p, depth, values.size());
  CellFunction g;
  g.depth = depth;
  for (std::size_t i = 0; i < values.size(); ++i) {
    g.cells[{depth, static_cast<int>(i)}] = {values[i], values[i], values[i]};
    g.bound = std::max(g.bound, std::abs(values[i]));
  }
  return g;
}

double point_value(const QuotientPresentation& p, const CellFunction& g, const PointSpec& y) {
  const int R = resolution_row(g, y.block);
  auto cells = cell_path(p, y, R);
  return g.cells.at({R, cells.back()}).sample;
}

double CentralApproximation::eta_at(int k, int n) const {
  const auto& row = eta.at(static_cast<std::size_t>(k - 1));
  return row[static_cast<std::size_t>(std::clamp(n, 0, blocks))];
}

CentralApproximation central_approximation(const ConstructedDiagram& c, const CellFunction& g) {
  const auto& p = c.presentation;
  check_cell_function(p, g);
  CentralApproximation out;
  out.horizon = c.horizon();
  out.blocks = p.block_count();
  for (int k = 1; k <= c.horizon(); ++k) {
    CentralElement a{k, {}};
    std::vector<double> by_block(static_cast<std::size_t>(out.blocks) + 1, 0.0);
    for (int j = 1; j <= c.diagram.row_size(k); ++j) {
      const int pos = c.cell_position({k, j});
      const int b = p.block_of(k, pos);
      if (resolution_row(g, b) > p.horizon()) continue;
      auto v = cell_value(p, g, k, pos);
      a.coefficients[j] = v.sample;
      auto& e = by_block[static_cast<std::size_t>(b)];
      e = std::max(e, v.hi - v.lo);
    }
    for (std::size_t n = 1; n < by_block.size(); ++n)
      by_block[n] = std::max(by_block[n], by_block[n - 1]);
    out.a.push_back(std::move(a));
    out.eta.push_back(std::move(by_block));
  }
  return out;
}

std::vector<Vertex> leftmost_complement_path(const BratteliDiagram& d,
                                             const IdealSubdiagram& ideal) {
  std::vector<Vertex> path;
  for (int k = 1; k <= ideal.horizon; ++k)
    for (int j = 1; j <= d.row_size(k); ++j)
      if (!ideal.members.contains({k, j})) {
        path.push_back({k, j});
        break;
      }
  return path;
}

namespace {

bool refines(const ConstructedDiagram& c, Vertex up, Vertex down) {
  auto par = c.presentation.parent(down.row, c.cell_position(down));
  return par && *par == c.cell_position(up);
}

std::optional<double> sequence_value(const ConstructedDiagram& c, const CellFunction& g,
                                     Vertex last) {
  const int pos = c.cell_position(last);
  const int R = resolution_row(g, c.presentation.block_of(last.row, pos));
  if (R > last.row) return std::nullopt;
  return g.cells.at({R, *c.presentation.ancestor(last.row, pos, R)}).sample;
}

}  // namespace

GtildeResult gtilde(const ConstructedDiagram& c, const CellFunction& g,
                    const IdealSubdiagram& ideal) {
  GtildeResult out;
  out.path = leftmost_complement_path(c.diagram, ideal);
  if (out.path.empty()) return out;
  for (std::size_t i = 1; i < out.path.size(); ++i)
    if (out.path[i].row != out.path[i - 1].row + 1 || !refines(c, out.path[i - 1], out.path[i]))
      return out;
  const Vertex last = out.path.back();
  out.value = sequence_value(c, g, last);
  if (!out.value) return out;
  const int pos = c.cell_position(last);
  out.point = leftmost_point(c.presentation, last.row, pos);

  // Rightmost decreasing sequence from the rightmost vertex of the first row.
  const int m = out.path.front().row;
  std::optional<Vertex> cur;
  for (int j = c.diagram.row_size(m); j >= 1; --j)
    if (!ideal.members.contains({m, j})) {
      cur = Vertex{m, j};
      break;
    }
  for (int k = m; cur && k < ideal.horizon; ++k) {
    std::optional<Vertex> next;
    for (int child : c.presentation.children(k, c.cell_position(*cur))) {
      Vertex v = c.vertex_of(k + 1, child);
      if (!ideal.members.contains(v) && (!next || v.index > next->index)) next = v;
    }
    cur = next;
  }
  if (cur) out.alternate = sequence_value(c, g, *cur);
  return out;
}

CauchyCheck verify_strict_cauchy(const ConstructedDiagram& c, const CentralApproximation& ca,
                                 int m, int i, int k, int l) {
  if (!(m < k && k < l) || l > ca.horizon) throw std::domain_error("need m < k < l <= horizon");
  const auto& d = c.diagram;
  const auto& p = c.presentation;
  CauchyCheck out;
  const Vertex corner{m, i};
  out.lhs = central_norm_distance(d, ca.a[static_cast<std::size_t>(k - 1)],
                                  ca.a[static_cast<std::size_t>(l - 1)], corner);
  out.rhs = ca.eta_at(k, m) + ca.eta_at(l, m);
  out.chained_rhs = 3 * ca.eta_at(k, m) + ca.eta_at(l, m);
  out.holds = out.lhs <= out.rhs;
  out.chained_holds = out.lhs <= out.chained_rhs;

  auto in_corner = descendants(d, corner, l);
  for (int j = 1; j <= d.row_size(k); ++j) {
    if (!in_corner.contains({k, j})) continue;
    auto below = descendants(d, {k, j}, l);
    auto inside = p.descendants(k, c.cell_position({k, j}), l);
    for (int h = 1; h <= d.row_size(l); ++h) {
      if (!below.contains({l, h})) continue;
      auto t = p.touching(l, c.cell_position({l, h}));
      bool met = std::any_of(inside.begin(), inside.end(), [&](int x) {
        return std::binary_search(t.begin(), t.end(), x);
      });
      if (!met) ++out.pairs_without_touch;
    }
  }
  return out;
}

HCheck verify_h_equals_gtilde(const ConstructedDiagram& c, const CellFunction& g,
                              const IdealSubdiagram& ideal, double eps, int window) {
  HCheck out;
  const auto& d = c.diagram;
  const auto& p = c.presentation;
  const int H = ideal.horizon;
  auto gt = gtilde(c, g, ideal);
  if (!gt.value) return out;
  out.gtilde = *gt.value;
  const auto& path = gt.path;
  out.m = path.front().row;
  auto at = [&](int row) { return path[static_cast<std::size_t>(row - out.m)]; };

  for (int n = 1; n <= p.block_count() && out.block == 0; ++n)
    if (!block_vertices(c, n).subset_of(ideal.members)) out.block = n;
  auto ca = central_approximation(c, g);

  for (int r = out.m; r <= H && out.s == 0; ++r) {
    auto v = cell_value(p, g, r, c.cell_position(at(r)));
    if (std::max(std::abs(v.hi - out.gtilde), std::abs(v.lo - out.gtilde)) < eps) out.s = r;
  }
  if (out.s == 0) return out;
  for (int r = out.s; r <= H - window + 1 && out.k == 0; ++r)
    if (ca.eta_at(r, out.block) < eps) out.k = r;
  if (out.k == 0) return out;

  const Vertex top = at(out.s);
  const int top_cell = c.cell_position(top);
  const int top_block = p.block_of(top.row, top_cell);
  auto below = descendants(d, top, H);
  bool eq7 = true;
  for (int r = out.k; r <= H; ++r)
    for (int j = 1; j <= d.row_size(r); ++j) {
      Vertex v{r, j};
      if (ideal.members.contains(v) || !below.contains(v)) continue;
      const double gap = std::abs(out.gtilde - ca.a[static_cast<std::size_t>(r - 1)].at(j));
      out.eq7_max = std::max(out.eq7_max, gap);
      ++out.eq7_checked;
      eq7 = eq7 && gap < 2 * eps;
      const int pos = c.cell_position(v);
      if (p.block_of(r, pos) != top_block || p.ancestor(r, pos, out.s) != top_cell)
        ++out.containment_failures;
    }

  const double h = ca.a[static_cast<std::size_t>(H - 1)].at(at(H).index);
  for (int r = std::max(out.k, H - window + 1); r <= H; ++r)
    if (ca.a[static_cast<std::size_t>(r - 1)].at(at(r).index) != h) return out;
  out.h = h;
  out.status = eq7 && std::abs(h - out.gtilde) < 3 * eps ? Verdict::Yes : Verdict::No;
  return out;
}

}  // namespace bratteli
