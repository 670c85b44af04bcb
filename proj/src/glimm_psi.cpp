#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "bratteli/glimm.hpp"

namespace bratteli {

std::string to_string(GlimmKind k) {
  switch (k) {
    case GlimmKind::Equivalent: return "equivalent";
    case GlimmKind::Distinct: return "distinct";
    case GlimmKind::Unknown: return "unknown";
  }
  return "unknown";
}

PrimPath prim_path(const ConstructedDiagram& c, const PointSpec& y, int horizon) {
  return {point_path(c, y, horizon), tail_start_row(y), static_cast<int>(y.cycle.size())};
}

PrimPath prim_path(const ConstructedDiagram& c, const PathSeq& p, int horizon) {
  const int H = std::min(horizon, c.horizon());
  PathSeq full = extend_path(c.diagram, p, H);
  if (full.end_row() < H) throw std::domain_error("path does not reach the horizon");
  full.cycle.clear();
  if (p.cycle.empty()) return {full, H + 1, 1};
  return {full, p.end_row() + 1, static_cast<int>(p.cycle.size())};
}

namespace {

bool certified(const PrimPath& a, const PrimPath& b, int horizon, int window) {
  const int tail = std::max({a.tail_start, b.tail_start, a.path.start_row(), b.path.start_row()});
  return horizon - tail + 1 >=
         certification_rows(static_cast<std::size_t>(a.period), static_cast<std::size_t>(b.period), window);
}

bool covered(const VertexSet& anc, const PrimPath& a, int limit) {
  bool any = false;
  for (auto v : a.path.vertices) {
    if (v.row > limit) break;
    any = true;
    if (!anc.contains(v)) return false;
  }
  return any;
}

// Certified absorption graph over a fixed list of paths.
struct AbsorptionGraph {
  std::vector<std::vector<int>> adjacent;
  std::vector<std::pair<int, int>> edges;  // (absorbed, absorbing)

  AbsorptionGraph(const BratteliDiagram& d, const std::vector<const PrimPath*>& nodes, int window)
      : adjacent(nodes.size()) {
    const int H = d.horizon();
    std::vector<VertexSet> anc;
    for (const auto* n : nodes) anc.push_back(ancestors(d, n->path.vertices.back()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (!certified(*nodes[i], *nodes[j], H, window)) continue;
        const bool ij = covered(anc[j], *nodes[i], H - window);
        const bool ji = covered(anc[i], *nodes[j], H - window);
        if (!ij && !ji) continue;
        adjacent[i].push_back(static_cast<int>(j));
        adjacent[j].push_back(static_cast<int>(i));
        edges.emplace_back(ij ? static_cast<int>(i) : static_cast<int>(j),
                           ij ? static_cast<int>(j) : static_cast<int>(i));
      }
  }

  std::vector<int> chain(int from, int to) const {
    std::vector<int> prev(adjacent.size(), -1);
    std::deque<int> queue{from};
    prev[static_cast<std::size_t>(from)] = from;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (u == to) break;
      for (int v : adjacent[static_cast<std::size_t>(u)])
        if (prev[static_cast<std::size_t>(v)] < 0) {
          prev[static_cast<std::size_t>(v)] = u;
          queue.push_back(v);
        }
    }
    if (prev[static_cast<std::size_t>(to)] < 0) return {};
    std::vector<int> out{to};
    while (out.back() != from) out.push_back(prev[static_cast<std::size_t>(out.back())]);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

std::optional<SeparatingWitness> separating_witness(const ConstructedDiagram& c, const PrimPath& a,
                                                    const PrimPath& b) {
  const auto& p = c.presentation;
  const int from = std::max(a.path.start_row(), b.path.start_row());
  for (int r = from; r <= c.horizon(); ++r) {
    const int x = c.cell_position(*a.path.at_row(r));
    const int y = c.cell_position(*b.path.at_row(r));
    std::vector<int> dist(static_cast<std::size_t>(p.cell_count(r)), -1);
    std::deque<int> queue{x};
    dist[static_cast<std::size_t>(x)] = 0;
    while (!queue.empty() && dist[static_cast<std::size_t>(y)] < 0) {
      int u = queue.front();
      queue.pop_front();
      for (int v : p.touching(r, u))
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
    }
    const int R = dist[static_cast<std::size_t>(y)];
    if (R < 0) return SeparatingWitness{r, 0, 0.0, 1.0, 0.0};
    if (R >= 3) return SeparatingWitness{r, R, 0.0, 1.0, 1.0 / R};
  }
  return std::nullopt;
}

}  // namespace

bool absorbs(const BratteliDiagram& d, const PrimPath& b, const PrimPath& a, int window) {
  return covered(ancestors(d, b.path.vertices.back()), a, d.horizon() - window);
}

GlimmVerdict glimm_equiv(const ConstructedDiagram& c, const PrimPath& p1, const PrimPath& p2,
                         const std::vector<PrimPath>& pool, int window) {
  GlimmVerdict out;
  out.horizon = c.horizon();
  if (p1.path.vertices == p2.path.vertices) {
    out.kind = GlimmKind::Equivalent;
    out.chain = {0, 1};
    return out;
  }
  std::vector<const PrimPath*> nodes{&p1, &p2};
  for (const auto& q : pool) nodes.push_back(&q);
  AbsorptionGraph graph(c.diagram, nodes, window);
  out.chain = graph.chain(0, 1);
  if (!out.chain.empty()) {
    out.kind = GlimmKind::Equivalent;
    return out;
  }
  out.witness = separating_witness(c, p1, p2);
  if (out.witness) out.kind = GlimmKind::Distinct;
  return out;
}

GlimmClasses glimm_classes(const ConstructedDiagram& c, const std::vector<PrimPath>& paths,
                           int window) {
  GlimmClasses out;
  out.representatives = paths;
  std::vector<const PrimPath*> nodes;
  for (const auto& q : paths) nodes.push_back(&q);
  AbsorptionGraph graph(c.diagram, nodes, window);
  out.provenance = graph.edges;
  std::vector<int> label(paths.size(), -1);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (label[i] >= 0) continue;
    const int id = static_cast<int>(out.partition.size());
    out.partition.emplace_back();
    std::deque<int> queue{static_cast<int>(i)};
    label[i] = id;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      out.partition.back().push_back(u);
      for (int v : graph.adjacent[static_cast<std::size_t>(u)])
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = id;
          queue.push_back(v);
        }
    }
    std::sort(out.partition.back().begin(), out.partition.back().end());
  }
  // Identical vertex paths are the same primitive ideal.
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (label[i] != label[j] && paths[i].path.vertices == paths[j].path.vertices) {
        const int keep = std::min(label[i], label[j]);
        const int drop = std::max(label[i], label[j]);
        for (auto& l : label)
          if (l == drop) l = keep;
      }
  std::vector<std::vector<int>> merged;
  std::vector<int> slot(out.partition.size(), -1);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto& s = slot[static_cast<std::size_t>(label[i])];
    if (s < 0) {
      s = static_cast<int>(merged.size());
      merged.emplace_back();
    }
    merged[static_cast<std::size_t>(s)].push_back(static_cast<int>(i));
  }
  out.partition = std::move(merged);
  return out;
}

std::vector<PathSeq> enumerate_primitive_paths(const BratteliDiagram& d, int start_row) {
  std::vector<PathSeq> out;
  const int R = std::min(start_row, d.horizon());
  if (R < 1) return out;
  for (int j = 1; j <= d.row_size(R); ++j) {
    std::vector<Vertex> up{{R, j}};
    while (!d.parents(up.back()).empty())
      up.push_back({up.back().row - 1, d.parents(up.back()).front()});
    std::reverse(up.begin(), up.end());
    out.push_back({up, {0}});
    out.push_back({up, {-1}});
  }
  return out;
}

PsiReport psi_check(const ConstructedDiagram& c, const std::vector<PointSpec>& sample, int window,
                    int start_row) {
  const auto& d = c.diagram;
  const auto& p = c.presentation;
  const int H = c.horizon();
  PsiReport out;
  out.horizon = H;
  std::vector<PrimPath> prims;
  for (const auto& y : sample) prims.push_back(prim_path(c, y, H));
  out.glimm = glimm_classes(c, prims, window);
  std::vector<int> glimm_label(sample.size(), 0);
  for (std::size_t cls = 0; cls < out.glimm.partition.size(); ++cls)
    for (int i : out.glimm.partition[cls]) glimm_label[static_cast<std::size_t>(i)] = static_cast<int>(cls);

  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      PairRecord rec;
      rec.a = static_cast<int>(i);
      rec.b = static_cast<int>(j);
      rec.touch = persistent_touch(p, sample[i], sample[j], H, window).kind;
      if (glimm_label[i] == glimm_label[j]) rec.glimm = GlimmKind::Equivalent;
      else if (separating_witness(c, prims[i], prims[j])) rec.glimm = GlimmKind::Distinct;
      rec.contradiction = (rec.touch == TouchKind::Identified && rec.glimm == GlimmKind::Distinct) ||
                          (rec.touch == TouchKind::Separated && rec.glimm == GlimmKind::Equivalent);
      if (rec.contradiction) ++out.contradictions;
      if (rec.touch == TouchKind::Unknown || rec.glimm == GlimmKind::Unknown) ++out.unknown_pairs;
      out.pairs.push_back(rec);
    }
  out.touch_classes = point_classes(p, sample, H, window);
  auto sorted = [](std::vector<std::vector<int>> v) {
    for (auto& x : v) std::sort(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return v;
  };
  out.partitions_match = sorted(out.touch_classes.classes) == sorted(out.glimm.partition);
  std::vector<int> touch_label(sample.size(), -1);
  for (std::size_t cls = 0; cls < out.touch_classes.classes.size(); ++cls)
    for (int i : out.touch_classes.classes[cls]) touch_label[static_cast<std::size_t>(i)] = static_cast<int>(cls);
  for (const auto& rec : out.pairs) {
    const auto a = static_cast<std::size_t>(rec.a), b = static_cast<std::size_t>(rec.b);
    if (rec.touch != TouchKind::Unknown &&
        (touch_label[a] == touch_label[b]) != (glimm_label[a] == glimm_label[b]))
      ++out.partition_conflicts;
  }

  for (const auto& path : enumerate_primitive_paths(d, start_row)) {
    SurjectivityRecord rec;
    rec.start = path.vertices.back();
    rec.leftward = path.cycle.front() == 0;
    auto ideal = largest_ideal_avoiding_path(d, path, H);
    for (int n = 1; n <= p.block_count() && rec.block_bound == 0; ++n)
      if (!block_vertices(c, n).subset_of(ideal.members)) rec.block_bound = n;
    auto cp = canonical_point(c, path, H, window);
    rec.stable = cp.stable;
    if (!cp.stable) {
      ++out.surjectivity_unknown;
      out.surjectivity.push_back(rec);
      continue;
    }
    rec.point = cp.point;
    rec.block_ok = cp.point.block <= rec.block_bound;
    auto original = prim_path(c, path, H);
    auto found = prim_path(c, cp.point, H);
    rec.contains = absorbs(d, original, found, window);
    rec.glimm = glimm_equiv(c, found, original, {}, window).kind;
    if (!rec.ok()) ++out.surjectivity_failures;
    out.surjectivity.push_back(rec);
  }
  return out;
}

nlohmann::json to_json(const PsiReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& x : r.pairs)
    pairs.push_back({{"a", x.a}, {"b", x.b}, {"touch", to_string(x.touch)},
                     {"glimm", to_string(x.glimm)}, {"contradiction", x.contradiction}});
  nlohmann::json surj = nlohmann::json::array();
  for (const auto& x : r.surjectivity) {
    nlohmann::json rec{{"start", {x.start.row, x.start.index}},
                       {"direction", x.leftward ? "leftmost" : "rightmost"},
                       {"block_bound", x.block_bound},
                       {"stable", x.stable},
                       {"block_ok", x.block_ok},
                       {"contains", x.contains},
                       {"glimm", to_string(x.glimm)},
                       {"ok", x.ok()}};
    if (x.point) rec["point"] = to_json(*x.point);
    surj.push_back(rec);
  }
  nlohmann::json provenance = nlohmann::json::array();
  for (auto [a, b] : r.glimm.provenance) provenance.push_back({a, b});
  return {{"horizon", r.horizon},
          {"pairs", pairs},
          {"touch_classes", r.touch_classes.classes},
          {"glimm_classes", r.glimm.partition},
          {"absorptions", provenance},
          {"partitions_match", r.partitions_match},
          {"partition_conflicts", r.partition_conflicts},
          {"surjectivity", surj},
          {"contradictions", r.contradictions},
          {"unknown_pairs", r.unknown_pairs},
          {"surjectivity_failures", r.surjectivity_failures},
          {"surjectivity_unknown", r.surjectivity_unknown},
          {"status", r.pass() ? "pass" : "fail"}};
}

nlohmann::json to_json(const CellFunction& g) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [key, v] : g.cells) cells.push_back({key.first, key.second, v.lo, v.hi, v.sample});
  return {{"depth", g.depth}, {"bound", g.bound}, {"cells", cells}};
}

CellFunction cell_function_from_json(const nlohmann::json& j) {
  CellFunction g;
  g.depth = j.at("depth").get<int>();
  g.bound = j.value("bound", 0.0);
  for (const auto& c : j.at("cells"))
    g.cells[{c.at(0).get<int>(), c.at(1).get<int>()}] = {c.at(2).get<double>(), c.at(3).get<double>(),
                                                         c.at(4).get<double>()};
  return g;
}

}  // namespace bratteli
