#include "bratteli/analysis.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bratteli {

std::string to_string(Locality l) {
  switch (l) {
    case Locality::LocallyCompact: return "LocallyCompact";
    case Locality::NotLocallyCompact: return "NotLocallyCompact";
    case Locality::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string to_string(BaireVerdict v) {
  switch (v) {
    case BaireVerdict::Dense: return "S dense on sample";
    case BaireVerdict::Misses: return "S misses open set";
    case BaireVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ExhaustionScheme exhaustion_scheme(const QuotientPresentation& p, const PointSpec& x, int horizon) {
  const int H = std::min(horizon, p.horizon());
  ExhaustionScheme out;
  auto path = cell_path(p, x, H);
  if (path.empty()) return out;
  std::vector<int> fibre;
  for (int f : p.touching(H, path.back())) fibre.push_back(f);
  for (int n = 1; n <= H; ++n) {
    std::set<std::pair<int, int>> cover, hood;
    for (int f : fibre) {
      const int b = p.block_of(H, f);
      const std::pair<int, int> birth{b, *p.ancestor(H, f, b)};
      if (b <= n) {
        cover.insert(birth);
        hood.insert({n, *p.ancestor(H, f, n)});
      } else {
        hood.insert(birth);
      }
    }
    out.stages.push_back({n, {cover.begin(), cover.end()}, {hood.begin(), hood.end()}});
  }
  return out;
}

namespace {

bool inside(const QuotientPresentation& p, std::pair<int, int> cell, std::pair<int, int> outer) {
  if (cell.first < outer.first) return false;
  if (p.block_of(cell.first, cell.second) != p.block_of(outer.first, outer.second)) return false;
  return p.ancestor(cell.first, cell.second, outer.first) == outer.second;
}

bool inside_any(const QuotientPresentation& p, std::pair<int, int> cell, const CellFamily& family) {
  return std::any_of(family.begin(), family.end(), [&](auto outer) { return inside(p, cell, outer); });
}

bool same_rule(const FailureRule& a, const FailureRule& b) {
  return a.block_offset == b.block_offset && a.row_offset == b.row_offset && a.prefix == b.prefix &&
         a.cycle == b.cycle;
}

// Lowest-row point of V_n whose cell meets no cell of U_n.
std::optional<std::pair<PointSpec, FailureRule>> escaping_point(const QuotientPresentation& p,
                                                                const ExhaustionStage& stage,
                                                                int horizon) {
  for (int R = stage.n; R <= horizon; ++R) {
    std::vector<bool> covered(static_cast<std::size_t>(p.cell_count(R)), false);
    for (int pos = 0; pos < p.cell_count(R); ++pos)
      covered[static_cast<std::size_t>(pos)] = inside_any(p, {R, pos}, stage.cover);
    for (int pos = 0; pos < p.cell_count(R); ++pos) {
      if (!inside_any(p, {R, pos}, stage.neighbourhood)) continue;
      auto t = p.touching(R, pos);
      if (std::any_of(t.begin(), t.end(), [&](int c) { return covered[static_cast<std::size_t>(c)]; }))
        continue;
      PointSpec y = leftmost_point(p, R, pos);
      FailureRule rule{y.block - stage.n, R - stage.n, y.prefix, y.cycle};
      return std::make_pair(y, rule);
    }
  }
  return std::nullopt;
}

}  // namespace

ClassificationWitness classify_point(const QuotientPresentation& p, const PointSpec& x, int horizon,
                                     int window, int threshold) {
  const int H = std::min(horizon, p.horizon());
  ClassificationWitness out;
  out.horizon = H;
  auto scheme = exhaustion_scheme(p, x, H);
  const int last = H - window;
  if (scheme.stages.empty() || last < 1) return out;

  for (int n = 1; n <= last && !out.compact; ++n) {
    const auto& st = scheme.stages[static_cast<std::size_t>(n - 1)];
    bool all = std::all_of(st.neighbourhood.begin(), st.neighbourhood.end(),
                           [&](auto cell) { return inside_any(p, cell, st.cover); });
    if (!all) continue;
    CellFamily used;
    for (auto u : st.cover)
      if (std::any_of(st.neighbourhood.begin(), st.neighbourhood.end(),
                      [&](auto cell) { return inside(p, cell, u); }))
        used.push_back(u);
    out.compact = CompactWitness{n, used, st.neighbourhood,
                                 scheme.stages[static_cast<std::size_t>(last - 1)].neighbourhood};
  }

  std::vector<std::optional<std::pair<PointSpec, FailureRule>>> found;
  for (int n = 1; n <= last; ++n)
    found.push_back(escaping_point(p, scheme.stages[static_cast<std::size_t>(n - 1)], H));
  if (found.back()) {
    int first = last;
    while (first > 1 && found[static_cast<std::size_t>(first - 2)] &&
           same_rule(found[static_cast<std::size_t>(first - 2)]->second, found.back()->second))
      --first;
    if (last - first + 1 >= threshold) {
      FailureWitness w{first, last, {}, found.back()->second};
      for (int n = first; n <= last; ++n) w.points.push_back(found[static_cast<std::size_t>(n - 1)]->first);
      out.failure = std::move(w);
    }
  }
  if (out.compact && out.failure)
    throw std::logic_error("point holds both a compact and a failure witness");
  if (out.compact) out.verdict = Locality::LocallyCompact;
  else if (out.failure) out.verdict = Locality::NotLocallyCompact;
  return out;
}

LabeledSample locally_compact_set(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                                  int horizon, int window, int threshold) {
  LabeledSample out;
  out.horizon = std::min(horizon, p.horizon());
  for (const auto& y : sample) out.witnesses.push_back(classify_point(p, y, horizon, window, threshold));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& w = out.witnesses[i];
    if (w.verdict != Locality::LocallyCompact) continue;
    out.locally_compact.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < sample.size(); ++j) {
      if (out.witnesses[j].verdict != Locality::NotLocallyCompact) continue;
      auto path = cell_path(p, sample[j], out.horizon);
      if (path.empty()) continue;
      const std::pair<int, int> cell{out.horizon, path.back()};
      if (inside_any(p, cell, w.compact->smallest))
        out.openness_violations.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

BaireReport baire_report(const QuotientPresentation& p, const std::vector<PointSpec>& sample,
                         int horizon, int depth, int window, int threshold) {
  BaireReport out;
  const int H = std::min(horizon, p.horizon());
  out.depth = std::min(depth, H);
  out.labels = locally_compact_set(p, sample, H, window, threshold);
  std::vector<std::vector<int>> sample_cells;
  for (const auto& y : sample) sample_cells.push_back(cell_path(p, y, H));
  for (int pos = 0; pos < p.cell_count(out.depth); ++pos) {
    BasicOpen open{out.depth, pos, {}, false};
    auto below = p.descendants(out.depth, pos, H);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (sample_cells[i].empty()) continue;
      auto t = p.touching(H, sample_cells[i].back());
      bool in = std::any_of(t.begin(), t.end(),
                            [&](int c) { return std::binary_search(below.begin(), below.end(), c); });
      if (!in) continue;
      open.members.push_back(static_cast<int>(i));
      if (out.labels.witnesses[i].verdict == Locality::LocallyCompact) open.has_locally_compact = true;
    }
    out.opens.push_back(std::move(open));
  }
  for (std::size_t o = 0; o < out.opens.size() && !out.witness; ++o) {
    const auto& open = out.opens[o];
    bool all_failing = !open.members.empty() &&
                       std::all_of(open.members.begin(), open.members.end(), [&](int i) {
                         return out.labels.witnesses[static_cast<std::size_t>(i)].verdict ==
                                Locality::NotLocallyCompact;
                       });
    if (all_failing) out.witness = static_cast<int>(o);
  }
  if (out.witness) out.verdict = BaireVerdict::Misses;
  else if (std::all_of(out.opens.begin(), out.opens.end(), [](const BasicOpen& o) { return o.has_locally_compact; }))
    out.verdict = BaireVerdict::Dense;
  return out;
}

namespace {

nlohmann::json family_json(const QuotientPresentation& p, const CellFamily& f) {
  nlohmann::json out = nlohmann::json::array();
  for (auto [row, pos] : f) out.push_back({row, p.cell(row, pos).id});
  return out;
}

}  // namespace

nlohmann::json to_json(const ClassificationWitness& w, const QuotientPresentation& p) {
  nlohmann::json out{{"verdict", to_string(w.verdict)}, {"horizon", w.horizon}};
  if (w.compact)
    out["compact_witness"] = {{"n0", w.compact->n0},
                              {"cover", family_json(p, w.compact->cover)},
                              {"neighbourhood", family_json(p, w.compact->neighbourhood)}};
  if (w.failure) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& y : w.failure->points) pts.push_back(to_json(y));
    out["failure_witness"] = {{"first_n", w.failure->first_n},
                              {"last_n", w.failure->last_n},
                              {"rule",
                               {{"block_offset", w.failure->rule.block_offset},
                                {"row_offset", w.failure->rule.row_offset},
                                {"prefix", w.failure->rule.prefix},
                                {"cycle", w.failure->rule.cycle}}},
                              {"points", pts}};
  }
  return out;
}

nlohmann::json to_json(const BaireReport& r, const QuotientPresentation& p) {
  nlohmann::json opens = nlohmann::json::array();
  for (const auto& o : r.opens)
    opens.push_back({{"cell", {o.row, p.cell(o.row, o.cell).id}},
                     {"members", o.members},
                     {"has_locally_compact", o.has_locally_compact}});
  nlohmann::json out{{"verdict", to_string(r.verdict)}, {"depth", r.depth}, {"opens", opens},
                     {"locally_compact", r.labels.locally_compact}, {"horizon", r.labels.horizon}};
  if (r.witness) out["witness_open"] = *r.witness;
  return out;
}

}  // namespace bratteli
