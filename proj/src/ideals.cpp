#include "bratteli/ideals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace bratteli {

std::string to_string(IdealAxiom a) {
  return a == IdealAxiom::DescendantClosed ? "descendant-closed" : "saturated";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<IdealViolation> check_ideal(const BratteliDiagram& d, const VertexSet& members,
                                          int horizon) {
  int last = std::min(horizon, d.horizon());
  for (int k = 1; k <= last; ++k) {
    for (int j = 1; j <= d.row_size(k); ++j) {
      Vertex v{k, j};
      if (k == last) continue;
      auto children = d.children(v);
      bool all_in = true;
      for (int h : children) {
        bool in = members.contains({k + 1, h});
        if (members.contains(v) && !in) return IdealViolation{v, IdealAxiom::DescendantClosed, Vertex{k + 1, h}};
        all_in = all_in && in;
      }
      if (!members.contains(v) && all_in && !children.empty())
        return IdealViolation{v, IdealAxiom::Saturated, std::nullopt};
    }
  }
  return std::nullopt;
}

bool is_ideal_subdiagram(const BratteliDiagram& d, const VertexSet& members, int horizon) {
  return !check_ideal(d, members, horizon).has_value();
}

IdealSubdiagram ideal_closure(const BratteliDiagram& d, const VertexSet& seed, int horizon) {
  int last = std::min(horizon, d.horizon());
  VertexSet s = seed;
  for (int k = last + 1; k <= d.horizon(); ++k)
    for (int j = 1; j <= d.row_size(k); ++j) s.erase({k, j});
  bool changed = true;
  while (changed) {
    changed = false;
    // Descendant closure is a single top-down sweep.
    for (int k = 1; k < last; ++k)
      for (int j = 1; j <= d.row_size(k); ++j)
        if (s.contains({k, j}))
          for (int h : d.children({k, j}))
            if (!s.contains({k + 1, h})) {
              s.insert({k + 1, h});
              changed = true;
            }
    // Saturation bottom-up.
    for (int k = last - 1; k >= 1; --k)
      for (int j = 1; j <= d.row_size(k); ++j) {
        if (s.contains({k, j})) continue;
        auto children = d.children({k, j});
        bool all_in = !children.empty() &&
                      std::all_of(children.begin(), children.end(),
                                  [&](int h) { return s.contains({k + 1, h}); });
        if (all_in) {
          s.insert({k, j});
          changed = true;
        }
      }
  }
  return {std::move(s), last};
}

IdealSubdiagram empty_ideal(const BratteliDiagram& d, int horizon) {
  return {VertexSet(d), std::min(horizon, d.horizon())};
}

IdealSubdiagram full_ideal(const BratteliDiagram& d, int horizon) {
  return ideal_closure(d, VertexSet(d, true), horizon);
}

std::pair<IdealSubdiagram, IdealSubdiagram> meet_join(const BratteliDiagram& d,
                                                      const IdealSubdiagram& a,
                                                      const IdealSubdiagram& b) {
  if (a.horizon != b.horizon) throw std::invalid_argument("ideals at different horizons");
  if (a.members.horizon() != b.members.horizon() || a.members.horizon() != d.horizon())
    throw std::invalid_argument("ideals over different diagrams");
  IdealSubdiagram meet{a.members.intersection(b.members), a.horizon};
  IdealSubdiagram join = ideal_closure(d, a.members.set_union(b.members), a.horizon);
  return {std::move(meet), std::move(join)};
}

namespace {

PathSeq materialize(const BratteliDiagram& d, const PathSeq& p, int horizon) {
  if (p.vertices.empty()) throw std::domain_error("empty path");
  if (!is_complete_connected(d, p)) throw std::domain_error("path is not complete connected");
  PathSeq full = extend_path(d, p, horizon);
  if (full.end_row() < horizon) throw std::domain_error("path does not reach the horizon");
  return full;
}

}  // namespace

IdealSubdiagram largest_ideal_avoiding_path(const BratteliDiagram& d, const PathSeq& p,
                                            int horizon) {
  int last = std::min(horizon, d.horizon());
  PathSeq full = materialize(d, p, last);
  VertexSet s(d);
  for (int k = 1; k <= last; ++k)
    for (int j = 1; j <= d.row_size(k); ++j) s.insert({k, j});
  for (auto v : full.vertices) s.erase(v);
  // Removal only propagates upward, so one bottom-up sweep reaches the fixpoint.
  for (int k = last - 1; k >= 1; --k)
    for (int j = 1; j <= d.row_size(k); ++j) {
      if (!s.contains({k, j})) continue;
      for (int h : d.children({k, j}))
        if (!s.contains({k + 1, h})) {
          s.erase({k, j});
          break;
        }
    }
  return {std::move(s), last};
}

VertexSet path_descendant_set(const BratteliDiagram& d, const PathSeq& p, int horizon) {
  int last = std::min(horizon, d.horizon());
  PathSeq full = materialize(d, p, last);
  VertexSet out(d);
  for (auto v : full.vertices) out = out.set_union(descendants(d, v, last));
  return out;
}

std::vector<Vertex> descendant_reading_mismatch(const BratteliDiagram& d, const PathSeq& p,
                                                int horizon) {
  auto fixpoint = largest_ideal_avoiding_path(d, p, horizon);
  auto from_descendants = path_descendant_set(d, p, horizon).complement();
  std::vector<Vertex> diff;
  for (int k = 1; k <= fixpoint.horizon; ++k)
    for (int j = 1; j <= d.row_size(k); ++j)
      if (fixpoint.members.contains({k, j}) != from_descendants.contains({k, j}))
        diff.push_back({k, j});
  return diff;
}

PrimeCheck is_prime_complement(const BratteliDiagram& d, const IdealSubdiagram& ideal,
                               int delta) {
  const int last = ideal.horizon;
  PrimeCheck result{Verdict::Yes, std::nullopt, last};
  std::vector<Vertex> complement;
  for (int k = 1; k <= last; ++k)
    for (int j = 1; j <= d.row_size(k); ++j)
      if (!ideal.members.contains({k, j})) complement.push_back({k, j});
  if (complement.empty()) return {Verdict::No, std::nullopt, last};

  // Row-horizon reach of every complement vertex, as bitsets. Saturation
  // guarantees that complement vertices above the horizon keep a child in the
  // complement, so common descendants can be tested on the last row alone.
  const int width = d.row_size(last);
  const std::size_t words = static_cast<std::size_t>(width + 63) / 64;
  auto reach_of = [&](Vertex v) {
    std::vector<std::uint64_t> bits(words, 0);
    auto desc = descendants(d, v, last);
    for (int h = 1; h <= width; ++h)
      if (desc.contains({last, h}) && !ideal.members.contains({last, h}))
        bits[static_cast<std::size_t>(h - 1) / 64] |= std::uint64_t{1} << ((h - 1) % 64);
    return bits;
  };
  std::vector<Vertex> checked;
  std::vector<std::vector<std::uint64_t>> reach;
  for (auto v : complement) {
    if (v.row > last - delta) continue;
    checked.push_back(v);
    reach.push_back(reach_of(v));
  }
  for (std::size_t a = 0; a < checked.size(); ++a) {
    for (std::size_t b = a + 1; b < checked.size(); ++b) {
      bool meet = false;
      for (std::size_t w = 0; w < words && !meet; ++w) meet = (reach[a][w] & reach[b][w]) != 0;
      if (meet) continue;
      bool definite = checked[a].row <= last - 2 * delta && checked[b].row <= last - 2 * delta;
      if (definite) return {Verdict::No, std::make_pair(checked[a], checked[b]), last};
      if (result.verdict == Verdict::Yes)
        result = {Verdict::Unknown, std::make_pair(checked[a], checked[b]), last};
    }
  }
  return result;
}

double CentralElement::at(int index) const {
  auto it = coefficients.find(index);
  return it == coefficients.end() ? 0.0 : it->second;
}

double central_norm_distance(const BratteliDiagram& d, const CentralElement& a1,
                             const CentralElement& a2, std::optional<Vertex> corner) {
  const CentralElement* coarse = &a1;
  const CentralElement* fine = &a2;
  if (a1.row > a2.row) std::swap(coarse, fine);
  const int k = coarse->row;
  const int l = fine->row;
  if (k < 1 || l > d.horizon()) throw std::domain_error("central element row not materialized");
  if (corner && (!d.contains(*corner) || corner->row > k))
    throw std::domain_error("corner must lie on a row <= both element rows");

  double best = 0.0;
  std::optional<VertexSet> in_corner;
  if (corner) in_corner = descendants(d, *corner, l);
  for (int j = 1; j <= d.row_size(k); ++j) {
    if (in_corner && !in_corner->contains({k, j})) continue;
    if (k == l) {
      best = std::max(best, std::abs(coarse->at(j) - fine->at(j)));
      continue;
    }
    auto below = descendants(d, {k, j}, l);
    for (int h = 1; h <= d.row_size(l); ++h)
      if (below.contains({l, h})) best = std::max(best, std::abs(coarse->at(j) - fine->at(h)));
  }
  if (!corner && k < l) {
    // Row-l summands fed by roots born after row k sit outside the unit of
    // the row-k algebra, where the coarse element vanishes.
    VertexSet late(d);
    for (int r = k + 1; r <= l; ++r)
      for (int j = 1; j <= d.row_size(r); ++j)
        if (d.parents({r, j}).empty()) late = late.set_union(descendants(d, {r, j}, l));
    for (int h = 1; h <= d.row_size(l); ++h)
      if (late.contains({l, h})) best = std::max(best, std::abs(fine->at(h)));
  }
  return best;
}

int block_unit_quotient_norm(const VertexSet& block_vertices, const IdealSubdiagram& ideal) {
  for (auto v : block_vertices.to_vector())
    if (v.row <= ideal.horizon && !ideal.members.contains(v)) return 1;
  return 0;
}

bool complement_has_sequence_in(const BratteliDiagram& d, const IdealSubdiagram& ideal,
                                const VertexSet& block_vertices) {
  const int last = ideal.horizon;
  // alive(v): a complete path from v to the horizon stays in complement ∩ block.
  VertexSet alive(d);
  for (int k = last; k >= 1; --k)
    for (int j = 1; j <= d.row_size(k); ++j) {
      Vertex v{k, j};
      if (ideal.members.contains(v) || !block_vertices.contains(v)) continue;
      if (k == last) {
        alive.insert(v);
        continue;
      }
      for (int h : d.children(v))
        if (alive.contains({k + 1, h})) {
          alive.insert(v);
          break;
        }
    }
  return !alive.empty();
}

nlohmann::json to_json(const IdealSubdiagram& ideal) {
  nlohmann::json members = nlohmann::json::array();
  for (auto v : ideal.members.to_vector())
    if (v.row <= ideal.horizon) members.push_back({v.row, v.index});
  return {{"members", members}, {"horizon", ideal.horizon}};
}

IdealSubdiagram ideal_from_json(const BratteliDiagram& d, const nlohmann::json& j) {
  IdealSubdiagram out{VertexSet(d), j.at("horizon").get<int>()};
  for (const auto& v : j.at("members")) out.members.insert({v.at(0).get<int>(), v.at(1).get<int>()});
  if (auto bad = check_ideal(d, out.members, out.horizon)) {
    std::ostringstream msg;
    msg << "not an ideal subdiagram: " << bad->vertex << " violates " << to_string(bad->axiom);
    throw std::invalid_argument(msg.str());
  }
  return out;
}

}  // namespace bratteli
