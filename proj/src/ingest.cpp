#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "bratteli/presentation.hpp"

namespace bratteli {

namespace {

using Member = std::pair<int, int>;  // (block, point index)

std::vector<int> effective_schedule(const SampledSpace& s, int depth, std::size_t functions) {
  std::vector<int> out;
  for (int k = 1; k <= depth; ++k) {
    int m;
    if (s.schedule.empty()) m = std::min<int>(k, static_cast<int>(functions));
    else if (k <= static_cast<int>(s.schedule.size())) m = s.schedule[static_cast<std::size_t>(k - 1)];
    else m = s.schedule.back();
    if (m < 0 || m > static_cast<int>(functions))
      throw std::invalid_argument("schedule uses functions that are not sampled");
    if (!out.empty() && m < out.back()) throw std::invalid_argument("non-refining schedule");
    out.push_back(m);
  }
  return out;
}

}  // namespace

IngestResult build_from_samples(const SampledSpace& s, int depth) {
  if (depth < 0) throw std::invalid_argument("negative depth");
  std::size_t functions = 0;
  bool first = true;
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    if (s.blocks[b].empty()) throw std::invalid_argument("empty block " + std::to_string(b + 1));
    for (const auto& pt : s.blocks[b]) {
      if (first) functions = pt.values.size();
      first = false;
      if (pt.values.size() != functions) throw std::invalid_argument("ragged function values");
    }
  }
  const auto schedule = effective_schedule(s, depth, functions);
  const int blocks = static_cast<int>(s.blocks.size());

  IngestResult result;
  std::vector<PresentationRow> rows;
  std::vector<std::vector<Member>> previous;
  std::vector<int> previous_block;
  for (int k = 1; k <= depth; ++k) {
    const double bound = std::ldexp(1.0, -k);
    const int m = schedule[static_cast<std::size_t>(k - 1)];
    PresentationRow row;
    row.k = k;
    std::vector<std::vector<Member>> cells;
    std::vector<int> cell_block;
    auto split = [&](int block, std::vector<Member> group, std::optional<int> parent) {
      const auto& pts = s.blocks[static_cast<std::size_t>(block - 1)];
      auto value = [&](const Member& x, int f) {
        return pts[static_cast<std::size_t>(x.second)].values[static_cast<std::size_t>(f)];
      };
      std::sort(group.begin(), group.end(), [&](const Member& x, const Member& y) {
        for (int f = 0; f < m; ++f)
          if (value(x, f) != value(y, f)) return value(x, f) < value(y, f);
        return x.second < y.second;
      });
      std::vector<Member> run;
      std::vector<double> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
      auto flush = [&] {
        row.cells.push_back({static_cast<int>(cells.size()), block, parent});
        cells.push_back(run);
        cell_block.push_back(block);
        run.clear();
      };
      for (const auto& x : group) {
        bool fits = !run.empty();
        for (int f = 0; f < m && fits; ++f) {
          double v = value(x, f);
          fits = std::max(hi[static_cast<std::size_t>(f)], v) - std::min(lo[static_cast<std::size_t>(f)], v) < bound;
        }
        if (!fits && !run.empty()) flush();
        if (run.empty())
          for (int f = 0; f < m; ++f) lo[static_cast<std::size_t>(f)] = hi[static_cast<std::size_t>(f)] = value(x, f);
        for (int f = 0; f < m; ++f) {
          lo[static_cast<std::size_t>(f)] = std::min(lo[static_cast<std::size_t>(f)], value(x, f));
          hi[static_cast<std::size_t>(f)] = std::max(hi[static_cast<std::size_t>(f)], value(x, f));
        }
        run.push_back(x);
      }
      if (!run.empty()) flush();
    };
    for (int b = 1; b <= std::min(k, blocks); ++b) {
      if (b == k) {
        std::vector<Member> all;
        for (int i = 0; i < static_cast<int>(s.blocks[static_cast<std::size_t>(b - 1)].size()); ++i)
          all.emplace_back(b, i);
        split(b, std::move(all), std::nullopt);
      } else {
        for (std::size_t c = 0; c < previous.size(); ++c)
          if (previous_block[c] == b) split(b, previous[c], static_cast<int>(c));
      }
    }
    std::map<std::string, std::set<int>> by_label;
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (const auto& x : cells[c]) {
        const auto& label = s.blocks[static_cast<std::size_t>(x.first - 1)][static_cast<std::size_t>(x.second)].label;
        if (!label.empty()) by_label[label].insert(static_cast<int>(c));
      }
    std::set<std::pair<int, int>> pairs;
    for (const auto& [label, ids] : by_label)
      for (int a : ids)
        for (int b : ids)
          if (a < b) pairs.emplace(a, b);
    row.touch.assign(pairs.begin(), pairs.end());
    rows.push_back(std::move(row));
    result.members.push_back(cells);
    previous = std::move(cells);
    previous_block = std::move(cell_block);
  }
  nlohmann::json params{{"depth", depth}};
  result.presentation =
      QuotientPresentation(blocks, std::move(rows), GeneratorInfo{"samples", params});
  return result;
}

nlohmann::json to_json(const QuotientPresentation& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 1; k <= p.horizon(); ++k) {
    const auto& row = p.row(k);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : row.cells) {
      nlohmann::json parent = c.parent ? nlohmann::json(*c.parent) : nlohmann::json(nullptr);
      cells.push_back({{"id", c.id}, {"block", c.block}, {"parent", parent}});
    }
    nlohmann::json touch = nlohmann::json::array();
    for (auto [a, b] : row.touch) touch.push_back({a, b});
    rows.push_back({{"k", k}, {"cells", cells}, {"touch", touch}});
  }
  nlohmann::json out{{"blocks", p.block_count()}, {"rows", rows}, {"horizon", p.horizon()}};
  if (p.generator()) out["generator"] = {{"name", p.generator()->name}, {"params", p.generator()->params}};
  return out;
}

QuotientPresentation presentation_from_json(const nlohmann::json& j) {
  std::vector<PresentationRow> rows;
  for (const auto& r : j.at("rows")) {
    PresentationRow row;
    row.k = r.at("k").get<int>();
    for (const auto& c : r.at("cells")) {
      Cell cell{c.at("id").get<int>(), c.at("block").get<int>(), std::nullopt};
      if (c.contains("parent") && !c.at("parent").is_null()) cell.parent = c.at("parent").get<int>();
      row.cells.push_back(cell);
    }
    if (r.contains("touch"))
      for (const auto& t : r.at("touch")) row.touch.emplace_back(t.at(0).get<int>(), t.at(1).get<int>());
    rows.push_back(std::move(row));
  }
  if (j.contains("horizon") && j.at("horizon").get<int>() != static_cast<int>(rows.size()))
    throw std::invalid_argument("horizon does not match the number of rows");
  std::optional<GeneratorInfo> gen;
  if (j.contains("generator") && !j.at("generator").is_null()) {
    const auto& g = j.at("generator");
    gen = GeneratorInfo{g.at("name").get<std::string>(), g.value("params", nlohmann::json::object())};
  }
  return QuotientPresentation(j.at("blocks").get<int>(), std::move(rows), std::move(gen));
}

nlohmann::json to_json(const PointSpec& y) {
  return {{"block", y.block}, {"root", y.root}, {"prefix", y.prefix}, {"cycle", y.cycle}};
}

PointSpec point_from_json(const nlohmann::json& j) {
  PointSpec y;
  y.block = j.at("block").get<int>();
  y.root = j.at("root").get<int>();
  y.prefix = j.value("prefix", std::vector<int>{});
  y.cycle = j.value("cycle", std::vector<int>{0});
  if (y.cycle.empty()) throw std::invalid_argument("point cycle must be non-empty");
  return y;
}

SampledSpace sampled_space_from_json(const nlohmann::json& j) {
  SampledSpace s;
  for (const auto& block : j.at("blocks")) {
    std::vector<SamplePoint> pts;
    for (const auto& pt : block)
      pts.push_back({pt.value("label", std::string{}), pt.at("values").get<std::vector<double>>()});
    s.blocks.push_back(std::move(pts));
  }
  s.schedule = j.value("schedule", std::vector<int>{});
  return s;
}

}  // namespace bratteli
