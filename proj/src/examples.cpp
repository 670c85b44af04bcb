#include "bratteli/examples.hpp"

#include <stdexcept>

namespace bratteli {

namespace {

// Convergent sequences glued at their limits. Row k lists, per born block,
// the singletons in order of appearance followed by the tail.
QuotientPresentation glued_sequences(int horizon, int blocks, const std::string& name) {
  std::vector<PresentationRow> rows;
  std::vector<std::vector<int>> prev_ids;  // [block-1][i], tail last
  for (int k = 1; k <= horizon; ++k) {
    PresentationRow row;
    row.k = k;
    std::vector<std::vector<int>> ids(static_cast<std::size_t>(blocks));
    std::vector<int> tails;
    int next = 0;
    for (int b = 1; b <= std::min(k, blocks); ++b) {
      auto& mine = ids[static_cast<std::size_t>(b - 1)];
      const int singles = k - b;
      for (int i = 0; i <= singles; ++i) {
        std::optional<int> parent;
        if (k > b) {
          const auto& up = prev_ids[static_cast<std::size_t>(b - 1)];
          parent = i < singles - 1 ? up[static_cast<std::size_t>(i)] : up.back();
        }
        row.cells.push_back({next, b, parent});
        mine.push_back(next++);
      }
      tails.push_back(mine.back());
    }
    for (std::size_t a = 0; a < tails.size(); ++a)
      for (std::size_t c = a + 1; c < tails.size(); ++c) row.touch.emplace_back(tails[a], tails[c]);
    rows.push_back(std::move(row));
    prev_ids = std::move(ids);
  }
  nlohmann::json params{{"horizon", horizon}, {"blocks", blocks}};
  return QuotientPresentation(blocks, std::move(rows), GeneratorInfo{name, params});
}

}  // namespace

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"point", "convseq", "cantor-interval", "fan"};
  return names;
}

QuotientPresentation point_example(int horizon) {
  std::vector<PresentationRow> rows;
  for (int k = 1; k <= horizon; ++k) {
    PresentationRow row;
    row.k = k;
    row.cells.push_back({0, 1, k == 1 ? std::nullopt : std::optional<int>(0)});
    rows.push_back(std::move(row));
  }
  return QuotientPresentation(1, std::move(rows), GeneratorInfo{"point", {{"horizon", horizon}}});
}

QuotientPresentation convseq_example(int horizon) {
  return glued_sequences(horizon, 2, "convseq");
}

QuotientPresentation fan_example(int horizon, int blocks) {
  return glued_sequences(horizon, blocks > 0 ? blocks : horizon, "fan");
}

QuotientPresentation cantor_interval_example(int horizon) {
  if (horizon > 20) throw std::invalid_argument("cantor-interval horizon is limited to 20");
  std::vector<PresentationRow> rows;
  for (int k = 1; k <= horizon; ++k) {
    PresentationRow row;
    row.k = k;
    const int n = 1 << (k - 1);
    for (int i = 0; i < n; ++i)
      row.cells.push_back({i, 1, k == 1 ? std::nullopt : std::optional<int>(i / 2)});
    for (int i = 0; i + 1 < n; ++i) row.touch.emplace_back(i, i + 1);
    rows.push_back(std::move(row));
  }
  return QuotientPresentation(1, std::move(rows),
                              GeneratorInfo{"cantor-interval", {{"horizon", horizon}}});
}

QuotientPresentation make_example(const std::string& name, int horizon,
                                  const nlohmann::json& params) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  if (name == "point") return point_example(horizon);
  if (name == "convseq") return convseq_example(horizon);
  if (name == "cantor-interval") return cantor_interval_example(horizon);
  if (name == "fan") {
    int blocks = params.value("blocks", 0);
    if (blocks < 0) throw std::invalid_argument("fan blocks must be nonnegative");
    return fan_example(horizon, blocks);
  }
  throw std::invalid_argument("unknown example '" + name + "'");
}

PointSpec sequence_limit(const QuotientPresentation& p, int block) {
  for (int pos = 0; pos < p.cell_count(block); ++pos)
    if (p.block_of(block, pos) == block) return {block, p.cell(block, pos).id, {}, {1}};
  throw std::invalid_argument("block has no birth cell");
}

PointSpec sequence_point(const QuotientPresentation& p, int block, int n) {
  if (n < 1) throw std::invalid_argument("sequence points are numbered from 1");
  PointSpec y = sequence_limit(p, block);
  y.prefix.assign(static_cast<std::size_t>(n - 1), 1);
  y.prefix.push_back(0);
  y.cycle = {0};
  return y;
}

PointSpec dyadic_point(int a, int bits, bool from_left) {
  const int n = 1 << bits;
  if (a < 0 || a > n || (from_left && a == 0) || (!from_left && a == n))
    throw std::invalid_argument("no such one-sided dyadic point");
  const int cell = from_left ? a - 1 : a;
  PointSpec y{1, 0, {}, {from_left ? 1 : 0}};
  for (int b = bits - 1; b >= 0; --b) y.prefix.push_back((cell >> b) & 1);
  return y;
}

std::vector<PointSpec> glued_points(const QuotientPresentation& p, int count) {
  std::vector<PointSpec> out;
  for (int b = 1; b <= std::min(count, p.block_count()); ++b) out.push_back(sequence_limit(p, b));
  return out;
}

std::vector<PointSpec> example_sample(const std::string& name, const QuotientPresentation& p) {
  std::vector<PointSpec> out;
  if (name == "point") {
    for (int c = 1; c <= 2; ++c)
      for (int a = 0; a <= 5; ++a)
        out.push_back({1, 0, std::vector<int>(static_cast<std::size_t>(a), 0),
                       std::vector<int>(static_cast<std::size_t>(c), 0)});
  } else if (name == "convseq") {
    for (int b = 1; b <= 2; ++b) {
      PointSpec limit = sequence_limit(p, b);
      out.push_back(limit);
      out.push_back({b, limit.root, {1}, {1, 1}});
      for (int n = 1; n <= 4; ++n) out.push_back(sequence_point(p, b, n));
    }
  } else if (name == "cantor-interval") {
    for (int a = 0; a <= 8; ++a) {
      if (a > 0) out.push_back(dyadic_point(a, 3, true));
      if (a < 8) out.push_back(dyadic_point(a, 3, false));
    }
    out.push_back({1, 0, {0, 0}, {0}});
  } else if (name == "fan") {
    out = glued_points(p, 4);
    for (int b = 1; b <= 3; ++b)
      for (int n = 1; n <= 3; ++n) out.push_back(sequence_point(p, b, n));
  } else {
    throw std::invalid_argument("unknown example '" + name + "'");
  }
  return out;
}

}  // namespace bratteli
