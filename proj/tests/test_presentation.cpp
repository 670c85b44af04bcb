#include <cmath>
#include <map>
#include <random>
#include <set>

#include "bratteli/examples.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bratteli;

namespace {

QuotientPresentation single_chain(int rows) {
  std::vector<PresentationRow> out;
  for (int k = 1; k <= rows; ++k)
    out.push_back({k, {{0, 1, k == 1 ? std::nullopt : std::optional<int>(0)}}, {}});
  return QuotientPresentation(1, out);
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const PresentationViolation& v) { return v.rule == rule; });
}

// Cell index of a one-sided dyadic point on row k of the interval example.
long interval_cell(int a, int bits, bool from_left, int k) {
  const long scaled = static_cast<long>(a) << (k - 1);
  const long q = scaled >> bits;
  const bool exact = (scaled & ((1L << bits) - 1)) == 0;
  return from_left && exact ? q - 1 : q;
}

SampledSpace cloud(const std::vector<double>& xs) {
  SampledSpace s;
  s.blocks.emplace_back();
  for (std::size_t i = 0; i < xs.size(); ++i) s.blocks[0].push_back({std::to_string(i), {xs[i]}});
  s.schedule = {1};
  return s;
}

}  // namespace

TEST_CASE("validation examples") {
  CHECK(validate(single_chain(5)).ok());

  std::vector<PresentationRow> rows{{1, {{0, 1, std::nullopt}, {1, 1, std::nullopt}}, {}},
                                    {2, {{0, 1, 0}}, {}},
                                    {3, {{0, 1, 0}}, {}}};
  auto missing = validate(QuotientPresentation(1, rows));
  CHECK(has_rule(missing, "partition"));

  std::vector<PresentationRow> lonely{{1, {{0, 1, std::nullopt}, {1, 1, std::nullopt}}, {{0, 1}}},
                                      {2, {{0, 1, 0}, {1, 1, 1}}, {}}};
  CHECK(has_rule(validate(QuotientPresentation(1, lonely)), "downward-coherence"));

  std::vector<PresentationRow> upward{{1, {{0, 1, std::nullopt}, {1, 1, std::nullopt}}, {}},
                                      {2, {{0, 1, 0}, {1, 1, 1}}, {{0, 1}}}};
  CHECK(has_rule(validate(QuotientPresentation(1, upward)), "upward-coherence"));

  CHECK_THROWS_AS(QuotientPresentation(1, {{2, {{0, 1, std::nullopt}}, {}}}), std::invalid_argument);
  CHECK_THROWS_AS(QuotientPresentation(1, {{1, {{0, 1, std::nullopt}, {0, 1, std::nullopt}}, {}}}),
                  std::invalid_argument);
}

TEST_CASE("builtin examples validate") {
  for (const auto& name : example_names()) CHECK(validate(make_example(name, 10)).ok());
}

TEST_CASE("ingestion of one point") {
  SampledSpace s;
  s.blocks = {{{"x", {0.3, -2.0}}}};
  auto r = build_from_samples(s, 6);
  for (int k = 1; k <= 6; ++k) CHECK(r.presentation.cell_count(k) == 1);
  CHECK(validate(r.presentation).ok());
}

TEST_CASE("ingestion of two points splits at once") {
  auto r = build_from_samples(cloud({0.0, 1.0}), 4);
  for (int k = 1; k <= 4; ++k) CHECK(r.presentation.cell_count(k) == 2);
  CHECK_FALSE(r.presentation.touch(1, 0, 1));
}

TEST_CASE("ingestion of a dyadic cloud follows dyadic intervals") {
  std::vector<double> xs;
  for (int i = 15; i >= 0; --i) xs.push_back(i / 16.0);
  auto r = build_from_samples(cloud(xs), 6);
  CHECK(validate(r.presentation).ok());
  for (int k = 1; k <= 6; ++k) {
    std::map<long, std::set<int>> expected;
    for (int i = 0; i < 16; ++i) expected[static_cast<long>(std::floor(xs[static_cast<std::size_t>(i)] * std::ldexp(1.0, k)))].insert(i);
    std::set<std::set<int>> got, want;
    for (const auto& [key, members] : expected) want.insert(members);
    for (const auto& cell : r.members[static_cast<std::size_t>(k - 1)]) {
      std::set<int> m;
      for (auto [b, i] : cell) m.insert(i);
      got.insert(m);
    }
    CHECK(got == want);
  }
}

TEST_CASE("ingestion errors") {
  SampledSpace empty;
  empty.blocks = {{}};
  CHECK_THROWS_AS(build_from_samples(empty, 3), std::invalid_argument);
  SampledSpace ragged;
  ragged.blocks = {{{"a", {0.0}}, {"b", {0.0, 1.0}}}};
  CHECK_THROWS_AS(build_from_samples(ragged, 3), std::invalid_argument);
  SampledSpace shrinking;
  shrinking.blocks = {{{"a", {0.0, 1.0}}}};
  shrinking.schedule = {2, 1};
  CHECK_THROWS_AS(build_from_samples(shrinking, 3), std::invalid_argument);
}

TEST_CASE("ingestion is sound on random sampled spaces") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    SampledSpace s;
    const int blocks = 1 + static_cast<int>(rng() % 3);
    const int functions = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < blocks; ++b) {
      s.blocks.emplace_back();
      const int n = 1 + static_cast<int>(rng() % 8);
      for (int i = 0; i < n; ++i) {
        SamplePoint pt{std::string(1, static_cast<char>('a' + rng() % 10)), {}};
        for (int f = 0; f < functions; ++f) pt.values.push_back(static_cast<double>(rng() % 65) / 64);
        s.blocks.back().push_back(pt);
      }
    }
    auto r = build_from_samples(s, 7);
    CHECK(validate(r.presentation).ok());
    CHECK(validate(presentation_from_json(to_json(r.presentation))).ok());
  }
}

TEST_CASE("persistent touch on the interval example") {
  auto p = make_example("cantor-interval", 12);
  auto half_left = dyadic_point(4, 3, true);
  auto half_right = dyadic_point(4, 3, false);
  CHECK(persistent_touch(p, half_left, half_left, 12).kind == TouchKind::Identified);
  CHECK(persistent_touch(p, half_left, half_right, 12).kind == TouchKind::Identified);

  // Oracle: first row on which the cells are neither equal nor adjacent.
  for (bool l1 : {true, false})
    for (bool l2 : {true, false}) {
      auto a = dyadic_point(2, 3, l1), b = dyadic_point(6, 3, l2);
      int first = 0;
      for (int k = 1; k <= 12 && first == 0; ++k)
        if (std::abs(interval_cell(2, 3, l1, k) - interval_cell(6, 3, l2, k)) > 1) first = k;
      auto v = persistent_touch(p, a, b, 12);
      CHECK(v.kind == TouchKind::Separated);
      CHECK(v.row == first);
    }
}

TEST_CASE("point classes") {
  auto p = make_example("cantor-interval", 12);
  auto sample = example_sample("cantor-interval", p);
  REQUIRE(sample.size() == 17);
  auto classes = point_classes(p, sample, 12);
  CHECK(classes.classes.size() == 9);
  CHECK(classes.unknown_pairs.empty());

  auto one = make_example("point", 8);
  auto same = point_classes(one, {{1, 0, {}, {0}}, {1, 0, {0}, {0}}, {1, 0, {0, 0}, {0}}}, 8);
  CHECK(same.classes.size() == 1);

  std::vector<PresentationRow> rows;
  for (int k = 1; k <= 6; ++k) {
    PresentationRow r{k, {}, {}};
    for (int i = 0; i < 3; ++i) r.cells.push_back({i, 1, k == 1 ? std::nullopt : std::optional<int>(i)});
    rows.push_back(r);
  }
  QuotientPresentation isolated(1, rows);
  auto apart = point_classes(isolated, {{1, 0, {}, {0}}, {1, 1, {}, {0}}, {1, 2, {}, {0}}}, 6);
  CHECK(apart.classes.size() == 3);
}

TEST_CASE("persistent touch properties") {
  auto p = make_example("cantor-interval", 14);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const int bits = 1 + static_cast<int>(rng() % 4);
    const int n = 1 << bits;
    auto pick = [&] {
      bool left = rng() % 2;
      int a = left ? 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n))
                   : static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      return dyadic_point(a, bits, left);
    };
    auto a = pick(), b = pick();
    auto ab = persistent_touch(p, a, b, 14), ba = persistent_touch(p, b, a, 14);
    CHECK(ab.kind == ba.kind);
    CHECK(ab.row == ba.row);
    CHECK(persistent_touch(p, a, a, 14).kind == TouchKind::Identified);
    if (ab.kind == TouchKind::Separated)
      for (int H = ab.row; H <= 14; ++H) CHECK(persistent_touch(p, a, b, H).kind == TouchKind::Separated);
    // Touch along the paths only shrinks with the row.
    auto ca = cell_path(p, a, 14), cb = cell_path(p, b, 14);
    for (int k = 2; k <= 14; ++k)
      if (p.touch(k, ca[static_cast<std::size_t>(k - 1)], cb[static_cast<std::size_t>(k - 1)]))
        CHECK(p.touch(k - 1, ca[static_cast<std::size_t>(k - 2)], cb[static_cast<std::size_t>(k - 2)]));
  }
}

TEST_CASE("json round trips") {
  auto p = make_example("fan", 6);
  auto q = presentation_from_json(to_json(p));
  CHECK(to_json(q) == to_json(p));
  PointSpec y{2, 3, {1, -1}, {0, 1}};
  CHECK(point_from_json(to_json(y)) == y);
  CHECK(tail_start_row(y) == 5);
  CHECK(certification_rows(2, 3, 3) == 14);
  CHECK(certification_rows(1, 1, 5) == 5);
}
