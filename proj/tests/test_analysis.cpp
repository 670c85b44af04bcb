#include "bratteli/analysis.hpp"
#include "bratteli/examples.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bratteli;

namespace {

// Every cell of the neighbourhood lies under some cover cell.
bool covered(const QuotientPresentation& p, const CompactWitness& w) {
  for (auto [row, pos] : w.neighbourhood) {
    bool inside = false;
    for (auto [urow, upos] : w.cover)
      inside = inside || (row >= urow && p.block_of(row, pos) == p.block_of(urow, upos) &&
                          oracle::climb(p, row, pos, urow) == upos);
    if (!inside) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("isolated point") {
  auto p = make_example("point", 8);
  auto w = classify_point(p, {1, 0, {}, {0}}, 8);
  CHECK(w.verdict == Locality::LocallyCompact);
  REQUIRE(w.compact);
  CHECK(w.compact->n0 == 1);
  auto s = locally_compact_set(p, {{1, 0, {}, {0}}}, 8);
  CHECK(s.locally_compact == std::vector<int>{0});
  CHECK(baire_report(p, {{1, 0, {}, {0}}}, 8).verdict == BaireVerdict::Dense);
}

TEST_CASE("interval points are locally compact") {
  auto p = make_example("cantor-interval", 12);
  auto sample = example_sample("cantor-interval", p);
  auto s = locally_compact_set(p, sample, 12);
  CHECK(s.locally_compact.size() == sample.size());
  CHECK(s.openness_violations.empty());
  for (const auto& w : s.witnesses) {
    REQUIRE(w.compact);
    CHECK(covered(p, *w.compact));
    CHECK_FALSE(w.failure);
  }
  CHECK(baire_report(p, sample, 12).verdict == BaireVerdict::Dense);
}

TEST_CASE("glued point of the fan escapes every cover") {
  const int H = 20;
  auto p = make_example("fan", H);
  auto x = sequence_limit(p, 1);
  auto w = classify_point(p, x, H);
  CHECK(w.verdict == Locality::NotLocallyCompact);
  REQUIRE(w.failure);
  CHECK_FALSE(w.compact);
  CHECK(w.failure->last_n == H - 3);
  CHECK(w.failure->last_n - w.failure->first_n + 1 >= 5);
  CHECK(w.failure->rule.block_offset == 1);
  CHECK(w.failure->rule.row_offset == 2);
  // Oracle: the first point of the (n+1)-th sequence, born two rows later.
  for (int n = w.failure->first_n; n <= w.failure->last_n; ++n)
    CHECK(w.failure->points[static_cast<std::size_t>(n - w.failure->first_n)] == sequence_point(p, n + 1, 1));
}

TEST_CASE("fan sample split") {
  auto p = make_example("fan", 16);
  auto sample = example_sample("fan", p);
  auto s = locally_compact_set(p, sample, 16);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const bool glued = sample[i].prefix.empty();
    CHECK(s.witnesses[i].verdict == (glued ? Locality::NotLocallyCompact : Locality::LocallyCompact));
  }
  CHECK(s.openness_violations.empty());
}

TEST_CASE("verdicts are stable in the horizon") {
  for (const char* name : {"convseq", "fan"}) {
    std::vector<std::optional<Locality>> seen;
    for (int H = 10; H <= 16; ++H) {
      auto p = make_example(name, H);
      auto sample = example_sample(name, make_example(name, 10));
      seen.resize(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i) {
        auto v = classify_point(p, sample[i], H).verdict;
        if (v == Locality::Unknown) continue;
        if (seen[i]) CHECK(*seen[i] == v);
        seen[i] = v;
      }
    }
  }
}

TEST_CASE("baire report on glued points only") {
  auto p = make_example("fan", 12);
  auto r = baire_report(p, glued_points(p, 4), 12, 1);
  CHECK(r.verdict == BaireVerdict::Misses);
  REQUIRE(r.witness);
  CHECK_FALSE(r.opens[static_cast<std::size_t>(*r.witness)].has_locally_compact);
  auto j = to_json(r, p);
  CHECK(j["verdict"] == "S misses open set");
}

TEST_CASE("exhaustion scheme shape") {
  auto p = make_example("convseq", 8);
  auto scheme = exhaustion_scheme(p, sequence_limit(p, 1), 8);
  REQUIRE(scheme.stages.size() == 8);
  for (const auto& st : scheme.stages) {
    for (auto [row, pos] : st.cover) CHECK(row == p.block_of(row, pos));
    for (auto [row, pos] : st.neighbourhood) CHECK((row == st.n || row == p.block_of(row, pos)));
  }
}
