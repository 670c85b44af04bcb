#include <cmath>
#include <random>

#include "bratteli/examples.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bratteli;

namespace {

QuotientPresentation disjoint_blocks(int n, int rows) {
  std::vector<PresentationRow> out;
  for (int k = 1; k <= rows; ++k) {
    PresentationRow r{k, {}, {}};
    for (int b = 1; b <= std::min(k, n); ++b)
      r.cells.push_back({b, b, b == k ? std::nullopt : std::optional<int>(b)});
    out.push_back(r);
  }
  return QuotientPresentation(n, out);
}

}  // namespace

TEST_CASE("glimm equivalence examples") {
  auto c = construct(make_example("cantor-interval", 12), 12);
  auto half = prim_path(c, dyadic_point(4, 3, true), 12);
  CHECK(glimm_equiv(c, half, half).kind == GlimmKind::Equivalent);
  auto other = prim_path(c, dyadic_point(4, 3, false), 12);
  auto v = glimm_equiv(c, half, other);
  CHECK(v.kind == GlimmKind::Equivalent);
  CHECK(v.chain.size() == 2);
  CHECK(persistent_touch(c.presentation, dyadic_point(4, 3, true), dyadic_point(4, 3, false), 12).kind ==
        TouchKind::Identified);

  auto d = construct(disjoint_blocks(2, 8), 8);
  auto w = glimm_equiv(d, prim_path(d, PointSpec{1, 1, {}, {0}}, 8), prim_path(d, PointSpec{2, 2, {}, {0}}, 8));
  CHECK(w.kind == GlimmKind::Distinct);
  REQUIRE(w.witness);
  CHECK(w.witness->radius == 0);
  CHECK(w.witness->value1 != w.witness->value2);
}

TEST_CASE("gtilde examples") {
  auto c = construct(make_example("convseq", 10), 10);
  auto g = constant_function(c.presentation, 3, 0.375);
  for (const auto& y : example_sample("convseq", c.presentation))
    CHECK(gtilde(c, g, varphi(c, y, 10)).value == 0.375);

  auto d = construct(disjoint_blocks(2, 8), 8);
  auto ind = block_indicator(d.presentation, 2, 1);
  auto lam = varphi(d, PointSpec{1, 1, {}, {0}}, 8);
  CHECK(lam.members == block_vertices(d, 1).complement());
  CHECK(gtilde(d, ind, lam).value == 1.0);

  auto ci = construct(make_example("cantor-interval", 12), 12);
  std::vector<double> steps{0.25, -0.5, 0.75, 1.0};
  auto step = interval_step_function(ci.presentation, 3, steps);
  auto r = gtilde(ci, step, varphi(ci, dyadic_point(4, 3, true), 12));
  REQUIRE(r.value);
  CHECK(*r.value == -0.5);  // the depth-3 cell [1/4, 1/2]
}

TEST_CASE("central approximation") {
  auto c = construct(make_example("fan", 8), 8);
  auto g = constant_function(c.presentation, 2, -0.5);
  auto ca = central_approximation(c, g);
  for (int k = 1; k <= 8; ++k) {
    for (auto [j, a] : ca.a[static_cast<std::size_t>(k - 1)].coefficients) CHECK(a == -0.5);
    for (int n = 0; n <= ca.blocks; ++n) CHECK(ca.eta_at(k, n) == 0.0);
  }

  auto ci = construct(make_example("cantor-interval", 10), 10);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const int depth = 1 + static_cast<int>(rng() % 6);
    auto h = interval_pl_function(ci.presentation, depth, random_dyadic_values((std::size_t{1} << (depth - 1)) + 1, rng()));
    auto cah = central_approximation(ci, h);
    for (int k = 1; k <= 10; ++k) {
      CHECK(cah.eta_at(k, 1) == oracle::eta(ci.presentation, h, k, 1));
      for (auto [j, a] : cah.a[static_cast<std::size_t>(k - 1)].coefficients) CHECK(std::abs(a) <= h.bound);
    }
  }
}

TEST_CASE("strict cauchy trivial cases") {
  auto c = construct(make_example("convseq", 10), 10);
  auto ca = central_approximation(c, constant_function(c.presentation, 4, 2.0));
  auto chk = verify_strict_cauchy(c, ca, 1, 1, 3, 7);
  CHECK(chk.lhs == 0.0);
  CHECK(chk.rhs == 0.0);
  CHECK(chk.holds);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int depth = 1 + static_cast<int>(seed % 4);
    auto g = random_compatible_function(c.presentation, depth, seed);
    auto cg = central_approximation(c, g);
    for (int m = 1; m < depth + 1; ++m)
      for (int i = 1; i <= c.diagram.row_size(m); ++i)
        CHECK(verify_strict_cauchy(c, cg, m, i, depth + 1, depth + 3).lhs == 0.0);
  }
  CHECK_THROWS_AS(verify_strict_cauchy(c, ca, 3, 1, 3, 5), std::domain_error);
}

TEST_CASE("strict cauchy bound can fail on glued sequences") {
  // Descendants of a vertex need not share a quotient point with it when
  // touch is not transitive; the chained bound 3 eta_k + eta_l still holds.
  auto c = construct(make_example("convseq", 10), 10);
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto g = random_compatible_function(c.presentation, 1 + static_cast<int>(seed % 10), seed);
    auto ca = central_approximation(c, g);
    for (int m = 1; m <= 3; ++m)
      for (int i = 1; i <= c.diagram.row_size(m); ++i) {
        auto chk = verify_strict_cauchy(c, ca, m, i, m + 3, m + 6);
        CHECK(chk.lhs == oracle::atom_norm(c.diagram, ca.a[static_cast<std::size_t>(m + 2)],
                                           ca.a[static_cast<std::size_t>(m + 5)], Vertex{m, i}));
        CHECK(chk.chained_holds);
        if (!chk.holds) {
          ++violations;
          CHECK(chk.pairs_without_touch > 0);
        }
      }
  }
  CHECK(violations > 0);
}

TEST_CASE("h check") {
  auto c = construct(make_example("cantor-interval", 12), 12);
  auto g = constant_function(c.presentation, 2, 0.5);
  for (int e = 1; e <= 5; ++e) {
    auto h = verify_h_equals_gtilde(c, g, varphi(c, dyadic_point(3, 3, true), 12), std::ldexp(1.0, -e));
    CHECK(h.status == Verdict::Yes);
    CHECK(h.h == h.gtilde);
  }
  std::vector<double> steps{0.0, 0.25, -0.25, 0.5, 1.0, -1.0, 0.75, 0.125};
  auto step = interval_step_function(c.presentation, 4, steps);
  for (int a = 1; a <= 8; ++a) {
    auto h = verify_h_equals_gtilde(c, step, varphi(c, dyadic_point(a, 3, true), 12), 0.125);
    CHECK(h.status == Verdict::Yes);
    CHECK(h.s <= 4);
    CHECK(std::abs(h.h - h.gtilde) < 3 * 0.125);
    CHECK(h.containment_failures == 0);
  }
}

TEST_CASE("psi check examples") {
  auto one = construct(make_example("point", 10), 10);
  auto r1 = psi_check(one, {{1, 0, {}, {0}}, {1, 0, {0}, {0}}});
  CHECK(r1.pass());
  CHECK(r1.glimm.partition.size() == 1);
  CHECK(r1.touch_classes.classes.size() == 1);

  auto two = construct(disjoint_blocks(2, 10), 10);
  auto r2 = psi_check(two, {{1, 1, {}, {0}}, {2, 2, {}, {0}}});
  CHECK(r2.pass());
  CHECK(r2.glimm.partition.size() == 2);

  auto ci = construct(make_example("cantor-interval", 12), 12);
  auto r3 = psi_check(ci, example_sample("cantor-interval", ci.presentation));
  CHECK(r3.pass());
  CHECK(r3.partitions_match);
  CHECK(r3.glimm.partition.size() == 9);
  CHECK(r3.contradictions == 0);
}

TEST_CASE("identified points are glimm equivalent and gtilde is constant on classes") {
  for (const auto& name : example_names()) {
    auto c = construct(make_example(name, 12), 12);
    auto sample = example_sample(name, c.presentation);
    std::vector<PrimPath> prims;
    for (const auto& y : sample) prims.push_back(prim_path(c, y, 12));
    auto classes = glimm_classes(c, prims);
    for (std::size_t i = 0; i < sample.size(); ++i)
      for (std::size_t j = i + 1; j < sample.size(); ++j)
        if (persistent_touch(c.presentation, sample[i], sample[j], 12).kind == TouchKind::Identified)
          CHECK(glimm_equiv(c, prims[i], prims[j], prims).kind == GlimmKind::Equivalent);
    auto g = random_compatible_function(c.presentation, 3, 77);
    for (const auto& cls : classes.partition) {
      auto first = gtilde(c, g, varphi(c, sample[static_cast<std::size_t>(cls.front())], 12)).value;
      for (int i : cls) CHECK(gtilde(c, g, varphi(c, sample[static_cast<std::size_t>(i)], 12)).value == first);
    }
  }
}

TEST_CASE("cell function json") {
  auto p = make_example("fan", 5);
  auto g = random_compatible_function(p, 3, 5);
  auto back = cell_function_from_json(to_json(g));
  CHECK(to_json(back) == to_json(g));
  CHECK(touch_compatible(p, g));
  CHECK(touch_modulus(p, g) == 0.0);
}
