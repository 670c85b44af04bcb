#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "bratteli/analysis.hpp"
#include "bratteli/examples.hpp"
#include "oracles.hpp"

using namespace bratteli;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Result {
  bool pass = true;
  std::ostringstream detail;
};

int failures = 0;

void report(int n, const std::string& title, Result& r) {
  std::cout << "criterion " << n << " [" << title << "]: " << (r.pass ? "PASS" : "FAIL") << " - "
            << r.detail.str() << std::endl;
  if (!r.pass) ++failures;
}

CentralElement random_element(std::mt19937_64& rng, int row, int width) {
  CentralElement e{row, {}};
  for (int j = 1; j <= width; ++j)
    if (rng() % 4 != 0) e.coefficients[j] = static_cast<double>(static_cast<int>(rng() % 257) - 128) / 32;
  return e;
}

void criterion1() {
  Result r;
  auto start = Clock::now();
  std::mt19937_64 rng(101);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    auto d = oracle::random_diagram(rng, 1 + static_cast<int>(rng() % 6), 6);
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d.horizon()));
    const int l = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d.horizon()));
    auto a = random_element(rng, k, d.row_size(k));
    auto b = random_element(rng, l, d.row_size(l));
    std::optional<Vertex> corner;
    if (t % 2 == 1) {
      const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(k, l)));
      corner = Vertex{m, 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d.row_size(m)))};
    }
    if (central_norm_distance(d, a, b, corner) != oracle::atom_norm(d, a, b, corner)) ++mismatches;
  }
  const double secs = seconds_since(start);
  r.pass = mismatches == 0 && secs < 5.0;
  r.detail << "200 pairs, " << mismatches << " mismatches, " << secs << " s";
  report(1, "central norm vs joint atoms", r);
}

// Uniform draw from all diagrams with <= 4 rows and <= 3 vertices per row.
struct DiagramSpace {
  std::vector<std::vector<int>> shapes;
  std::vector<double> weights;
  double total = 0;

  DiagramSpace() {
    for (int rows = 1; rows <= 4; ++rows) {
      std::vector<int> s(static_cast<std::size_t>(rows), 1);
      while (true) {
        double w = 1;
        for (std::size_t k = 0; k + 1 < s.size(); ++k) w *= std::pow(std::pow(2.0, s[k + 1]) - 1, s[k]);
        shapes.push_back(s);
        weights.push_back(w);
        total += w;
        std::size_t i = 0;
        while (i < s.size() && s[i] == 3) s[i++] = 1;
        if (i == s.size()) break;
        ++s[i];
      }
    }
  }

  BratteliDiagram draw(std::mt19937_64& rng) const {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const auto& s = shapes[pick(rng)];
    std::vector<Edge> edges;
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
      for (int j = 1; j <= s[k]; ++j) {
        const std::uint64_t pattern = 1 + rng() % ((std::uint64_t{1} << s[k + 1]) - 1);
        for (int h = 1; h <= s[k + 1]; ++h)
          if (pattern >> (h - 1) & 1)
            edges.push_back({{static_cast<int>(k) + 1, j}, {static_cast<int>(k) + 2, h}});
      }
    return BratteliDiagram(s, edges);
  }
};

void criterion2() {
  Result r;
  auto start = Clock::now();
  DiagramSpace space;
  std::mt19937_64 rng(202);
  const bool sample = space.total > 1e5;
  const int count = sample ? 500 : 0;
  int disagreements = 0, checks = 0;
  for (int t = 0; t < count; ++t) {
    auto d = space.draw(rng);
    const int H = d.horizon();
    auto ideals = oracle::all_ideals(d);
    std::vector<IdealSubdiagram> objs;
    for (auto m : ideals) {
      IdealSubdiagram x{VertexSet(d), H};
      for (int id = 0; id < d.vertex_count(); ++id)
        if (m >> id & 1) x.members.insert(d.vertex(id));
      objs.push_back(x);
    }
    for (std::size_t a = 0; a < ideals.size(); ++a)
      for (std::size_t b = a; b < ideals.size(); ++b) {
        auto [meet, join] = meet_join(d, objs[a], objs[b]);
        oracle::Mask want_join = ~oracle::Mask{0};
        for (auto m : ideals)
          if (((ideals[a] | ideals[b]) & ~m) == 0 && (m & ~want_join) == 0) want_join = m;
        ++checks;
        if (oracle::to_mask(d, meet.members) != (ideals[a] & ideals[b]) ||
            oracle::to_mask(d, join.members) != want_join)
          ++disagreements;
      }
    for (const auto& atom : oracle::atoms(d, H)) {
      PathSeq p{atom, {}};
      oracle::Mask path = 0;
      for (auto v : atom) path |= oracle::Mask{1} << d.id(v);
      oracle::Mask best = 0;
      bool found = false;
      for (auto m : ideals) {
        if (m & path) continue;
        bool top = true;
        for (auto x : ideals)
          if (!(x & path) && (x & ~m)) top = false;
        if (top) best = m, found = true;
      }
      ++checks;
      if (!found || oracle::to_mask(d, largest_ideal_avoiding_path(d, p, H).members) != best) ++disagreements;
    }
  }
  const double secs = seconds_since(start);
  r.pass = disagreements == 0 && secs < 60.0;
  r.detail << "space " << space.total << " diagrams, " << count << " sampled, " << checks << " checks, "
           << disagreements << " disagreements, " << secs << " s";
  report(2, "ideal lattice vs exhaustive enumeration", r);
}

void criterion3() {
  Result r;
  int violations = 0, lambdas = 0;
  for (const auto& name : example_names()) {
    const int H = 12;
    auto p = make_example(name, H);
    auto c = construct(p, H);
    const auto& d = c.diagram;
    for (int k = 1; k <= H; ++k)
      for (int j = 1; j <= d.row_size(k); ++j) {
        const bool root = c.table.r(k, k - 1) < j && j <= c.table.r(k, k);
        if (d.parents({k, j}).empty() != root) ++violations;
        if (j > 1 && k > 1) {
          const int pos = c.cell_position({k, j}), prev = c.cell_position({k, j - 1});
          const int b = p.block_of(k, pos);
          if (b < k && p.block_of(k, prev) == b &&
              c.table.index_of(k - 1, *p.parent(k, prev)) > c.table.index_of(k - 1, *p.parent(k, pos)))
            ++violations;
        }
        const int pos = c.cell_position({k, j});
        if (auto par = p.parent(k, pos); par && !d.has_edge(c.vertex_of(k - 1, *par), {k, j})) ++violations;
      }
    const int blocks = std::min(p.block_count(), H);
    std::vector<VertexSet> dn;
    for (int n = 1; n <= blocks; ++n) {
      dn.push_back(block_vertices(c, n));
      if (!is_ideal_subdiagram(d, dn.back(), H)) ++violations;
    }
    for (const auto& path : enumerate_primitive_paths(d, 3)) {
      ++lambdas;
      auto lam = largest_ideal_avoiding_path(d, path, H);
      for (const auto& bn : dn) {
        const int norm = block_unit_quotient_norm(bn, lam);
        if (norm != 0 && norm != 1) ++violations;
        if ((norm == 1) != !bn.subset_of(lam.members)) ++violations;
        if ((norm == 1) != complement_has_sequence_in(d, lam, bn)) ++violations;
      }
    }
  }
  r.pass = violations == 0;
  r.detail << "4 examples at H=12, " << lambdas << " primitive ideals, " << violations << " violations";
  report(3, "construction invariants", r);
}

void criterion4() {
  Result r;
  for (const auto& name : example_names()) {
    auto start = Clock::now();
    auto c = construct(make_example(name, 12), 12);
    auto psi = psi_check(c, example_sample(name, c.presentation));
    const double secs = seconds_since(start);
    const auto pairs = psi.pairs.size();
    const bool ok = pairs >= 50 && psi.contradictions == 0 && psi.partition_conflicts == 0 &&
                    10 * psi.unknown_pairs <= static_cast<int>(pairs) && psi.surjectivity_failures == 0 &&
                    psi.surjectivity_unknown == 0 && secs < 60.0;
    r.pass = r.pass && ok;
    r.detail << name << ": " << pairs << " pairs, " << psi.contradictions << " contradictions, "
             << psi.unknown_pairs << " unknown, classes " << psi.touch_classes.classes.size() << "/"
             << psi.glimm.partition.size() << ", surjectivity " << psi.surjectivity.size() - static_cast<std::size_t>(psi.surjectivity_failures)
             << "/" << psi.surjectivity.size() << ", " << secs << " s; ";
  }
  report(4, "psi bijection surrogate", r);
}

void criterion5() {
  Result r;
  int total_violations = 0, chained = 0, mismatches = 0;
  for (const auto& name : example_names()) {
    auto c = construct(make_example(name, 12), 12);
    const auto& p = c.presentation;
    std::mt19937_64 rng(1);
    int violations = 0;
    for (int t = 0; t < 100; ++t) {
      const int depth = 1 + static_cast<int>(rng() % 10);
      const std::uint64_t seed = rng();
      auto g = name == "cantor-interval"
                   ? interval_pl_function(p, depth, random_dyadic_values((std::size_t{1} << (depth - 1)) + 1, seed))
                   : random_compatible_function(p, depth, seed);
      auto ca = central_approximation(c, g);
      const int m = 1 + static_cast<int>(rng() % 8);
      const int k = m + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(9 - m));
      const int l = k + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(10 - k));
      const int i = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(c.diagram.row_size(m)));
      auto chk = verify_strict_cauchy(c, ca, m, i, k, l);
      const double lhs = oracle::atom_norm(c.diagram, ca.a[static_cast<std::size_t>(k - 1)],
                                           ca.a[static_cast<std::size_t>(l - 1)], Vertex{m, i});
      const double rhs = oracle::eta(p, g, k, m) + oracle::eta(p, g, l, m);
      if (lhs != chk.lhs || rhs != chk.rhs) ++mismatches;
      if (lhs > rhs) ++violations;
      if (lhs > 3 * oracle::eta(p, g, k, m) + oracle::eta(p, g, l, m)) ++chained;
    }
    total_violations += violations;
    r.detail << name << " " << violations << "/100; ";
  }
  r.pass = total_violations == 0 && mismatches == 0;
  r.detail << "violations " << total_violations << ", oracle mismatches " << mismatches
           << ", chained-bound violations " << chained;
  report(5, "strict Cauchy estimate", r);
}

void criterion6() {
  Result r;
  const int H = 12;
  auto c = construct(make_example("cantor-interval", H), H);
  const auto& p = c.presentation;
  std::vector<IdealSubdiagram> ideals;
  for (const auto& y : example_sample("cantor-interval", p)) ideals.push_back(varphi(c, y, H));
  for (const auto& path : enumerate_primitive_paths(c.diagram, 3))
    ideals.push_back(largest_ideal_avoiding_path(c.diagram, path, H));
  int checked = 0, violations = 0, unknown = 0;
  double worst = 0;
  for (int depth = 1; depth <= 5; ++depth)
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto g = interval_step_function(p, depth, random_dyadic_values(std::size_t{1} << (depth - 1), seed * 31 + depth));
      for (const auto& lam : ideals)
        for (int e = 1; e <= 5; ++e) {
          const double eps = std::ldexp(1.0, -e);
          auto h = verify_h_equals_gtilde(c, g, lam, eps);
          ++checked;
          if (h.status == Verdict::Unknown) {
            ++unknown;
            continue;
          }
          worst = std::max(worst, std::abs(h.h - h.gtilde) / eps);
          if (h.status == Verdict::No || !(std::abs(h.h - h.gtilde) < 3 * eps)) ++violations;
        }
    }
  r.pass = violations == 0 && unknown == 0;
  r.detail << ideals.size() << " primitive ideals, " << checked << " checks, " << violations << " violations, "
           << unknown << " unknown, max |h - g~|/eps " << worst;
  report(6, "h equals g~ bound", r);
}

void criterion7() {
  Result r;
  const int H = 12;
  try {
    for (const char* name : {"convseq", "cantor-interval"}) {
      auto p = make_example(name, H);
      auto s = locally_compact_set(p, example_sample(name, p), H);
      const bool all = s.locally_compact.size() == s.witnesses.size();
      r.pass = r.pass && all && s.openness_violations.empty();
      r.detail << name << " LC " << s.locally_compact.size() << "/" << s.witnesses.size() << "; ";
    }
    auto fan = make_example("fan", H);
    int glued_ok = 0;
    auto glued = glued_points(fan, 4);
    for (const auto& x : glued) {
      auto w = classify_point(fan, x, H);
      if (w.verdict == Locality::NotLocallyCompact && w.failure && !w.failure->points.empty()) ++glued_ok;
    }
    r.pass = r.pass && glued_ok == static_cast<int>(glued.size());
    r.detail << "fan glued NLC with rule " << glued_ok << "/" << glued.size() << "; ";
    auto ci = make_example("cantor-interval", H);
    auto baire = baire_report(ci, example_sample("cantor-interval", ci), H);
    r.pass = r.pass && baire.verdict == BaireVerdict::Dense;
    r.detail << "interval baire: " << to_string(baire.verdict) << "; no point holds both witnesses";
  } catch (const std::logic_error& e) {
    r.pass = false;
    r.detail << "both witnesses: " << e.what();
  }
  report(7, "local compactness classification", r);
}

std::string slurp(const std::filesystem::path& f) {
  std::ifstream in(f, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion8(const char* cli) {
  Result r;
  if (!cli) {
    r.pass = false;
    r.detail << "no CLI path given";
    report(8, "determinism", r);
    return;
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("bratteli-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int runs = 0, differing = 0;
  const std::vector<std::string> commands{"glimm --seed 7", "classify", "baire", "construct --format json",
                                          "ideals"};
  for (const auto& name : example_names())
    for (const auto& cmd : commands) {
      std::string out[2];
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path file = dir / ("run" + std::to_string(rep) + ".json");
        const std::string line = std::string("\"") + cli + "\" --example " + name + " --horizon 10 " + cmd +
                                 " > \"" + file.string() + "\" 2>/dev/null";
        [[maybe_unused]] int rc = std::system(line.c_str());
        out[rep] = slurp(file);
      }
      ++runs;
      if (out[0] != out[1] || out[0].empty()) ++differing;
    }
  fs::remove_all(dir);
  r.pass = differing == 0;
  r.detail << runs << " report pairs, " << differing << " differ";
  report(8, "determinism", r);
}

}  // namespace

int main(int argc, char** argv) {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8(argc > 1 ? argv[1] : nullptr);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
