#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "bratteli/analysis.hpp"
#include "bratteli/construct.hpp"
#include "bratteli/examples.hpp"
#include "bratteli/glimm.hpp"
#include "bratteli/ideals.hpp"
#include "bratteli/presentation.hpp"
#include "json.hpp"

using namespace bratteli;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  int horizon = 12;
  int depth = 2;
  int window = 3;
  std::string input;
  std::string example;
  std::string points;
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  bool timing = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

bool is_diagram_json(const json& j) { return j.contains("edges"); }

QuotientPresentation load_presentation(const Options& o) {
  if (!o.example.empty()) return make_example(o.example, o.horizon);
  if (o.input.empty()) throw UsageError("need --input or --example");
  json j = read_json(o.input);
  if (is_diagram_json(j)) throw UsageError(o.input + ": expected a presentation, found a diagram");
  return presentation_from_json(j);
}

std::vector<PointSpec> load_sample(const Options& o, const QuotientPresentation& p) {
  if (!o.points.empty()) {
    std::vector<PointSpec> out;
    for (const auto& y : read_json(o.points)) out.push_back(point_from_json(y));
    return out;
  }
  if (!o.example.empty()) return example_sample(o.example, p);
  std::vector<PointSpec> out;
  const int row = std::min(2, p.horizon());
  for (int pos = 0; pos < p.cell_count(row); ++pos) out.push_back(leftmost_point(p, row, pos));
  return out;
}

json header(const std::string& command, const Options& o, const QuotientPresentation* p) {
  json h{{"command", command}, {"horizon", p ? std::min(o.horizon, p->horizon()) : o.horizon}};
  if (p && p->generator()) h["generator"] = {{"name", p->generator()->name}, {"params", p->generator()->params}};
  else h["generator"] = nullptr;
  return h;
}

void write_file(const Options& o, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(o.out);
  std::ofstream f(std::filesystem::path(o.out) / name);
  if (!f) throw UsageError("cannot write " + name + " under " + o.out);
  f << text;
}

int emit(const Options& o, const std::string& command, json report, bool ok) {
  if (!report.contains("unknown")) report["unknown"] = json::array();
  report["status"] = ok ? "pass" : "fail";
  std::string text = report.dump(2) + "\n";
  if (!o.out.empty()) write_file(o, command + ".json", text);
  std::cout << text;
  return ok ? 0 : 1;
}

json violations_json(const ValidationReport& v) {
  json out = json::array();
  for (const auto& x : v.violations) out.push_back({{"row", x.row}, {"cells", x.cells}, {"rule", x.rule}});
  return out;
}

int cmd_validate(const Options& o) {
  auto p = load_presentation(o);
  auto v = validate(p);
  json r = header("validate", o, &p);
  r["blocks"] = p.block_count();
  r["rows"] = p.horizon();
  r["violations"] = violations_json(v);
  return emit(o, "validate", r, v.ok());
}

int cmd_ingest(const Options& o) {
  if (o.input.empty()) throw UsageError("ingest needs --input with a sampled space");
  SampledSpace s;
  try {
    s = sampled_space_from_json(read_json(o.input));
  } catch (const json::exception& e) {
    throw UsageError(o.input + ": " + e.what());
  }
  auto result = build_from_samples(s, o.depth);
  auto v = validate(result.presentation);
  json r = header("ingest", o, &result.presentation);
  r["horizon"] = o.depth;
  r["presentation"] = to_json(result.presentation);
  r["violations"] = violations_json(v);
  if (!o.out.empty()) write_file(o, "presentation.json", to_json(result.presentation).dump(2) + "\n");
  return emit(o, "ingest", r, v.ok());
}

ConstructedDiagram checked_construct(const Options& o, const QuotientPresentation& p, json& r,
                                     bool& ok) {
  auto v = validate(p);
  r["violations"] = violations_json(v);
  ok = v.ok();
  auto c = construct(p, o.horizon);
  if (auto bad = check_invariants(c.diagram)) {
    r["diagram_invariant"] = *bad;
    ok = false;
  }
  return c;
}

int cmd_construct(const Options& o) {
  auto p = load_presentation(o);
  json r = header("construct", o, &p);
  bool ok = true;
  auto c = checked_construct(o, p, r, ok);
  for (int n = 1; n <= std::min(p.block_count(), c.horizon()); ++n) {
    try {
      block_ideal(c, n);
    } catch (const std::logic_error& e) {
      r["block_ideal_failure"] = e.what();
      ok = false;
    }
  }
  const std::string format = o.format.empty() ? "dot" : o.format;
  if (!o.out.empty()) {
    write_file(o, "diagram.dot", to_dot(c.diagram));
    write_file(o, "diagram.json", to_json(c.diagram).dump(2) + "\n");
    write_file(o, "table.json", table_to_json(c).dump(2) + "\n");
  }
  if (format == "dot" && o.out.empty()) {
    std::cout << to_dot(c.diagram);
    if (!ok) std::cerr << r.dump(2) << "\n";
    return ok ? 0 : 1;
  }
  r["diagram"] = to_json(c.diagram);
  r["table"] = table_to_json(c);
  return emit(o, "construct", r, ok);
}

json ideal_record(const BratteliDiagram& d, const PathSeq& path, int H, bool& ok) {
  auto ideal = largest_ideal_avoiding_path(d, path, H);
  auto prime = is_prime_complement(d, ideal);
  auto mismatch = descendant_reading_mismatch(d, path, H);
  bool axioms = is_ideal_subdiagram(d, ideal.members, H);
  ok = ok && axioms && prime.verdict != Verdict::No;
  json rec{{"start", {path.vertices.back().row, path.vertices.back().index}},
           {"direction", path.cycle.front() == 0 ? "leftmost" : "rightmost"},
           {"size", ideal.members.size()},
           {"axioms", axioms},
           {"prime", to_string(prime.verdict)},
           {"descendant_reading_mismatch", mismatch.size()}};
  if (prime.witness)
    rec["prime_witness"] = {{prime.witness->first.row, prime.witness->first.index},
                            {prime.witness->second.row, prime.witness->second.index}};
  return rec;
}

int cmd_ideals(const Options& o) {
  bool ok = true;
  json unknown = json::array();
  if (!o.input.empty() && o.example.empty()) {
    json j = read_json(o.input);
    if (is_diagram_json(j)) {
      auto d = diagram_from_json(j);
      json r = header("ideals", o, nullptr);
      const int H = std::min(o.horizon, d.horizon());
      r["horizon"] = H;
      json list = json::array();
      for (const auto& path : enumerate_primitive_paths(d, std::min(3, H))) {
        list.push_back(ideal_record(d, path, H, ok));
        if (list.back()["prime"] == "unknown") unknown.push_back(list.back()["start"]);
      }
      r["primitive"] = list;
      r["unknown"] = unknown;
      return emit(o, "ideals", r, ok);
    }
  }
  auto p = load_presentation(o);
  json r = header("ideals", o, &p);
  auto c = checked_construct(o, p, r, ok);
  const auto& d = c.diagram;
  const int H = c.horizon();
  json blocks = json::array();
  std::vector<VertexSet> block_sets;
  for (int n = 1; n <= std::min(p.block_count(), H); ++n) {
    block_sets.push_back(block_vertices(c, n));
    bool axioms = is_ideal_subdiagram(d, block_sets.back(), H);
    ok = ok && axioms;
    blocks.push_back({{"n", n}, {"size", block_sets.back().size()}, {"axioms", axioms}});
  }
  r["block_ideals"] = blocks;
  json list = json::array();
  for (const auto& path : enumerate_primitive_paths(d, std::min(3, H))) {
    json rec = ideal_record(d, path, H, ok);
    auto ideal = largest_ideal_avoiding_path(d, path, H);
    json norms = json::array();
    for (std::size_t n = 0; n < block_sets.size(); ++n) {
      int norm = block_unit_quotient_norm(block_sets[n], ideal);
      bool route = complement_has_sequence_in(d, ideal, block_sets[n]);
      ok = ok && (norm == 1) == route;
      norms.push_back(norm);
    }
    rec["block_unit_norms"] = norms;
    if (rec["prime"] == "unknown") unknown.push_back(rec["start"]);
    list.push_back(rec);
  }
  r["primitive"] = list;
  r["unknown"] = unknown;
  return emit(o, "ideals", r, ok);
}

CellFunction random_function(const std::string& name, const QuotientPresentation& p, int depth,
                             std::uint64_t seed) {
  if (name == "cantor-interval")
    return interval_pl_function(p, depth, random_dyadic_values((std::size_t{1} << (depth - 1)) + 1, seed));
  return random_compatible_function(p, depth, seed);
}

int cmd_glimm(const Options& o) {
  auto p = load_presentation(o);
  json r = header("glimm", o, &p);
  r["seed"] = o.seed;
  bool ok = true;
  auto c = checked_construct(o, p, r, ok);
  const int H = c.horizon();
  auto sample = load_sample(o, p);
  auto psi = psi_check(c, sample, o.window);
  ok = ok && psi.pass();
  r["psi"] = to_json(psi);
  json unknown = json::array();
  for (const auto& pr : psi.pairs)
    if (pr.touch == TouchKind::Unknown || pr.glimm == GlimmKind::Unknown)
      unknown.push_back({{"pair", {pr.a, pr.b}}, {"touch", to_string(pr.touch)}, {"glimm", to_string(pr.glimm)}});
  for (const auto& s : psi.surjectivity)
    if (!s.stable) unknown.push_back({{"canonical_point", {s.start.row, s.start.index}}});

  // Strict-Cauchy estimate on seeded random functions and corners.
  const int top = std::min(10, H);
  std::mt19937_64 rng(o.seed);
  int violations = 0, chained = 0, trials = 0;
  json failures = json::array();
  if (top >= 3) {
    for (int t = 0; t < 100; ++t) {
      const int depth = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top));
      auto g = random_function(o.example, p, depth, rng());
      auto ca = central_approximation(c, g);
      const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top - 2));
      const int k = m + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top - m - 1));
      const int l = k + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top - k));
      const int i = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(c.diagram.row_size(m)));
      auto chk = verify_strict_cauchy(c, ca, m, i, k, l);
      ++trials;
      if (!chk.holds) {
        ++violations;
        failures.push_back({{"m", m}, {"i", i}, {"k", k}, {"l", l}, {"lhs", chk.lhs}, {"rhs", chk.rhs}});
      }
      if (!chk.chained_holds) ++chained;
    }
  }
  ok = ok && violations == 0;
  r["cauchy"] = {{"trials", trials}, {"violations", violations}, {"chained_violations", chained},
                 {"failures", failures}};

  // h = g~ on the sample's primitive ideals.
  int h_checked = 0, h_failed = 0, gt_inconsistent = 0;
  for (int depth = 1; depth <= std::min(5, H); ++depth) {
    CellFunction g = o.example == "cantor-interval"
                         ? interval_step_function(p, depth, random_dyadic_values(std::size_t{1} << (depth - 1), o.seed + depth))
                         : random_compatible_function(p, depth, o.seed + depth);
    std::vector<std::optional<double>> values;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      auto ideal = varphi(c, sample[i], H);
      values.push_back(gtilde(c, g, ideal).value);
      for (int e = 1; e <= 5; ++e) {
        auto h = verify_h_equals_gtilde(c, g, ideal, std::ldexp(1.0, -e), o.window);
        ++h_checked;
        if (h.status == Verdict::No) ++h_failed;
        if (h.status == Verdict::Unknown) unknown.push_back({{"h_check", i}, {"depth", depth}, {"eps_exp", e}});
      }
    }
    if (touch_compatible(p, g))
      for (const auto& cls : psi.glimm.partition)
        for (int i : cls)
          if (values[static_cast<std::size_t>(i)] != values[static_cast<std::size_t>(cls.front())]) ++gt_inconsistent;
  }
  ok = ok && h_failed == 0 && gt_inconsistent == 0;
  r["h_check"] = {{"checked", h_checked}, {"failed", h_failed}};
  r["gtilde_class_inconsistencies"] = gt_inconsistent;
  r["unknown"] = unknown;
  return emit(o, "glimm", r, ok);
}

int cmd_classify(const Options& o) {
  auto p = load_presentation(o);
  json r = header("classify", o, &p);
  auto sample = load_sample(o, p);
  auto labels = locally_compact_set(p, sample, o.horizon, o.window);
  json points = json::array();
  json unknown = json::array();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    json w = to_json(labels.witnesses[i], p);
    w["point"] = to_json(sample[i]);
    if (labels.witnesses[i].verdict == Locality::Unknown) unknown.push_back(i);
    points.push_back(w);
  }
  r["points"] = points;
  r["locally_compact"] = labels.locally_compact;
  r["openness_violations"] = labels.openness_violations;
  r["unknown"] = unknown;
  return emit(o, "classify", r, labels.openness_violations.empty());
}

int cmd_baire(const Options& o) {
  auto p = load_presentation(o);
  json r = header("baire", o, &p);
  auto sample = load_sample(o, p);
  auto report = baire_report(p, sample, o.horizon, o.depth, o.window);
  r["report"] = to_json(report, p);
  if (report.verdict == BaireVerdict::Inconclusive) r["unknown"] = json::array({"baire"});
  return emit(o, "baire", r, true);
}

int cmd_export(const Options& o) {
  auto p = load_presentation(o);
  auto c = construct(p, o.horizon);
  const std::string format = o.format.empty() ? "dot" : o.format;
  const std::string diagram = format == "dot" ? to_dot(c.diagram) : to_json(c.diagram).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << diagram;
    return 0;
  }
  write_file(o, "presentation.json", to_json(p).dump(2) + "\n");
  write_file(o, format == "dot" ? "diagram.dot" : "diagram.json", diagram);
  write_file(o, "table.json", table_to_json(c).dump(2) + "\n");
  json r = header("export", o, &p);
  r["files"] = {"presentation.json", format == "dot" ? "diagram.dot" : "diagram.json", "table.json"};
  return emit(o, "export", r, true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bratteli diagrams of quotient presentations"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--horizon", o.horizon, "Rows to materialize")->check(CLI::PositiveNumber);
  app.add_option("--depth", o.depth, "Ingestion depth or Baire depth")->check(CLI::PositiveNumber);
  app.add_option("--window", o.window, "Stabilization window")->check(CLI::PositiveNumber);
  app.add_option("--input", o.input, "Presentation, diagram or sampled-space JSON");
  app.add_option("--example", o.example, "Builtin generator")
      ->check(CLI::IsMember(example_names()));
  app.add_option("--points", o.points, "JSON list of points");
  app.add_option("--out", o.out, "Directory for reports and artifacts");
  app.add_option("--seed", o.seed, "Seed for randomized checks");
  app.add_option("--format", o.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  app.add_flag("--timing", o.timing, "Report wall time on stderr");

  std::function<int(const Options&)> run;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->callback([&run, fn] { run = fn; });
  };
  add("validate", "Check presentation invariants", cmd_validate);
  add("ingest", "Build a presentation from a sampled space", cmd_ingest);
  add("construct", "Compile a presentation into a Bratteli diagram", cmd_construct);
  add("ideals", "Check block and primitive ideals", cmd_ideals);
  add("glimm", "Glimm-space verification", cmd_glimm);
  add("classify", "Local compactness of sampled points", cmd_classify);
  add("baire", "Baire density report", cmd_baire);
  add("export", "Write presentation, diagram and table", cmd_export);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const auto start = std::chrono::steady_clock::now();
  int code;
  try {
    code = run(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  }
  if (o.timing) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cerr << "time_ms " << ms.count() << "\n";
  }
  return code;
}
