// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1 for ctest).

#include <CLI11.hpp>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cadret/augment/augment.hpp"
#include "cadret/brep/generator.hpp"
#include "cadret/brep/graph.hpp"
#include "cadret/core/binary_io.hpp"
#include "cadret/core/hash.hpp"
#include "cadret/retrieval/retrieval.hpp"
#include "cadret/train/train.hpp"
#include "cli.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/gradcheck.hpp"
#include "support/graphs.hpp"
#include "support/metric_oracle.hpp"
#include "support/op_cases.hpp"

using namespace cadret;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Collects the first few failures of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 5) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string failures() const {
    return fmt::format("{} failed check(s): {}{}", failures_, notes_, failures_ > 5 ? "; ..." : "");
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

// ---- 1 --------------------------------------------------------------------------

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kInstances = 10;
  Checker check;
  double worst = 0;
  std::size_t ops = 0, scalars = 0;
  for (int s = 1; s <= kInstances; ++s) {
    for (const auto& c : testing::op_cases(s)) {
      const auto r = testing::check_gradients(c.inputs, c.loss);
      worst = std::max(worst, r.max_rel_err);
      scalars += r.checked;
      check.expect(r.max_rel_err <= 1e-4, fmt::format("{} seed {} rel-err {:.2e}", c.name, s, r.max_rel_err));
      if (s == 1) ++ops;
    }
  }
  // NT-Xent under every flag combination.
  for (int s = 1; s <= kInstances; ++s) {
    Rng rng(1000 + s);
    const std::size_t n = 2 + rng.index(5), d = 2 + rng.index(5);
    for (int flags = 0; flags < 4; ++flags) {
      const bool symmetric = flags & 1, include_positive = flags & 2;
      const double tau = rng.uniform(0.3, 2.0);
      const auto r = testing::check_gradients(
          {testing::random_tensor(rng, {n, d}), testing::random_tensor(rng, {n, d})},
          [&](nn::Tape<double>&, const std::vector<nn::Var<double>>& v) {
            return train::nt_xent(v[0], v[1], tau, symmetric, include_positive);
          });
      worst = std::max(worst, r.max_rel_err);
      scalars += r.checked;
      check.expect(r.max_rel_err <= 1e-4, fmt::format("nt_xent seed {} flags {} rel-err {:.2e}", s, flags, r.max_rel_err));
    }
  }
  // Full encoder, every parameter.
  for (int s = 1; s <= kInstances; ++s) {
    encoder::EncoderConfig c = testing::tiny_config();
    c.gate = s % 2 ? encoder::Gate::Sigmoid : encoder::Gate::Learned;
    c.readout_include_input = s % 3 == 0;
    Rng rng(2000 + s);
    const auto params = encoder::cast_params<double>(encoder::init_params(c, s));
    const auto gf = testing::random_features(rng, testing::random_graph(rng, 2 + rng.index(4), 0.6), c.grid);
    const auto g = encoder::prepare<double>(gf, c);
    const auto r = testing::check_gradients(params.tensors, [&](nn::Tape<double>& tape,
                                                                const std::vector<nn::Var<double>>& v) {
      return testing::project(tape, encoder::encode_on_tape(tape, params, v, g).z, s);
    });
    worst = std::max(worst, r.max_rel_err);
    scalars += r.checked;
    check.expect(r.max_rel_err <= 1e-4, fmt::format("encoder seed {} rel-err {:.2e}", s, r.max_rel_err));
  }
  const double secs = seconds_since(t0);
  check.expect(secs < 120, fmt::format("took {:.1f} s", secs));
  const std::string summary = fmt::format("{} ops + nt_xent + encoder x {} instances, {} scalars, max rel-err {:.2e}, {:.1f} s",
                                          ops, kInstances, scalars, worst, secs);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 2 --------------------------------------------------------------------------

Outcome loss_closed_forms() {
  Checker check;
  double worst = 0;
  Rng rng(3);
  for (std::size_t n : {2u, 4u, 8u}) {
    nn::Tensor<double> z({n, 7});
    const auto row = testing::random_vector(rng, 7);
    for (std::size_t i = 0; i < n; ++i) std::copy(row.begin(), row.end(), z.data() + i * 7);
    for (bool symmetric : {false, true}) {
      const double err = std::fabs(train::nt_xent_value(z, z, 1.0, symmetric) - std::log(double(n - 1)));
      worst = std::max(worst, err);
      check.expect(err <= 1e-9, fmt::format("N={} symmetric={} err {:.2e}", n, symmetric, err));
    }
  }
  // Positives identical, negatives orthogonal: l_1 = -(1/tau)(1 - 0).
  const nn::Tensor<double> ortho({2, 2}, std::vector<double>{1, 0, 0, 1});
  const double l1 = train::nt_xent_value(ortho, ortho, 1.0, false);
  check.expect(std::fabs(l1 + 1.0) <= 1e-9, fmt::format("orthogonal N=2 gives {}", l1));
  const std::string summary = fmt::format("ln(N-1) max err {:.1e} for N in {{2,4,8}}; orthogonal N=2 loss {:.12f}", worst, l1);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 3 --------------------------------------------------------------------------

Outcome structural_invariants() {
  Checker check;
  std::size_t views = 0;
  const features::GridSpec grid{4, 4, 4};
  for (std::uint64_t s = 1; s <= 1000; ++s) {
    Rng gen(s);
    const std::size_t v = 1 + gen.index(30);
    const auto gf = testing::random_features(gen, testing::random_graph(gen, v, gen.uniform(0, 0.5)), grid);
    for (auto scheme : {augment::Scheme::Node, augment::Scheme::Node1Hop, augment::Scheme::EdgeVertices}) {
      for (double beta : {0.1, 0.2}) {
        Rng rng(derive_seed(s, static_cast<std::uint64_t>(scheme), beta == 0.1 ? 1 : 2));
        const auto view = augment::drop_structure(gf, beta, scheme, rng);
        ++views;
        const auto& g = view.graph;
        const std::size_t left = g.nodes.size();
        const std::size_t removed = v - left;
        const auto m = static_cast<std::size_t>(std::round(beta * double(v)));
        const std::string tag = fmt::format("seed {} scheme {} beta {}", s, augment::to_string(scheme), beta);
        check.expect(left >= 1, tag + ": empty graph");
        bool dangling = false;
        std::set<std::string> live(g.nodes.begin(), g.nodes.end());
        for (const auto& e : g.edges) dangling |= e.a >= left || e.b >= left;
        check.expect(!dangling && live.size() == left, tag + ": dangling edge");
        // Every surviving edge existed between the same two faces.
        std::set<std::tuple<std::string, std::string, std::string>> base;
        for (const auto& e : gf.graph.edges) base.insert({gf.graph.nodes[e.a], gf.graph.nodes[e.b], e.curve_id});
        for (const auto& e : g.edges) {
          if (e.a < left && e.b < left) {
            check.expect(base.count({g.nodes[e.a], g.nodes[e.b], e.curve_id}) == 1, tag + ": edge not in source");
          }
        }
        if (scheme == augment::Scheme::Node) {
          check.expect(removed == m, fmt::format("{}: removed {} != m {}", tag, removed, m));
        } else {
          check.expect(removed >= std::min(m, v - 1), fmt::format("{}: removed {} < m {}", tag, removed, m));
        }
      }
    }
  }
  const std::string summary = fmt::format("{} views over 1000 graphs x 3 schemes x beta {{0.1, 0.2}}", views);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 4 --------------------------------------------------------------------------

Outcome conversion_oracles() {
  Checker check;
  const auto cube = brep::to_graph(testing::box_part("cube", {0, 0, 0}, {1, 1, 1}));
  check.expect(cube.graph.nodes.size() == 6, "cube nodes");
  check.expect(cube.graph.edges.size() == 12, "cube edges");
  for (const auto& nbrs : cube.graph.adjacency()) check.expect(nbrs.size() == 4, "cube degree");
  const auto generated_box = brep::to_graph(
      brep::generate_synthetic_family({"b", brep::PartTemplate::Box, {}, {}}, 1, 5).front());
  check.expect(generated_box.graph.nodes.size() == 6 && generated_box.graph.edges.size() == 12, "generated box");

  const auto cyl = brep::to_graph(
      brep::generate_synthetic_family({"cc", brep::PartTemplate::CappedCylinder, {}, {}}, 1, 5).front());
  check.expect(cyl.graph.nodes.size() == 3, "cylinder nodes");
  check.expect(cyl.graph.edges.size() == 2, "cylinder edges");
  check.expect(cyl.report.single_face_curves.size() == 1, "cylinder skipped seam count");

  brep::BRepPart fan;
  fan.id = "fan";
  for (const char* id : {"a", "b", "c"}) fan.faces.push_back({id, {brep::Plane{}, false}, {}, {}, {}});
  fan.curves.push_back(testing::line_curve("k", {0, 0, 0}, {1, 0, 0}, {"a", "b", "c"}));
  const auto three = brep::to_graph(fan);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : three.graph.edges) pairs.insert({three.graph.nodes[e.a], three.graph.nodes[e.b]});
  check.expect(three.graph.edges.size() == 3 &&
                   pairs == std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}, {"b", "c"}},
               "three-face curve edges");
  const std::string summary = fmt::format("cube {}/{}, cylinder {}/{} with {} skipped, three-face curve {} edges",
                                          cube.graph.nodes.size(), cube.graph.edges.size(), cyl.graph.nodes.size(),
                                          cyl.graph.edges.size(), cyl.report.single_face_curves.size(),
                                          three.graph.edges.size());
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 5 --------------------------------------------------------------------------

Outcome encoder_symmetry() {
  Checker check;
  const auto schema = features::default_schema();
  const encoder::EncoderConfig c = encoder::default_config(schema);
  const auto params = encoder::init_params(c, 5);
  std::size_t perm = 0, dup = 0, local = 0;
  for (const auto& family : brep::default_families()) {
    for (const auto& part : brep::generate_synthetic_family(family, 2, 5)) {
      const auto gf = features::featurize(part, schema, c.grid).features;
      const auto z = encoder::encode(gf, params);
      Rng rng(fnv1a64(part.id));
      for (int r = 0; r < 2; ++r, ++perm) check.expect(encoder::encode(testing::relabel(rng, gf), params) == z, part.id + ": permutation");
      const auto z2 = encoder::encode(testing::duplicate(gf, "~"), params);
      bool doubled = true;
      for (std::size_t i = 0; i < z.size(); ++i) doubled &= z2[i] == 2 * z[i];
      check.expect(doubled, part.id + ": duplication");
      ++dup;
    }
  }
  // Locality on random graphs with K = 5.
  encoder::EncoderConfig tiny = testing::tiny_config();
  tiny.layers = 5;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    Rng rng(s + 500);
    const auto p = encoder::init_params(tiny, s);
    const std::size_t v = 6 + rng.index(12);
    const auto gf = testing::random_features(rng, testing::random_graph(rng, v, 2.0 / v), tiny.grid);
    const auto source = static_cast<std::uint32_t>(rng.index(v));
    auto changed = gf;
    changed.nodes[source] = testing::random_face(rng, tiny.grid, tiny.surface_types);
    const auto dist = testing::hop_distances(gf.graph, source);
    auto hidden = [&](const features::GraphFeatures& g) {
      const auto prepared = encoder::prepare<float>(g, tiny);
      nn::Tape<float> tape(false);
      const auto bound = encoder::bind(tape, p);
      std::vector<nn::Tensor<float>> h;
      for (const auto& var : encoder::encode_on_tape(tape, p, bound, prepared).h) h.push_back(var.value());
      return std::pair{prepared.node_ids, h};
    };
    const auto [ids, a] = hidden(gf);
    const auto [ids_b, b] = hidden(changed);
    for (std::uint32_t k = 0; k <= tiny.layers; ++k) {
      for (std::size_t r = 0; r < ids.size(); ++r) {
        const std::size_t n = std::find(gf.graph.nodes.begin(), gf.graph.nodes.end(), ids[r]) - gf.graph.nodes.begin();
        if (dist[n] <= k) continue;
        const float* ra = a[k].data() + r * a[k].cols();
        const float* rb = b[k].data() + r * b[k].cols();
        check.expect(std::equal(ra, ra + a[k].cols(), rb), fmt::format("seed {} layer {} node at distance {} changed", s, k, dist[n]));
        ++local;
      }
    }
  }
  const std::string summary = fmt::format("{} permutations and {} duplications exact on 20 generated parts (default config); "
                                          "{} out-of-footprint rows unchanged across 20 graphs, K = 5",
                                          perm, dup, local);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 6 --------------------------------------------------------------------------

struct SeedResult {
  double recall = 0, ndcg = 0, base_recall = 0, base_ndcg = 0, seconds = 0;
  bool pass = false;
};

SeedResult learning_signal_run(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto schema = features::default_schema();
  std::vector<features::GraphFeatures> data;
  std::map<std::string, std::string> family;
  for (const auto& spec : brep::default_families()) {
    for (const auto& part : brep::generate_synthetic_family(spec, 20, seed)) {
      data.push_back(features::featurize(part, schema).features);
      family[part.id] = spec.name;
    }
  }
  const encoder::EncoderConfig enc = encoder::default_config(schema);
  train::TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.min_epochs = 20;
  cfg.seed = seed;
  auto metrics = [&](const encoder::EncoderParams<float>& params) {
    const auto index = retrieval::build_index(train::embed_dataset(params, data));
    const auto rep = retrieval::evaluate_families(index, family, {5});
    return std::pair{rep.mean_recall[0], rep.mean_ndcg[0]};
  };
  SeedResult out;
  std::tie(out.base_recall, out.base_ndcg) = metrics(train::initial_params(enc, seed));
  const auto trained = train::train(data, enc, cfg);
  std::tie(out.recall, out.ndcg) = metrics(trained.best);
  out.seconds = seconds_since(t0);
  out.pass = out.recall >= 0.60 && out.recall >= 3 * out.base_recall && out.ndcg > out.base_ndcg && out.seconds <= 1800;
  return out;
}

Outcome learning_signal() {
  std::size_t passed = 0;
  std::string detail;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SeedResult r = learning_signal_run(seed);
    passed += r.pass;
    detail += fmt::format("{}seed {}: recall@5 {:.3f} (baseline {:.3f}, need >= {:.3f}), ndcg@5 {:.3f} (baseline {:.3f}), {:.0f} s {}",
                          detail.empty() ? "" : "; ", seed, r.recall, r.base_recall, std::max(0.60, 3 * r.base_recall),
                          r.ndcg, r.base_ndcg, r.seconds, r.pass ? "pass" : "fail");
  }
  return {passed >= 2, fmt::format("{}/3 seeds pass; {}", passed, detail)};
}

// ---- 7 --------------------------------------------------------------------------

Outcome metric_oracle() {
  Checker check;
  Rng rng(7);
  std::size_t compared = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t pool = 1 + rng.index(60);
    retrieval::Labels labels;
    std::array<std::size_t, 3> counts{};
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < pool; ++i) {
      const int g = static_cast<int>(rng.index(3));
      ids.push_back(fmt::format("c{:03}", i));
      labels[ids.back()] = g;
      ++counts[g];
    }
    rng.shuffle(ids);
    const std::size_t returned = rng.index(pool + 1);
    retrieval::QueryResult result;
    std::vector<int> grades;
    for (std::size_t i = 0; i < returned; ++i) {
      result.push_back({ids[i], 1.0 - 0.001 * double(i)});
      grades.push_back(labels[ids[i]]);
    }
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, std::size_t{10}, 1 + rng.index(70)}) {
      check.expect(retrieval::recall_at_k(result, labels, k) == testing::reference_recall(grades, counts, k, 2),
                   fmt::format("instance {} recall@{}", t, k));
      check.expect(retrieval::ndcg_at_k(result, labels, k) == testing::reference_ndcg(grades, counts, k),
                   fmt::format("instance {} ndcg@{}", t, k));
      compared += 2;
    }
  }
  const std::string summary = fmt::format("{} metric values equal the reference on 100 instances", compared);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 8 --------------------------------------------------------------------------

Outcome retrieval_exactness() {
  Checker check;
  Rng rng(8);
  for (int q = 0; q < 200; ++q) {
    const std::size_t m = 1 + rng.index(500), d = 1 + rng.index(64);
    std::vector<std::pair<std::string, std::vector<float>>> stored;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<float> v(d);
      // Small-integer coordinates on even queries force exact ties.
      for (float& x : v) x = q % 2 ? float(rng.uniform(-1, 1)) : float(int(rng.index(5)) - 2);
      if (std::all_of(v.begin(), v.end(), [](float x) { return x == 0; })) v[0] = 1;
      stored.push_back({fmt::format("p{:05}", rng.index(100000)) + "_" + std::to_string(i), v});
    }
    const auto index = retrieval::build_index(stored);
    const std::size_t k = 1 + rng.index(m);
    const std::vector<float> z = stored[rng.index(m)].second;
    check.expect(retrieval::query(index, z, k) == testing::brute_force(stored, z, k), fmt::format("query {}", q));
  }
  std::vector<std::pair<std::string, std::vector<float>>> big;
  big.reserve(100000);
  for (std::size_t i = 0; i < 100000; ++i) big.push_back({fmt::format("p{:06}", i), testing::random_floats(rng, 256)});
  const auto index = retrieval::build_index(big);
  double worst = 0;
  for (int q = 0; q < 5; ++q) {
    const auto z = testing::random_floats(rng, 256);
    const auto t0 = std::chrono::steady_clock::now();
    const auto hits = retrieval::query(index, z, 100);
    worst = std::max(worst, seconds_since(t0));
    check.expect(hits.size() == 100, "top-100 size");
  }
  check.expect(worst < 0.1, fmt::format("slowest query {:.1f} ms", worst * 1e3));
  const std::string summary =
      fmt::format("200 queries equal brute force; slowest of 5 top-100 queries over 100000 x 256: {:.1f} ms", worst * 1e3);
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 9 --------------------------------------------------------------------------

Outcome determinism() {
  Checker check;
  auto pipeline = [&](const fs::path& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const char* name) { return (dir / name).string(); };
    const std::vector<std::vector<std::string>> steps = {
        {"generate", "--out", p("parts.jsonl"), "--labels", p("labels.json"), "--count", "6", "--num-families", "3",
         "--seed", "42"},
        {"convert", "--parts", p("parts.jsonl"), "--out", p("graphs.crgc")},
        {"train", "--cache", p("graphs.crgc"), "--out-dir", p("run"), "--epochs", "3", "--min-epochs", "3", "--batch",
         "8", "--seed", "42"},
        {"embed", "--checkpoint", p("run/best.ckpt"), "--cache", p("graphs.crgc"), "--out", p("index.crix")},
    };
    for (const auto& args : steps) {
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      check.expect(code == 0, args[0] + " failed: " + err.str());
    }
  };
  const fs::path root = fs::temp_directory_path() / "cadret_acceptance_determinism";
  pipeline(root / "a");
  pipeline(root / "b");
  if (!check.ok()) return {false, check.failures()};
  std::string hashes;
  for (const char* file : {"parts.jsonl", "graphs.crgc", "run/best.ckpt", "run/last.ckpt", "index.crix"}) {
    const std::string a = sha256_hex(read_file_text(root / "a" / file));
    const std::string b = sha256_hex(read_file_text(root / "b" / file));
    check.expect(a == b, fmt::format("{} differs", file));
    if (std::string_view(file) == "run/best.ckpt" || std::string_view(file) == "index.crix") {
      hashes += fmt::format("{}{} {}", hashes.empty() ? "" : ", ", file, a.substr(0, 12));
    }
  }
  fs::remove_all(root);
  const std::string summary = "two seeded generate/convert/train/embed runs byte-identical (" + hashes + ")";
  return {check.ok(), check.ok() ? summary : summary + "; " + check.failures()};
}

// ---- 10 -------------------------------------------------------------------------

Outcome assembly_retrieval() {
  // Parts p00..p59 come in twin pairs (2i, 2i+1): p2i = e_i and
  // p2i+1 = e_i + 0.05 e_(i+1 mod 30), so with k_parts = 2 each part retrieves
  // exactly itself and its twin. The query A00 = {p00, p02, p04} therefore
  // retrieves p00..p05 once each and an assembly's votes are |A n {p00..p05}|.
  train::Embeddings emb;
  for (int i = 0; i < 30; ++i) {
    std::vector<float> e(30, 0.0f);
    e[i] = 1;
    emb.push_back({fmt::format("p{:02}", 2 * i), e});
    e[(i + 1) % 30] = 0.05f;
    emb.push_back({fmt::format("p{:02}", 2 * i + 1), e});
  }
  const auto index = retrieval::build_index(emb);
  auto parts = [](std::initializer_list<int> ids) {
    std::vector<std::string> out;
    for (int i : ids) out.push_back(fmt::format("p{:02}", i));
    return out;
  };
  const std::vector<retrieval::AssemblyRecord> db = {
      {"A00", parts({0, 2, 4})},          // query
      {"A01", parts({0, 2, 4})},          // 3 votes: shares every part
      {"A02", parts({1, 3, 40})},         // 2
      {"A03", parts({0, 10, 11})},        // 1
      {"A04", parts({5, 6, 7})},          // 1
      {"A05", parts({2, 3, 20})},         // 2
      {"A06", parts({12, 13})},           // 0
      {"A07", parts({4, 30})},            // 1
      {"A08", parts({0, 1})},             // 2
      {"A09", parts({8, 9, 14})},         // 0
      {"A10", parts({15, 16, 17})},       // 0
      {"A11", parts({18, 19, 21})},       // 0
      {"A12", parts({22, 23, 24, 25})},   // 0
      {"A13", parts({26, 27, 28})},       // 0
      {"A14", parts({29, 31, 32, 33})},   // 0
      {"A15", parts({34, 35, 36})},       // 0
      {"A16", parts({37, 38, 39, 41})},   // 0
      {"A17", parts({42, 43, 44, 45, 46})},  // 0
      {"A18", parts({47, 48, 49, 50, 51, 52})},  // 0
      {"A19", parts({53, 54, 55, 56, 57, 58, 59})},  // 0
  };
  const std::vector<retrieval::AssemblyHit> expected = {{"A01", 3}, {"A02", 2}, {"A05", 2}, {"A08", 2},
                                                        {"A03", 1}, {"A04", 1}, {"A07", 1}};
  const auto got = retrieval::assembly_query(db[0], index, db, 2, 20);
  std::string ranking;
  for (const auto& h : got) ranking += fmt::format("{}{}:{}", ranking.empty() ? "" : " ", h.id, h.votes);
  const bool pass = got == expected;
  return {pass, "ranking " + ranking + (pass ? " matches the hand enumeration" : " differs from the hand enumeration")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", gradients},
      {2, "loss closed forms", loss_closed_forms},
      {3, "structural invariants", structural_invariants},
      {4, "conversion oracles", conversion_oracles},
      {5, "encoder symmetry", encoder_symmetry},
      {6, "end-to-end learning signal", learning_signal},
      {7, "metric oracle equivalence", metric_oracle},
      {8, "retrieval exactness and speed", retrieval_exactness},
      {9, "determinism", determinism},
      {10, "assembly retrieval", assembly_retrieval},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << fmt::format("criterion {:>2} {:<32} {}  [{:.1f} s] {}\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                             seconds_since(t0), o.detail)
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
