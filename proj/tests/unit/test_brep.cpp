#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "cadret/brep/generator.hpp"
#include "cadret/brep/graph.hpp"
#include "cadret/brep/part_io.hpp"
#include "cadret/core/error.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cadret;
using namespace cadret::brep;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Contract;
}

bool near(const Vec3& a, const Vec3& b, double tol) { return (a - b).norm() <= tol; }

// Oracle: undirected edge set expected from curve adjacency, pairs in first-seen order.
std::set<std::pair<std::string, std::string>> expected_edges(const BRepPart& part) {
  std::set<std::pair<std::string, std::string>> out;
  for (const Curve& c : part.curves) {
    for (std::size_t i = 0; i < c.adjacent_faces.size(); ++i) {
      for (std::size_t j = i + 1; j < c.adjacent_faces.size(); ++j) {
        auto a = c.adjacent_faces[i], b = c.adjacent_faces[j];
        if (b < a) std::swap(a, b);
        out.insert({a, b});
      }
    }
  }
  return out;
}

void check_graph_matches_oracle(const BRepPart& part) {
  const PartGraph g = to_graph(part).graph;
  CHECK_NOTHROW(validate(g));
  REQUIRE(g.nodes.size() == part.faces.size());
  std::set<std::pair<std::string, std::string>> got;
  for (const GraphEdge& e : g.edges) {
    REQUIRE(e.a < e.b);
    REQUIRE(e.b < g.nodes.size());
    auto a = g.nodes[e.a], b = g.nodes[e.b];
    if (b < a) std::swap(a, b);
    CHECK(got.insert({a, b}).second);
  }
  CHECK(got == expected_edges(part));
}

}  // namespace

TEST_SUITE("brep") {
  TEST_CASE("plane evaluation") {
    const SurfaceGeometry plane{Plane{}, false};
    const SurfacePoint sp = evaluate_surface(plane, 0.5, 0.5);
    CHECK(near(sp.point, {0.5, 0.5, 0}, 1e-15));
    CHECK(near(sp.normal, {0, 0, 1}, 1e-15));
  }

  TEST_CASE("cylinder face evaluation at normalized coordinates") {
    Face face{"lat", {Cylinder{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, 1.0}, false}, {0, 2 * std::numbers::pi, 0, 2}, {}, {}};
    const SurfacePoint sp = evaluate_face(face, 0.0, 0.5);
    CHECK(near(sp.point, {1, 0, 1}, 1e-12));
    CHECK(near(sp.normal, {1, 0, 0}, 1e-12));
  }

  TEST_CASE("torus points sit at minor radius from the axis circle") {
    const SurfaceGeometry torus{Torus{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, 2.0, 0.5}, false};
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
      const double u = rng.uniform(0, 2 * std::numbers::pi), v = rng.uniform(0, 2 * std::numbers::pi);
      const Vec3 p = evaluate_surface(torus, u, v).point;
      // Oracle: nearest point of the axis circle by brute-force angular scan, refined by bisection-free closed form.
      double best = 1e9;
      for (int k = 0; k < 3600; ++k) {
        const double a = 2 * std::numbers::pi * k / 3600;
        best = std::min(best, (p - Vec3(2 * std::cos(a), 2 * std::sin(a), 0)).norm());
      }
      const double radial = std::hypot(p.x(), p.y());
      const double exact = std::hypot(radial - 2.0, p.z());
      CHECK(best >= exact - 1e-12);
      CHECK(best <= exact + 1e-3);
      CHECK(std::fabs(exact - 0.5) <= 1e-9);
    }
  }

  TEST_CASE("curve evaluation") {
    const CurveGeometry line{Line{{0, 0, 0}, {2, 0, 0}}, 0, 1};
    const CurvePoint lp = evaluate_curve(line, 0.5);
    CHECK(near(lp.point, {1, 0, 0}, 1e-15));
    CHECK(near(lp.tangent, {1, 0, 0}, 1e-15));

    const CurveGeometry circle{Circle{}, 0, 2 * std::numbers::pi};
    const CurvePoint cp = evaluate_curve(circle, std::numbers::pi / 2);
    CHECK(near(cp.point, {0, 1, 0}, 1e-12));
    CHECK(near(cp.tangent, {-1, 0, 0}, 1e-12));

    CHECK(kind_of([&] { evaluate_curve(line, 1.5); }) == ErrorKind::Domain);
  }

  TEST_CASE("freeform tangent agrees with central differences of points") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      BezierCurve bc;
      for (int i = 0; i < 4; ++i) bc.control.push_back({i + rng.uniform(-0.3, 0.3), rng.uniform(-1, 1), rng.uniform(-1, 1)});
      const CurveGeometry g{bc, 0, 1};
      for (double t : {0.1, 0.37, 0.5, 0.81}) {
        const double h = 1e-6;
        const Vec3 fd = (evaluate_curve(g, t + h).point - evaluate_curve(g, t - h).point).normalized();
        const Vec3 tan = evaluate_curve(g, t).tangent;
        CHECK(std::acos(std::clamp(fd.dot(tan), -1.0, 1.0)) < 1e-3);
      }
    }
  }

  TEST_CASE("freeform surface outside its control domain is a domain error") {
    BezierSurface s{2, 2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}};
    CHECK(kind_of([&] { evaluate_surface({s, false}, 1.5, 0.5); }) == ErrorKind::Domain);
  }

  TEST_CASE("normals and tangents are unit length for every generated family") {
    for (const FamilySpec& fam : default_families()) {
      for (const BRepPart& part : generate_synthetic_family(fam, 2, 5)) {
        for (const Face& f : part.faces) {
          for (double s : {0.0, 0.3, 1.0}) {
            for (double t : {0.0, 0.6, 1.0}) CHECK(std::fabs(evaluate_face(f, s, t).normal.norm() - 1) <= 1e-9);
          }
        }
        for (const Curve& c : part.curves) {
          for (double a : {0.0, 0.5, 1.0}) {
            const double t = c.geometry.t0 + a * (c.geometry.t1 - c.geometry.t0);
            CHECK(std::fabs(evaluate_curve(c.geometry, t).tangent.norm() - 1) <= 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("box converts to 6 nodes, 12 edges, degree 4") {
    const BRepPart box = testing::box_part("box", {0, 0, 0}, {1, 2, 3});
    const Conversion conv = to_graph(box);
    CHECK(conv.graph.nodes.size() == 6);
    CHECK(conv.graph.edges.size() == 12);
    for (const auto& nbrs : conv.graph.adjacency()) CHECK(nbrs.size() == 4);
    check_graph_matches_oracle(box);
  }

  TEST_CASE("capped cylinder converts to 3 nodes and 2 edges with one skipped seam") {
    const BRepPart cyl = generate_synthetic_family({"cc", PartTemplate::CappedCylinder, {}, {}}, 1, 3).front();
    const Conversion conv = to_graph(cyl);
    CHECK(conv.graph.nodes.size() == 3);
    CHECK(conv.graph.edges.size() == 2);
    CHECK(conv.report.single_face_curves.size() == 1);
  }

  TEST_CASE("curve shared by three faces yields the three pairwise edges") {
    BRepPart p;
    p.id = "fan";
    for (const char* id : {"a", "b", "c"}) p.faces.push_back({id, {Plane{}, false}, {}, {}, {}});
    p.curves.push_back(testing::line_curve("k", {0, 0, 0}, {1, 0, 0}, {"a", "b", "c"}));
    const Conversion conv = to_graph(p);
    REQUIRE(conv.graph.edges.size() == 3);
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (const GraphEdge& e : conv.graph.edges) pairs.insert({e.a, e.b});
    CHECK(pairs == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(conv.report.multi_face_curves == std::vector<std::string>{"k"});
  }

  TEST_CASE("parallel curves between one face pair are deduplicated and counted") {
    BRepPart p;
    p.id = "dup";
    for (const char* id : {"a", "b"}) p.faces.push_back({id, {Plane{}, false}, {}, {}, {}});
    p.curves.push_back(testing::line_curve("k0", {0, 0, 0}, {1, 0, 0}, {"a", "b"}));
    p.curves.push_back(testing::line_curve("k1", {0, 1, 0}, {1, 1, 0}, {"b", "a"}));
    p.curves.push_back(testing::line_curve("k2", {0, 2, 0}, {1, 2, 0}, {}));
    const Conversion conv = to_graph(p);
    CHECK(conv.graph.edges.size() == 1);
    CHECK(conv.report.duplicate_pairs == 1);
    CHECK(conv.report.orphan_curves == std::vector<std::string>{"k2"});
  }

  TEST_CASE("property: conversion matches the adjacency oracle across families and seeds") {
    for (const FamilySpec& fam : default_families()) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(fam.name);
        CAPTURE(seed);
        for (const BRepPart& part : generate_synthetic_family(fam, 2, seed)) check_graph_matches_oracle(part);
      }
    }
  }

  TEST_CASE("normalization maps a side-4 box at (10,0,0) to a side-2 box at the origin") {
    const BRepPart box = testing::box_part("b", {8, -2, -2}, {4, 4, 4});
    const BoundingBox bb = bounding_box(normalize_part(box));
    CHECK(near(bb.lo, {-1, -1, -1}, 1e-12));
    CHECK(near(bb.hi, {1, 1, 1}, 1e-12));
  }

  TEST_CASE("normalization fixes a centered unit part and is idempotent") {
    const BRepPart unit = testing::box_part("u", {-1, -1, -1}, {2, 2, 2});
    CHECK(to_jsonl_line(normalize_part(unit)) == to_jsonl_line(unit));
    for (const FamilySpec& fam : default_families()) {
      const BRepPart part = generate_synthetic_family(fam, 1, 21).front();
      const BRepPart once = normalize_part(part), twice = normalize_part(once);
      const BoundingBox a = bounding_box(once), b = bounding_box(twice);
      CHECK(near(a.lo, b.lo, 1e-12));
      CHECK(near(a.hi, b.hi, 1e-12));
      for (std::size_t i = 0; i < once.faces.size(); ++i) {
        CHECK(near(evaluate_face(once.faces[i], 0.3, 0.7).point, evaluate_face(twice.faces[i], 0.3, 0.7).point, 1e-12));
      }
    }
  }

  TEST_CASE("normalization preserves topology") {
    for (const FamilySpec& fam : default_families()) {
      const BRepPart part = generate_synthetic_family(fam, 1, 4).front();
      const PartGraph before = to_graph(part).graph, after = to_graph(normalize_part(part)).graph;
      CHECK(before.nodes == after.nodes);
      REQUIRE(before.edges.size() == after.edges.size());
      for (std::size_t i = 0; i < before.edges.size(); ++i) {
        CHECK(before.edges[i].a == after.edges[i].a);
        CHECK(before.edges[i].b == after.edges[i].b);
      }
    }
  }

  TEST_CASE("zero-extent part is degenerate") {
    BRepPart p;
    p.id = "dot";
    p.faces.push_back({"f", {Sphere{{5, 0, 0}, {0, 0, 1}, {1, 0, 0}, 1e-14}, false}, {0, 1, -1, 1}, {}, {}});
    CHECK(kind_of([&] { normalize_part(p); }) == ErrorKind::Degenerate);
  }

  TEST_CASE("box family keeps 6 nodes and 12 edges for every draw") {
    const auto parts = generate_synthetic_family({"box", PartTemplate::Box, {}, {}}, 20, 7);
    REQUIRE(parts.size() == 20);
    for (const BRepPart& p : parts) {
      const PartGraph g = to_graph(p).graph;
      CHECK(g.nodes.size() == 6);
      CHECK(g.edges.size() == 12);
    }
  }

  TEST_CASE("generation is deterministic in the seed") {
    for (const FamilySpec& fam : default_families()) {
      const auto a = generate_synthetic_family(fam, 3, 99), b = generate_synthetic_family(fam, 3, 99);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_jsonl_line(a[i]) == to_jsonl_line(b[i]));
      const auto c = generate_synthetic_family(fam, 3, 100);
      CHECK(to_jsonl_line(a[0]) != to_jsonl_line(c[0]));
    }
  }

  TEST_CASE("L-bracket parts share counts and differ in dimensions") {
    const auto parts = generate_synthetic_family({"lb", PartTemplate::LBracket, {}, {}}, 10, 3);
    const PartGraph g0 = to_graph(parts[0]).graph;
    std::set<long long> first_face_sizes;
    for (const BRepPart& p : parts) {
      const PartGraph g = to_graph(p).graph;
      CHECK(g.nodes.size() == g0.nodes.size());
      CHECK(g.edges.size() == g0.edges.size());
      const BoundingBox bb = bounding_box(p);
      first_face_sizes.insert(std::llround(bb.extent().prod() * 1e6));
    }
    CHECK(first_face_sizes.size() == parts.size());
  }

  TEST_CASE("invalid family specs are spec errors") {
    FamilySpec bad{"neg", PartTemplate::CappedCylinder, {{"radius", {-2.0, -1.0}}}, {}};
    CHECK(kind_of([&] { generate_synthetic_family(bad, 3, 1); }) == ErrorKind::Spec);
    FamilySpec unknown{"u", PartTemplate::Box, {{"wingspan", {1.0, 2.0}}}, {}};
    CHECK(kind_of([&] { generate_synthetic_family(unknown, 3, 1); }) == ErrorKind::Spec);
    FamilySpec inverted{"i", PartTemplate::Box, {{"width", {3.0, 1.0}}}, {}};
    CHECK(kind_of([&] { generate_synthetic_family(inverted, 3, 1); }) == ErrorKind::Spec);
  }

  TEST_CASE("part validation rejects broken references") {
    BRepPart p = testing::box_part("b", {0, 0, 0}, {1, 1, 1});
    p.faces[0].loops = {{"missing"}};
    CHECK(kind_of([&] { validate(p); }) == ErrorKind::Contract);
    BRepPart q = testing::box_part("b", {0, 0, 0}, {1, 1, 1});
    q.curves[0].adjacent_faces = {"f0", "f0"};
    CHECK(kind_of([&] { validate(q); }) == ErrorKind::Contract);
    BRepPart r = testing::box_part("b", {0, 0, 0}, {1, 1, 1});
    r.faces[1].id = "f0";
    CHECK(kind_of([&] { validate(r); }) == ErrorKind::Contract);
  }

  TEST_CASE("JSONL round-trip is lossless for every family") {
    for (const FamilySpec& fam : default_families()) {
      for (const BRepPart& part : generate_synthetic_family(fam, 2, 13)) {
        const std::string line = to_jsonl_line(part);
        CHECK(to_jsonl_line(parse_parts_jsonl(line + "\n").front()) == line);
      }
    }
  }

  TEST_CASE("malformed JSONL names the line") {
    const std::string good = to_jsonl_line(testing::box_part("b", {0, 0, 0}, {1, 1, 1}));
    try {
      parse_parts_jsonl(good + "\n{not json\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Format);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("family spec JSON round-trip") {
    for (const FamilySpec& fam : default_families()) {
      const FamilySpec back = family_from_json(family_to_json(fam));
      CHECK(back.name == fam.name);
      CHECK(back.shape == fam.shape);
      CHECK(family_to_json(back) == family_to_json(fam));
    }
  }
}
