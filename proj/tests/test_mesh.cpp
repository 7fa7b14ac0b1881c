#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "slafem/fem.hpp"
#include "slafem/material.hpp"
#include "slafem/mesh.hpp"
#include "test_support.hpp"

using namespace slafem;

namespace {

std::vector<double> intact(int n, double v) { return std::vector<double>(n, v); }

/// Nodes of `m` that element `q` references, as coordinates.
bool quad_touches_x(const Mesh& m, const QuadElement& q, double x, double tol = 1e-9) {
  return std::any_of(q.nodes.begin(), q.nodes.end(),
                     [&](int n) { return std::abs(m.nodes[n].x - x) <= tol; });
}

}  // namespace

// ---------------------------------------------------------------------------
// structured grids and path insertion

TEST_CASE("structured grid has the expected nodes, quads and orientation") {
  const Mesh m = make_grid({0.0, 1.0, 2.5}, {0.0, 2.0}, 4.0, 7);
  CHECK(m.nodes.size() == 6);
  CHECK(m.quads.size() == 2);
  CHECK(m.thickness == 4.0);
  CHECK(m.interfaces.empty());
  CHECK_NOTHROW(m.validate());
  for (const auto& q : m.quads) CHECK(q.material_id == 7);

  // node (1, 2) exists exactly once
  int hits = 0;
  for (const auto& n : m.nodes) {
    if (n.x == 1.0 && n.y == 2.0) ++hits;
  }
  CHECK(hits == 1);

  CHECK_THROWS_AS(make_grid({0.0, 1.0, 1.0}, {0.0, 1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({0.0}, {0.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("splitting a grid along a full vertical path duplicates that column") {
  const Mesh grid = make_grid({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, 1.0);
  std::map<int, int> pairs;
  const Mesh m =
      insert_cohesive_path(grid, Polyline{{1.0, 0.0}, {1.0, 2.0}}, 0.0, &pairs);

  CHECK(m.nodes.size() == grid.nodes.size() + 3);
  CHECK(m.interfaces.size() == 2);
  CHECK(pairs.size() == 3);
  CHECK_NOTHROW(m.validate());

  for (const auto& [orig, dup] : pairs) {
    CHECK(orig != dup);
    CHECK(m.nodes[orig].x == m.nodes[dup].x);
    CHECK(m.nodes[orig].y == m.nodes[dup].y);

    // the duplicate carries the plus face, which lies on the left half here
    for (const auto& q : m.quads) {
      const bool uses_orig = std::count(q.nodes.begin(), q.nodes.end(), orig) > 0;
      const bool uses_dup = std::count(q.nodes.begin(), q.nodes.end(), dup) > 0;
      if (uses_orig) CHECK(quad_touches_x(m, q, 2.0));  // right column
      if (uses_dup) CHECK(quad_touches_x(m, q, 0.0));   // left column
      CHECK_FALSE((uses_orig && uses_dup));
    }
  }

  // interface faces pair the original (minus) with its duplicate (plus)
  for (const auto& f : m.interfaces) {
    CHECK(pairs.at(f.nodes[0]) == f.nodes[2]);
    CHECK(pairs.at(f.nodes[1]) == f.nodes[3]);
  }

  SUBCASE("a leading traction-free stretch suppresses its interface elements") {
    std::map<int, int> p2;
    const Mesh slit =
        insert_cohesive_path(grid, Polyline{{1.0, 0.0}, {1.0, 2.0}}, 1.0, &p2);
    CHECK(slit.interfaces.size() == 1);
    CHECK(p2.size() == 3);  // the slit faces are still split
    CHECK_NOTHROW(slit.validate());
    // the surviving interface is the upper edge
    const auto& f = slit.interfaces[0];
    CHECK(slit.nodes[f.nodes[0]].y == 1.0);
    CHECK(slit.nodes[f.nodes[1]].y == 2.0);
  }

  SUBCASE("an interior endpoint is a closed tip and keeps a single node") {
    std::map<int, int> p2;
    const Mesh half =
        insert_cohesive_path(grid, Polyline{{1.0, 0.0}, {1.0, 1.0}}, 0.0, &p2);
    CHECK(half.nodes.size() == grid.nodes.size() + 1);
    CHECK(p2.size() == 1);
    REQUIRE(half.interfaces.size() == 1);
    const auto& f = half.interfaces[0];
    CHECK(f.nodes[1] == f.nodes[3]);  // shared tip node
    CHECK(f.nodes[0] != f.nodes[2]);
    CHECK_NOTHROW(half.validate());
  }

  SUBCASE("an empty polyline is a no-op") {
    const Mesh same = insert_cohesive_path(grid, {});
    CHECK(same.nodes.size() == grid.nodes.size());
    CHECK(same.interfaces.empty());
  }

  SUBCASE("a path off the mesh edges is rejected") {
    CHECK_THROWS_AS(insert_cohesive_path(grid, Polyline{{0.5, 0.0}, {0.5, 2.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(insert_cohesive_path(grid, Polyline{{0.0, 0.0}, {2.0, 2.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("a split strip at penalty stiffness matches the unsplit strip") {
  // the same strip, with and without the interface column; at a high normal
  // penalty the split model's extra flexibility is exactly sigma/k per ip
  const double E = 25000.0, t = 8.0, load = 1600.0, width = 40.0, height = 20.0;
  const std::vector<Material> mats = {Material::isotropic(E, 0.0)};

  Mesh split = testsupport::make_tension_strip(4, 2, width, height, t, load);
  Mesh whole = split;  // same supports/loads/monitors, rebuilt without the path
  {
    Mesh grid = make_grid({0.0, 10.0, 20.0, 30.0, 40.0}, {0.0, 10.0, 20.0}, t);
    grid.supports = {{testsupport::find_node(grid, 0.0, 0.0), Dof::X},
                     {testsupport::find_node(grid, 0.0, 10.0), Dof::X},
                     {testsupport::find_node(grid, 0.0, 20.0), Dof::X},
                     {testsupport::find_node(grid, 0.0, 0.0), Dof::Y}};
    const double q = load / height;
    grid.control = {"load", Monitor::Kind::Load, {}};
    for (double y : {0.0, 10.0, 20.0}) {
      const int n = testsupport::find_node(grid, width, y);
      grid.loads.push_back({n, Dof::X, q * (y == 10.0 ? 10.0 : 5.0)});
      grid.control.terms.push_back({n, Dof::X, 1.0});
    }
    grid.response = {"disp", Monitor::Kind::Disp,
                     {{testsupport::find_node(grid, width, 10.0), Dof::X, 1.0}}};
    grid.validate();
    whole = grid;
  }

  FemModel split_model(split, mats);
  FemModel whole_model(whole, mats);

  const double k0 = 1e6;
  const int nip = split.interface_ip_count();
  const auto rs = split_model.solve(intact(nip, k0), intact(nip, 1e7), 1.0);
  const auto rw = whole_model.solve({}, {}, 1.0);

  const double sigma = load / (height * t);  // 10 MPa uniform
  CHECK(testsupport::rel_err(rw.response, sigma * width / E) < 1e-9);
  CHECK(std::abs((rs.response - rw.response) - sigma / k0) < 1e-12);
}

// ---------------------------------------------------------------------------
// beam generator

TEST_CASE("unnotched bending beam: supports, loads, monitors, path") {
  const Mesh m = generate_notched_beam(100.0, 20.0, 10.0, 0.0, 0.0, 5.0,
                                       {ResponseKind::Cmod, 1200.0});
  CHECK_NOTHROW(m.validate());
  CHECK(m.interfaces.size() == 4);  // full depth, four 5 mm edges
  CHECK(m.supports.size() == 3);

  REQUIRE(m.loads.size() == 2);  // the top mid-span pair shares the load
  double total = 0.0;
  for (const auto& pl : m.loads) {
    CHECK(pl.dir == Dof::Y);
    CHECK(pl.value == -600.0);
    total += pl.value;
    CHECK(m.nodes[pl.node].y == 20.0);
  }
  CHECK(total == -1200.0);

  CHECK(m.control.kind == Monitor::Kind::Load);
  REQUIRE(m.control.terms.size() == 2);
  for (const auto& term : m.control.terms) CHECK(term.weight == -1.0);

  // CMOD straddles the crack mouth at the bottom
  CHECK(m.response.kind == Monitor::Kind::Disp);
  REQUIRE(m.response.terms.size() == 2);
  CHECK(m.response.terms[0].weight == 1.0);
  CHECK(m.response.terms[1].weight == -1.0);
  for (const auto& term : m.response.terms) {
    CHECK(m.nodes[term.node].y == 0.0);
    CHECK(m.nodes[term.node].x == 50.0);
  }

  SUBCASE("the loaded beam opens the mouth and carries the applied force") {
    FemModel model(m, {Material::isotropic(30000.0, 0.2)});
    const int nip = m.interface_ip_count();
    const auto r = model.solve(intact(nip, 1e6), intact(nip, 1e7), 1.0);
    CHECK(testsupport::rel_err(r.control, 1200.0) < 1e-12);
    CHECK(r.response > 0.0);  // tension opens the mouth
  }
}

TEST_CASE("slit and void notches shape the beam as requested") {
  SUBCASE("a zero-width notch is a traction-free slit") {
    const Mesh m = generate_notched_beam(100.0, 20.0, 10.0, 5.0, 0.0, 5.0);
    CHECK(m.interfaces.size() == 3);  // one edge of the path is the slit
    CHECK(m.quads.size() == 80);      // nothing removed
    double y_min = 1e30;
    for (const auto& f : m.interfaces) {
      y_min = std::min(y_min, m.nodes[f.nodes[0]].y);
    }
    CHECK(y_min == 5.0);  // interfaces only above the notch tip
  }

  SUBCASE("a wide notch removes element columns and keeps mouth monitors") {
    const Mesh m = generate_notched_beam(100.0, 20.0, 10.0, 5.0, 6.0, 5.0);
    CHECK_NOTHROW(m.validate());
    CHECK(m.quads.size() == 78);  // one 5 mm column dropped on each side
    CHECK(m.interfaces.size() == 3);
    REQUIRE(m.response.terms.size() == 2);
    const auto& a = m.nodes[m.response.terms[0].node];
    const auto& b = m.nodes[m.response.terms[1].node];
    CHECK(a.y == 0.0);
    CHECK(b.y == 0.0);
    CHECK(a.x - 50.0 == doctest::Approx(50.0 - b.x));  // symmetric mouth corners
  }

  SUBCASE("a ligament shorter than three elements is rejected") {
    CHECK_THROWS_AS(generate_notched_beam(100.0, 20.0, 10.0, 10.0, 0.0, 5.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_notched_beam(100.0, 20.0, 10.0, 25.0, 0.0, 5.0),
                    std::invalid_argument);
  }
}

TEST_CASE("compact-tension plate generator") {
  const Mesh m = generate_compact_tension(50.0, 50.0, 10.0, 20.0, 2.0, 5.0);
  CHECK_NOTHROW(m.validate());
  CHECK(m.interfaces.size() >= 3);
  CHECK(m.supports.size() == 3);
  REQUIRE(m.loads.size() == 1);
  CHECK(m.loads[0].dir == Dof::Y);

  // every interface sits on the mid-height ligament, past the slit
  for (const auto& f : m.interfaces) {
    CHECK(m.nodes[f.nodes[0]].y == 25.0);
    CHECK(m.nodes[f.nodes[0]].x >= 20.0 - 1e-9);
  }

  SUBCASE("an opening pin force opens the notch mouth") {
    FemModel model(m, {Material::isotropic(30000.0, 0.2)});
    const int nip = m.interface_ip_count();
    const auto r = model.solve(intact(nip, 1e6), intact(nip, 1e7), 1.0);
    CHECK(r.response > 0.0);
    CHECK(testsupport::rel_err(r.control, 1.0) < 1e-12);
  }

  SUBCASE("too short a ligament is rejected") {
    CHECK_THROWS_AS(generate_compact_tension(50.0, 50.0, 10.0, 46.0, 2.0, 5.0),
                    std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------
// validation of broken meshes

TEST_CASE("mesh validation rejects tampered meshes") {
  const Mesh good = testsupport::make_tension_strip(2, 2, 20.0, 20.0, 5.0, 100.0);
  CHECK_NOTHROW(good.validate());

  SUBCASE("non-dense node ids") {
    Mesh bad = good;
    bad.nodes[1].id = 0;
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  }
  SUBCASE("inverted quad") {
    Mesh bad = good;
    std::swap(bad.quads[0].nodes[1], bad.quads[0].nodes[3]);
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  }
  SUBCASE("interface pair pulled apart") {
    Mesh bad = good;
    bad.nodes[bad.interfaces[0].nodes[2]].x += 0.5;
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  }
  SUBCASE("load on a missing node") {
    Mesh bad = good;
    bad.loads.push_back({999, Dof::X, 1.0});
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  }
  SUBCASE("monitor without terms") {
    Mesh bad = good;
    bad.control.terms.clear();
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  }
}

// ---------------------------------------------------------------------------
// plain-text input and output

TEST_CASE("mesh file round trip preserves the model and the solution") {
  const Mesh beam = generate_notched_beam(100.0, 20.0, 10.0, 5.0, 0.0, 5.0,
                                          {ResponseKind::Cmod, 900.0});
  testsupport::TempDir dir;
  const std::string p1 = dir.path() + "/beam.txt";
  const std::string p2 = dir.path() + "/beam2.txt";

  write_mesh(beam, p1);
  const Mesh back = read_mesh(p1);
  CHECK_NOTHROW(back.validate());
  CHECK(back.nodes.size() == beam.nodes.size());
  CHECK(back.quads.size() == beam.quads.size());
  CHECK(back.interfaces.size() == beam.interfaces.size());
  CHECK(back.supports.size() == beam.supports.size());
  CHECK(back.loads.size() == beam.loads.size());
  CHECK(back.thickness == beam.thickness);
  CHECK(back.control.kind == Monitor::Kind::Load);
  CHECK(back.response.name == beam.response.name);

  // identical solutions on both copies
  const std::vector<Material> mats = {Material::isotropic(30000.0, 0.2)};
  FemModel ma(beam, mats), mb(back, mats);
  const int nip = beam.interface_ip_count();
  const auto ra = ma.solve(intact(nip, 1e6), intact(nip, 1e7), 1.0);
  const auto rb = mb.solve(intact(nip, 1e6), intact(nip, 1e7), 1.0);
  REQUIRE(ra.u.size() == rb.u.size());
  double umax = 0.0, udiff = 0.0;
  for (int i = 0; i < ra.u.size(); ++i) {
    umax = std::max(umax, std::abs(ra.u[i]));
    udiff = std::max(udiff, std::abs(ra.u[i] - rb.u[i]));
  }
  CHECK(udiff <= 1e-12 * umax);
  CHECK(ra.response == doctest::Approx(rb.response).epsilon(1e-12));

  // a second write is byte-identical: the format is self-stable
  write_mesh(back, p2);
  CHECK(testsupport::slurp(p1) == testsupport::slurp(p2));

  SUBCASE("garbage input is rejected with an error") {
    const std::string bad = dir.path() + "/bad.txt";
    std::ofstream(bad) << "NODES\n0 0 zero\n";
    CHECK_THROWS(read_mesh(bad));
    CHECK_THROWS(read_mesh(dir.path() + "/missing.txt"));
  }
}
