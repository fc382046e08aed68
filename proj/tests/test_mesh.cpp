#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "fvsg/mesh.hpp"

using namespace fvsg;

TEST_CASE("interval mesh geometry") {
  Mesh m = Mesh::interval(4, 0.0, 1.0);
  REQUIRE(m.n_cells() == 4);
  for (const Cell& c : m.cells()) CHECK(c.measure == Catch::Approx(0.25));
  int interior = 0, boundary = 0;
  for (const Edge& e : m.edges()) {
    if (e.coupled()) {
      ++interior;
      CHECK(e.tau == Catch::Approx(4.0));
      CHECK(e.dist == Catch::Approx(0.25));
    } else {
      ++boundary;
      CHECK(e.tau == Catch::Approx(8.0));
      CHECK(e.dist == Catch::Approx(0.125));
    }
    CHECK(e.measure == 1.0);
  }
  CHECK(interior == 3);
  CHECK(boundary == 2);
  CHECK(m.domain_measure() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m.banded());

  Mesh one = Mesh::interval(1, 0.0, 1.0);
  CHECK(one.n_cells() == 1);
  CHECK(one.n_edges() == 2);

  // Table 1 coarsest grid
  Mesh t1 = Mesh::interval(40, 0.0, 1.0);
  CHECK(t1.size() == Catch::Approx(2.5e-2));

  CHECK_THROWS_AS(Mesh::interval(0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::interval(4, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::interval(4, 0.0, 1.0, BoundaryTag::periodic, BoundaryTag::neumann),
                  std::invalid_argument);
}

TEST_CASE("cartesian mesh geometry") {
  Mesh m = Mesh::cartesian(100, 100, -10.0, 10.0, -10.0, 10.0);
  REQUIRE(m.n_cells() == 10000);
  CHECK(m.size() == Catch::Approx(0.2 * std::sqrt(2.0)));
  CHECK(m.domain_measure() == Catch::Approx(400.0).epsilon(1e-12));

  Mesh single = Mesh::cartesian(1, 1, 0.0, 1.0, 0.0, 1.0);
  CHECK(single.n_cells() == 1);
  CHECK(single.n_edges() == 4);

  Mesh two = Mesh::cartesian(2, 1, 0.0, 2.0, 0.0, 1.0);
  int interior = 0;
  for (const Edge& e : two.edges())
    if (e.coupled()) {
      ++interior;
      CHECK(e.measure == Catch::Approx(1.0));
      CHECK(e.dist == Catch::Approx(1.0));
      CHECK(e.tau == Catch::Approx(1.0));
    }
  CHECK(interior == 1);

  CHECK_THROWS_AS(Mesh::cartesian(0, 3, 0, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::cartesian(2, 2, 0, 0, 0, 1), std::invalid_argument);
}

TEST_CASE("orthogonality and closed-polytope identity") {
  Mesh m = Mesh::cartesian(5, 3, 0.0, 2.5, -1.0, 0.5);
  for (const Edge& e : m.edges()) {
    if (e.coupled() && e.tag == BoundaryTag::interior) {
      const Vec2 d = m.cells()[e.b].center - m.cells()[e.a].center;
      // center line parallel to the normal: cross product vanishes
      CHECK(std::abs(d.x * e.normal.y - d.y * e.normal.x) < 1e-15);
      CHECK(std::abs(std::sqrt(norm2(d)) - e.dist) < 1e-14);
    }
    CHECK(e.tau > 0.0);
  }
  // sum_sigma m(sigma) n_{K,sigma} = 0 per cell
  std::vector<Vec2> acc(m.cells().size());
  for (const Edge& e : m.edges()) {
    acc[e.a] = acc[e.a] + e.measure * e.normal;
    if (e.coupled()) acc[e.b] = acc[e.b] + e.measure * (-e.normal);
  }
  for (const Vec2& v : acc) {
    CHECK(std::abs(v.x) < 1e-12);
    CHECK(std::abs(v.y) < 1e-12);
  }
}

TEST_CASE("periodic boundaries pair edges with matched measure") {
  Mesh m = Mesh::cartesian(4, 4, -10.0, 10.0, -10.0, 10.0,
                           {BoundaryTag::periodic, BoundaryTag::periodic,
                            BoundaryTag::periodic, BoundaryTag::periodic});
  int periodic = 0, boundary = 0;
  for (const Edge& e : m.edges()) {
    if (e.tag == BoundaryTag::periodic) {
      ++periodic;
      REQUIRE(e.coupled());
      CHECK(e.measure == Catch::Approx(5.0));
      CHECK(e.dist == Catch::Approx(5.0));
    }
    if (!e.coupled()) ++boundary;
  }
  CHECK(periodic == 8);
  CHECK(boundary == 0);
  // every cell still closes its polytope
  std::vector<Vec2> acc(m.cells().size());
  for (const Edge& e : m.edges()) {
    acc[e.a] = acc[e.a] + e.measure * e.normal;
    if (e.coupled()) acc[e.b] = acc[e.b] + e.measure * (-e.normal);
  }
  for (const Vec2& v : acc) {
    CHECK(std::abs(v.x) < 1e-12);
    CHECK(std::abs(v.y) < 1e-12);
  }
}

TEST_CASE("boundary refiner splits a side into dirichlet and neumann") {
  SideTags tags{BoundaryTag::neumann, BoundaryTag::neumann, BoundaryTag::dirichlet,
                BoundaryTag::neumann};
  auto refine = [](const Vec2& p) -> std::optional<BoundaryTag> {
    if (p.y == 1.0) return p.x <= 0.25 ? BoundaryTag::dirichlet : BoundaryTag::neumann;
    return std::nullopt;
  };
  tags.ymax = BoundaryTag::dirichlet;
  Mesh m = Mesh::cartesian(8, 8, 0.0, 1.0, 0.0, 1.0, tags, refine);
  int d_top = 0, n_top = 0, d_bottom = 0;
  for (const Edge& e : m.edges()) {
    if (e.coupled()) continue;
    if (e.midpoint.y == 1.0) (e.tag == BoundaryTag::dirichlet ? d_top : n_top)++;
    if (e.midpoint.y == 0.0 && e.tag == BoundaryTag::dirichlet) ++d_bottom;
  }
  CHECK(d_top == 2);  // x in {1/16, 3/16}
  CHECK(n_top == 6);
  CHECK(d_bottom == 8);
}

TEST_CASE("edge velocity: midpoint rule, antisymmetry, discrete divergence") {
  Mesh m = Mesh::cartesian(6, 4, 0.0, 3.0, 0.0, 2.0);

  VectorField q100 = [](const Vec2&) { return Vec2{100.0, 0.0}; };
  VectorField qlin = [](const Vec2& p) { return Vec2{-p.x, -p.y}; };

  // 1-D: q = 100 seen from the left cell of any edge with normal +x
  Mesh line = Mesh::interval(5, 0.0, 1.0);
  for (int e = 0; e < line.n_edges(); ++e) {
    const Edge& ed = line.edges()[e];
    if (ed.coupled()) CHECK(edge_velocity(line, q100, e, ed.a) == Catch::Approx(100.0));
  }

  // q(x) = -x across a vertical edge at x = 2 with normal (1,0)
  bool found = false;
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& ed = m.edges()[e];
    if (ed.coupled() && ed.normal.x == 1.0 && ed.midpoint.x == 2.0) {
      CHECK(edge_velocity(m, qlin, e, ed.a) == Catch::Approx(-2.0));
      found = true;
    }
  }
  REQUIRE(found);

  // zero field
  for (int e = 0; e < m.n_edges(); ++e)
    CHECK(edge_velocity(m, VectorField{}, e, m.edges()[e].a) == 0.0);

  // exact antisymmetry on interior edges
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& ed = m.edges()[e];
    if (ed.coupled() && ed.tag == BoundaryTag::interior)
      CHECK(edge_velocity(m, qlin, e, ed.a) == -edge_velocity(m, qlin, e, ed.b));
  }
  CHECK_THROWS_AS(edge_velocity(m, qlin, 0, m.n_cells() + 5), std::invalid_argument);

  // discrete divergence of a constant field vanishes cellwise
  VectorField qc = [](const Vec2&) { return Vec2{3.0, -2.0}; };
  EdgeVelocities vel = precompute_edge_velocities(m, qc);
  std::vector<double> div(m.cells().size(), 0.0);
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& ed = m.edges()[e];
    div[ed.a] += ed.measure * vel.qa[e];
    if (ed.coupled()) div[ed.b] += ed.measure * vel.qb[e];
  }
  for (double v : div) CHECK(std::abs(v) < 1e-12 * (1.0 + 5.0));
}

TEST_CASE("refining a cartesian mesh halves the size exactly") {
  Mesh coarse = Mesh::cartesian(10, 10, 0.0, 1.0, 0.0, 1.0);
  Mesh fine = Mesh::cartesian(20, 20, 0.0, 1.0, 0.0, 1.0);
  CHECK(fine.size() * 2.0 == coarse.size());
  CHECK(fine.n_cells() == 4 * coarse.n_cells());

  Mesh c1 = Mesh::interval(40, 0.0, 1.0);
  Mesh f1 = Mesh::interval(80, 0.0, 1.0);
  CHECK(f1.size() * 2.0 == c1.size());
}

TEST_CASE("mesh dump lists every cell and edge") {
  Mesh m = Mesh::interval(3, 0.0, 1.0, BoundaryTag::dirichlet, BoundaryTag::neumann);
  std::ostringstream os;
  m.dump_csv(os);
  const std::string s = os.str();
  CHECK(s.find("# cells") != std::string::npos);
  CHECK(s.find("# edges") != std::string::npos);
  CHECK(s.find("dirichlet") != std::string::npos);
  CHECK(s.find("neumann") != std::string::npos);
  // 3 cell rows + 4 edge rows + 2 section titles + 2 column headers
  int lines = 0;
  for (char c : s)
    if (c == '\n') ++lines;
  CHECK(lines == 11);
}
