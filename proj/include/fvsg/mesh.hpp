#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fvsg/errors.hpp"

namespace fvsg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm2(const Vec2& v) { return dot(v, v); }

enum class BoundaryTag : std::uint8_t { interior, dirichlet, neumann, periodic };

inline const char* tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::interior: return "interior";
    case BoundaryTag::dirichlet: return "dirichlet";
    case BoundaryTag::neumann: return "neumann";
    case BoundaryTag::periodic: return "periodic";
  }
  return "?";
}

struct Cell {
  Vec2 center;
  double measure = 0.0;
};

// An oriented edge. `a` is the owning cell; `normal` points out of it.
// For interior edges `b` is the neighbor and the b-side normal is -normal.
// Periodic edges couple two boundary faces into one interior-like edge:
// `midpoint` / `midpoint_b` are the two physical face midpoints and `dist`
// is the center-to-face distance summed over both sides.
struct Edge {
  std::int32_t a = -1;
  std::int32_t b = -1;  // -1 for dirichlet/neumann edges
  BoundaryTag tag = BoundaryTag::interior;
  double measure = 0.0;  // m(sigma); 1 in 1-D
  double dist = 0.0;     // d_sigma
  double tau = 0.0;      // m(sigma)/d_sigma
  Vec2 midpoint;
  Vec2 midpoint_b;
  Vec2 normal;

  bool coupled() const { return b >= 0; }
};

struct SideTags {
  BoundaryTag xmin = BoundaryTag::dirichlet;
  BoundaryTag xmax = BoundaryTag::dirichlet;
  BoundaryTag ymin = BoundaryTag::dirichlet;
  BoundaryTag ymax = BoundaryTag::dirichlet;
};

// Refines the tag of individual dirichlet/neumann boundary edges by face
// midpoint (used for partially-contacted sides). May not produce periodic.
using BoundaryRefiner = std::function<std::optional<BoundaryTag>(const Vec2&)>;

// Orthogonal structured mesh (1-D interval or 2-D cartesian). Cell centers
// are centroids, so the admissibility (orthogonality) condition holds
// exactly by construction. Immutable once built.
class Mesh {
 public:
  static Mesh interval(int n_cells, double a, double b,
                       BoundaryTag left = BoundaryTag::dirichlet,
                       BoundaryTag right = BoundaryTag::dirichlet) {
    if (n_cells < 1) throw std::invalid_argument("interval: n_cells must be >= 1");
    if (!(a < b)) throw std::invalid_argument("interval: need a < b");
    const bool lp = left == BoundaryTag::periodic;
    const bool rp = right == BoundaryTag::periodic;
    if (lp != rp) throw std::invalid_argument("interval: periodic sides must be paired");
    if (lp && n_cells < 2) throw std::invalid_argument("interval: periodic needs >= 2 cells");

    Mesh m;
    m.dim_ = 1;
    const double dx = (b - a) / n_cells;
    m.size_ = dx;
    m.hx_ = dx;
    m.cells_.resize(n_cells);
    for (int i = 0; i < n_cells; ++i)
      m.cells_[i] = {{a + (i + 0.5) * dx, 0.0}, dx};

    for (int i = 0; i + 1 < n_cells; ++i) {
      Edge e;
      e.a = i;
      e.b = i + 1;
      e.measure = 1.0;
      e.dist = dx;
      e.tau = 1.0 / dx;
      e.midpoint = e.midpoint_b = {a + (i + 1) * dx, 0.0};
      e.normal = {1.0, 0.0};
      m.edges_.push_back(e);
    }
    if (lp) {
      Edge e;
      e.a = 0;
      e.b = n_cells - 1;
      e.tag = BoundaryTag::periodic;
      e.measure = 1.0;
      e.dist = dx;
      e.tau = 1.0 / dx;
      e.midpoint = {a, 0.0};
      e.midpoint_b = {b, 0.0};
      e.normal = {-1.0, 0.0};
      m.edges_.push_back(e);
    } else {
      Edge el;
      el.a = 0;
      el.tag = left;
      el.measure = 1.0;
      el.dist = dx / 2.0;
      el.tau = 2.0 / dx;
      el.midpoint = el.midpoint_b = {a, 0.0};
      el.normal = {-1.0, 0.0};
      m.edges_.push_back(el);
      Edge er;
      er.a = n_cells - 1;
      er.tag = right;
      er.measure = 1.0;
      er.dist = dx / 2.0;
      er.tau = 2.0 / dx;
      er.midpoint = er.midpoint_b = {b, 0.0};
      er.normal = {1.0, 0.0};
      m.edges_.push_back(er);
    }
    m.banded_ = !lp;
    return m;
  }

  static Mesh cartesian(int nx, int ny, double xa, double xb, double ya, double yb,
                        SideTags tags = {}, const BoundaryRefiner& refine = {}) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("cartesian: sizes must be >= 1");
    if (!(xa < xb) || !(ya < yb)) throw std::invalid_argument("cartesian: degenerate rectangle");
    const bool px = tags.xmin == BoundaryTag::periodic;
    const bool py = tags.ymin == BoundaryTag::periodic;
    if (px != (tags.xmax == BoundaryTag::periodic) || py != (tags.ymax == BoundaryTag::periodic))
      throw std::invalid_argument("cartesian: periodic sides must be paired");
    if ((px && nx < 2) || (py && ny < 2))
      throw std::invalid_argument("cartesian: periodic direction needs >= 2 cells");

    Mesh m;
    m.dim_ = 2;
    const double dx = (xb - xa) / nx;
    const double dy = (yb - ya) / ny;
    m.size_ = std::hypot(dx, dy);
    m.hx_ = dx;
    m.hy_ = dy;
    m.cells_.resize(static_cast<std::size_t>(nx) * ny);
    auto id = [nx](int ix, int iy) { return iy * nx + ix; };
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        m.cells_[id(ix, iy)] = {{xa + (ix + 0.5) * dx, ya + (iy + 0.5) * dy}, dx * dy};

    // interior edges, x-direction then y-direction
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix + 1 < nx; ++ix) {
        Edge e;
        e.a = id(ix, iy);
        e.b = id(ix + 1, iy);
        e.measure = dy;
        e.dist = dx;
        e.tau = dy / dx;
        e.midpoint = e.midpoint_b = {xa + (ix + 1) * dx, ya + (iy + 0.5) * dy};
        e.normal = {1.0, 0.0};
        m.edges_.push_back(e);
      }
    for (int iy = 0; iy + 1 < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        Edge e;
        e.a = id(ix, iy);
        e.b = id(ix, iy + 1);
        e.measure = dx;
        e.dist = dy;
        e.tau = dx / dy;
        e.midpoint = e.midpoint_b = {xa + (ix + 0.5) * dx, ya + (iy + 1) * dy};
        e.normal = {0.0, 1.0};
        m.edges_.push_back(e);
      }
    if (px)
      for (int iy = 0; iy < ny; ++iy) {
        Edge e;
        e.a = id(0, iy);
        e.b = id(nx - 1, iy);
        e.tag = BoundaryTag::periodic;
        e.measure = dy;
        e.dist = dx;
        e.tau = dy / dx;
        e.midpoint = {xa, ya + (iy + 0.5) * dy};
        e.midpoint_b = {xb, ya + (iy + 0.5) * dy};
        e.normal = {-1.0, 0.0};
        m.edges_.push_back(e);
      }
    if (py)
      for (int ix = 0; ix < nx; ++ix) {
        Edge e;
        e.a = id(ix, 0);
        e.b = id(ix, ny - 1);
        e.tag = BoundaryTag::periodic;
        e.measure = dx;
        e.dist = dy;
        e.tau = dx / dy;
        e.midpoint = {xa + (ix + 0.5) * dx, ya};
        e.midpoint_b = {xa + (ix + 0.5) * dx, yb};
        e.normal = {0.0, -1.0};
        m.edges_.push_back(e);
      }

    auto resolve = [&refine](BoundaryTag side, const Vec2& mid) {
      if (refine)
        if (auto t = refine(mid)) {
          if (*t == BoundaryTag::periodic || *t == BoundaryTag::interior)
            throw std::invalid_argument("cartesian: refiner may only pick dirichlet/neumann");
          return *t;
        }
      return side;
    };
    if (!px) {
      for (int iy = 0; iy < ny; ++iy) {
        Edge e;
        e.a = id(0, iy);
        e.measure = dy;
        e.dist = dx / 2.0;
        e.tau = dy / (dx / 2.0);
        e.midpoint = e.midpoint_b = {xa, ya + (iy + 0.5) * dy};
        e.normal = {-1.0, 0.0};
        e.tag = resolve(tags.xmin, e.midpoint);
        m.edges_.push_back(e);
      }
      for (int iy = 0; iy < ny; ++iy) {
        Edge e;
        e.a = id(nx - 1, iy);
        e.measure = dy;
        e.dist = dx / 2.0;
        e.tau = dy / (dx / 2.0);
        e.midpoint = e.midpoint_b = {xb, ya + (iy + 0.5) * dy};
        e.normal = {1.0, 0.0};
        e.tag = resolve(tags.xmax, e.midpoint);
        m.edges_.push_back(e);
      }
    }
    if (!py) {
      for (int ix = 0; ix < nx; ++ix) {
        Edge e;
        e.a = id(ix, 0);
        e.measure = dx;
        e.dist = dy / 2.0;
        e.tau = dx / (dy / 2.0);
        e.midpoint = e.midpoint_b = {xa + (ix + 0.5) * dx, ya};
        e.normal = {0.0, -1.0};
        e.tag = resolve(tags.ymin, e.midpoint);
        m.edges_.push_back(e);
      }
      for (int ix = 0; ix < nx; ++ix) {
        Edge e;
        e.a = id(ix, ny - 1);
        e.measure = dx;
        e.dist = dy / 2.0;
        e.tau = dx / (dy / 2.0);
        e.midpoint = e.midpoint_b = {xa + (ix + 0.5) * dx, yb};
        e.normal = {0.0, 1.0};
        e.tag = resolve(tags.ymax, e.midpoint);
        m.edges_.push_back(e);
      }
    }
    return m;
  }

  int dim() const { return dim_; }
  double size() const { return size_; }  // max cell diameter
  double hx() const { return hx_; }      // cell side lengths (uniform)
  double hy() const { return hy_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  // Interval meshes without the periodic wrap assemble to tridiagonal systems.
  bool banded() const { return banded_; }

  double domain_measure() const {
    double s = 0.0;
    for (const Cell& c : cells_) s += c.measure;
    return s;
  }

  bool has_dirichlet() const {
    for (const Edge& e : edges_)
      if (e.tag == BoundaryTag::dirichlet) return true;
    return false;
  }

  // Debug dump: one row per cell, then one row per edge.
  void dump_csv(std::ostream& os) const {
    os << "# cells\nid,x" << (dim_ == 2 ? ",y" : "") << ",measure\n";
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      os << i << ',' << cells_[i].center.x;
      if (dim_ == 2) os << ',' << cells_[i].center.y;
      os << ',' << cells_[i].measure << '\n';
    }
    os << "# edges\nid,cell_a,cell_b,measure,dist,tau\n";
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      os << i << ',' << e.a << ',';
      if (e.coupled())
        os << e.b;
      else
        os << tag_name(e.tag);
      os << ',' << e.measure << ',' << e.dist << ',' << e.tau << '\n';
    }
  }

 private:
  int dim_ = 1;
  double size_ = 0.0;
  double hx_ = 0.0;
  double hy_ = 0.0;
  bool banded_ = false;
  std::vector<Cell> cells_;
  std::vector<Edge> edges_;
};

using VectorField = std::function<Vec2(const Vec2&)>;

// Mean of q . n_{K,sigma} over the edge, midpoint rule (exact for affine q).
// The b-side value of an interior edge is the exact negation of the a-side
// value; periodic edges evaluate each side at its own physical face.
inline double edge_velocity(const Mesh& mesh, const VectorField& q, int edge_id, int cell_id) {
  const Edge& e = mesh.edges().at(edge_id);
  if (cell_id == e.a) return q ? dot(q(e.midpoint), e.normal) : 0.0;
  if (!e.coupled() || cell_id != e.b)
    throw std::invalid_argument("edge_velocity: cell not incident to edge");
  if (!q) return 0.0;
  if (e.tag == BoundaryTag::periodic) return dot(q(e.midpoint_b), -e.normal);
  return -dot(q(e.midpoint), e.normal);
}

// Per-edge velocities for both sides; qb = -qa except across periodic pairs.
struct EdgeVelocities {
  std::vector<double> qa, qb;
};

inline EdgeVelocities precompute_edge_velocities(const Mesh& mesh, const VectorField& q) {
  EdgeVelocities v;
  const auto& edges = mesh.edges();
  v.qa.resize(edges.size());
  v.qb.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    v.qa[i] = q ? dot(q(edges[i].midpoint), edges[i].normal) : 0.0;
    v.qb[i] = (q && edges[i].tag == BoundaryTag::periodic)
                  ? dot(q(edges[i].midpoint_b), -edges[i].normal)
                  : -v.qa[i];
  }
  return v;
}

}  // namespace fvsg
