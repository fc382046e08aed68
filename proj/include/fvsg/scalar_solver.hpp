#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <vector>

#include <Eigen/Sparse>

#include "fvsg/errors.hpp"
#include "fvsg/field.hpp"
#include "fvsg/flux.hpp"
#include "fvsg/linear.hpp"
#include "fvsg/mesh.hpp"

namespace fvsg {

struct BoundarySpec {
  // Dirichlet trace u_bar(x, t); may be empty when the mesh has no Dirichlet
  // edges. Homogeneous Neumann and periodic need no data.
  std::function<double(const Vec2&, double)> dirichlet;
};

struct ProblemSpec {
  const Mesh* mesh = nullptr;
  FluxModel flux;
  VectorField velocity;  // q(x); empty means q = 0
  BoundarySpec boundary;
  std::function<double(const Vec2&)> initial;
  double t_end = 0.0;
  double dt = 0.0;
};

struct StepReport {
  int newton_iterations = 0;  // 0 for the SG family
  double residual = 0.0;      // inf-norm of the solved system's residual
  double rhs_scale = 0.0;
  double wall_seconds = 0.0;
};

// Cell means of the initial datum via tensor 2-point Gauss quadrature
// (exact for cubics). Negative means from quadrature on rough data are
// clamped to zero with a warning.
inline CellField discretize_initial(const Mesh& mesh,
                                    const std::function<double(const Vec2&)>& u0) {
  constexpr double node = 0.28867513459481287;  // 1/(2 sqrt(3))
  CellField f(mesh.cells().size(), 0.0, 0.0);
  int clamped = 0;
  for (std::size_t i = 0; i < mesh.cells().size(); ++i) {
    const Cell& c = mesh.cells()[i];
    double mean = 0.0;
    if (mesh.dim() == 1) {
      const double g = node * mesh.hx();
      mean = 0.5 * (u0({c.center.x - g, 0.0}) + u0({c.center.x + g, 0.0}));
    } else {
      const double gx = node * mesh.hx(), gy = node * mesh.hy();
      for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
          mean += 0.25 * u0({c.center.x + sx * gx, c.center.y + sy * gy});
    }
    if (mean < 0.0) {
      mean = 0.0;
      ++clamped;
    }
    f[i] = mean;
  }
  if (clamped > 0)
    std::cerr << "discretize_initial: clamped " << clamped << " negative cell means to 0\n";
  return f;
}

inline double total_mass(const Mesh& mesh, const CellField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += mesh.cells()[i].measure * f[i];
  return s;
}

struct StepOut {
  int newton_iterations = 0;
  double residual = 0.0;
  double rhs_scale = 0.0;
};

// One backward-Euler transport solve
//   m(K)(U_K^{n+1} - U_K^n)/dt + sum_sigma F_{K,sigma}^{n+1} = 0
// on a fixed mesh, reusable across steps and fields (the drift-diffusion
// system runs both species through one kernel). Callers supply per-edge
// velocities and Dirichlet trace values; dr data for the SG family is taken
// from time n. Assembly walks edges in id order and reuses the bitwise-equal
// coefficient for the two incident cells, so interior fluxes cancel exactly
// in the mass balance.
class TransportKernel {
 public:
  TransportKernel(const Mesh& mesh, FluxModel flux) : mesh_(&mesh), flux_(std::move(flux)) {
    flux_.validate();
    const std::size_t n = mesh.cells().size();
    if (mesh.banded()) {
      tri_.resize(n);
    } else {
      a_.resize(static_cast<int>(n), static_cast<int>(n));
      b_.resize(static_cast<int>(n));
      x2_.resize(static_cast<int>(n));
    }
    rhs_.resize(n);
    x_.resize(n);
  }

  const Mesh& mesh() const { return *mesh_; }
  const FluxModel& flux() const { return flux_; }

  StepOut step(const std::vector<double>& un, const std::vector<double>& trace_n,
               const std::vector<double>& trace_np1, const EdgeVelocities& vel, double dt,
               std::vector<double>& out) {
    if (sg_family(flux_.kind)) return step_sg(un, trace_n, trace_np1, vel, dt, out);
    return step_newton(un, trace_np1, vel, dt, out);
  }

  // SG-family system A^n U^{n+1} = S^n in generic sparse form (also used by
  // the banded path's tests).
  void assemble_sg(const std::vector<double>& un, const std::vector<double>& trace_n,
                   const std::vector<double>& trace_np1, const EdgeVelocities& vel, double dt,
                   Eigen::SparseMatrix<double>& a, Eigen::VectorXd& s) const {
    const auto& cells = mesh_->cells();
    const auto& edges = mesh_->edges();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(cells.size() + 4 * edges.size());
    s.resize(static_cast<int>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double mdt = cells[i].measure / dt;
      trips.emplace_back(i, i, mdt);
      s[static_cast<int>(i)] = mdt * un[i];
    }
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const Edge& e = edges[ei];
      if (e.tag == BoundaryTag::neumann) continue;
      if (e.coupled()) {
        const EdgeCoefficients ca = sg_edge_coefs(un[e.a], un[e.b], vel.qa[ei], e.dist);
        trips.emplace_back(e.a, e.a, e.tau * ca.coef_k);
        trips.emplace_back(e.a, e.b, -e.tau * ca.coef_nb);
        EdgeCoefficients cb;
        if (e.tag == BoundaryTag::periodic)
          cb = sg_edge_coefs(un[e.b], un[e.a], vel.qb[ei], e.dist);
        else
          cb = {ca.coef_nb, ca.coef_k, 0.0};
        trips.emplace_back(e.b, e.b, e.tau * cb.coef_k);
        trips.emplace_back(e.b, e.a, -e.tau * cb.coef_nb);
      } else {  // dirichlet
        const EdgeCoefficients ca = sg_edge_coefs(un[e.a], trace_n[ei], vel.qa[ei], e.dist);
        trips.emplace_back(e.a, e.a, e.tau * ca.coef_k);
        s[e.a] += e.tau * ca.coef_nb * trace_np1[ei];
      }
    }
    a.resize(static_cast<int>(cells.size()), static_cast<int>(cells.size()));
    a.setFromTriplets(trips.begin(), trips.end());
  }

 private:
  EdgeCoefficients sg_edge_coefs(double un_k, double un_nb, double q, double d) const {
    if (flux_.kind == FluxKind::sg_classic)
      return sg_classic_coefficients(q, d, flux_.sg_classic_eps());
    return sg_ext_coefficients(flux_.law, flux_.kind, un_k, un_nb, q, d);
  }

  FluxLinearization upwind_edge(double u_k, double u_nb, double q, double d) const {
    if (flux_.kind == FluxKind::classical_upwind)
      return classical_upwind_residual(flux_.law, u_k, u_nb, q, d);
    return nonlinear_upwind_residual(flux_.law, u_k, u_nb, q, d);
  }

  StepOut step_sg(const std::vector<double>& un, const std::vector<double>& trace_n,
                  const std::vector<double>& trace_np1, const EdgeVelocities& vel, double dt,
                  std::vector<double>& out) {
    StepOut rep;
    if (mesh_->banded()) {
      const auto& cells = mesh_->cells();
      const auto& edges = mesh_->edges();
      const std::size_t n = cells.size();
      tri_.setZero();
      for (std::size_t i = 0; i < n; ++i) {
        const double mdt = cells[i].measure / dt;
        tri_.diag[i] = mdt;
        rhs_[i] = mdt * un[i];
      }
      for (std::size_t ei = 0; ei < edges.size(); ++ei) {
        const Edge& e = edges[ei];
        if (e.tag == BoundaryTag::neumann) continue;
        if (e.coupled()) {  // interval interior edge: b = a+1
          const EdgeCoefficients c = sg_edge_coefs(un[e.a], un[e.b], vel.qa[ei], e.dist);
          tri_.diag[e.a] += e.tau * c.coef_k;
          tri_.upper[e.a] -= e.tau * c.coef_nb;
          tri_.diag[e.b] += e.tau * c.coef_nb;
          tri_.lower[e.a] -= e.tau * c.coef_k;
        } else {
          const EdgeCoefficients c = sg_edge_coefs(un[e.a], trace_n[ei], vel.qa[ei], e.dist);
          tri_.diag[e.a] += e.tau * c.coef_k;
          rhs_[e.a] += e.tau * c.coef_nb * trace_np1[ei];
        }
      }
      rep.residual = tri_.solve(rhs_, x_, cw_, dw_, resid_, corr_);
      rep.rhs_scale = inf_norm(rhs_);
      out = x_;
    } else {
      assemble_sg(un, trace_n, trace_np1, vel, dt, a_, b_);
      lu_.factorize(a_);
      rep.residual = lu_.solve(a_, b_, x2_);
      rep.rhs_scale = b_.lpNorm<Eigen::Infinity>();
      out.assign(x2_.data(), x2_.data() + x2_.size());
    }
    if (!(rep.residual <= 1e-11 * (rep.rhs_scale + 1.0)))
      throw StepFailure("transport solve residual too large", rep.residual);
    // M-matrix structure guarantees nonnegativity; wipe roundoff-level dust
    double umax = 0.0;
    for (double v : out) umax = std::max(umax, std::abs(v));
    for (double& v : out) {
      if (v < -1e-10 * (1.0 + umax))
        throw StepFailure("SG solve produced a negative state (M-matrix violated)", v);
      if (v < 0.0) v = 0.0;
    }
    return rep;
  }

  double newton_residual(const std::vector<double>& u, const std::vector<double>& un,
                         const std::vector<double>& trace_np1, const EdgeVelocities& vel,
                         double dt, std::vector<double>& r) const {
    const auto& cells = mesh_->cells();
    const auto& edges = mesh_->edges();
    r.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      r[i] = cells[i].measure / dt * (u[i] - un[i]);
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const Edge& e = edges[ei];
      if (e.tag == BoundaryTag::neumann) continue;
      if (e.coupled()) {
        const FluxLinearization fa = upwind_edge(u[e.a], u[e.b], vel.qa[ei], e.dist);
        r[e.a] += e.tau * fa.value;
        if (e.tag == BoundaryTag::periodic)
          r[e.b] += e.tau * upwind_edge(u[e.b], u[e.a], vel.qb[ei], e.dist).value;
        else
          r[e.b] -= e.tau * fa.value;
      } else {
        r[e.a] += e.tau * upwind_edge(u[e.a], trace_np1[ei], vel.qa[ei], e.dist).value;
      }
    }
    double rn = 0.0;
    for (double v : r) rn = std::max(rn, std::abs(v));
    return rn;
  }

  StepOut step_newton(const std::vector<double>& un, const std::vector<double>& trace_np1,
                      const EdgeVelocities& vel, double dt, std::vector<double>& out) {
    const auto& cells = mesh_->cells();
    const auto& edges = mesh_->edges();
    const std::size_t n = cells.size();
    StepOut rep;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      scale = std::max(scale, cells[i].measure / dt * un[i]);
    rep.rhs_scale = scale;
    const double tol = 1e-11 * (1.0 + scale);

    std::vector<double> u = un;
    std::vector<double>& r = nr_;
    std::vector<double>& rt = nrt_;
    double rnorm = newton_residual(u, un, trace_np1, vel, dt, r);

    constexpr int kMaxIter = 50;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      if (rnorm <= tol) {
        rep.newton_iterations = iter;
        rep.residual = rnorm;
        out = u;
        return rep;
      }
      // Jacobian
      if (mesh_->banded()) {
        tri_.setZero();
        for (std::size_t i = 0; i < n; ++i) tri_.diag[i] = cells[i].measure / dt;
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
          const Edge& e = edges[ei];
          if (e.tag == BoundaryTag::neumann) continue;
          if (e.coupled()) {
            const FluxLinearization f = upwind_edge(u[e.a], u[e.b], vel.qa[ei], e.dist);
            tri_.diag[e.a] += e.tau * f.d_k;
            tri_.upper[e.a] += e.tau * f.d_nb;
            tri_.diag[e.b] -= e.tau * f.d_nb;
            tri_.lower[e.a] -= e.tau * f.d_k;
          } else {
            tri_.diag[e.a] +=
                e.tau * upwind_edge(u[e.a], trace_np1[ei], vel.qa[ei], e.dist).d_k;
          }
        }
        for (std::size_t i = 0; i < n; ++i) rhs_[i] = -r[i];
        tri_.solve(rhs_, x_, cw_, dw_, resid_, corr_);
      } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(n + 4 * edges.size());
        for (std::size_t i = 0; i < n; ++i)
          trips.emplace_back(i, i, cells[i].measure / dt);
        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
          const Edge& e = edges[ei];
          if (e.tag == BoundaryTag::neumann) continue;
          if (e.coupled()) {
            const FluxLinearization fa = upwind_edge(u[e.a], u[e.b], vel.qa[ei], e.dist);
            trips.emplace_back(e.a, e.a, e.tau * fa.d_k);
            trips.emplace_back(e.a, e.b, e.tau * fa.d_nb);
            FluxLinearization fb;
            if (e.tag == BoundaryTag::periodic) {
              fb = upwind_edge(u[e.b], u[e.a], vel.qb[ei], e.dist);
            } else {
              fb = {0.0, -fa.d_nb, -fa.d_k};
            }
            trips.emplace_back(e.b, e.b, e.tau * fb.d_k);
            trips.emplace_back(e.b, e.a, e.tau * fb.d_nb);
          } else {
            const FluxLinearization f =
                upwind_edge(u[e.a], trace_np1[ei], vel.qa[ei], e.dist);
            trips.emplace_back(e.a, e.a, e.tau * f.d_k);
          }
        }
        a_.resize(static_cast<int>(n), static_cast<int>(n));
        a_.setFromTriplets(trips.begin(), trips.end());
        lu_.factorize(a_);
        b_.resize(static_cast<int>(n));
        for (std::size_t i = 0; i < n; ++i) b_[static_cast<int>(i)] = -r[i];
        lu_.solve(a_, b_, x2_);
        x_.assign(x2_.data(), x2_.data() + x2_.size());
      }
      // damped update, iterates kept nonnegative
      double t = 1.0;
      double rtry = 0.0;
      std::vector<double>& utry = nu_;
      utry.resize(n);
      bool accepted = false;
      for (int halve = 0; halve < 30; ++halve) {
        for (std::size_t i = 0; i < n; ++i) utry[i] = std::max(0.0, u[i] + t * x_[i]);
        rtry = newton_residual(utry, un, trace_np1, vel, dt, rt);
        if (rtry < rnorm || rtry <= tol) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted)
        throw StepFailure("Newton step stagnated, residual " + format_g17(rnorm), rnorm);
      u.swap(utry);
      r.swap(rt);
      rnorm = rtry;
    }
    if (rnorm <= tol) {
      rep.newton_iterations = kMaxIter;
      rep.residual = rnorm;
      out = u;
      return rep;
    }
    throw StepFailure("Newton did not converge in 50 iterations, residual " + format_g17(rnorm),
                      rnorm);
  }

  static double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  const Mesh* mesh_;
  FluxModel flux_;
  Tridiagonal tri_;
  std::vector<double> rhs_, x_, cw_, dw_, resid_, corr_, nr_, nrt_, nu_;
  Eigen::SparseMatrix<double> a_;
  Eigen::VectorXd b_, x2_;
  SparseLuSolver lu_;
};

struct RunResult {
  CellField state;
  int steps = 0;
};

// Backward-Euler time stepping of the scheme on one ProblemSpec: initial and
// boundary discretization, per-step solve, observer hooks.
class ScalarSolver {
 public:
  explicit ScalarSolver(const ProblemSpec& spec)
      : spec_(spec), kernel_(require_mesh(spec), spec.flux) {
    if (!(spec_.dt > 0.0)) throw ConfigError("ProblemSpec: dt must be positive");
    if (!(spec_.t_end >= spec_.dt)) throw ConfigError("ProblemSpec: need dt <= t_end");
    const Mesh& m = *spec_.mesh;
    if (m.has_dirichlet() && !spec_.boundary.dirichlet)
      throw ConfigError("ProblemSpec: mesh has Dirichlet edges but no trace");
    if (spec_.initial)
      for (const Cell& c : m.cells())
        if (spec_.initial(c.center) < 0.0)
          throw ConfigError("ProblemSpec: initial datum is negative");
    u_ = spec_.initial ? discretize_initial(m, spec_.initial)
                       : CellField(m.cells().size(), 0.0);
    vel_ = precompute_edge_velocities(m, spec_.velocity);
    trace_n_.assign(m.edges().size(), 0.0);
    trace_np1_.assign(m.edges().size(), 0.0);
    for (std::size_t e = 0; e < m.edges().size(); ++e)
      if (m.edges()[e].tag == BoundaryTag::dirichlet)
        trace_n_[e] = check_trace(spec_.boundary.dirichlet(m.edges()[e].midpoint, 0.0));
  }

  const Mesh& mesh() const { return *spec_.mesh; }
  const ProblemSpec& problem() const { return spec_; }
  const CellField& state() const { return u_; }
  int step_index() const { return n_; }
  double time() const { return n_ * spec_.dt; }
  const EdgeVelocities& velocities() const { return vel_; }
  const std::vector<double>& traces_n() const { return trace_n_; }
  const std::vector<double>& traces_np1() const { return trace_np1_; }

  void set_state(CellField f) {
    if (f.size() != u_.size()) throw std::invalid_argument("set_state: size mismatch");
    u_ = std::move(f);
  }

  // Space-time mean of the Dirichlet trace over sigma x [t^n, t^{n+1}]:
  // midpoint rule in space, 2-point Gauss in time.
  double dirichlet_trace(int edge, int n) const {
    const Edge& e = mesh().edges().at(edge);
    if (e.tag != BoundaryTag::dirichlet)
      throw std::invalid_argument("dirichlet_trace: not a Dirichlet edge");
    constexpr double node = 0.28867513459481287;  // 1/(2 sqrt(3))
    const double tc = (n + 0.5) * spec_.dt;
    const double h = spec_.dt;
    return 0.5 * (spec_.boundary.dirichlet(e.midpoint, tc - node * h) +
                  spec_.boundary.dirichlet(e.midpoint, tc + node * h));
  }

  StepReport step() {
    const auto t0 = std::chrono::steady_clock::now();
    refresh_traces();
    StepOut o = kernel_.step(u_.values, trace_n_, trace_np1_, vel_, spec_.dt, unew_);
    u_.values.swap(unew_);
    ++n_;
    u_.time = time();
    trace_n_.swap(trace_np1_);
    StepReport rep;
    rep.newton_iterations = o.newton_iterations;
    rep.residual = o.residual;
    rep.rhs_scale = o.rhs_scale;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  using Observer = std::function<void(const ScalarSolver&, const StepReport&)>;

  // N_T = floor(T/dt) steps (with a tolerance so T/dt that is an integer up
  // to roundoff is not truncated).
  RunResult run(const std::vector<Observer>& observers = {}) {
    const long n_steps = static_cast<long>(std::floor(spec_.t_end / spec_.dt + 1e-9));
    while (n_ < n_steps) {
      StepReport rep = step();
      for (const Observer& ob : observers) ob(*this, rep);
    }
    return {u_, n_};
  }

  // SG-family system for the upcoming step (exposed for tests/diagnostics).
  void assemble_linear(Eigen::SparseMatrix<double>& a, Eigen::VectorXd& s) {
    if (!sg_family(spec_.flux.kind))
      throw ConfigError("assemble_linear: flux is not in the SG family");
    refresh_traces();
    kernel_.assemble_sg(u_.values, trace_n_, trace_np1_, vel_, spec_.dt, a, s);
  }

 private:
  static const Mesh& require_mesh(const ProblemSpec& s) {
    if (!s.mesh) throw ConfigError("ProblemSpec: mesh not set");
    return *s.mesh;
  }

  static double check_trace(double v) {
    if (v < 0.0) throw ConfigError("Dirichlet trace is negative");
    return v;
  }

  void refresh_traces() {
    const auto& edges = mesh().edges();
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].tag == BoundaryTag::dirichlet)
        trace_np1_[e] = check_trace(dirichlet_trace(static_cast<int>(e), n_));
  }

  ProblemSpec spec_;
  TransportKernel kernel_;
  CellField u_;
  int n_ = 0;
  EdgeVelocities vel_;
  std::vector<double> trace_n_, trace_np1_, unew_;
};

// One time-slab term of the discrete H1 seminorm
//   sum_int tau |U_b - U_a|^2 + sum_dirichlet tau |U_sigma - U_a|^2
// (periodic edges count with the interior sum).
inline double h1_seminorm_step_term(const Mesh& mesh, const std::vector<double>& u,
                                    const std::vector<double>& trace_np1) {
  double s = 0.0;
  const auto& edges = mesh.edges();
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    if (e.coupled()) {
      const double d = u[e.b] - u[e.a];
      s += e.tau * d * d;
    } else if (e.tag == BoundaryTag::dirichlet) {
      const double d = trace_np1[ei] - u[e.a];
      s += e.tau * d * d;
    }
  }
  return s;
}

// Trajectory diagnostic ||u||^2_{1,D} accumulated over executed steps.
class H1SeminormAccumulator {
 public:
  void observe(const ScalarSolver& s, const StepReport&) {
    total_ += s.problem().dt * h1_seminorm_step_term(s.mesh(), s.state().values, s.traces_n());
  }
  ScalarSolver::Observer observer() {
    return [this](const ScalarSolver& s, const StepReport& r) { observe(s, r); };
  }
  double value() const { return total_; }

 private:
  double total_ = 0.0;
};

struct MaxPrincipleReport {
  bool divergence_free = false;
  double min_value = 0.0;
  double max_value = 0.0;
  bool pass = false;
};

// Checks the discrete divergence-free condition sum_sigma m(sigma) q_{K,sigma} = 0
// per cell, then the L-infinity bounds m <= U <= M over the whole trajectory.
inline MaxPrincipleReport max_principle_check(const Mesh& mesh, const EdgeVelocities& vel,
                                              const std::vector<CellField>& trajectory,
                                              double lower, double upper) {
  std::vector<double> div(mesh.cells().size(), 0.0), scale(mesh.cells().size(), 0.0);
  const auto& edges = mesh.edges();
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    div[e.a] += e.measure * vel.qa[ei];
    scale[e.a] += e.measure * std::abs(vel.qa[ei]);
    if (e.coupled()) {
      div[e.b] += e.measure * vel.qb[ei];
      scale[e.b] += e.measure * std::abs(vel.qb[ei]);
    }
  }
  MaxPrincipleReport rep;
  rep.divergence_free = true;
  for (std::size_t i = 0; i < div.size(); ++i)
    if (std::abs(div[i]) > 1e-12 * (1.0 + scale[i])) rep.divergence_free = false;
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();
  for (const CellField& f : trajectory)
    for (double v : f.values) {
      rep.min_value = std::min(rep.min_value, v);
      rep.max_value = std::max(rep.max_value, v);
    }
  rep.pass = rep.divergence_free && rep.min_value >= lower - 1e-12 &&
             rep.max_value <= upper + 1e-12;
  return rep;
}

}  // namespace fvsg
