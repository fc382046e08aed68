#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fvsg/errors.hpp"

namespace fvsg {

// Tridiagonal direct solver (Thomas algorithm) with one iterative-refinement
// pass; the hot path for 1-D time stepping.
struct Tridiagonal {
  std::vector<double> lower;  // n-1
  std::vector<double> diag;   // n
  std::vector<double> upper;  // n-1

  void resize(std::size_t n) {
    lower.assign(n > 0 ? n - 1 : 0, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n > 0 ? n - 1 : 0, 0.0);
  }

  void setZero() {
    std::fill(lower.begin(), lower.end(), 0.0);
    std::fill(diag.begin(), diag.end(), 0.0);
    std::fill(upper.begin(), upper.end(), 0.0);
  }

  std::size_t size() const { return diag.size(); }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += lower[i - 1] * x[i - 1];
      if (i + 1 < n) v += upper[i] * x[i + 1];
      y[i] = v;
    }
  }

  // Elimination into scratch arrays; coefficients are left untouched.
  void solve_once(const std::vector<double>& rhs, std::vector<double>& x,
                  std::vector<double>& cw, std::vector<double>& dw) const {
    const std::size_t n = size();
    cw.resize(n);
    dw.resize(n);
    x.resize(n);
    if (n == 0) return;
    double piv = diag[0];
    if (piv == 0.0) throw StepFailure("tridiagonal solve: zero pivot");
    cw[0] = n > 1 ? upper[0] / piv : 0.0;
    dw[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
      piv = diag[i] - lower[i - 1] * cw[i - 1];
      if (piv == 0.0) throw StepFailure("tridiagonal solve: zero pivot");
      cw[i] = i + 1 < n ? upper[i] / piv : 0.0;
      dw[i] = (rhs[i] - lower[i - 1] * dw[i - 1]) / piv;
    }
    x[n - 1] = dw[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dw[i] - cw[i] * x[i + 1];
  }

  // Solve + one refinement step; returns the final |rhs - T x|_inf.
  double solve(const std::vector<double>& rhs, std::vector<double>& x,
               std::vector<double>& cw, std::vector<double>& dw,
               std::vector<double>& resid, std::vector<double>& corr) const {
    solve_once(rhs, x, cw, dw);
    const std::size_t n = size();
    resid.resize(n);
    multiply(x, resid);
    for (std::size_t i = 0; i < n; ++i) resid[i] = rhs[i] - resid[i];
    solve_once(resid, corr, cw, dw);
    for (std::size_t i = 0; i < n; ++i) x[i] += corr[i];
    multiply(x, resid);
    double rinf = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      rinf = std::max(rinf, std::abs(rhs[i] - resid[i]));
    return rinf;
  }
};

// Sparse LU with the symbolic analysis done once (the assembly pattern is
// fixed over a run) and one refinement pass per solve.
class SparseLuSolver {
 public:
  void factorize(const Eigen::SparseMatrix<double>& a) {
    if (!analyzed_) {
      lu_.analyzePattern(a);
      analyzed_ = true;
    }
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success)
      throw StepFailure("sparse factorization failed (singular system)");
  }

  // Returns the final residual inf-norm.
  double solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
               Eigen::VectorXd& x) const {
    x = lu_.solve(b);
    Eigen::VectorXd r = b - a * x;
    x += lu_.solve(r);
    r = b - a * x;
    return r.lpNorm<Eigen::Infinity>();
  }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool analyzed_ = false;
};

}  // namespace fvsg
