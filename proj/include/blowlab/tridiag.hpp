// Thomas solver for the constant-coefficient SPD tridiagonal systems
// (diag, off, off) arising from implicit steps of the 1D discrete Laplacian.

#pragma once

#include <stdexcept>
#include <vector>

namespace blowlab {

/// Factors (diag + off*(shift left) + off*(shift right)) once and solves
/// repeatedly. The matrices used here are SPD, so no pivoting is needed.
class TridiagSolver {
 public:
  TridiagSolver() = default;

  TridiagSolver(int n, double diag, double off) { reset(n, diag, off); }

  void reset(int n, double diag, double off) {
    n_ = n;
    off_ = off;
    cp_.resize(n);
    inv_piv_.resize(n);
    double piv = diag;
    if (piv <= 0.0) throw std::runtime_error("tridiagonal factorization lost positivity");
    inv_piv_[0] = 1.0 / piv;
    cp_[0] = off / piv;
    for (int i = 1; i < n; ++i) {
      piv = diag - off * cp_[i - 1];
      if (piv <= 0.0) throw std::runtime_error("tridiagonal factorization lost positivity");
      inv_piv_[i] = 1.0 / piv;
      cp_[i] = off * inv_piv_[i];
    }
  }

  int size() const { return n_; }

  /// In-place solve with unit stride.
  void solve(double* x) const {
    x[0] *= inv_piv_[0];
    for (int i = 1; i < n_; ++i) x[i] = (x[i] - off_ * x[i - 1]) * inv_piv_[i];
    for (int i = n_ - 2; i >= 0; --i) x[i] -= cp_[i] * x[i + 1];
  }

  /// In-place solve over a strided slice (column sweeps of a row-major 2D field).
  void solve_strided(double* x, int stride) const {
    x[0] *= inv_piv_[0];
    for (int i = 1; i < n_; ++i)
      x[i * stride] = (x[i * stride] - off_ * x[(i - 1) * stride]) * inv_piv_[i];
    for (int i = n_ - 2; i >= 0; --i) x[i * stride] -= cp_[i] * x[(i + 1) * stride];
  }

 private:
  int n_ = 0;
  double off_ = 0.0;
  std::vector<double> cp_, inv_piv_;
};

}  // namespace blowlab
