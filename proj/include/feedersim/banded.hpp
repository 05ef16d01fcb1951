// Banded LU with partial pivoting, LAPACK-style band storage.
//
// The Newton step of a radial power flow couples each bus only to its line
// neighbors; with unknowns interleaved per bus the Jacobian has bandwidth 3,
// so factor/solve is O(n) instead of O(n^3).
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace feedersim {

class BandedMatrix {
 public:
  // n x n matrix with kl sub- and ku super-diagonals. Storage reserves kl
  // extra super-diagonals for pivoting fill.
  BandedMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * n, 0.0), piv_(n, 0) {
    if (n < 1 || kl < 0 || ku < 0) throw std::invalid_argument("BandedMatrix: bad shape");
  }

  int size() const { return n_; }

  // Entry A(i, j); only |i - j| within the declared band is addressable.
  double& operator()(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
      throw std::out_of_range("BandedMatrix: index outside band");
    return ab_[idx(i, j)];
  }

  void clear() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
  }

  // LU factorization with partial pivoting. Returns false on a singular
  // (to machine precision) matrix.
  bool factor() {
    const int fill = kl_ + ku_;  // effective upper bandwidth after pivoting
    for (int j = 0; j < n_; ++j) {
      const int last_row = std::min(n_ - 1, j + kl_);
      int p = j;
      double p_abs = std::abs(ab_[idx(j, j)]);
      for (int i = j + 1; i <= last_row; ++i) {
        const double a = std::abs(ab_[idx(i, j)]);
        if (a > p_abs) {
          p_abs = a;
          p = i;
        }
      }
      if (p_abs == 0.0) return false;
      piv_[j] = p;
      const int last_col = std::min(n_ - 1, j + fill);
      if (p != j) {
        for (int c = j; c <= last_col; ++c) std::swap(ab_[idx(j, c)], ab_[idx(p, c)]);
      }
      const double pivot = ab_[idx(j, j)];
      for (int i = j + 1; i <= last_row; ++i) {
        const double l = ab_[idx(i, j)] / pivot;
        ab_[idx(i, j)] = l;
        if (l != 0.0) {
          for (int c = j + 1; c <= last_col; ++c) ab_[idx(i, c)] -= l * ab_[idx(j, c)];
        }
      }
    }
    factored_ = true;
    return true;
  }

  // Solve A x = b in place using the stored factors.
  void solve(std::span<double> b) const {
    if (!factored_) throw std::logic_error("BandedMatrix::solve before factor");
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandedMatrix::solve: size");
    const int fill = kl_ + ku_;
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
      const int last_row = std::min(n_ - 1, j + kl_);
      for (int i = j + 1; i <= last_row; ++i) b[i] -= ab_[idx(i, j)] * b[j];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      const int last_col = std::min(n_ - 1, i + fill);
      double s = b[i];
      for (int c = i + 1; c <= last_col; ++c) s -= ab_[idx(i, c)] * b[c];
      b[i] = s / ab_[idx(i, i)];
    }
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j);
  }

  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> piv_;
  bool factored_ = false;
};

}  // namespace feedersim
