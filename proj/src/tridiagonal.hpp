#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "conebif/error.hpp"

namespace conebif::detail {

// LU factorization of a symmetric tridiagonal matrix without pivoting
// (used for SPD angular systems only).
class TridiagonalFactor {
 public:
  TridiagonalFactor(std::span<const double> diag, std::span<const double> off)
      : off_(off.begin(), off.end()), pivot_(diag.size()) {
    const std::size_t n = diag.size();
    for (std::size_t k = 0; k < n; ++k) {
      pivot_[k] = diag[k] - (k > 0 ? off_[k - 1] * off_[k - 1] / pivot_[k - 1] : 0.0);
      if (pivot_[k] == 0.0) throw NumericalError("tridiagonal system is singular");
    }
  }

  void solve(std::span<const double> rhs, std::span<double> out) const {
    const std::size_t n = pivot_.size();
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = rhs[k] - (k > 0 ? off_[k - 1] * z[k - 1] / pivot_[k - 1] : 0.0);
    for (std::size_t k = n; k-- > 0;) {
      out[k] = (z[k] - (k + 1 < n ? off_[k] * out[k + 1] : 0.0)) / pivot_[k];
    }
  }

 private:
  std::vector<double> off_;
  std::vector<double> pivot_;
};

}  // namespace conebif::detail
