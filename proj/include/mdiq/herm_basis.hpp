#pragma once

#include "mdiq/linalg.hpp"

namespace mdiq {

/// Orthonormal real coordinates on the space of d x d complex Hermitian
/// matrices: d diagonal entries, then (Re, Im) pairs scaled by sqrt(2) for
/// each off-diagonal i < j. coords(X) . coords(Y) = Tr[X Y].
class HermBasis {
 public:
  explicit HermBasis(int d) : d_(d) {}

  int dim() const { return d_; }
  int size() const { return d_ * d_; }

  RealVector coords(const ComplexMatrix& x) const {
    const double s = std::sqrt(2.0);
    RealVector u(size());
    int k = 0;
    for (int i = 0; i < d_; ++i) u(k++) = x(i, i).real();
    for (int i = 0; i < d_; ++i)
      for (int j = i + 1; j < d_; ++j) {
        u(k++) = s * x(i, j).real();
        u(k++) = s * x(i, j).imag();
      }
    return u;
  }

  ComplexMatrix matrix(const RealVector& u) const {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix x = ComplexMatrix::Zero(d_, d_);
    int k = 0;
    for (int i = 0; i < d_; ++i) x(i, i) = u(k++);
    for (int i = 0; i < d_; ++i)
      for (int j = i + 1; j < d_; ++j) {
        const double re = s * u(k++);
        const double im = s * u(k++);
        x(i, j) = Complex(re, im);
        x(j, i) = Complex(re, -im);
      }
    return x;
  }

  /// Coordinate matrix of a linear map on Hermitian space, built by applying
  /// `op` to each basis element. Result maps input coords to output coords.
  template <typename F>
  RealMatrix map_matrix(int out_dim, F&& op) const {
    HermBasis out(out_dim);
    RealMatrix m(out.size(), size());
    for (int k = 0; k < size(); ++k) {
      RealVector e = RealVector::Zero(size());
      e(k) = 1.0;
      m.col(k) = out.coords(op(matrix(e)));
    }
    return m;
  }

 private:
  int d_;
};

}  // namespace mdiq
