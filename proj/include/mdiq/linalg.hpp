#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mdiq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Tolerances used across the library. Constructors symmetrize, so these are
// checked before the cleanup is applied.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEigRecTol = 1e-10;

/// Dense complex Hermitian operator carrying its tensor-factor dimensions.
///
/// Every state, POVM element and effective-POVM element in the library is one
/// of these. The factor list travels with the operator so that partial trace
/// and partial transpose are index-checked at the call site; the spaces in a
/// quantum-input scenario (input registers vs. shares of the state) are easy
/// to misalign silently otherwise.
class HermitianOperator {
 public:
  // Single factor of dimension mat.rows().
  explicit HermitianOperator(const ComplexMatrix& mat);
  HermitianOperator(const ComplexMatrix& mat, std::vector<int> factors);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const std::vector<int>& factors() const { return factors_; }
  const ComplexMatrix& matrix() const { return mat_; }

  Complex operator()(int r, int c) const { return mat_(r, c); }
  double trace() const { return mat_.trace().real(); }

  static HermitianOperator identity(std::vector<int> factors);
  static HermitianOperator zero(std::vector<int> factors);

  /// Same entries, new factor split (product must equal dim).
  HermitianOperator reshaped(std::vector<int> factors) const;

 private:
  ComplexMatrix mat_;
  std::vector<int> factors_;
};

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

/// Trace out every factor not listed in `keep` (indices into factors()).
HermitianOperator partial_trace(const HermitianOperator& h,
                                const std::vector<int>& keep);

/// Transpose one tensor factor in place.
HermitianOperator partial_transpose(const HermitianOperator& h, int factor);

struct EigResult {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns aligned with values
};

EigResult eig_hermitian(const HermitianOperator& h);

double min_eigenvalue(const HermitianOperator& h);

/// [[Re H, -Im H], [Im H, Re H]]: 2d-dimensional real symmetric embedding.
/// H is PSD iff the embedding is PSD; every eigenvalue doubles in multiplicity.
RealMatrix realify(const HermitianOperator& h);

// Raw (non-Hermitian) counterparts used inside simulation pipelines where
// intermediate products are not Hermitian.
ComplexMatrix kron_raw(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace_raw(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<int>& keep);
ComplexMatrix partial_transpose_raw(const ComplexMatrix& m,
                                    const std::vector<int>& dims, int factor);

/// Tr[a b] without forming the product.
Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace mdiq
