#include "mdiq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdiq {

namespace {

int factor_product(const std::vector<int>& factors) {
  int p = 1;
  for (int f : factors) {
    if (f < 1) throw std::invalid_argument("factor dimensions must be >= 1");
    p *= f;
  }
  return p;
}

void check_finite(const ComplexMatrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("non-finite matrix entries");
}

// Row-major strides for a factor list.
std::vector<long> strides(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

}  // namespace

HermitianOperator::HermitianOperator(const ComplexMatrix& mat)
    : HermitianOperator(mat, {static_cast<int>(mat.rows())}) {}

HermitianOperator::HermitianOperator(const ComplexMatrix& mat,
                                     std::vector<int> factors)
    : mat_(mat), factors_(std::move(factors)) {
  if (mat_.rows() != mat_.cols())
    throw std::invalid_argument("HermitianOperator: matrix not square");
  if (factor_product(factors_) != mat_.rows())
    throw std::invalid_argument(
        "HermitianOperator: factor product does not match dimension");
  check_finite(mat_);
  const double herm_err = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermTol)
    throw std::invalid_argument("HermitianOperator: not Hermitian (max dev " +
                                std::to_string(herm_err) + ")");
  // Symmetrize so kron/trace chains do not accumulate drift.
  mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
}

HermitianOperator HermitianOperator::identity(std::vector<int> factors) {
  const int d = factor_product(factors);
  return HermitianOperator(ComplexMatrix::Identity(d, d), std::move(factors));
}

HermitianOperator HermitianOperator::zero(std::vector<int> factors) {
  const int d = factor_product(factors);
  return HermitianOperator(ComplexMatrix::Zero(d, d), std::move(factors));
}

HermitianOperator HermitianOperator::reshaped(std::vector<int> factors) const {
  return HermitianOperator(mat_, std::move(factors));
}

ComplexMatrix kron_raw(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  std::vector<int> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  return HermitianOperator(kron_raw(a.matrix(), b.matrix()), std::move(factors));
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  for (int k : keep)
    if (k < 0 || k >= nf)
      throw std::invalid_argument("partial_trace: factor index out of range");
  std::vector<bool> kept(nf, false);
  for (int k : keep) kept[k] = true;

  std::vector<int> keep_dims, trace_dims, keep_idx, trace_idx;
  for (int i = 0; i < nf; ++i) {
    if (kept[i]) {
      keep_dims.push_back(dims[i]);
      keep_idx.push_back(i);
    } else {
      trace_dims.push_back(dims[i]);
      trace_idx.push_back(i);
    }
  }

  const long dk = std::accumulate(keep_dims.begin(), keep_dims.end(), 1L,
                                  std::multiplies<long>());
  const long dt = std::accumulate(trace_dims.begin(), trace_dims.end(), 1L,
                                  std::multiplies<long>());
  const auto full_stride = strides(dims);
  const auto k_stride = strides(keep_dims);
  const auto t_stride = strides(trace_dims);

  // Full-space row index from a (kept, traced) multi-index pair.
  auto compose = [&](long ki, long ti) {
    long idx = 0;
    for (size_t a = 0; a < keep_idx.size(); ++a)
      idx += ((ki / k_stride[a]) % keep_dims[a]) * full_stride[keep_idx[a]];
    for (size_t a = 0; a < trace_idx.size(); ++a)
      idx += ((ti / t_stride[a]) % trace_dims[a]) * full_stride[trace_idx[a]];
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (long t = 0; t < dt; ++t) acc += m(compose(r, t), compose(c, t));
      out(r, c) = acc;
    }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& h,
                                const std::vector<int>& keep) {
  std::vector<int> keep_dims;
  std::vector<bool> kept(h.factors().size(), false);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(h.factors().size()))
      throw std::invalid_argument("partial_trace: factor index out of range");
    kept[k] = true;
  }
  for (size_t i = 0; i < h.factors().size(); ++i)
    if (kept[i]) keep_dims.push_back(h.factors()[i]);
  if (keep_dims.empty()) keep_dims.push_back(1);
  return HermitianOperator(partial_trace_raw(h.matrix(), h.factors(), keep),
                           std::move(keep_dims));
}

ComplexMatrix partial_transpose_raw(const ComplexMatrix& m,
                                    const std::vector<int>& dims, int factor) {
  const int nf = static_cast<int>(dims.size());
  if (factor < 0 || factor >= nf)
    throw std::invalid_argument("partial_transpose: factor index out of range");
  const auto st = strides(dims);
  const long d = m.rows();
  ComplexMatrix out(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) {
      const long rf = (r / st[factor]) % dims[factor];
      const long cf = (c / st[factor]) % dims[factor];
      const long r2 = r + (cf - rf) * st[factor];
      const long c2 = c + (rf - cf) * st[factor];
      out(r2, c2) = m(r, c);
    }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& h, int factor) {
  return HermitianOperator(
      partial_transpose_raw(h.matrix(), h.factors(), factor), h.factors());
}

EigResult eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  EigResult out;
  const int d = h.dim();
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (int i = 0; i < d; ++i) {  // Eigen sorts ascending; we report descending
    out.values[i] = es.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

double min_eigenvalue(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

RealMatrix realify(const HermitianOperator& h) {
  const int d = h.dim();
  RealMatrix out(2 * d, 2 * d);
  const RealMatrix re = h.matrix().real();
  const RealMatrix im = h.matrix().imag();
  out.topLeftCorner(d, d) = re;
  out.bottomRightCorner(d, d) = re;
  out.topRightCorner(d, d) = -im;
  out.bottomLeftCorner(d, d) = im;
  return out;
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw std::invalid_argument("trace_product: incompatible shapes");
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace mdiq
