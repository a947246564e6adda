#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mdiq/linalg.hpp"
#include "test_util.hpp"

using namespace mdiq;

namespace {

ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

HermitianOperator phi_plus() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return HermitianOperator(m, {2, 2});
}

}  // namespace

TEST_CASE("kron basics") {
  auto i2 = HermitianOperator::identity({2});
  auto k = kron(i2, i2);
  CHECK(k.dim() == 4);
  CHECK((k.matrix() - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
  CHECK(k.factors() == std::vector<int>{2, 2});

  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  auto prod = kron(HermitianOperator(p0), HermitianOperator(p1));
  for (int i = 0; i < 4; ++i)
    CHECK(prod(i, i).real() == doctest::Approx(i == 1 ? 1.0 : 0.0));

  auto zz = kron(HermitianOperator(sigma_z()), HermitianOperator(sigma_z()));
  const double expect[4] = {1, -1, -1, 1};
  for (int i = 0; i < 4; ++i)
    CHECK(zz(i, i).real() == doctest::Approx(expect[i]));
}

TEST_CASE("kron associativity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto a = HermitianOperator(test::random_hermitian(rng, 2));
    auto b = HermitianOperator(test::random_hermitian(rng, 3));
    auto c = HermitianOperator(test::random_hermitian(rng, 2));
    auto left = kron(kron(a, b), c);
    auto right = kron(a, kron(b, c));
    CHECK((left.matrix() - right.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(7);
  auto rho_a = test::random_state(rng, {2});
  auto rho_b = test::random_state(rng, {3});
  auto prod = kron(rho_a.op(), rho_b.op());

  auto back = partial_trace(prod, {0});
  CHECK((back.matrix() - rho_a.op().matrix()).cwiseAbs().maxCoeff() < 1e-12);

  auto bell = phi_plus();
  auto red = partial_trace(bell, {0});
  CHECK((red.matrix() - ComplexMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
        1e-12);

  auto full = partial_trace(prod, {});
  CHECK(full.dim() == 1);
  CHECK(full(0, 0).real() == doctest::Approx(1.0));

  // trace preserved
  auto h = HermitianOperator(test::random_hermitian(rng, 6), {2, 3});
  CHECK(partial_trace(h, {1}).trace() == doctest::Approx(h.trace()));

  CHECK_THROWS_AS(partial_trace(h, {2}), std::invalid_argument);
}

TEST_CASE("partial transpose") {
  std::mt19937_64 rng(3);
  auto rho_a = test::random_state(rng, {2});
  auto rho_b = test::random_state(rng, {2});
  auto prod = kron(rho_a.op(), rho_b.op());
  auto pt = partial_transpose(prod, 0);
  CHECK(min_eigenvalue(pt) > -1e-12);  // separable states stay PSD

  auto bell_pt = partial_transpose(phi_plus(), 0);
  CHECK(min_eigenvalue(bell_pt) == doctest::Approx(-0.5).epsilon(1e-10));

  auto h = HermitianOperator(test::random_hermitian(rng, 4), {2, 2});
  auto twice = partial_transpose(partial_transpose(h, 1), 1);
  CHECK((twice.matrix() - h.matrix()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(partial_transpose(h, 0).trace() == doctest::Approx(h.trace()));
}

TEST_CASE("eig_hermitian") {
  auto id = HermitianOperator::identity({4});
  auto e = eig_hermitian(id);
  for (double v : e.values) CHECK(v == doctest::Approx(1.0));

  ComplexMatrix d(2, 2);
  d << 3, 0, 0, -1;
  auto e2 = eig_hermitian(HermitianOperator(d));
  CHECK(e2.values[0] == doctest::Approx(3.0));
  CHECK(e2.values[1] == doctest::Approx(-1.0));

  // reconstruction property on random input
  std::mt19937_64 rng(5);
  auto h = HermitianOperator(test::random_hermitian(rng, 5));
  auto e3 = eig_hermitian(h);
  ComplexMatrix rec = ComplexMatrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    rec += e3.values[i] * (e3.vectors.col(i) * e3.vectors.col(i).adjoint());
  CHECK((rec - h.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 1; i < 5; ++i) CHECK(e3.values[i - 1] >= e3.values[i]);

  // Werner w=1: PT eigenvalues {1/2 x3, -1/2}, confirming the closed form
  // (1+w)/4 (x3), (1-3w)/4 by brute-force diagonalization.
  auto pt = partial_transpose(phi_plus(), 0);
  auto e4 = eig_hermitian(pt);
  CHECK(e4.values[0] == doctest::Approx(0.5));
  CHECK(e4.values[1] == doctest::Approx(0.5));
  CHECK(e4.values[2] == doctest::Approx(0.5));
  CHECK(e4.values[3] == doctest::Approx(-0.5));
}

TEST_CASE("realify") {
  std::mt19937_64 rng(13);
  // real Hermitian input: block diagonal embedding
  ComplexMatrix re = test::random_hermitian(rng, 3).real().cast<Complex>();
  auto emb = realify(HermitianOperator((re + re.adjoint()) / 2.0));
  CHECK((emb.topRightCorner(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

  auto sy = realify(HermitianOperator(sigma_y()));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sy);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));

  auto i2 = realify(HermitianOperator::identity({2}));
  CHECK((i2 - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  // PSD status preserved, eigenvalues doubled
  for (int t = 0; t < 10; ++t) {
    auto h = HermitianOperator(test::random_hermitian(rng, 4));
    auto r = realify(h);
    Eigen::SelfAdjointEigenSolver<RealMatrix> er(r);
    const bool psd_c = min_eigenvalue(h) >= -1e-10;
    const bool psd_r = er.eigenvalues().minCoeff() >= -1e-10;
    CHECK(psd_c == psd_r);
    auto ec = eig_hermitian(h);
    for (int i = 0; i < 4; ++i) {
      CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.values[3 - i]).epsilon(1e-9));
      CHECK(er.eigenvalues()(2 * i + 1) ==
            doctest::Approx(ec.values[3 - i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("transpose trace identity") {
  // Tr[A^T B] = Tr[A B^T], the identity behind the PPT-lemma manipulation.
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix a = test::random_hermitian(rng, 4);
    ComplexMatrix b = test::random_hermitian(rng, 4);
    const Complex lhs = trace_product(a.transpose(), b);
    const Complex rhs = trace_product(a, b.transpose());
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("constructor validation") {
  ComplexMatrix bad(2, 2);
  bad << 1, Complex(0, 1), Complex(0, 1), 1;  // not Hermitian
  CHECK_THROWS_AS(HermitianOperator{bad}, std::invalid_argument);

  ComplexMatrix ok(2, 2);
  ok << 1, Complex(0, 1), Complex(0, -1), 1;
  CHECK_NOTHROW(HermitianOperator{ok});

  CHECK_THROWS_AS(HermitianOperator(ok, {3}), std::invalid_argument);

  ComplexMatrix inf2 = ComplexMatrix::Identity(2, 2);
  inf2(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(HermitianOperator{inf2}, std::invalid_argument);
}
