#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mdiq/states.hpp"
#include "test_util.hpp"

using namespace mdiq;

TEST_CASE("bell states") {
  auto bells = bell_states();
  REQUIRE(bells.size() == 4);
  // pairwise orthogonality
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double overlap =
          trace_product(bells[i].op().matrix(), bells[j].op().matrix()).real();
      CHECK(overlap == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  // completeness
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  for (const auto& s : bells) sum += s.op().matrix();
  CHECK((sum - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  // maximally mixed marginals
  for (const auto& s : bells) {
    auto red = partial_trace(s.op(), {1});
    CHECK((red.matrix() - ComplexMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("bsm is a valid POVM") {
  auto m = bsm();
  CHECK(m.outcomes() == 4);
  CHECK(m.dim() == 4);
  CHECK(m.element(0).factors() == std::vector<int>{2, 2});
}

TEST_CASE("werner family") {
  CHECK((werner(0.0).op().matrix() - ComplexMatrix::Identity(4, 4) / 4.0)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((werner(1.0).op().matrix() - bell_states()[0].op().matrix())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(std::abs(min_eigenvalue(partial_transpose(werner(1.0 / 3.0).op(), 0))) <
        1e-12);
  CHECK_THROWS_AS(werner(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(werner(1.1), std::invalid_argument);

  // entangled iff w > 1/3 on a grid (eigenvalue oracle)
  for (int k = 0; k <= 10; ++k) {
    const double w = k / 10.0;
    const double mineig = min_eigenvalue(partial_transpose(werner(w).op(), 0));
    if (w > 1.0 / 3.0 + 1e-9)
      CHECK(mineig < -1e-10);
    else
      CHECK(mineig > -1e-10);
  }
}

TEST_CASE("tetrahedron inputs") {
  auto ens = tetrahedron_inputs();
  REQUIRE(ens.size() == 4);
  CHECK(ens.tomographically_complete());
  for (int i = 0; i < 4; ++i) {
    // purity
    CHECK(trace_product(ens.state(i).op().matrix(), ens.state(i).op().matrix())
              .real() == doctest::Approx(1.0));
    for (int j = i + 1; j < 4; ++j)
      CHECK(trace_product(ens.state(i).op().matrix(), ens.state(j).op().matrix())
                .real() == doctest::Approx(1.0 / 3.0));
  }
  ComplexMatrix avg = ComplexMatrix::Zero(2, 2);
  for (int i = 0; i < 4; ++i) avg += ens.state(i).op().matrix() / 4.0;
  CHECK((avg - ComplexMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tomo4 inputs") {
  auto ens = tomo4_inputs();
  REQUIRE(ens.size() == 4);
  CHECK(ens.tomographically_complete());
  CHECK(ens.gram_condition() > 1.0);
  // first member maximally mixed
  CHECK(trace_product(ens.state(0).op().matrix(), ens.state(0).op().matrix())
            .real() == doctest::Approx(0.5));
  // third member is |+><+|: Bloch vector (1, 0, 0)
  const auto& plus = ens.state(2).op().matrix();
  CHECK(plus(0, 1).real() == doctest::Approx(0.5));
  CHECK(plus(0, 1).imag() == doctest::Approx(0.0));
  CHECK(plus(0, 0).real() == doctest::Approx(0.5));
}

TEST_CASE("incomplete ensemble flag recomputed") {
  std::vector<QuantumState> zs = {bloch_state(0, 0, 1), bloch_state(0, 0, -1)};
  InputEnsemble ens(std::move(zs));
  CHECK_FALSE(ens.tomographically_complete());
}

TEST_CASE("tetrahedral POVM") {
  auto m = tetrahedral_povm();
  REQUIRE(m.outcomes() == 4);
  // flat outcome distribution on the maximally mixed input
  for (int k = 0; k < 4; ++k) {
    CHECK(trace_product(m.element(k).matrix(),
                        ComplexMatrix::Identity(2, 2) / 2.0)
              .real() == doctest::Approx(0.25));
    // rank one with trace 1/2
    auto eig = eig_hermitian(m.element(k));
    CHECK(eig.values[0] == doctest::Approx(0.5));
    CHECK(eig.values[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("coarse bsm") {
  auto m = coarse_bsm();
  REQUIRE(m.outcomes() == 2);
  CHECK(m.element(0).trace() == doctest::Approx(1.0));
  CHECK(m.element(1).trace() == doctest::Approx(3.0));
}

TEST_CASE("ghz") {
  auto g = ghz();
  CHECK(g.factors() == std::vector<int>{2, 2, 2});
  CHECK(g.op()(0, 0).real() == doctest::Approx(0.5));
  CHECK(g.op()(0, 7).real() == doctest::Approx(0.5));
  // GHZ violates PPT across every cut
  for (int f = 0; f < 3; ++f)
    CHECK(min_eigenvalue(partial_transpose(g.op(), f)) < -0.4);
}

TEST_CASE("validation") {
  // POVM that does not sum to identity
  auto p0 = bloch_state(0, 0, 1).op();
  CHECK_THROWS_AS(Povm({p0, p0}), std::invalid_argument);
  // negative "state"
  ComplexMatrix bad(2, 2);
  bad << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(QuantumState(HermitianOperator(bad)), std::invalid_argument);
  // wrong trace
  CHECK_THROWS_AS(QuantumState(HermitianOperator(
                      ComplexMatrix(2.0 * ComplexMatrix::Identity(2, 2)))),
                  std::invalid_argument);
}

TEST_CASE("random separable states are PPT") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 25; ++t) {
    auto rho = test::random_separable_two_qubit(rng);
    CHECK(min_eigenvalue(partial_transpose(rho.op(), 0)) > -1e-10);
  }
}
