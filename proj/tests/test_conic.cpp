#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mdiq/conic.hpp"
#include "mdiq/states.hpp"
#include "test_util.hpp"

using namespace mdiq;
using namespace mdiq::conic;

namespace {

// Weak duality must hold on every optimal solve (min sense): the dual
// objective never exceeds the primal by more than 1e-9.
void check_weak_duality(const SolveReport& rep, Sense sense) {
  REQUIRE(rep.status == SolveStatus::Optimal);
  if (sense == Sense::Min)
    CHECK(rep.dual_objective <= rep.objective + 1e-9);
  else
    CHECK(rep.dual_objective >= rep.objective - 1e-9);
  CHECK(rep.primal_residual <= 1e-8);
}

void check_optimum(const SolveReport& rep, double expected, Sense sense,
                   double tol = 1e-7) {
  check_weak_duality(rep, sense);
  CHECK(rep.objective ==
        doctest::Approx(expected).epsilon(tol).scale(std::max(1.0, std::abs(expected))));
}

ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

}  // namespace

// Battery problem 1: min Tr X s.t. X00 = 1, X PSD (real 2x2) -> 1.
TEST_CASE("battery 01 forced diagonal") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 2, /*complex=*/false);
  ComplexMatrix e00 = ComplexMatrix::Zero(2, 2);
  e00(0, 0) = 1;
  p.add_equality(LinExpr().add(x, e00), 1.0);
  p.set_objective(Sense::Min, LinExpr().add(x, ComplexMatrix::Identity(2, 2)));
  check_optimum(solve(p), 1.0, Sense::Min);
}

// Battery problem 2: max Tr X s.t. X + S = I3, X, S PSD -> 3.
TEST_CASE("battery 02 trace cap") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 3);
  auto s = p.add_psd_var("S", 3);
  for (int r = 0; r < 3; ++r)
    for (int c = r; c < 3; ++c) {
      ComplexMatrix e = ComplexMatrix::Zero(3, 3);
      if (r == c) {
        e(r, r) = 1;
        p.add_equality(LinExpr().add(x, e).add(s, e), 1.0);
      } else {
        e(r, c) = e(c, r) = 1;
        p.add_equality(LinExpr().add(x, e).add(s, e), 0.0);
        ComplexMatrix ei = ComplexMatrix::Zero(3, 3);
        ei(r, c) = Complex(0, 1);
        ei(c, r) = Complex(0, -1);
        p.add_equality(LinExpr().add(x, ei).add(s, ei), 0.0);
      }
    }
  p.set_objective(Sense::Max, LinExpr().add(x, ComplexMatrix::Identity(3, 3)));
  auto rep = solve(p);
  check_optimum(rep, 3.0, Sense::Max);
}

// Battery problem 3: largest eigenvalue of sigma_x as an SDP -> 1.
TEST_CASE("battery 03 lambda max via LMI") {
  ConicProblem p;
  auto lam = p.add_free_scalar("lambda");
  MatExpr lmi(2);
  lmi.constant(-sigma_x());
  lmi.add_scalar_term(lam, ComplexMatrix::Identity(2, 2));
  p.add_lmi(std::move(lmi));
  p.set_objective(Sense::Min, LinExpr().add_scalar(lam, 1.0));
  check_optimum(solve(p), 1.0, Sense::Min);
}

// Battery problem 4: min <diag(2,-3,5,7), X> s.t. Tr X = 1 -> -3.
TEST_CASE("battery 04 min eigenvalue diagonal") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 4);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(4, 4)), 1.0);
  ComplexMatrix c = ComplexMatrix::Zero(4, 4);
  c(0, 0) = 2;
  c(1, 1) = -3;
  c(2, 2) = 5;
  c(3, 3) = 7;
  p.set_objective(Sense::Min, LinExpr().add(x, c));
  check_optimum(solve(p), -3.0, Sense::Min);
}

// Battery problem 5: min eigenvalue of sigma_y (complex data) -> -1.
TEST_CASE("battery 05 min eigenvalue complex") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
  p.set_objective(Sense::Min, LinExpr().add(x, sigma_y()));
  check_optimum(solve(p), -1.0, Sense::Min);
}

// Battery problem 6: negativity of the maximally entangled state via the
// variational split -> 1/2.
TEST_CASE("battery 06 negativity split") {
  ConicProblem p;
  auto rp = p.add_psd_var("rho_plus", 4);
  auto rm = p.add_psd_var("rho_minus", 4);
  const ComplexMatrix target =
      partial_transpose(bell_states()[0].op(), 0).matrix();
  // rho_plus - rho_minus = PT(Phi+), entrywise Hermitian rows
  for (int r = 0; r < 4; ++r)
    for (int c = r; c < 4; ++c) {
      ComplexMatrix e = ComplexMatrix::Zero(4, 4);
      if (r == c) {
        e(r, r) = 1;
        p.add_equality(LinExpr().add(rp, e).add(rm, ComplexMatrix(-e)),
                       target(r, r).real());
      } else {
        e(r, c) = e(c, r) = 1;
        p.add_equality(LinExpr().add(rp, e).add(rm, ComplexMatrix(-e)),
                       2 * target(r, c).real());
        ComplexMatrix ei = ComplexMatrix::Zero(4, 4);
        ei(r, c) = Complex(0, 1);
        ei(c, r) = Complex(0, -1);
        p.add_equality(LinExpr().add(rp, ei).add(rm, ComplexMatrix(-ei)),
                       -2 * target(r, c).imag());
      }
    }
  p.set_objective(Sense::Min, LinExpr().add(rm, ComplexMatrix::Identity(4, 4)));
  check_optimum(solve(p), 0.5, Sense::Min);
}

// Battery problem 7: random robustness of the Bell state -> 2.
TEST_CASE("battery 07 random robustness closed form") {
  ConicProblem p;
  auto r = p.add_free_scalar("r");
  MatExpr lmi(4);
  lmi.constant(partial_transpose(bell_states()[0].op(), 0).matrix());
  lmi.add_scalar_term(r, ComplexMatrix::Identity(4, 4) / 4.0);
  p.add_lmi(std::move(lmi));
  p.set_objective(Sense::Min, LinExpr().add_scalar(r, 1.0));
  check_optimum(solve(p), 2.0, Sense::Min);
}

// Battery problem 8: Tr X = -1 with X PSD is infeasible.
TEST_CASE("battery 08 infeasible trace") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), -1.0);
  p.set_objective(Sense::Min, LinExpr().add(x, ComplexMatrix::Identity(2, 2)));
  auto rep = solve(p);
  CHECK(rep.status == SolveStatus::InfeasibleCertified);
}

// Battery problem 9: contradictory linear rows are certified infeasible in
// presolve.
TEST_CASE("battery 09 inconsistent rows") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  ComplexMatrix e00 = ComplexMatrix::Zero(2, 2);
  e00(0, 0) = 1;
  p.add_equality(LinExpr().add(x, e00), 1.0);
  p.add_equality(LinExpr().add(x, e00), 2.0);
  p.set_objective(Sense::Min, LinExpr().add(x, ComplexMatrix::Identity(2, 2)));
  auto rep = solve(p);
  CHECK(rep.status == SolveStatus::InfeasibleCertified);
  // certificate: y combines the two rows with opposite signs, b'y = -1
  REQUIRE(rep.dual_values.size() == 2);
  const double bty = rep.dual_values[0] * 1.0 + rep.dual_values[1] * 2.0;
  CHECK(bty == doctest::Approx(-1.0));
  CHECK(rep.dual_values[0] + rep.dual_values[1] == doctest::Approx(0.0));
}

// Battery problem 10: min y s.t. [[1,2],[2,y]] PSD -> 4 (boundary optimum).
TEST_CASE("battery 10 schur bound") {
  ConicProblem p;
  auto y = p.add_free_scalar("y");
  MatExpr lmi(2);
  ComplexMatrix c0(2, 2);
  c0 << 1, 2, 2, 0;
  lmi.constant(c0);
  ComplexMatrix e11 = ComplexMatrix::Zero(2, 2);
  e11(1, 1) = 1;
  lmi.add_scalar_term(y, e11);
  p.add_lmi(std::move(lmi));
  p.set_objective(Sense::Min, LinExpr().add_scalar(y, 1.0));
  check_optimum(solve(p), 4.0, Sense::Min);
}

// Battery problem 11: min t s.t. [[t,1],[1,t]] PSD -> 1.
TEST_CASE("battery 11 off diagonal bound") {
  ConicProblem p;
  auto t = p.add_free_scalar("t");
  MatExpr lmi(2);
  ComplexMatrix c0(2, 2);
  c0 << 0, 1, 1, 0;
  lmi.constant(c0);
  lmi.add_scalar_term(t, ComplexMatrix::Identity(2, 2));
  p.add_lmi(std::move(lmi));
  p.set_objective(Sense::Min, LinExpr().add_scalar(t, 1.0));
  check_optimum(solve(p), 1.0, Sense::Min);
}

// Battery problem 12: Werner separability boundary, min t with
// PT(rho_{1/3}) + t I PSD -> 0 exactly at the threshold.
TEST_CASE("battery 12 werner threshold") {
  ConicProblem p;
  auto t = p.add_free_scalar("t");
  MatExpr lmi(4);
  lmi.constant(partial_transpose(werner(1.0 / 3.0).op(), 0).matrix());
  lmi.add_scalar_term(t, ComplexMatrix::Identity(4, 4));
  p.add_lmi(std::move(lmi));
  p.set_objective(Sense::Min, LinExpr().add_scalar(t, 1.0));
  auto rep = solve(p);
  check_weak_duality(rep, Sense::Min);
  CHECK(std::abs(rep.objective) < 1e-7);  // absolute: optimum is exactly zero
}

TEST_CASE("builder validation") {
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  CHECK_THROWS_AS(p.add_psd_var("X", 3), std::invalid_argument);
  CHECK_THROWS_AS(p.add_equality(LinExpr().add(VarId{5}, sigma_x()), 0.0),
                  std::invalid_argument);
  ComplexMatrix nonherm(2, 2);
  nonherm << 1, 2, 3, 4;
  CHECK_THROWS_AS(p.add_equality(LinExpr().add(x, nonherm), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_feasibility(p), std::invalid_argument);  // no rows
}

TEST_CASE("feasibility phase-I basics") {
  // {X PSD, Tr X = 1, X00 = 0.3}: feasible with tiny margin.
  {
    ConicProblem p;
    auto x = p.add_psd_var("X", 2);
    p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
    ComplexMatrix e00 = ComplexMatrix::Zero(2, 2);
    e00(0, 0) = 1;
    p.add_equality(LinExpr().add(x, e00), 0.3);
    auto cert = solve_feasibility(p);
    CHECK(cert.verdict == Verdict::Feasible);
    CHECK(cert.margin <= 1e-7);
  }
  // {X PSD, Tr X = -1}: infeasible with a separating certificate.
  {
    ConicProblem p;
    auto x = p.add_psd_var("X", 2);
    const int row = p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), -1.0);
    auto cert = solve_feasibility(p);
    CHECK(cert.verdict == Verdict::Infeasible);
    CHECK(cert.margin >= 1e-5);
    // dual certificate pairs with b to give -margin
    CHECK(cert.dual_values[row] * -1.0 == doctest::Approx(-cert.margin).epsilon(1e-5));
  }
}

TEST_CASE("scaling invariance of verdicts") {
  ConicProblem base;
  auto build = [](double scale) {
    ConicProblem p;
    auto x = p.add_psd_var("X", 2);
    p.add_equality(LinExpr().add(x, ComplexMatrix(scale * ComplexMatrix::Identity(2, 2))),
                   -scale);
    return p;
  };
  auto c1 = solve_feasibility(build(1.0));
  auto c10 = solve_feasibility(build(10.0));
  CHECK(c1.verdict == Verdict::Infeasible);
  CHECK(c10.verdict == Verdict::Infeasible);
  CHECK(c1.margin == doctest::Approx(c10.margin).epsilon(1e-6));

  auto f1 = [] {
    ConicProblem p;
    auto x = p.add_psd_var("X", 2);
    p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
    return solve_feasibility(p);
  }();
  auto f10 = [] {
    ConicProblem p;
    auto x = p.add_psd_var("X", 2);
    p.add_equality(LinExpr().add(x, ComplexMatrix(10 * ComplexMatrix::Identity(2, 2))), 10.0);
    return solve_feasibility(p);
  }();
  CHECK(f1.verdict == Verdict::Feasible);
  CHECK(f10.verdict == Verdict::Feasible);
}

TEST_CASE("psd variable value extraction") {
  // min <sigma_z, X> s.t. Tr X = 1: optimum X = |1><1|.
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
  ComplexMatrix sz(2, 2);
  sz << 1, 0, 0, -1;
  p.set_objective(Sense::Min, LinExpr().add(x, sz));
  auto rep = solve(p);
  REQUIRE(rep.status == SolveStatus::Optimal);
  REQUIRE(rep.psd_values.size() == 1);
  CHECK(rep.psd_values[0](1, 1).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.psd_values[0](0, 0).real() == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("redundant rows are pruned") {
  // Duplicate and linearly dependent rows must not break the solve.
  ConicProblem p;
  auto x = p.add_psd_var("X", 2);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
  p.add_equality(LinExpr().add(x, ComplexMatrix::Identity(2, 2)), 1.0);
  p.add_equality(LinExpr().add(x, ComplexMatrix(2.0 * ComplexMatrix::Identity(2, 2))), 2.0);
  ComplexMatrix sz(2, 2);
  sz << 1, 0, 0, -1;
  p.set_objective(Sense::Min, LinExpr().add(x, sz));
  auto rep = solve(p);
  check_optimum(rep, -1.0, Sense::Min);
}
