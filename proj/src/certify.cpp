#include "mdiq/certify.hpp"

#include <cmath>
#include <numeric>

#include "mdiq/sdp_common.hpp"

namespace mdiq {

namespace {

using conic::ConicProblem;
using conic::LinExpr;
using detail::FamilyCone;
using detail::FamilyHandle;
using detail::FamilySpec;

std::vector<std::size_t> all_members(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

ComplexMatrix joint_input(const Behaviour& b, const std::vector<int>& xs) {
  ComplexMatrix m = b.ensemble(0).state(xs[0]).op().matrix();
  for (int p = 1; p < b.parties(); ++p)
    m = kron_raw(m, b.ensemble(p).state(xs[p]).op().matrix());
  return m;
}

std::vector<int> joint_factors(const Behaviour& b) {
  std::vector<int> f;
  for (const auto& e : b.ensembles()) f.push_back(e.dim());
  return f;
}

struct BuiltProblem {
  ConicProblem problem;
  std::size_t n_behaviour_rows = 0;
  std::vector<double> row_rhs;
};

// Behaviour-consistency rows in Behaviour flat-index order, operators taken
// from one or more families whose per-index sum reproduces the table.
void add_behaviour_rows(BuiltProblem& bp, const Behaviour& b,
                        const std::vector<const FamilyHandle*>& fams) {
  const auto in_counts = b.input_counts();
  const auto& out_counts = b.outcome_counts();
  std::vector<int> xs(in_counts.size(), 0);
  while (true) {
    const ComplexMatrix psi = joint_input(b, xs);
    std::vector<int> as(out_counts.size(), 0);
    std::size_t flat_out = 0;
    while (true) {
      LinExpr e;
      for (const auto* fam : fams) fam->add_term(e, flat_out, psi);
      const double rhs = b.prob(xs, as);
      bp.problem.add_equality(std::move(e), rhs);
      bp.row_rhs.push_back(rhs);

      int p = static_cast<int>(as.size()) - 1;
      while (p >= 0 && ++as[p] == out_counts[p]) as[p--] = 0;
      ++flat_out;
      if (p < 0) break;
    }
    int p = static_cast<int>(xs.size()) - 1;
    while (p >= 0 && ++xs[p] == in_counts[p]) xs[p--] = 0;
    if (p < 0) break;
  }
  bp.n_behaviour_rows = bp.row_rhs.size();
}

// Marginal structure of the no-signalling set: summing out one party's
// outcome leaves identity structure on that party's input factor.
void add_marginal_structure(BuiltProblem& bp, const FamilyHandle& fam,
                            const std::vector<int>& out_counts) {
  const int parties = static_cast<int>(out_counts.size());
  const std::size_t total = fam.vars.size();
  for (int party = 0; party < parties; ++party) {
    // group indices by the outcomes of all parties except `party`
    std::size_t group_count = 1;
    for (int q = 0; q < parties; ++q)
      if (q != party) group_count *= out_counts[q];
    for (std::size_t g = 0; g < group_count; ++g) {
      std::vector<std::size_t> members;
      for (std::size_t idx = 0; idx < total; ++idx) {
        // decode idx (last party fastest) and test the non-summed outcomes
        std::size_t rem = idx, key = 0;
        std::vector<int> as(parties);
        for (int q = parties - 1; q >= 0; --q) {
          as[q] = static_cast<int>(rem % out_counts[q]);
          rem /= out_counts[q];
        }
        for (int q = 0; q < parties; ++q)
          if (q != party) key = key * out_counts[q] + as[q];
        if (key == g) members.push_back(idx);
      }
      std::vector<ComplexMatrix> coeffs =
          detail::identity_factor_coeffs(fam.joint_factors, party);
      for (const auto& c : coeffs) {
        LinExpr e;
        for (auto m : members) fam.add_term(e, m, c);
        bp.problem.add_equality(std::move(e), 0.0);
        bp.row_rhs.push_back(0.0);
      }
    }
  }
}

// Pins total completeness: sum of all operators has trace equal to the joint
// input dimension (the structure rows already force it proportional to I).
void add_completeness_row(BuiltProblem& bp,
                          const std::vector<const FamilyHandle*>& fams) {
  LinExpr e;
  double dim = 0;
  for (const auto* fam : fams) {
    dim = fam->joint_dim;
    const ComplexMatrix c =
        ComplexMatrix::Identity(fam->joint_dim, fam->joint_dim) /
        static_cast<double>(fam->joint_dim);
    for (std::size_t i = 0; i < fam->vars.size(); ++i) fam->add_term(e, i, c);
  }
  (void)dim;
  bp.problem.add_equality(std::move(e), 1.0);
  bp.row_rhs.push_back(1.0);
}

BuiltProblem build_bipartite(const Behaviour& b, const RelaxationLevel& r) {
  if (b.parties() != 2)
    throw std::invalid_argument("certify_bipartite: bipartite behaviour required");
  const auto jf = joint_factors(b);
  const int n_ops = b.outcome_counts()[0] * b.outcome_counts()[1];

  BuiltProblem bp;
  FamilyHandle fam;
  if (r.kind == RelaxationLevel::Kind::Ppt) {
    fam = detail::declare_family(bp.problem, "M", n_ops, jf,
                                 {FamilyCone::PtFactor, 0});
  } else {
    const long ext_dim = jf[0] * static_cast<long>(std::pow(jf[1], r.k));
    if (ext_dim > 64)
      throw std::invalid_argument(
          "certify_bipartite: extension dimension guard exceeded (limit 64)");
    fam = detail::declare_symext_family(bp.problem, "N", n_ops, jf[0], jf[1],
                                        r.k, r.with_ppt);
  }

  add_behaviour_rows(bp, b, {&fam});
  add_marginal_structure(bp, fam, b.outcome_counts());
  add_completeness_row(bp, {&fam});
  return bp;
}

BuiltProblem build_tripartite_full(const Behaviour& b, const RelaxationLevel& r) {
  if (b.parties() != 3)
    throw std::invalid_argument(
        "certify_tripartite_full: tripartite behaviour required");
  if (r.kind != RelaxationLevel::Kind::Ppt)
    throw std::invalid_argument(
        "certify_tripartite_full: only the PPT relaxation is supported for "
        "tripartite tests");
  const auto jf = joint_factors(b);
  const int joint_dim = jf[0] * jf[1] * jf[2];
  if (joint_dim > 16)
    throw std::invalid_argument("certify_tripartite_full: dimension guard");
  const int n_ops = static_cast<int>(b.outcome_tuples());

  BuiltProblem bp;
  auto fam =
      detail::declare_family(bp.problem, "M", n_ops, jf, {FamilyCone::PtAll});
  add_behaviour_rows(bp, b, {&fam});
  add_marginal_structure(bp, fam, b.outcome_counts());
  add_completeness_row(bp, {&fam});
  return bp;
}

BuiltProblem build_tripartite_bisep(const Behaviour& b, const RelaxationLevel& r) {
  if (b.parties() != 3)
    throw std::invalid_argument(
        "certify_tripartite_bisep: tripartite behaviour required");
  if (r.kind != RelaxationLevel::Kind::Ppt)
    throw std::invalid_argument(
        "certify_tripartite_bisep: only the PPT relaxation is supported for "
        "tripartite tests");
  const auto jf = joint_factors(b);
  if (jf[0] * jf[1] * jf[2] > 16)
    throw std::invalid_argument("certify_tripartite_bisep: dimension guard");
  const int n_ops = static_cast<int>(b.outcome_tuples());

  BuiltProblem bp;
  // One branch per bipartition; each branch is PT-positive across its cut and
  // carries a free nonnegative weight through its trace.
  auto f_a = detail::declare_family(bp.problem, "Ka", n_ops, jf,
                                    {FamilyCone::PtFactor, 0});
  auto f_b = detail::declare_family(bp.problem, "Kb", n_ops, jf,
                                    {FamilyCone::PtFactor, 1});
  auto f_c = detail::declare_family(bp.problem, "Kc", n_ops, jf,
                                    {FamilyCone::PtFactor, 2});

  add_behaviour_rows(bp, b, {&f_a, &f_b, &f_c});
  // The summed family obeys the tripartite no-signalling structure.
  {
    const int parties = 3;
    const auto& out_counts = b.outcome_counts();
    for (int party = 0; party < parties; ++party) {
      std::size_t group_count = 1;
      for (int q = 0; q < parties; ++q)
        if (q != party) group_count *= out_counts[q];
      for (std::size_t g = 0; g < group_count; ++g) {
        std::vector<std::size_t> members;
        for (std::size_t idx = 0; idx < b.outcome_tuples(); ++idx) {
          std::size_t rem = idx, key = 0;
          std::vector<int> as(parties);
          for (int q = parties - 1; q >= 0; --q) {
            as[q] = static_cast<int>(rem % out_counts[q]);
            rem /= out_counts[q];
          }
          for (int q = 0; q < parties; ++q)
            if (q != party) key = key * out_counts[q] + as[q];
          if (key == g) members.push_back(idx);
        }
        for (const auto& c : detail::identity_factor_coeffs(jf, party)) {
          LinExpr e;
          for (auto m : members) {
            f_a.add_term(e, m, c);
            f_b.add_term(e, m, c);
            f_c.add_term(e, m, c);
          }
          bp.problem.add_equality(std::move(e), 0.0);
          bp.row_rhs.push_back(0.0);
        }
      }
    }
  }
  add_completeness_row(bp, {&f_a, &f_b, &f_c});
  return bp;
}

CertifyResult run_certification(BuiltProblem&& bp,
                                const conic::SolverOptions& opts) {
  auto cert = conic::solve_feasibility(bp.problem, opts);
  CertifyResult out;
  out.verdict = cert.verdict;
  out.margin = cert.margin;
  out.iterations = cert.iterations;
  out.wall_time_ms = cert.wall_time_ms;
  out.diagnostics = cert.diagnostics;
  if (cert.dual_values.size() == bp.row_rhs.size()) {
    out.behaviour_row_duals.assign(cert.dual_values.begin(),
                                   cert.dual_values.begin() +
                                       static_cast<long>(bp.n_behaviour_rows));
    out.structure_dual_offset = 0.0;
    for (std::size_t j = bp.n_behaviour_rows; j < bp.row_rhs.size(); ++j)
      out.structure_dual_offset += cert.dual_values[j] * bp.row_rhs[j];
  }
  return out;
}

}  // namespace

CertifyResult certify_bipartite(const Behaviour& b, const RelaxationLevel& r,
                                const conic::SolverOptions& opts) {
  return run_certification(build_bipartite(b, r), opts);
}

CertifyResult certify_tripartite_full(const Behaviour& b,
                                      const RelaxationLevel& r,
                                      const conic::SolverOptions& opts) {
  return run_certification(build_tripartite_full(b, r), opts);
}

CertifyResult certify_tripartite_bisep(const Behaviour& b,
                                       const RelaxationLevel& r,
                                       const conic::SolverOptions& opts) {
  return run_certification(build_tripartite_bisep(b, r), opts);
}

double evaluate_witness(const WitnessCoefficients& w, const Behaviour& b) {
  if (w.coefficients.size() != b.probs().size())
    throw std::invalid_argument("evaluate_witness: behaviour shape mismatch");
  double score = 0.0;
  for (std::size_t i = 0; i < w.coefficients.size(); ++i)
    score += w.coefficients[i] * b.probs()[i];
  return score - w.threshold;
}

WitnessCoefficients extract_witness(const Behaviour& b, const RelaxationLevel& r,
                                    const conic::SolverOptions& opts) {
  CertifyResult cert = certify_bipartite(b, r, opts);
  if (cert.verdict != conic::Verdict::Infeasible)
    throw std::runtime_error(
        "extract_witness: behaviour was not certified infeasible");
  WitnessCoefficients w;
  const double s = cert.margin;
  w.coefficients.resize(cert.behaviour_row_duals.size());
  for (std::size_t i = 0; i < w.coefficients.size(); ++i)
    w.coefficients[i] = -cert.behaviour_row_duals[i] / s;
  w.threshold = cert.structure_dual_offset / s;
  w.normalization =
      "score = sum(coeff * p) - threshold; 1 on the source behaviour, <= 0 on "
      "the tested relaxation";
  return w;
}

}  // namespace mdiq
