#include "mdiq/quantify.hpp"

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

constexpr double kClampTol = 1e-8;

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

// Behaviour rows: <plus terms> - <minus terms> = p, iterating the flat index.
void add_signed_behaviour_rows(ConicProblem& prob, const Behaviour& b,
                               const std::vector<const FamilyHandle*>& plus,
                               const std::vector<const FamilyHandle*>& minus) {
  const auto in_counts = b.input_counts();
  const auto& out_counts = b.outcome_counts();
  std::vector<int> xs(in_counts.size(), 0);
  while (true) {
    const ComplexMatrix psi = joint_input(b, xs);
    const ComplexMatrix neg_psi = -psi;
    std::vector<int> as(out_counts.size(), 0);
    std::size_t flat_out = 0;
    while (true) {
      LinExpr e;
      for (const auto* fam : plus) fam->add_term(e, flat_out, psi);
      for (const auto* fam : minus) fam->add_term(e, flat_out, neg_psi);
      prob.add_equality(std::move(e), b.prob(xs, as));

      int p = static_cast<int>(as.size()) - 1;
      while (p >= 0 && ++as[p] == out_counts[p]) as[p--] = 0;
      ++flat_out;
      if (p < 0) break;
    }
    int p = static_cast<int>(xs.size()) - 1;
    while (p >= 0 && ++xs[p] == in_counts[p]) xs[p--] = 0;
    if (p < 0) break;
  }
}

// Subnormalized no-signalling structure: summing out one party's outcome
// leaves identity structure on that party's input factor. Homogeneous, so it
// is valid for families of any total weight.
void add_marginal_structure(ConicProblem& prob, const FamilyHandle& fam,
                            const std::vector<int>& out_counts) {
  const int parties = static_cast<int>(out_counts.size());
  const std::size_t total = fam.vars.size();
  for (int party = 0; party < parties; ++party) {
    std::size_t group_count = 1;
    for (int q = 0; q < parties; ++q)
      if (q != party) group_count *= out_counts[q];
    for (std::size_t g = 0; g < group_count; ++g) {
      std::vector<std::size_t> members;
      for (std::size_t idx = 0; idx < total; ++idx) {
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
      detail::add_identity_factor_rows(prob, fam, members, party);
    }
  }
}

// Linear functional: total trace of a family divided by the joint dimension
// (equals the family's weight t when the sum is t * identity).
void add_weight_terms(LinExpr& e, const FamilyHandle& fam, double scale) {
  const ComplexMatrix c = ComplexMatrix::Identity(fam.joint_dim, fam.joint_dim) *
                          (scale / fam.joint_dim);
  for (std::size_t i = 0; i < fam.vars.size(); ++i) fam.add_term(e, i, c);
}

FamilyHandle declare_relaxed_bipartite_family(ConicProblem& prob,
                                              const std::string& prefix,
                                              int n_ops,
                                              const std::vector<int>& jf,
                                              const RelaxationLevel& r) {
  if (r.kind == RelaxationLevel::Kind::Ppt)
    return detail::declare_family(prob, prefix, n_ops, jf,
                                  {FamilyCone::PtFactor, 0});
  const long ext_dim = jf[0] * static_cast<long>(std::pow(jf[1], r.k));
  if (ext_dim > 64)
    throw std::invalid_argument("relaxed family: extension dimension guard");
  return detail::declare_symext_family(prob, prefix, n_ops, jf[0], jf[1], r.k,
                                       r.with_ppt);
}

QuantifyResult run_min(ConicProblem& prob, const RelaxationLevel& r,
                       const conic::SolverOptions& opts, std::string note) {
  auto rep = conic::solve(prob, opts);
  QuantifyResult out;
  out.relaxation = r;
  out.status = rep.status;
  out.iterations = rep.iterations;
  out.wall_time_ms = rep.wall_time_ms;
  out.raw_value = rep.objective;
  out.note = std::move(note);
  if (!rep.diagnostics.empty())
    out.note += out.note.empty() ? rep.diagnostics : "; " + rep.diagnostics;
  if (rep.status == conic::SolveStatus::Optimal)
    out.value = rep.objective > -kClampTol ? std::max(0.0, rep.objective)
                                           : rep.objective;
  return out;
}

}  // namespace

QuantifyResult mdi_robustness(const Behaviour& b, NoiseSet noise,
                              const RelaxationLevel& r,
                              const conic::SolverOptions& opts) {
  if (b.parties() != 2)
    throw std::invalid_argument("mdi_robustness: bipartite behaviour required");
  const auto jf = joint_factors(b);
  const int n_ops = b.outcome_counts()[0] * b.outcome_counts()[1];

  ConicProblem prob;
  // Gamma = (1+r) * (relaxed-separable effective POVM)
  auto gamma = declare_relaxed_bipartite_family(prob, "G", n_ops, jf, r);
  // Omega = r * (noise effective POVM)
  FamilyHandle omega;
  std::string note;
  switch (noise) {
    case NoiseSet::Generalized:
      omega = detail::declare_family(prob, "W", n_ops, jf, {FamilyCone::Plain});
      break;
    case NoiseSet::Separable:
      omega = detail::declare_family(prob, "W", n_ops, jf,
                                     {FamilyCone::PtFactor, 0});
      break;
    case NoiseSet::Random:
      // Outer bound: the product-form noise set is served through the
      // separable cone (see module documentation).
      omega = detail::declare_family(prob, "W", n_ops, jf,
                                     {FamilyCone::PtFactor, 0});
      note = "random noise served via the separable-noise cone (outer bound)";
      break;
  }

  add_signed_behaviour_rows(prob, b, {&gamma}, {&omega});
  add_marginal_structure(prob, gamma, b.outcome_counts());
  add_marginal_structure(prob, omega, b.outcome_counts());
  // weight(Gamma) - weight(Omega) = 1  <=>  (1+r) - r = 1
  {
    LinExpr e;
    add_weight_terms(e, gamma, 1.0);
    add_weight_terms(e, omega, -1.0);
    prob.add_equality(std::move(e), 1.0);
  }
  LinExpr obj;
  add_weight_terms(obj, omega, 1.0);
  prob.set_objective(conic::Sense::Min, std::move(obj));
  return run_min(prob, r, opts, std::move(note));
}

QuantifyResult mdi_negativity(const Behaviour& b,
                              const conic::SolverOptions& opts) {
  if (b.parties() != 2)
    throw std::invalid_argument("mdi_negativity: bipartite behaviour required");
  const auto jf = joint_factors(b);
  const int n_ops = b.outcome_counts()[0] * b.outcome_counts()[1];

  ConicProblem prob;
  // Two subnormalized families, both PT-positive on the first input factor.
  auto plus = detail::declare_family(prob, "P", n_ops, jf,
                                     {FamilyCone::PtFactor, 0});
  auto minus = detail::declare_family(prob, "Q", n_ops, jf,
                                      {FamilyCone::PtFactor, 0});

  add_signed_behaviour_rows(prob, b, {&plus}, {&minus});
  add_marginal_structure(prob, plus, b.outcome_counts());
  add_marginal_structure(prob, minus, b.outcome_counts());
  // weight(plus) - weight(minus) = 1
  {
    LinExpr e;
    add_weight_terms(e, plus, 1.0);
    add_weight_terms(e, minus, -1.0);
    prob.add_equality(std::move(e), 1.0);
  }
  LinExpr obj;
  add_weight_terms(obj, minus, 1.0);
  prob.set_objective(conic::Sense::Min, std::move(obj));
  return run_min(prob, RelaxationLevel::ppt(), opts, "");
}

QuantifyResult mdi_robustness_tripartite(const Behaviour& b,
                                         TripartiteTarget target, NoiseSet noise,
                                         const RelaxationLevel& r,
                                         const conic::SolverOptions& opts) {
  if (b.parties() != 3)
    throw std::invalid_argument(
        "mdi_robustness_tripartite: tripartite behaviour required");
  if (r.kind != RelaxationLevel::Kind::Ppt)
    throw std::invalid_argument(
        "mdi_robustness_tripartite: only the PPT relaxation is supported");
  const auto jf = joint_factors(b);
  if (jf[0] * jf[1] * jf[2] > 16)
    throw std::invalid_argument("mdi_robustness_tripartite: dimension guard");
  const int n_ops = static_cast<int>(b.outcome_tuples());

  ConicProblem prob;
  std::vector<FamilyHandle> gammas;
  if (target == TripartiteTarget::FullSep) {
    gammas.push_back(
        detail::declare_family(prob, "G", n_ops, jf, {FamilyCone::PtAll}));
  } else {
    gammas.push_back(detail::declare_family(prob, "Ga", n_ops, jf,
                                            {FamilyCone::PtFactor, 0}));
    gammas.push_back(detail::declare_family(prob, "Gb", n_ops, jf,
                                            {FamilyCone::PtFactor, 1}));
    gammas.push_back(detail::declare_family(prob, "Gc", n_ops, jf,
                                            {FamilyCone::PtFactor, 2}));
  }
  FamilyHandle omega;
  std::string note;
  switch (noise) {
    case NoiseSet::Generalized:
      omega = detail::declare_family(prob, "W", n_ops, jf, {FamilyCone::Plain});
      break;
    case NoiseSet::Separable:
      omega = detail::declare_family(prob, "W", n_ops, jf, {FamilyCone::PtAll});
      break;
    case NoiseSet::Random:
      omega = detail::declare_family(prob, "W", n_ops, jf, {FamilyCone::PtAll});
      note = "random noise served via the fully-separable cone (outer bound)";
      break;
  }

  std::vector<const FamilyHandle*> gamma_ptrs;
  for (const auto& g : gammas) gamma_ptrs.push_back(&g);
  add_signed_behaviour_rows(prob, b, gamma_ptrs, {&omega});

  // Top-level no-signalling structure on the summed Gamma family.
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
          for (const auto* fam : gamma_ptrs)
            for (auto m : members) fam->add_term(e, m, c);
          prob.add_equality(std::move(e), 0.0);
        }
      }
    }
  }
  add_marginal_structure(prob, omega, b.outcome_counts());

  {
    LinExpr e;
    for (const auto& g : gammas) add_weight_terms(e, g, 1.0);
    add_weight_terms(e, omega, -1.0);
    prob.add_equality(std::move(e), 1.0);
  }
  LinExpr obj;
  add_weight_terms(obj, omega, 1.0);
  prob.set_objective(conic::Sense::Min, std::move(obj));
  return run_min(prob, r, opts, std::move(note));
}

}  // namespace mdiq
