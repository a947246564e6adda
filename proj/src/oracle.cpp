#include "mdiq/oracle.hpp"

#include <cmath>

namespace mdiq::oracle {

double state_negativity(const QuantumState& rho, int cut_factor) {
  const auto pt = partial_transpose(rho.op(), cut_factor);
  double acc = 0.0;
  for (double v : eig_hermitian(pt).values)
    if (v < 0.0) acc -= v;
  return acc;
}

double state_robustness(const QuantumState& rho, NoiseSet noise,
                        const conic::SolverOptions& opts) {
  if (rho.factors() != std::vector<int>{2, 2})
    throw std::invalid_argument(
        "state_robustness: oracle restricted to two-qubit states");

  if (noise == NoiseSet::Random) {
    // (rho + r I/4) / (1 + r) PPT  <=>  PT(rho) + r I/4 >= 0: closed form.
    const double lam = min_eigenvalue(partial_transpose(rho.op(), 0));
    return std::max(0.0, -4.0 * lam);
  }

  // min Tr[sigma'] s.t. sigma' >= 0, PT(rho) + PT(sigma') >= 0
  // (sigma' = r sigma absorbs the noise weight; separable noise adds a PT
  // cone on sigma', exact for two qubits).
  conic::ConicProblem prob;
  auto sig = prob.add_psd_var("noise", 4);
  if (noise == NoiseSet::Separable) prob.add_pt_cone(sig, {2, 2}, {0});

  conic::MatExpr lmi(4);
  lmi.constant(partial_transpose(rho.op(), 0).matrix());
  lmi.add_term(sig, [](const ComplexMatrix& x) {
    return partial_transpose_raw(x, {2, 2}, 0);
  });
  prob.add_lmi(std::move(lmi));

  conic::LinExpr obj;
  obj.add(sig, ComplexMatrix::Identity(4, 4));
  prob.set_objective(conic::Sense::Min, std::move(obj));

  auto rep = conic::solve(prob, opts);
  if (rep.status != conic::SolveStatus::Optimal)
    throw std::runtime_error("state_robustness: solver did not reach optimality (" +
                             rep.diagnostics + ")");
  return std::max(0.0, rep.objective);
}

Behaviour naive_trace_eval(const QuantumState& state, const Povm& povm_a,
                           const Povm& povm_b, const InputEnsemble& ens_a,
                           const InputEnsemble& ens_b) {
  const int da0 = ens_a.dim();
  const int db0 = ens_b.dim();
  const int da = povm_a.element(0).factors().at(1);
  const int db = povm_b.element(0).factors().at(1);
  if (state.dim() != da * db)
    throw std::invalid_argument("naive_trace_eval: dimension mismatch");
  const long D = static_cast<long>(da0) * da * db0 * db;

  // Index helpers over the ordering [A0, A, B0, B], everything written out.
  auto at = [&](long idx, long s, int dim) { return (idx / s) % dim; };
  const long s_b = 1, s_b0 = db, s_a = static_cast<long>(db0) * db,
             s_a0 = static_cast<long>(da) * db0 * db;

  std::vector<double> probs;
  for (int x = 0; x < ens_a.size(); ++x)
    for (int y = 0; y < ens_b.size(); ++y) {
      const ComplexMatrix& psi_x = ens_a.state(x).op().matrix();
      const ComplexMatrix& psi_y = ens_b.state(y).op().matrix();
      for (int a = 0; a < povm_a.outcomes(); ++a)
        for (int bb = 0; bb < povm_b.outcomes(); ++bb) {
          const ComplexMatrix& ma = povm_a.element(a).matrix();
          const ComplexMatrix& mb = povm_b.element(bb).matrix();
          // Tr[(Ma ox Mb)(psi_x ox rho ox psi_y)] with one global sum.
          Complex acc = 0.0;
          for (long r = 0; r < D; ++r)
            for (long c = 0; c < D; ++c) {
              // measurement operator entry at (r, c)
              const Complex m_rc =
                  ma(at(r, s_a0, da0) * da + at(r, s_a, da),
                     at(c, s_a0, da0) * da + at(c, s_a, da)) *
                  mb(at(r, s_b0, db0) * db + at(r, s_b, db),
                     at(c, s_b0, db0) * db + at(c, s_b, db));
              if (m_rc == Complex(0.0, 0.0)) continue;
              // weight operator entry at (c, r)
              const Complex w_cr =
                  psi_x(at(c, s_a0, da0), at(r, s_a0, da0)) *
                  state.op()(at(c, s_a, da) * db + at(c, s_b, db),
                             at(r, s_a, da) * db + at(r, s_b, db)) *
                  psi_y(at(c, s_b0, db0), at(r, s_b0, db0));
              acc += m_rc * w_cr;
            }
          probs.push_back(acc.real());
        }
    }
  return Behaviour({povm_a.outcomes(), povm_b.outcomes()}, {ens_a, ens_b},
                   std::move(probs), "naive_trace_eval");
}

}  // namespace mdiq::oracle
