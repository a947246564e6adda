#pragma once

#include "mdiq/behaviour.hpp"
#include "mdiq/quantify.hpp"

namespace mdiq::oracle {

/// Sum of the absolute values of the negative eigenvalues of the partial
/// transpose across the given factor. Pure eigenvalue computation.
double state_negativity(const QuantumState& rho, int cut_factor = 0);

/// State-level robustness with the separable set replaced by PPT (exact on
/// two qubits): min r such that (rho + r sigma) / (1 + r) is PPT with sigma
/// drawn from the noise set. Two-qubit states only.
double state_robustness(const QuantumState& rho, NoiseSet noise,
                        const conic::SolverOptions& opts = {});

/// Deliberately naive re-evaluation of the bipartite outcome distribution:
/// builds the full product operator for every cell and takes one global
/// trace. Independent of the simulation pipeline.
Behaviour naive_trace_eval(const QuantumState& state, const Povm& povm_a,
                           const Povm& povm_b, const InputEnsemble& ens_a,
                           const InputEnsemble& ens_b);

}  // namespace mdiq::oracle
