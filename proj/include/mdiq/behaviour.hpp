#pragma once

#include <optional>
#include <string>

#include "mdiq/states.hpp"

namespace mdiq {

/// Probability table p(outcomes | input indices) for 1-3 parties, bound to
/// the input ensembles that produced it.
///
/// Storage is a flat array, inputs-major then outcomes-minor:
///   idx = ((...(x1*Nx2 + x2)...)*Na1 + a1)*Na2 + a2 ...
class Behaviour {
 public:
  Behaviour(std::vector<int> outcome_counts, std::vector<InputEnsemble> ensembles,
            std::vector<double> probs, std::string provenance = "");

  int parties() const { return static_cast<int>(outcome_counts_.size()); }
  const std::vector<int>& outcome_counts() const { return outcome_counts_; }
  std::vector<int> input_counts() const;
  const std::vector<InputEnsemble>& ensembles() const { return ensembles_; }
  const InputEnsemble& ensemble(int party) const { return ensembles_.at(party); }
  const std::vector<double>& probs() const { return probs_; }
  const std::string& provenance() const { return provenance_; }

  std::size_t index(const std::vector<int>& inputs,
                    const std::vector<int>& outcomes) const;
  double prob(const std::vector<int>& inputs,
              const std::vector<int>& outcomes) const;

  std::size_t input_tuples() const;
  std::size_t outcome_tuples() const;

 private:
  std::vector<int> outcome_counts_;
  std::vector<InputEnsemble> ensembles_;
  std::vector<double> probs_;
  std::string provenance_;
};

/// Convex mixture of two behaviours over identical scenarios.
Behaviour mix(const Behaviour& a, const Behaviour& b, double weight_a);

enum class FamilyStructure { MSet, SRelaxed, PSet, TripartiteMSet, TripartiteSepRelaxed };

struct FamilyNormalization {
  bool unit = true;
  double t = 1.0;  // total sum is t * identity
};

/// Indexed family of effective POVM operators on the joint input space.
/// Index runs over outcome tuples, last party fastest (same minor order as
/// Behaviour).
class EffectivePovmFamily {
 public:
  EffectivePovmFamily(std::vector<int> outcome_counts,
                      std::vector<HermitianOperator> operators,
                      FamilyStructure structure, FamilyNormalization norm);

  const std::vector<int>& outcome_counts() const { return outcome_counts_; }
  const std::vector<HermitianOperator>& operators() const { return operators_; }
  const HermitianOperator& op(const std::vector<int>& outcomes) const;
  FamilyStructure structure() const { return structure_; }
  const FamilyNormalization& normalization() const { return norm_; }
  int joint_input_dim() const { return operators_.front().dim(); }

 private:
  std::vector<int> outcome_counts_;
  std::vector<HermitianOperator> operators_;
  FamilyStructure structure_;
  FamilyNormalization norm_;
};

// -- forward simulation -------------------------------------------------------
//
// POVM convention throughout: each party's measurement acts on
// input ⊗ share, i.e. elements carry factors [d_input, d_share].

Behaviour simulate_bipartite(const QuantumState& state, const Povm& povm_a,
                             const Povm& povm_b, const InputEnsemble& ens_a,
                             const InputEnsemble& ens_b);

Behaviour simulate_tripartite(const QuantumState& state, const Povm& povm_a,
                              const Povm& povm_b, const Povm& povm_c,
                              const InputEnsemble& ens_a,
                              const InputEnsemble& ens_b,
                              const InputEnsemble& ens_c);

/// One box holding a share of `hidden_state`; a 1x1 hidden state means the
/// box measures the input alone.
Behaviour simulate_single_box(const Povm& povm, const QuantumState& hidden_state,
                              const InputEnsemble& ens);

/// Effective POVM family of Eq-style Tr_shares[(M_a ⊗ M_b)(I ⊗ rho ⊗ I)],
/// living on the joint input space.
EffectivePovmFamily effective_povm(const QuantumState& state, const Povm& povm_a,
                                   const Povm& povm_b);

EffectivePovmFamily effective_povm_tripartite(const QuantumState& state,
                                              const Povm& povm_a,
                                              const Povm& povm_b,
                                              const Povm& povm_c);

EffectivePovmFamily effective_povm_single(const Povm& povm,
                                          const QuantumState& hidden_state);

/// Linear inversion of the effective POVM from a behaviour with
/// tomographically complete ensembles on every party.
EffectivePovmFamily tomographic_reconstruction(const Behaviour& b);

}  // namespace mdiq
