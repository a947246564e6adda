#include "mdiq/behaviour.hpp"

#include <cmath>
#include <numeric>

#include "mdiq/herm_basis.hpp"

namespace mdiq {

namespace {

constexpr double kProbTol = 1e-9;
constexpr double kFamilyTol = 1e-7;
constexpr double kReconstructTol = 1e-8;
constexpr double kGramCondLimit = 1e8;

std::size_t tuple_count(const std::vector<int>& counts) {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{1},
                         std::multiplies<std::size_t>());
}

// Iterate over all multi-indices for the given counts, last index fastest.
template <typename F>
void for_each_tuple(const std::vector<int>& counts, F&& f) {
  std::vector<int> idx(counts.size(), 0);
  while (true) {
    f(idx);
    int p = static_cast<int>(counts.size()) - 1;
    while (p >= 0 && ++idx[p] == counts[p]) idx[p--] = 0;
    if (p < 0) break;
  }
}

// Reorder tensor factors of a matrix: new factor j is old factor perm[j].
ComplexMatrix permute_factors(const ComplexMatrix& m, const std::vector<int>& dims,
                              const std::vector<int>& perm) {
  const int nf = static_cast<int>(dims.size());
  std::vector<long> old_stride(nf, 1), new_stride(nf, 1);
  std::vector<int> new_dims(nf);
  for (int j = 0; j < nf; ++j) new_dims[j] = dims[perm[j]];
  for (int i = nf - 2; i >= 0; --i) old_stride[i] = old_stride[i + 1] * dims[i + 1];
  for (int i = nf - 2; i >= 0; --i)
    new_stride[i] = new_stride[i + 1] * new_dims[i + 1];

  const long d = m.rows();
  auto remap = [&](long old_idx) {
    long out = 0;
    for (int j = 0; j < nf; ++j)
      out += ((old_idx / old_stride[perm[j]]) % dims[perm[j]]) * new_stride[j];
    return out;
  };
  ComplexMatrix out(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) out(remap(r), remap(c)) = m(r, c);
  return out;
}

}  // namespace

Behaviour::Behaviour(std::vector<int> outcome_counts,
                     std::vector<InputEnsemble> ensembles,
                     std::vector<double> probs, std::string provenance)
    : outcome_counts_(std::move(outcome_counts)),
      ensembles_(std::move(ensembles)),
      probs_(std::move(probs)),
      provenance_(std::move(provenance)) {
  const int n = parties();
  if (n < 1 || n > 3)
    throw std::invalid_argument("Behaviour: 1 to 3 parties supported");
  if (ensembles_.size() != outcome_counts_.size())
    throw std::invalid_argument("Behaviour: one ensemble per party required");
  for (int c : outcome_counts_)
    if (c < 1) throw std::invalid_argument("Behaviour: outcome count < 1");

  const std::size_t expected = input_tuples() * outcome_tuples();
  if (probs_.size() != expected)
    throw std::invalid_argument("Behaviour: probability table has wrong size");

  for (double p : probs_) {
    if (!std::isfinite(p) || p < -kProbTol || p > 1.0 + kProbTol)
      throw std::invalid_argument("Behaviour: probability out of range");
  }
  const std::size_t per_input = outcome_tuples();
  for (std::size_t t = 0; t < input_tuples(); ++t) {
    double sum = 0.0;
    for (std::size_t o = 0; o < per_input; ++o) sum += probs_[t * per_input + o];
    if (std::abs(sum - 1.0) > kProbTol)
      throw std::invalid_argument(
          "Behaviour: outcome probabilities for an input tuple do not sum to 1");
  }
}

std::vector<int> Behaviour::input_counts() const {
  std::vector<int> out;
  for (const auto& e : ensembles_) out.push_back(e.size());
  return out;
}

std::size_t Behaviour::input_tuples() const { return tuple_count(input_counts()); }
std::size_t Behaviour::outcome_tuples() const { return tuple_count(outcome_counts_); }

std::size_t Behaviour::index(const std::vector<int>& inputs,
                             const std::vector<int>& outcomes) const {
  if (inputs.size() != ensembles_.size() ||
      outcomes.size() != outcome_counts_.size())
    throw std::invalid_argument("Behaviour::index: arity mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i] < 0 || inputs[i] >= ensembles_[i].size())
      throw std::invalid_argument("Behaviour::index: input out of range");
    idx = idx * ensembles_[i].size() + inputs[i];
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] < 0 || outcomes[i] >= outcome_counts_[i])
      throw std::invalid_argument("Behaviour::index: outcome out of range");
    idx = idx * outcome_counts_[i] + outcomes[i];
  }
  return idx;
}

double Behaviour::prob(const std::vector<int>& inputs,
                       const std::vector<int>& outcomes) const {
  return probs_[index(inputs, outcomes)];
}

Behaviour mix(const Behaviour& a, const Behaviour& b, double weight_a) {
  if (a.probs().size() != b.probs().size() ||
      a.outcome_counts() != b.outcome_counts())
    throw std::invalid_argument("mix: scenario mismatch");
  std::vector<double> probs(a.probs().size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    probs[i] = weight_a * a.probs()[i] + (1.0 - weight_a) * b.probs()[i];
  return Behaviour(a.outcome_counts(), a.ensembles(), std::move(probs),
                   "mixture");
}

EffectivePovmFamily::EffectivePovmFamily(std::vector<int> outcome_counts,
                                         std::vector<HermitianOperator> operators,
                                         FamilyStructure structure,
                                         FamilyNormalization norm)
    : outcome_counts_(std::move(outcome_counts)),
      operators_(std::move(operators)),
      structure_(structure),
      norm_(norm) {
  if (operators_.empty())
    throw std::invalid_argument("EffectivePovmFamily: no operators");
  if (operators_.size() != tuple_count(outcome_counts_))
    throw std::invalid_argument("EffectivePovmFamily: operator count mismatch");
  const int d = operators_.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& m : operators_) {
    if (m.dim() != d)
      throw std::invalid_argument("EffectivePovmFamily: mixed dimensions");
    if (min_eigenvalue(m) < -kFamilyTol)
      throw std::invalid_argument("EffectivePovmFamily: operator not PSD");
    sum += m.matrix();
  }
  const double t = norm_.unit ? 1.0 : norm_.t;
  if ((sum - t * ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() >
      kFamilyTol * std::max(1.0, t))
    throw std::invalid_argument(
        "EffectivePovmFamily: operators do not sum to t * identity");
}

const HermitianOperator& EffectivePovmFamily::op(
    const std::vector<int>& outcomes) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    idx = idx * outcome_counts_[i] + outcomes[i];
  return operators_.at(idx);
}

// -- effective POVMs ---------------------------------------------------------

EffectivePovmFamily effective_povm(const QuantumState& state, const Povm& povm_a,
                                   const Povm& povm_b) {
  if (state.factors().size() != 2)
    throw std::invalid_argument("effective_povm: state must have two factors");
  const int da = state.factors()[0], db = state.factors()[1];
  if (povm_a.element(0).factors().size() != 2 ||
      povm_a.element(0).factors()[1] != da)
    throw std::invalid_argument("effective_povm: povm_a share dimension mismatch");
  if (povm_b.element(0).factors().size() != 2 ||
      povm_b.element(0).factors()[1] != db)
    throw std::invalid_argument("effective_povm: povm_b share dimension mismatch");
  const int da0 = povm_a.element(0).factors()[0];
  const int db0 = povm_b.element(0).factors()[0];

  // Weight operator on [A0 A B0 B]: permutation of psi-slots around rho.
  ComplexMatrix idw = kron_raw(
      kron_raw(ComplexMatrix::Identity(da0, da0), ComplexMatrix::Identity(db0, db0)),
      state.op().matrix());  // on [A0 B0 A B]
  ComplexMatrix weight =
      permute_factors(idw, {da0, db0, da, db}, {0, 2, 1, 3});  // -> [A0 A B0 B]

  std::vector<HermitianOperator> ops;
  for (int a = 0; a < povm_a.outcomes(); ++a)
    for (int b = 0; b < povm_b.outcomes(); ++b) {
      ComplexMatrix big =
          kron_raw(povm_a.element(a).matrix(), povm_b.element(b).matrix()) *
          weight;
      ComplexMatrix reduced =
          partial_trace_raw(big, {da0, da, db0, db}, {0, 2});
      ops.emplace_back(reduced, std::vector<int>{da0, db0});
    }
  return EffectivePovmFamily({povm_a.outcomes(), povm_b.outcomes()},
                             std::move(ops), FamilyStructure::MSet, {});
}

EffectivePovmFamily effective_povm_tripartite(const QuantumState& state,
                                              const Povm& povm_a,
                                              const Povm& povm_b,
                                              const Povm& povm_c) {
  if (state.factors().size() != 3)
    throw std::invalid_argument(
        "effective_povm_tripartite: state must have three factors");
  const int da = state.factors()[0], db = state.factors()[1],
            dc = state.factors()[2];
  const Povm* povms[3] = {&povm_a, &povm_b, &povm_c};
  const int shares[3] = {da, db, dc};
  std::vector<int> in_dims(3);
  for (int p = 0; p < 3; ++p) {
    const auto& f = povms[p]->element(0).factors();
    if (f.size() != 2 || f[1] != shares[p])
      throw std::invalid_argument(
          "effective_povm_tripartite: povm share dimension mismatch");
    in_dims[p] = f[0];
  }

  ComplexMatrix ids = ComplexMatrix::Identity(in_dims[0], in_dims[0]);
  ids = kron_raw(ids, ComplexMatrix::Identity(in_dims[1], in_dims[1]));
  ids = kron_raw(ids, ComplexMatrix::Identity(in_dims[2], in_dims[2]));
  ComplexMatrix idw = kron_raw(ids, state.op().matrix());  // [A0 B0 C0 A B C]
  ComplexMatrix weight =
      permute_factors(idw, {in_dims[0], in_dims[1], in_dims[2], da, db, dc},
                      {0, 3, 1, 4, 2, 5});  // -> [A0 A B0 B C0 C]
  const std::vector<int> dims = {in_dims[0], da, in_dims[1], db, in_dims[2], dc};

  std::vector<HermitianOperator> ops;
  for (int a = 0; a < povm_a.outcomes(); ++a)
    for (int b = 0; b < povm_b.outcomes(); ++b)
      for (int c = 0; c < povm_c.outcomes(); ++c) {
        ComplexMatrix big = kron_raw(
            kron_raw(povm_a.element(a).matrix(), povm_b.element(b).matrix()),
            povm_c.element(c).matrix());
        ComplexMatrix reduced =
            partial_trace_raw(big * weight, dims, {0, 2, 4});
        ops.emplace_back(reduced,
                         std::vector<int>{in_dims[0], in_dims[1], in_dims[2]});
      }
  return EffectivePovmFamily(
      {povm_a.outcomes(), povm_b.outcomes(), povm_c.outcomes()}, std::move(ops),
      FamilyStructure::TripartiteMSet, {});
}

EffectivePovmFamily effective_povm_single(const Povm& povm,
                                          const QuantumState& hidden_state) {
  const int dh = hidden_state.dim();
  std::vector<HermitianOperator> ops;
  if (dh == 1) {
    for (const auto& e : povm.elements()) {
      if (e.factors().size() == 2 && e.factors()[1] == 1)
        ops.emplace_back(e.matrix(), std::vector<int>{e.factors()[0]});
      else
        ops.push_back(e);
    }
  } else {
    const auto& f = povm.element(0).factors();
    if (f.size() != 2 || f[1] != dh)
      throw std::invalid_argument(
          "effective_povm_single: povm share dimension mismatch");
    const int d0 = f[0];
    ComplexMatrix weight = kron_raw(ComplexMatrix::Identity(d0, d0),
                                    hidden_state.op().matrix());
    for (const auto& e : povm.elements()) {
      ComplexMatrix reduced =
          partial_trace_raw(e.matrix() * weight, {d0, dh}, {0});
      ops.emplace_back(reduced, std::vector<int>{d0});
    }
  }
  return EffectivePovmFamily({povm.outcomes()}, std::move(ops),
                             FamilyStructure::MSet, {});
}

// -- simulation ---------------------------------------------------------------

namespace {

Behaviour behaviour_from_family(const EffectivePovmFamily& fam,
                                std::vector<InputEnsemble> ensembles,
                                std::string provenance) {
  std::vector<int> in_counts;
  for (const auto& e : ensembles) in_counts.push_back(e.size());

  std::vector<double> probs;
  probs.reserve(tuple_count(in_counts) * tuple_count(fam.outcome_counts()));
  for_each_tuple(in_counts, [&](const std::vector<int>& xs) {
    ComplexMatrix joint = ensembles[0].state(xs[0]).op().matrix();
    for (std::size_t p = 1; p < ensembles.size(); ++p)
      joint = kron_raw(joint, ensembles[p].state(xs[p]).op().matrix());
    for_each_tuple(fam.outcome_counts(), [&](const std::vector<int>& as) {
      probs.push_back(trace_product(fam.op(as).matrix(), joint).real());
    });
  });
  return Behaviour(fam.outcome_counts(), std::move(ensembles), std::move(probs),
                   std::move(provenance));
}

}  // namespace

Behaviour simulate_bipartite(const QuantumState& state, const Povm& povm_a,
                             const Povm& povm_b, const InputEnsemble& ens_a,
                             const InputEnsemble& ens_b) {
  auto fam = effective_povm(state, povm_a, povm_b);
  if (fam.operators().front().factors()[0] != ens_a.dim() ||
      fam.operators().front().factors()[1] != ens_b.dim())
    throw std::invalid_argument("simulate_bipartite: input dimension mismatch");
  return behaviour_from_family(fam, {ens_a, ens_b}, "simulate_bipartite");
}

Behaviour simulate_tripartite(const QuantumState& state, const Povm& povm_a,
                              const Povm& povm_b, const Povm& povm_c,
                              const InputEnsemble& ens_a,
                              const InputEnsemble& ens_b,
                              const InputEnsemble& ens_c) {
  auto fam = effective_povm_tripartite(state, povm_a, povm_b, povm_c);
  const auto& f = fam.operators().front().factors();
  if (f[0] != ens_a.dim() || f[1] != ens_b.dim() || f[2] != ens_c.dim())
    throw std::invalid_argument("simulate_tripartite: input dimension mismatch");
  return behaviour_from_family(fam, {ens_a, ens_b, ens_c}, "simulate_tripartite");
}

Behaviour simulate_single_box(const Povm& povm, const QuantumState& hidden_state,
                              const InputEnsemble& ens) {
  auto fam = effective_povm_single(povm, hidden_state);
  if (fam.operators().front().dim() != ens.dim())
    throw std::invalid_argument("simulate_single_box: input dimension mismatch");
  return behaviour_from_family(fam, {ens}, "simulate_single_box");
}

// -- tomographic reconstruction ----------------------------------------------

EffectivePovmFamily tomographic_reconstruction(const Behaviour& b) {
  for (const auto& e : b.ensembles())
    if (!e.tomographically_complete())
      throw std::invalid_argument(
          "tomographic_reconstruction: ensemble not tomographically complete");

  int joint_dim = 1;
  for (const auto& e : b.ensembles()) joint_dim *= e.dim();
  HermBasis basis(joint_dim);

  const auto in_counts = b.input_counts();
  const std::size_t n_in = b.input_tuples();
  RealMatrix frame(n_in, basis.size());
  std::size_t row = 0;
  for_each_tuple(in_counts, [&](const std::vector<int>& xs) {
    ComplexMatrix joint = b.ensemble(0).state(xs[0]).op().matrix();
    for (int p = 1; p < b.parties(); ++p)
      joint = kron_raw(joint, b.ensemble(p).state(xs[p]).op().matrix());
    frame.row(row++) = basis.coords(joint).transpose();
  });

  Eigen::JacobiSVD<RealMatrix> svd(frame,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (cond > kGramCondLimit)
    throw std::runtime_error(
        "tomographic_reconstruction: ill-conditioned input frame (cond " +
        std::to_string(cond) + ")");

  // One least-squares inversion per outcome tuple.
  const std::size_t n_out = b.outcome_tuples();
  std::vector<HermitianOperator> ops;
  ops.reserve(n_out);
  std::vector<int> joint_factors;
  for (const auto& e : b.ensembles()) joint_factors.push_back(e.dim());

  for (std::size_t o = 0; o < n_out; ++o) {
    RealVector rhs(n_in);
    for (std::size_t t = 0; t < n_in; ++t) rhs(t) = b.probs()[t * n_out + o];
    RealVector coords = svd.solve(rhs);
    const RealVector residual = frame * coords - rhs;
    if (residual.cwiseAbs().maxCoeff() > kReconstructTol)
      throw std::runtime_error(
          "tomographic_reconstruction: behaviour inconsistent with any "
          "effective POVM (residual " +
          std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
    ComplexMatrix m = basis.matrix(coords);
    // Numerical cleanup keeps the family constructor's PSD check meaningful.
    ops.emplace_back((m + m.adjoint()) / 2.0, joint_factors);
  }
  const FamilyStructure tag = b.parties() == 3 ? FamilyStructure::TripartiteMSet
                                               : FamilyStructure::MSet;
  return EffectivePovmFamily(b.outcome_counts(), std::move(ops), tag, {});
}

}  // namespace mdiq
