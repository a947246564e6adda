#pragma once

#include <array>
#include <string>

#include "mdiq/linalg.hpp"

namespace mdiq {

/// Density matrix with labeled tensor factors. PSD within 1e-10, unit trace.
class QuantumState {
 public:
  explicit QuantumState(HermitianOperator op);

  const HermitianOperator& op() const { return op_; }
  int dim() const { return op_.dim(); }
  const std::vector<int>& factors() const { return op_.factors(); }

 private:
  HermitianOperator op_;
};

/// Measurement: PSD elements on a common space summing to the identity.
class Povm {
 public:
  Povm(std::vector<HermitianOperator> elements, std::string label = "");

  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const HermitianOperator& element(int i) const { return elements_.at(i); }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  int dim() const { return elements_.front().dim(); }
  const std::string& label() const { return label_; }

 private:
  std::vector<HermitianOperator> elements_;
  std::string label_;
};

/// Ordered set of quantum input states for one party. The tomographic
/// completeness flag is always recomputed from the Gram matrix of
/// Hilbert-Schmidt inner products, never trusted from input data.
class InputEnsemble {
 public:
  explicit InputEnsemble(std::vector<QuantumState> states);

  const std::vector<QuantumState>& states() const { return states_; }
  const QuantumState& state(int i) const { return states_.at(i); }
  int size() const { return static_cast<int>(states_.size()); }
  int dim() const { return states_.front().dim(); }

  bool tomographically_complete() const { return complete_; }
  double gram_condition() const { return gram_condition_; }

 private:
  std::vector<QuantumState> states_;
  bool complete_ = false;
  double gram_condition_ = 0.0;
};

// -- named constructions ----------------------------------------------------

/// The four Bell projectors on 2x2, ordered Phi+, Phi-, Psi+, Psi-.
std::vector<QuantumState> bell_states();

/// Bell state measurement: the four Bell projectors as a POVM.
Povm bsm();

/// Two-outcome coarse graining of the BSM: {Phi+ projector, complement}.
/// Keeps tripartite certification problems at a tractable size while still
/// detecting the states used in the test suite.
Povm coarse_bsm();

/// w |Phi+><Phi+| + (1-w) I/4. The name follows the usage in the MDI
/// randomness literature; elsewhere this family is called isotropic.
/// Entangled iff w > 1/3.
QuantumState werner(double w);

/// GHZ state (|000> + |111>)/sqrt(2) on three qubits.
QuantumState ghz();

/// Pure qubit state with the given Bloch vector.
QuantumState bloch_state(double x, double y, double z);

/// Canonical tetrahedron Bloch vectors (1,1,1)/s3, (1,-1,-1)/s3,
/// (-1,1,-1)/s3, (-1,-1,1)/s3. Any rigid rotation would be equivalent.
std::array<std::array<double, 3>, 4> tetrahedron_vertices();

/// Four pure states at the tetrahedron vertices; tomographically complete.
InputEnsemble tetrahedron_inputs();

/// {I/2, |0>, (|0>+|1>)/sqrt 2, (|0>+i|1>)/sqrt 2}. Informationally complete.
InputEnsemble tomo4_inputs();

/// Extremal four-outcome qubit POVM with elements (I + v_k.sigma)/4 at the
/// tetrahedron vertices.
Povm tetrahedral_povm();

/// Projective qubit measurement {|0><0|, |1><1|}.
Povm z_basis_povm();

/// Maximally mixed state I/d with the given factor layout.
QuantumState maximally_mixed(std::vector<int> factors);

}  // namespace mdiq
