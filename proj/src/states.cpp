#include "mdiq/states.hpp"

#include <cmath>

namespace mdiq {

namespace {

using VecC = Eigen::VectorXcd;

HermitianOperator projector(const VecC& psi, std::vector<int> factors) {
  ComplexMatrix m = psi * psi.adjoint();
  return HermitianOperator(m, std::move(factors));
}

const Complex kI(0.0, 1.0);

ComplexMatrix pauli(int k) {
  ComplexMatrix m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

QuantumState::QuantumState(HermitianOperator op) : op_(std::move(op)) {
  if (std::abs(op_.trace() - 1.0) > kPsdTol)
    throw std::invalid_argument("QuantumState: trace must be 1");
  if (min_eigenvalue(op_) < -kPsdTol)
    throw std::invalid_argument("QuantumState: not positive semidefinite");
}

Povm::Povm(std::vector<HermitianOperator> elements, std::string label)
    : elements_(std::move(elements)), label_(std::move(label)) {
  if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
  const int d = elements_.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& e : elements_) {
    if (e.dim() != d) throw std::invalid_argument("Povm: mixed dimensions");
    if (min_eigenvalue(e) < -kPsdTol)
      throw std::invalid_argument("Povm: element not PSD");
    sum += e.matrix();
  }
  if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kPsdTol)
    throw std::invalid_argument("Povm: elements do not sum to identity");
}

InputEnsemble::InputEnsemble(std::vector<QuantumState> states)
    : states_(std::move(states)) {
  if (states_.empty()) throw std::invalid_argument("InputEnsemble: empty");
  const int d = states_.front().dim();
  for (const auto& s : states_)
    if (s.dim() != d)
      throw std::invalid_argument("InputEnsemble: mixed dimensions");

  // Completeness: the states must span the d^2-dimensional operator space.
  // Rank of the Gram matrix of Hilbert-Schmidt inner products decides it.
  const int n = size();
  RealMatrix gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) =
          trace_product(states_[i].op().matrix(), states_[j].op().matrix())
              .real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram);
  const double emax = es.eigenvalues().maxCoeff();
  int rank = 0;
  double emin_pos = emax;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > emax * 1e-12) {
      ++rank;
      emin_pos = std::min(emin_pos, es.eigenvalues()(i));
    }
  complete_ = (rank == d * d);
  gram_condition_ = complete_ ? emax / emin_pos : 0.0;
}

std::vector<QuantumState> bell_states() {
  const double s = 1.0 / std::sqrt(2.0);
  VecC phi_p(4), phi_m(4), psi_p(4), psi_m(4);
  phi_p << s, 0, 0, s;
  phi_m << s, 0, 0, -s;
  psi_p << 0, s, s, 0;
  psi_m << 0, s, -s, 0;
  std::vector<QuantumState> out;
  for (const auto& v : {phi_p, phi_m, psi_p, psi_m})
    out.emplace_back(projector(v, {2, 2}));
  return out;
}

Povm bsm() {
  std::vector<HermitianOperator> els;
  for (const auto& s : bell_states()) els.push_back(s.op());
  return Povm(std::move(els), "bsm");
}

Povm coarse_bsm() {
  const auto bells = bell_states();
  HermitianOperator p0 = bells[0].op();
  ComplexMatrix rest = ComplexMatrix::Identity(4, 4) - p0.matrix();
  return Povm({p0, HermitianOperator(rest, {2, 2})}, "coarse-bsm");
}

QuantumState werner(double w) {
  if (w < 0.0 || w > 1.0)
    throw std::invalid_argument("werner: w must lie in [0, 1]");
  const ComplexMatrix phi = bell_states()[0].op().matrix();
  ComplexMatrix m = w * phi + (1.0 - w) * ComplexMatrix::Identity(4, 4) / 4.0;
  return QuantumState(HermitianOperator(m, {2, 2}));
}

QuantumState ghz() {
  const double s = 1.0 / std::sqrt(2.0);
  VecC v = VecC::Zero(8);
  v(0) = s;
  v(7) = s;
  return QuantumState(projector(v, {2, 2, 2}));
}

QuantumState bloch_state(double x, double y, double z) {
  ComplexMatrix m = 0.5 * (pauli(0) + x * pauli(1) + y * pauli(2) + z * pauli(3));
  return QuantumState(HermitianOperator(m));
}

std::array<std::array<double, 3>, 4> tetrahedron_vertices() {
  const double s = 1.0 / std::sqrt(3.0);
  return {{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}};
}

InputEnsemble tetrahedron_inputs() {
  std::vector<QuantumState> states;
  for (const auto& v : tetrahedron_vertices())
    states.push_back(bloch_state(v[0], v[1], v[2]));
  return InputEnsemble(std::move(states));
}

InputEnsemble tomo4_inputs() {
  std::vector<QuantumState> states;
  states.push_back(maximally_mixed({2}));
  states.push_back(bloch_state(0, 0, 1));   // |0>
  states.push_back(bloch_state(1, 0, 0));   // |+>
  states.push_back(bloch_state(0, 1, 0));   // |+i>
  return InputEnsemble(std::move(states));
}

Povm tetrahedral_povm() {
  std::vector<HermitianOperator> els;
  for (const auto& v : tetrahedron_vertices()) {
    ComplexMatrix m = 0.25 * (pauli(0) + v[0] * pauli(1) + v[1] * pauli(2) +
                              v[2] * pauli(3));
    els.emplace_back(m);
  }
  return Povm(std::move(els), "tetra-povm");
}

Povm z_basis_povm() {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return Povm({HermitianOperator(p0), HermitianOperator(p1)}, "z-basis");
}

QuantumState maximally_mixed(std::vector<int> factors) {
  auto id = HermitianOperator::identity(factors);
  return QuantumState(
      HermitianOperator(id.matrix() / id.dim(), std::move(factors)));
}

}  // namespace mdiq
