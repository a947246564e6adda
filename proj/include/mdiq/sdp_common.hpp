#pragma once

#include <functional>
#include <string>

#include "mdiq/conic.hpp"

namespace mdiq::detail {

// E_rc + E_cr: Tr against a Hermitian X picks out 2 Re X_rc.
inline ComplexMatrix herm_unit_re(int d, int r, int c) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(r, c) += 1.0;
  m(c, r) += 1.0;
  return m;
}

// i E_rc - i E_cr: Tr against a Hermitian X picks out 2 Im X_rc.
inline ComplexMatrix herm_unit_im(int d, int r, int c) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(r, c) += Complex(0, 1);
  m(c, r) += Complex(0, -1);
  return m;
}

/// Coefficient matrices C such that the rows Tr[C S] = 0 carve out, for S
/// Hermitian on the given tensor factors, exactly the subspace
/// { identity on `factor` tensored with anything on the rest }.
std::vector<ComplexMatrix> identity_factor_coeffs(const std::vector<int>& dims,
                                                  int factor);

/// Rows Tr[C S] = 0 forcing S proportional to the identity.
std::vector<ComplexMatrix> trace_proportional_coeffs(int dim);

/// A family of operator variables indexed by flattened outcome tuples.
/// `lift` maps a coefficient on the nominal joint space to a coefficient on
/// the actual solver variable (identity for plain families; tensoring with
/// identity copies for symmetric-extension families).
struct FamilyHandle {
  std::vector<conic::VarId> vars;
  std::vector<int> joint_factors;   // nominal space the family acts on
  int joint_dim = 1;
  std::function<ComplexMatrix(const ComplexMatrix&)> lift;

  conic::LinExpr expr(std::size_t idx, const ComplexMatrix& coeff) const {
    conic::LinExpr e;
    e.add(vars.at(idx), lift(coeff));
    return e;
  }
  void add_term(conic::LinExpr& e, std::size_t idx, const ComplexMatrix& coeff,
                double scale = 1.0) const {
    e.add(vars.at(idx), ComplexMatrix(scale * lift(coeff)));
  }
};

enum class FamilyCone {
  Plain,      // PSD only
  PtFactor,   // PSD and PT-positive on one designated factor
  PtAll,      // PSD and PT-positive on every single-factor cut
};

struct FamilySpec {
  FamilyCone cone = FamilyCone::Plain;
  int pt_factor = 0;  // for PtFactor
};

/// Declare `count` complex PSD variables on the joint space with the
/// requested relaxation cones.
FamilyHandle declare_family(conic::ConicProblem& p, const std::string& prefix,
                            int count, const std::vector<int>& joint_factors,
                            const FamilySpec& spec);

/// Declare a family of k-symmetric-extension variables for a bipartite joint
/// space [d0, d1]: each variable lives on d0 x d1^k, is permutation-symmetric
/// over the d1 copies (linear equality rows), and optionally PT-positive on a
/// chain of cuts including the d0 factor. Consumers address the family through
/// `lift`, i.e. through its partial trace down to [d0, d1].
FamilyHandle declare_symext_family(conic::ConicProblem& p,
                                   const std::string& prefix, int count,
                                   int d0, int d1, int k, bool with_ppt);

/// Rows: sum over `members` of the family operators has identity structure on
/// `factor` of the family's nominal space.
void add_identity_factor_rows(conic::ConicProblem& p, const FamilyHandle& fam,
                              const std::vector<std::size_t>& members,
                              int factor);

/// Rows: sum over `members` is proportional to the identity (proportionality
/// constant left free).
void add_trace_proportional_rows(conic::ConicProblem& p, const FamilyHandle& fam,
                                 const std::vector<std::size_t>& members);

}  // namespace mdiq::detail
