#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "mdiq/ipm.hpp"

namespace mdiq::conic {

enum class SolveStatus { Optimal, InfeasibleCertified, Indeterminate };
enum class Sense { Min, Max };
enum class Verdict { Feasible, Infeasible, Indeterminate };

struct VarId {
  int idx = -1;
};

/// Linear functional over declared variables: sum of Tr[C_k X_k] plus scalar
/// terms.
class LinExpr {
 public:
  LinExpr& add(VarId v, const ComplexMatrix& coeff) {
    mat_terms.emplace_back(v, coeff);
    return *this;
  }
  LinExpr& add_scalar(VarId v, double coeff) {
    scalar_terms.emplace_back(v, coeff);
    return *this;
  }

  std::vector<std::pair<VarId, ComplexMatrix>> mat_terms;
  std::vector<std::pair<VarId, double>> scalar_terms;
};

/// Affine Hermitian-matrix expression, used for linear matrix inequalities.
/// Matrix variables enter through a linear map given as a callable applied to
/// the variable value.
class MatExpr {
 public:
  explicit MatExpr(int dim) : dim_(dim) {}

  MatExpr& constant(const ComplexMatrix& c) {
    const_part = c;
    return *this;
  }
  MatExpr& add_term(VarId v,
                    std::function<ComplexMatrix(const ComplexMatrix&)> map) {
    mat_terms.emplace_back(v, std::move(map));
    return *this;
  }
  MatExpr& add_scalar_term(VarId v, const ComplexMatrix& coeff) {
    scalar_terms.emplace_back(v, coeff);
    return *this;
  }

  int dim() const { return dim_; }

  ComplexMatrix const_part;
  std::vector<std::pair<VarId, std::function<ComplexMatrix(const ComplexMatrix&)>>>
      mat_terms;
  std::vector<std::pair<VarId, ComplexMatrix>> scalar_terms;

 private:
  int dim_;
};

/// Result of an optimization solve.
struct SolveReport {
  SolveStatus status = SolveStatus::Indeterminate;
  double objective = 0.0;       // in the user's sense
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // max violation over the original equalities
  double duality_gap = 0.0;
  std::vector<double> dual_values;  // one per original equality row
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string diagnostics;

  std::vector<ComplexMatrix> psd_values;  // per declared psd variable
  std::vector<double> scalar_values;      // per declared free scalar
};

/// Result of a feasibility certification (phase-I).
struct CertificationResult {
  Verdict verdict = Verdict::Indeterminate;
  double margin = 0.0;  // optimal slack s*: max relative equality violation
  std::vector<double> dual_values;  // separating certificate when infeasible
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string diagnostics;
};

/// Linear optimization problem over PSD cones with affine equality
/// constraints. Complex Hermitian variables are realified (dimension doubled)
/// before they reach the solver; partial-transpose cones and general LMIs add
/// further cone constraints over the same coordinates.
class ConicProblem {
 public:
  VarId add_psd_var(const std::string& label, int dim, bool complex_herm = true);
  VarId add_free_scalar(const std::string& label);

  /// Returns the row id (position in dual_values).
  int add_equality(LinExpr e, double rhs);

  void set_objective(Sense sense, LinExpr e);

  /// Require an affine Hermitian expression to be PSD.
  void add_lmi(MatExpr e);

  /// Require the partial transpose of a declared complex Hermitian variable
  /// (with the given tensor-factor split, transposing the listed factors) to
  /// be PSD.
  void add_pt_cone(VarId v, const std::vector<int>& factors,
                   const std::vector<int>& transpose_factors);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_equalities() const { return static_cast<int>(rows_.size()); }
  bool has_objective() const { return has_objective_; }

  struct VarDecl {
    std::string label;
    int dim = 0;          // 0 for scalars
    bool complex_herm = true;
    bool scalar = false;
    int coord_offset = 0;
    int coord_count = 0;
  };
  const VarDecl& decl(VarId v) const { return vars_.at(v.idx); }

  /// Lower to the internal canonical form. Exposed for backends and tests.
  IpmProblem compile() const;

  friend SolveReport solve(const ConicProblem&, const SolverOptions&,
                           SolverBackend*);
  friend CertificationResult solve_feasibility(const ConicProblem&,
                                               const SolverOptions&,
                                               SolverBackend*);

 private:
  struct Row {
    LinExpr expr;
    double rhs = 0.0;
  };

  void check_var(VarId v, bool want_scalar) const;

  std::vector<VarDecl> vars_;
  std::vector<Row> rows_;
  std::vector<MatExpr> lmis_;
  struct PtCone {
    VarId v;
    std::vector<int> factors;
    std::vector<int> transpose_factors;
  };
  std::vector<PtCone> pt_cones_;
  bool has_objective_ = false;
  Sense sense_ = Sense::Min;
  LinExpr objective_;
  int n_coords_ = 0;
  std::map<std::string, int> label_index_;
};

SolveReport solve(const ConicProblem& p, const SolverOptions& opts = {},
                  SolverBackend* backend = nullptr);

/// Phase-I feasibility: minimize the largest relative violation s over the
/// equality rows with all cone constraints held exactly. Verdict thresholds:
/// feasible when s* <= 1e-7, infeasible when s* >= 1e-5 (with a dual
/// separating certificate), indeterminate in between.
CertificationResult solve_feasibility(const ConicProblem& p,
                                      const SolverOptions& opts = {},
                                      SolverBackend* backend = nullptr);

inline constexpr double kFeasibleMargin = 1e-7;
inline constexpr double kInfeasibleMargin = 1e-5;

}  // namespace mdiq::conic
