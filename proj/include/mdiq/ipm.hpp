#pragma once

#include <string>
#include <vector>

#include "mdiq/linalg.hpp"

namespace mdiq::conic {

/// Options shared by the embedded solver and any substituted backend.
struct SolverOptions {
  double feastol = 1e-8;   // primal/dual residual target
  double reltol = 1e-7;    // relative duality gap target
  double abstol = 1e-9;    // absolute gap target
  int max_iters = 200;
  double step_scale = 0.99;
  bool presolve_dedup = true;  // drop linearly dependent equality rows
  bool verbose = false;
};

struct SparseVec {
  std::vector<std::pair<int, double>> entries;  // (column, coefficient)
  void add(int col, double v) { entries.emplace_back(col, v); }
};

/// One PSD cone constraint: slack = h - sum_j u[cols[j]] * coeff[j] must be
/// PSD (coeff and h are real symmetric p x p matrices; they already carry any
/// complex-to-real embedding).
struct PsdConeRows {
  int p = 0;
  std::vector<int> cols;
  std::vector<RealMatrix> coeff;
  RealMatrix h;
};

/// One scalar cone row: h - a.u >= 0.
struct OrthRow {
  SparseVec a;
  double h = 0.0;
};

/// Internal canonical form:
///   minimize    c.u
///   subject to  <a_i, u> = b_i                        (equality rows)
///               h_r - <g_r, u> >= 0                    (orthant rows)
///               H_k - sum_j u_j F_kj  PSD               (psd cone blocks)
///
/// This is the surface a substituted external solver must implement.
struct IpmProblem {
  int n = 0;
  RealVector c;
  std::vector<SparseVec> eq_rows;
  RealVector b;
  std::vector<OrthRow> orth;
  std::vector<PsdConeRows> psd;
};

enum class IpmStatus { Optimal, PrimalInfeasible, DualInfeasible, Indeterminate };

struct IpmResult {
  IpmStatus status = IpmStatus::Indeterminate;
  RealVector u;            // primal point (certificate ray when infeasible)
  RealVector y;            // equality multipliers (certificate when infeasible)
  double pobj = 0.0;
  double dobj = 0.0;
  double pres = 0.0;       // normalized equality + cone residual
  double dres = 0.0;
  double relgap = 0.0;
  double cert_quality = 0.0;  // residual of the infeasibility certificate
  int iterations = 0;
  std::string note;
};

/// Abstract backend so an external conic solver can replace the embedded one.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual IpmResult run(const IpmProblem& p, const SolverOptions& opts) = 0;
};

/// Embedded primal-dual interior-point method: homogeneous self-dual
/// embedding, Nesterov-Todd scaling, Mehrotra predictor-corrector.
class EmbeddedIpm final : public SolverBackend {
 public:
  IpmResult run(const IpmProblem& p, const SolverOptions& opts) override;
};

}  // namespace mdiq::conic
