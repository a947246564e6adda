#pragma once

#include "mdiq/behaviour.hpp"
#include "mdiq/conic.hpp"

namespace mdiq {

/// Separability relaxation used in place of the (intractable) separable cone.
struct RelaxationLevel {
  enum class Kind { Ppt, SymExt };
  Kind kind = Kind::Ppt;
  int k = 2;           // extension order, 2 or 3
  bool with_ppt = false;

  static RelaxationLevel ppt() { return {}; }
  static RelaxationLevel sym_ext(int k, bool with_ppt = false) {
    if (k < 2 || k > 3)
      throw std::invalid_argument("RelaxationLevel: k must be 2 or 3");
    return {Kind::SymExt, k, with_ppt};
  }
};

/// Outcome of a separability feasibility test on a behaviour. An infeasible
/// verdict certifies entanglement of the underlying state; a feasible verdict
/// only says the behaviour is consistent with the tested relaxation.
struct CertifyResult {
  conic::Verdict verdict = conic::Verdict::Indeterminate;
  double margin = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string diagnostics;

  // Dual data for witness extraction: multipliers on the behaviour-consistency
  // rows (aligned with the Behaviour flat index) and the aggregated multiplier
  // mass on the structural rows.
  std::vector<double> behaviour_row_duals;
  double structure_dual_offset = 0.0;
};

/// Linear entanglement witness on behaviours, read off the dual certificate:
/// sum(coefficients * p) <= threshold for every behaviour realizable within
/// the tested relaxation, and the score
///   sum(coefficients * p) - threshold
/// equals 1 on the behaviour the witness was extracted from.
struct WitnessCoefficients {
  std::vector<double> coefficients;  // aligned with Behaviour flat indexing
  double threshold = 0.0;
  std::string normalization;
};

double evaluate_witness(const WitnessCoefficients& w, const Behaviour& b);

CertifyResult certify_bipartite(const Behaviour& b, const RelaxationLevel& r,
                                const conic::SolverOptions& opts = {});

CertifyResult certify_tripartite_full(const Behaviour& b,
                                      const RelaxationLevel& r,
                                      const conic::SolverOptions& opts = {});

CertifyResult certify_tripartite_bisep(const Behaviour& b,
                                       const RelaxationLevel& r,
                                       const conic::SolverOptions& opts = {});

/// Requires a prior infeasible certification of the same behaviour/relaxation.
WitnessCoefficients extract_witness(const Behaviour& b, const RelaxationLevel& r,
                                    const conic::SolverOptions& opts = {});

}  // namespace mdiq
