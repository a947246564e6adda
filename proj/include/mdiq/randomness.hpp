#pragma once

#include "mdiq/behaviour.hpp"
#include "mdiq/conic.hpp"

namespace mdiq {

struct GuessingResult {
  double guessing_probability = 1.0;
  double min_entropy_bits = 0.0;  // -log2(G)
  std::vector<int> targets;
  conic::SolveStatus status = conic::SolveStatus::Indeterminate;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string note;
};

/// max_{outcomes} p(outcomes | targets): what an uncorrelated observer can
/// guess.
GuessingResult naive_guessing(const Behaviour& b, const std::vector<int>& targets);

/// Eavesdropper's optimal guessing probability of the single box's outcome at
/// input x_star, over all quantum side-information strategies consistent with
/// the observed table.
GuessingResult single_box_guessing(const Behaviour& b, int x_star,
                                   const conic::SolverOptions& opts = {});

/// Eavesdropper's optimal probability of guessing the pair (a, b) at quantum
/// inputs (x_star, y_star). Eve's alphabet is the product outcome alphabet.
GuessingResult bipartite_guessing(const Behaviour& b, int x_star, int y_star,
                                  const conic::SolverOptions& opts = {});

struct SweepRow {
  double w = 0.0;
  double guessing_probability = 1.0;
  double min_entropy_bits = 0.0;
  conic::SolveStatus status = conic::SolveStatus::Indeterminate;
  double runtime_ms = 0.0;
};

/// One bipartite_guessing solve per grid point on the behaviour of
/// werner(w) measured by Bell-state measurements with the given inputs.
/// Failures are flagged per row and never abort the sweep.
std::vector<SweepRow> werner_sweep(const std::vector<double>& w_grid,
                                   const InputEnsemble& ensemble,
                                   int x_star, int y_star,
                                   const conic::SolverOptions& opts = {});

}  // namespace mdiq
