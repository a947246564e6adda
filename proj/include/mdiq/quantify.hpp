#pragma once

#include "mdiq/behaviour.hpp"
#include "mdiq/certify.hpp"

namespace mdiq {

/// Noise model for robustness quantifiers. `random` is served through the
/// separable-noise cone: the paper's product-form noise set has no convex
/// description, and every product effective POVM is in particular separable,
/// so the value remains a valid lower bound (an outer approximation of the
/// noise set can only lower the optimum).
enum class NoiseSet { Generalized, Separable, Random };

enum class TripartiteTarget { FullSep, Bisep };

struct QuantifyResult {
  double value = 0.0;   // clamped at 0 when within -1e-8
  double raw_value = 0.0;
  RelaxationLevel relaxation;
  conic::SolveStatus status = conic::SolveStatus::Indeterminate;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string note;
};

/// Minimum noise weight r (from the chosen noise set) that makes the observed
/// behaviour reproducible by a relaxed-separable effective POVM. Lower-bounds
/// the robustness of the underlying state.
QuantifyResult mdi_robustness(const Behaviour& b, NoiseSet noise,
                              const RelaxationLevel& r,
                              const conic::SolverOptions& opts = {});

/// Lower bound on the negativity of the underlying state from the behaviour.
QuantifyResult mdi_negativity(const Behaviour& b,
                              const conic::SolverOptions& opts = {});

QuantifyResult mdi_robustness_tripartite(const Behaviour& b,
                                         TripartiteTarget target, NoiseSet noise,
                                         const RelaxationLevel& r,
                                         const conic::SolverOptions& opts = {});

}  // namespace mdiq
