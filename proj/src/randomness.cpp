#include "mdiq/randomness.hpp"

#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "mdiq/sdp_common.hpp"
#include "mdiq/states.hpp"

namespace mdiq {

namespace {

using conic::ConicProblem;
using conic::LinExpr;
using detail::FamilyCone;
using detail::FamilyHandle;

double bits_of(double g) { return -std::log2(g); }

GuessingResult finish(double g, std::vector<int> targets,
                      const conic::SolveReport& rep) {
  GuessingResult out;
  out.guessing_probability = std::min(1.0 + 1e-9, std::max(g, 1e-300));
  out.min_entropy_bits = bits_of(out.guessing_probability);
  out.targets = std::move(targets);
  out.status = rep.status;
  out.iterations = rep.iterations;
  out.wall_time_ms = rep.wall_time_ms;
  out.note = rep.diagnostics;
  return out;
}

}  // namespace

GuessingResult naive_guessing(const Behaviour& b,
                              const std::vector<int>& targets) {
  if (static_cast<int>(targets.size()) != b.parties())
    throw std::invalid_argument("naive_guessing: one target input per party");
  const auto& out_counts = b.outcome_counts();
  std::vector<int> as(out_counts.size(), 0);
  double best = 0.0;
  while (true) {
    best = std::max(best, b.prob(targets, as));
    int p = static_cast<int>(as.size()) - 1;
    while (p >= 0 && ++as[p] == out_counts[p]) as[p--] = 0;
    if (p < 0) break;
  }
  GuessingResult out;
  out.guessing_probability = std::max(best, 1e-300);
  out.min_entropy_bits = bits_of(out.guessing_probability);
  out.targets = targets;
  out.status = conic::SolveStatus::Optimal;
  out.note = "table maximum; no optimization";
  return out;
}

GuessingResult single_box_guessing(const Behaviour& b, int x_star,
                                   const conic::SolverOptions& opts) {
  if (b.parties() != 1)
    throw std::invalid_argument("single_box_guessing: single-party behaviour");
  const int n_a = b.outcome_counts()[0];
  const int n_x = b.ensemble(0).size();
  if (x_star < 0 || x_star >= n_x)
    throw std::invalid_argument("single_box_guessing: target input out of range");
  const int d = b.ensemble(0).dim();
  const std::vector<int> jf = {d};

  // Variables M_{a,e}, flat index a * n_a + e with Eve's alphabet = outcomes.
  ConicProblem prob;
  auto fam = detail::declare_family(prob, "M", n_a * n_a, jf,
                                    {FamilyCone::Plain});
  auto idx = [n_a](int a, int e) {
    return static_cast<std::size_t>(a) * n_a + e;
  };

  // observed table: sum_e Tr[M_{a,e} psi_x] = p(a | x)
  for (int x = 0; x < n_x; ++x) {
    const ComplexMatrix psi = b.ensemble(0).state(x).op().matrix();
    for (int a = 0; a < n_a; ++a) {
      LinExpr e;
      for (int ev = 0; ev < n_a; ++ev) fam.add_term(e, idx(a, ev), psi);
      prob.add_equality(std::move(e), b.prob({x}, {a}));
    }
  }
  // no-signalling to Eve: sum_a M_{a,e} = p(e) I
  for (int ev = 0; ev < n_a; ++ev) {
    std::vector<std::size_t> members;
    for (int a = 0; a < n_a; ++a) members.push_back(idx(a, ev));
    detail::add_trace_proportional_rows(prob, fam, members);
  }
  // sum_e p(e) = 1
  {
    LinExpr e;
    const ComplexMatrix c = ComplexMatrix::Identity(d, d) / d;
    for (std::size_t i = 0; i < fam.vars.size(); ++i) fam.add_term(e, i, c);
    prob.add_equality(std::move(e), 1.0);
  }
  // objective: Eve guesses her own outcome label
  {
    LinExpr obj;
    const ComplexMatrix psi = b.ensemble(0).state(x_star).op().matrix();
    for (int a = 0; a < n_a; ++a) fam.add_term(obj, idx(a, a), psi);
    prob.set_objective(conic::Sense::Max, std::move(obj));
  }

  auto rep = conic::solve(prob, opts);
  return finish(rep.status == conic::SolveStatus::Optimal ? rep.objective : 1.0,
                {x_star}, rep);
}

GuessingResult bipartite_guessing(const Behaviour& b, int x_star, int y_star,
                                  const conic::SolverOptions& opts) {
  if (b.parties() != 2)
    throw std::invalid_argument("bipartite_guessing: bipartite behaviour");
  const int n_a = b.outcome_counts()[0];
  const int n_b = b.outcome_counts()[1];
  const int n_e = n_a * n_b;
  if (n_e > 64)
    throw std::invalid_argument(
        "bipartite_guessing: Eve alphabet guard exceeded (limit 64)");
  const int n_x = b.ensemble(0).size(), n_y = b.ensemble(1).size();
  if (x_star < 0 || x_star >= n_x || y_star < 0 || y_star >= n_y)
    throw std::invalid_argument("bipartite_guessing: target out of range");
  const std::vector<int> jf = {b.ensemble(0).dim(), b.ensemble(1).dim()};
  const int D = jf[0] * jf[1];

  // Variables M_{a,b,e}, flat index (a * n_b + b) * n_e + e.
  ConicProblem prob;
  auto fam = detail::declare_family(prob, "M", n_a * n_b * n_e, jf,
                                    {FamilyCone::Plain});
  auto idx = [n_b, n_e](int a, int bb, int ev) {
    return (static_cast<std::size_t>(a) * n_b + bb) * n_e + ev;
  };

  // behaviour consistency
  for (int x = 0; x < n_x; ++x)
    for (int y = 0; y < n_y; ++y) {
      const ComplexMatrix psi =
          kron_raw(b.ensemble(0).state(x).op().matrix(),
                   b.ensemble(1).state(y).op().matrix());
      for (int a = 0; a < n_a; ++a)
        for (int bb = 0; bb < n_b; ++bb) {
          LinExpr e;
          for (int ev = 0; ev < n_e; ++ev) fam.add_term(e, idx(a, bb, ev), psi);
          prob.add_equality(std::move(e), b.prob({x, y}, {a, bb}));
        }
    }
  // no-signalling structure per Eve outcome
  for (int ev = 0; ev < n_e; ++ev) {
    for (int bb = 0; bb < n_b; ++bb) {
      std::vector<std::size_t> members;
      for (int a = 0; a < n_a; ++a) members.push_back(idx(a, bb, ev));
      detail::add_identity_factor_rows(prob, fam, members, 0);
    }
    for (int a = 0; a < n_a; ++a) {
      std::vector<std::size_t> members;
      for (int bb = 0; bb < n_b; ++bb) members.push_back(idx(a, bb, ev));
      detail::add_identity_factor_rows(prob, fam, members, 1);
    }
  }
  // sum_e p(e) = 1
  {
    LinExpr e;
    const ComplexMatrix c = ComplexMatrix::Identity(D, D) / D;
    for (std::size_t i = 0; i < fam.vars.size(); ++i) fam.add_term(e, i, c);
    prob.add_equality(std::move(e), 1.0);
  }
  // objective: Eve's label equals the outcome pair at the target inputs
  {
    LinExpr obj;
    const ComplexMatrix psi =
        kron_raw(b.ensemble(0).state(x_star).op().matrix(),
                 b.ensemble(1).state(y_star).op().matrix());
    for (int a = 0; a < n_a; ++a)
      for (int bb = 0; bb < n_b; ++bb)
        fam.add_term(obj, idx(a, bb, a * n_b + bb), psi);
    prob.set_objective(conic::Sense::Max, std::move(obj));
  }

  auto rep = conic::solve(prob, opts);
  return finish(rep.status == conic::SolveStatus::Optimal ? rep.objective : 1.0,
                {x_star, y_star}, rep);
}

std::vector<SweepRow> werner_sweep(const std::vector<double>& w_grid,
                                   const InputEnsemble& ensemble,
                                   int x_star, int y_star,
                                   const conic::SolverOptions& opts) {
  for (double w : w_grid)
    if (w < 0.0 || w > 1.0)
      throw std::invalid_argument("werner_sweep: grid values must lie in [0,1]");

  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 4u));
  std::vector<SweepRow> rows(w_grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < w_grid.size();
         i = next.fetch_add(1)) {
      SweepRow row;
      row.w = w_grid[i];
      try {
        const auto behaviour = simulate_bipartite(werner(w_grid[i]), bsm(),
                                                  bsm(), ensemble, ensemble);
        const auto g = bipartite_guessing(behaviour, x_star, y_star, opts);
        row.guessing_probability = g.guessing_probability;
        row.min_entropy_bits = g.min_entropy_bits;
        row.status = g.status;
        row.runtime_ms = g.wall_time_ms;
      } catch (const std::exception&) {
        row.status = conic::SolveStatus::Indeterminate;
      }
      rows[i] = row;
    }
  };
  std::vector<std::future<void>> futs;
  for (unsigned w = 0; w < workers; ++w)
    futs.push_back(std::async(std::launch::async, work));
  for (auto& f : futs) f.get();
  return rows;
}

}  // namespace mdiq
