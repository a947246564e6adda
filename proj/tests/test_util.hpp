#pragma once

#include <atomic>
#include <cmath>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "mdiq/behaviour.hpp"
#include "mdiq/linalg.hpp"
#include "mdiq/states.hpp"

namespace mdiq::test {

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int d,
                                      double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return (m + m.adjoint()) / 2.0;
}

inline QuantumState random_state(std::mt19937_64& rng, std::vector<int> factors) {
  int d = 1;
  for (int f : factors) d *= f;
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return QuantumState(HermitianOperator(rho, std::move(factors)));
}

inline QuantumState random_pure_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double x = g(rng), y = g(rng), z = g(rng);
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n < 1e-12) return bloch_state(0, 0, 1);
  return bloch_state(x / n, y / n, z / n);
}

/// Random mixture of at most `max_terms` two-qubit product states.
inline QuantumState random_separable_two_qubit(std::mt19937_64& rng,
                                               int max_terms = 4) {
  std::uniform_int_distribution<int> nt(1, max_terms);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  const int terms = nt(rng);
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    const double w = unif(rng);
    auto a = random_pure_qubit(rng);
    auto b = random_pure_qubit(rng);
    rho += w * kron_raw(a.op().matrix(), b.op().matrix());
    total += w;
  }
  rho /= total;
  return QuantumState(HermitianOperator(rho, {2, 2}));
}

/// Evaluate f(i) for i in [0, n) across a small async pool; returns results
/// in index order.
template <typename F>
auto parallel_map(int n, F&& f) {
  using R = decltype(f(0));
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<R> out(n);
  std::atomic<int> next{0};
  std::vector<std::future<void>> futs;
  for (unsigned w = 0; w < workers; ++w)
    futs.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = f(i);
    }));
  for (auto& fu : futs) fu.get();
  return out;
}

}  // namespace mdiq::test
