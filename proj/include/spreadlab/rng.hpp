#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace spreadlab {

// Engine output is specified by the standard; the draws below avoid the
// implementation-defined distributions so results match across toolchains.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Seed for replication `rep` (or any other stream index) under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

double uniform01(Rng& rng);

// Uniform integer in [0, n); n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

bool bernoulli(Rng& rng, double p);

// Floor or ceil of x, ceil with probability frac(x).
long long randomized_round(double x, Rng& rng);

// k distinct elements drawn uniformly from pool, in draw order.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, Rng& rng) {
  if (k > pool.size()) k = pool.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace spreadlab
