#ifndef GRAMLAB_RANDOM_H_
#define GRAMLAB_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace gramlab {

using Rng = std::mt19937_64;

// Mixes a master seed with a path of indices (splitmix64 finalizer chain), so
// that e.g. (seed, iteration, sentence) gets its own reproducible substream.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

// log of a Gamma(shape, 1) variate. Shapes below 1 use the boosted-shape
// identity G(a) = G(a + 1) * U^(1/a) evaluated in log space, so tiny shapes
// never underflow to log(0).
double log_gamma_variate(double shape, Rng &rng);

// Dirichlet draw into `out`, normalized in log space. Entries that underflow
// are clamped to the smallest positive normal double before renormalizing.
void sample_dirichlet(std::span<const double> alpha, Rng &rng, std::span<double> out);
void sample_symmetric_dirichlet(double alpha, Rng &rng, std::span<double> out);

// Index drawn proportionally to nonnegative weights whose sum is `total`.
std::size_t sample_discrete(std::span<const double> weights, double total, Rng &rng);

double uniform01(Rng &rng);

}  // namespace gramlab

#endif  // GRAMLAB_RANDOM_H_
