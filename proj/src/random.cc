#include "gramlab/random.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gramlab/error.h"

namespace gramlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_gamma_variate(double shape, Rng &rng) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw Error("gamma shape must be positive and finite");
    }
    if (shape >= 1.0) {
        std::gamma_distribution<double> gamma(shape, 1.0);
        const double x = gamma(rng);
        return x > 0.0 ? std::log(x) : std::log(std::numeric_limits<double>::min());
    }
    std::gamma_distribution<double> boosted(shape + 1.0, 1.0);
    const double x = boosted(rng);
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double log_x = x > 0.0 ? std::log(x) : std::log(std::numeric_limits<double>::min());
    return log_x + std::log(u) / shape;
}

void sample_dirichlet(std::span<const double> alpha, Rng &rng, std::span<double> out) {
    if (alpha.size() != out.size() || alpha.empty()) {
        throw Error("sample_dirichlet: size mismatch");
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        out[k] = log_gamma_variate(alpha[k], rng);
        max_log = std::max(max_log, out[k]);
    }
    constexpr double kFloor = std::numeric_limits<double>::min();
    double sum = 0.0;
    for (double &x : out) {
        x = std::exp(x - max_log);
        if (x < kFloor) x = kFloor;
        sum += x;
    }
    for (double &x : out) x /= sum;
}

void sample_symmetric_dirichlet(double alpha, Rng &rng, std::span<double> out) {
    std::vector<double> a(out.size(), alpha);
    sample_dirichlet(a, rng, out);
}

std::size_t sample_discrete(std::span<const double> weights, double total, Rng &rng) {
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        acc += weights[k];
        last_positive = k;
        if (target < acc) return k;
    }
    if (last_positive == weights.size()) throw Error("sample_discrete: all weights are zero");
    return last_positive;
}

}  // namespace gramlab
