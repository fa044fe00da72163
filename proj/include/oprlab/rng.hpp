#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace oprlab::rng {

// SplitMix64 finalizer; used to derive independent streams from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic stream derivation: mixing the master seed with a stream tag
// and counters gives independent seeds whose values do not shift when other
// streams consume more or fewer draws.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// Stream tags for derive_seed.
enum Stream : std::uint64_t {
    kStreamInit = 1,      // network initialization
    kStreamAction = 2,    // per-env action sampling
    kStreamEnvSeed = 3,   // per-episode environment seeds
    kStreamShuffle = 4,   // per-update minibatch shuffles
    kStreamBc = 5,        // buffer sampling for the BC objective
};

// mt19937_64 wrapper with a fixed bits->double mapping so that sampled values
// are identical across standard library implementations.
class Engine {
public:
    Engine() : gen_(0) {}
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t raw() { return gen_(); }

    void save(std::ostream& os) const;
    void load(std::istream& is);

    bool operator==(const Engine& other) const { return gen_ == other.gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace oprlab::rng
