#include "oprlab/rng.hpp"

#include <istream>
#include <ostream>

namespace oprlab::rng {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

std::uint64_t Engine::below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

void Engine::save(std::ostream& os) const { os << gen_; }

void Engine::load(std::istream& is) { is >> gen_; }

}  // namespace oprlab::rng
