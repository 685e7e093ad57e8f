// Small deterministic RNG used for all stochastic sampling. splitmix64 is
// portable across platforms and lets sub-streams be derived from a master
// seed without coupling to call order.
#ifndef DYNBIF_RNG_HPP
#define DYNBIF_RNG_HPP

#include <cmath>
#include <cstdint>

namespace dynbif {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (both values consumed to stay stream-stable)
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // derive an independent sub-stream deterministically
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
        Rng r(seed ^ (0x71c9b7a5e3d05dc5ULL * (salt + 1)));
        return r.next_u64();
    }

  private:
    std::uint64_t state_;
};

}  // namespace dynbif

#endif
