#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sotest {

// splitmix64 round; used to derive child seeds (campaign -> suite -> sequence).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG. Avoids std distributions on purpose: their output is
// implementation defined, while replays here must be byte identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased [0,n)
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t threshold = (~n + 1) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // inclusive
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(bounded(n)); }

    bool chance(double p) { return uniform() < p; }

    double exponential() {
        double u = uniform();
        return -std::log(1.0 - u);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

    Rng fork(std::uint64_t stream) { return Rng(mix_seed(next_u64(), stream)); }

private:
    std::mt19937_64 gen_;
};

}  // namespace sotest
