#pragma once

#include <cstdint>
#include <random>

namespace mdlab {

// splitmix64, used to derive independent per-trial streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x51ed270b577f2bdbULL));
}

// mt19937_64 with portable bounded draws. std::uniform_int_distribution is not
// bit-reproducible across standard libraries, so we roll our own rejection step.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform in [0, n), n >= 1
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= lim);
        return v % n;
    }

    std::uint32_t field_elem(std::uint32_t q) { return std::uint32_t(below(q)); }

    // uniform double in [0,1) with 53 random bits
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace mdlab
