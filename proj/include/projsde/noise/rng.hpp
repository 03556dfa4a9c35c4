#pragma once

#include <cmath>
#include <cstdint>

namespace projsde {

/**
 * @brief Counter-based pseudo-random stream, one per sample path.
 *
 * Every output is a finalizer hash of (key, counter), where the key mixes the
 * study seed with the path index. Streams for distinct path indices are
 * independent by construction, and a stream's output depends only on
 * (seed, path_index, draw position) -- never on which worker thread consumes
 * it. That is what makes parallel runs bitwise reproducible.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t path_index)
        : seed_(seed), path_index_(path_index) {
        std::uint64_t k = mix(seed + kGolden);
        k ^= mix(path_index + 0x8000000000000001ull);
        key_ = mix(k + kGolden);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_index() const { return path_index_; }

    std::uint64_t next_u64() {
        counter_ += kGolden;
        return mix(mix(key_ ^ counter_) + kGolden);
    }

    /// Uniform in (0, 1]; never 0, so log() is safe.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; pairs are drawn together and the
    /// second value cached, so draw positions stay fixed per stream.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// N(0, variance) sample.
    double normal_var(double variance) { return normal() * std::sqrt(variance); }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t path_index_;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace projsde
