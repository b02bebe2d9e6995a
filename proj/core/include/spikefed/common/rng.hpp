#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace spikefed {

/// Derives an independent seed for a named sub-stream ("split", "shuffle",
/// "init", "encoder", ...) of a master seed. Extra indices (client, round, ...)
/// select further sub-streams. The mapping is fixed so results do not depend on
/// the standard library in use.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::initializer_list<std::uint64_t> indices = {});

/// mt19937_64 with portable conversions. std::uniform_*_distribution are
/// implementation-defined, so the conversions below are spelled out.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller (no cached second value).
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        // Fisher-Yates with our own index draw; std::shuffle is unspecified.
        for (std::size_t i = v.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace spikefed
