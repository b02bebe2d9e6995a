#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace spikefed {

/// Incremental 64-bit FNV-1a. Used for layout fingerprints and content digests,
/// where the value must be identical across platforms and runs.
class Fnv1a64 {
public:
    static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
    static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

    void update(std::span<const std::byte> bytes) noexcept {
        for (auto b : bytes) {
            state_ ^= static_cast<std::uint64_t>(b);
            state_ *= kPrime;
        }
    }
    void update(std::string_view text) noexcept {
        update(std::as_bytes(std::span(text.data(), text.size())));
    }
    // Little-endian regardless of host order.
    void update_u64(std::uint64_t v) noexcept {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (v >> (8 * i)) & 0xffU;
            state_ *= kPrime;
        }
    }
    void update_f64(double v) noexcept;

    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = kOffset;
};

inline void Fnv1a64::update_f64(double v) noexcept { update_u64(std::bit_cast<std::uint64_t>(v)); }

std::string hex64(std::uint64_t v);

}  // namespace spikefed
