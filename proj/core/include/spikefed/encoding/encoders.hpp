#pragma once

#include "spikefed/numerics/tensor.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spikefed::encoding {

enum class Scheme { DirectCurrent, Rate, Delta };

std::string_view to_string(Scheme s) noexcept;
/// Accepts "direct", "rate", "delta".
Scheme parse_scheme(std::string_view text);

struct EncoderConfig {
    Scheme scheme = Scheme::DirectCurrent;
    std::size_t steps = 4;
    double delta_threshold = 0.5;  // in units of the normalized signal
    std::uint64_t seed = 0;        // rate scheme only

    void validate() const;
};

/// Binary spike array of shape (steps, features, positions).
class SpikeTensor {
public:
    SpikeTensor() = default;
    /// Throws ValidationError unless `t` is rank 3 with values in {0, 1}.
    explicit SpikeTensor(numerics::Tensor t);

    [[nodiscard]] const numerics::Tensor& tensor() const noexcept { return t_; }
    [[nodiscard]] const numerics::Shape& shape() const noexcept { return t_.shape(); }
    [[nodiscard]] std::size_t spike_count() const noexcept;
    /// spike_count / element count, in [0, 1].
    [[nodiscard]] double firing_rate() const noexcept;
    /// Slice (features, positions) at one step.
    [[nodiscard]] numerics::Tensor step(std::size_t s) const;

private:
    numerics::Tensor t_;
};

/// Direct-current coding: the window is presented unchanged as input current at
/// each of `steps` steps.
std::vector<numerics::Tensor> encode_direct(const numerics::Tensor& window, std::size_t steps);

/// Bernoulli rate coding of a (channels, positions) window. Values are min-max
/// scaled to [0, 1] over the whole window; each element then fires at each
/// step with that probability.
SpikeTensor encode_rate(const numerics::Tensor& window, std::size_t steps, std::uint64_t seed);

/// Delta modulation along the position axis of a (channels, positions) window.
/// Output shape (1, 2 * channels, positions): ON planes for every channel first,
/// then OFF planes.
SpikeTensor encode_delta(const numerics::Tensor& window, double threshold);

/// Model-facing input sequence. For direct and delta coding the same current is
/// presented at every step, so it is stored once with `repeated` set.
struct InputSequence {
    std::vector<numerics::Tensor> steps;  // each (features, positions)
    bool repeated = false;
    std::size_t step_count = 0;
    bool binary = false;  // inputs are spikes rather than real-valued currents

    [[nodiscard]] const numerics::Tensor& at(std::size_t s) const { return repeated ? steps.front() : steps.at(s); }
};

/// Encodes one window; `example_key` decorrelates rate-coding streams between examples.
InputSequence encode(const numerics::Tensor& window, const EncoderConfig& cfg, std::uint64_t example_key);

/// Feature count the encoder produces for `channels` input channels.
std::size_t encoded_features(const EncoderConfig& cfg, std::size_t channels) noexcept;

}  // namespace spikefed::encoding
