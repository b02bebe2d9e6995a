#pragma once

#include "spikefed/encoding/encoders.hpp"
#include "spikefed/models/lif.hpp"
#include "spikefed/numerics/parameter_set.hpp"

#include <cstdint>
#include <string_view>

namespace spikefed::models {

enum class ModelKind { Snn, Cnn, Lstm };

std::string_view to_string(ModelKind k) noexcept;
ModelKind parse_model_kind(std::string_view text);

/// Layer sizes shared by the spiking network and its convolutional mirror:
/// conv1 -> conv2 -> flatten -> fc1 -> readout. The LSTM baseline uses
/// `lstm_hidden` and the input geometry only.
struct Architecture {
    std::size_t channels = 64;
    std::size_t window = 640;
    std::size_t classes = 4;

    // Defaults: a narrow real-valued first layer and wide spike-driven later
    // layers, so most of the work is event-driven.
    std::size_t conv1_channels = 4;
    std::size_t conv1_kernel = 4;
    std::size_t conv1_stride = 4;
    std::size_t conv2_channels = 64;
    std::size_t conv2_kernel = 8;
    std::size_t conv2_stride = 4;
    std::size_t hidden = 256;

    std::size_t lstm_hidden = 64;
    std::size_t lstm_layers = 2;

    /// Weights start uniform in +-init_gain / sqrt(fan_in); biases at zero.
    double init_gain = 2.0;

    /// conv1(64->32, k7, s4) -> conv2(32->32, k5, s4) -> fc(128).
    static Architecture reference();

    void validate() const;
    [[nodiscard]] std::size_t conv1_length() const noexcept { return (window - conv1_kernel) / conv1_stride + 1; }
    [[nodiscard]] std::size_t conv2_length() const noexcept {
        return (conv1_length() - conv2_kernel) / conv2_stride + 1;
    }
    [[nodiscard]] std::size_t flat_features() const noexcept { return conv2_channels * conv2_length(); }
};

/// Everything that fixes a model's computation apart from its parameter values.
struct ModelSpec {
    ModelKind kind = ModelKind::Snn;
    Architecture arch;
    LifConfig lif;
    encoding::EncoderConfig encoder;

    void validate() const;
    /// Channels seen by conv1: doubled for delta coding's ON/OFF planes.
    [[nodiscard]] std::size_t input_features() const noexcept;
};

/// Parameter layout and seeded initialization. The SNN and CNN share names
/// and shapes (conv1.*, conv2.*, fc1.*, readout.*); the LSTM uses
/// lstm<k>.w_ih / w_hh / bias with gate columns ordered i, f, g, o, then head.*.
numerics::ParameterSet init_params(const ModelSpec& spec, std::uint64_t seed);

}  // namespace spikefed::models
