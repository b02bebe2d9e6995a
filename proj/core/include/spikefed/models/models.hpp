#pragma once

#include "spikefed/data/dataset.hpp"
#include "spikefed/models/architecture.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spikefed::models {

/// Activity of one population of spiking units, summed over examples.
struct LayerSpikes {
    std::string name;
    std::size_t neurons = 0;   // per example
    std::size_t synapses = 0;  // outgoing connections per example (dense op count of the consuming layer)
    double spikes = 0.0;       // total over examples and steps

    /// spikes / (neurons * steps * examples), in [0, 1].
    [[nodiscard]] double rate(std::size_t steps, std::size_t examples) const noexcept;
};

struct SpikeStats {
    std::size_t steps = 0;
    std::size_t examples = 0;
    /// Optional "input" entry when the encoder emits spikes, then lif1, lif2, lif3.
    std::vector<LayerSpikes> layers;

    [[nodiscard]] double rate(std::size_t layer) const noexcept { return layers.at(layer).rate(steps, examples); }
    [[nodiscard]] const LayerSpikes* find(std::string_view name) const noexcept;
    /// Adds another batch's counts; layouts must agree.
    void merge(const SpikeStats& other);
};

/// Final recurrent state of each LSTM layer, (batch, hidden) per entry.
struct LstmTrace {
    std::vector<numerics::Tensor> h;
    std::vector<numerics::Tensor> c;
};

/// Stacks windows (channels, length) into a (batch, channels, length) tensor.
numerics::Tensor stack_windows(std::span<const numerics::Tensor* const> windows);

// Tape-level forward passes. Parameters are bound through `tape`.

/// SNN logits (batch, classes) from encoded inputs. Membranes start at rest for
/// every call, so examples never share state. `stats` is filled for the
/// Heaviside forward only.
numerics::Var snn_logits(numerics::Tape& tape, const ModelSpec& spec,
                         std::span<const encoding::InputSequence> inputs, SpikeStats* stats = nullptr,
                         numerics::SpikeForward fwd = numerics::SpikeForward::Heaviside);
numerics::Var cnn_logits(numerics::Tape& tape, const ModelSpec& spec, const numerics::Tensor& batch);
/// Consumes the window column by column.
numerics::Var lstm_logits(numerics::Tape& tape, const ModelSpec& spec, const numerics::Tensor& batch,
                          LstmTrace* trace = nullptr);

/// Stream key used to decorrelate rate coding between examples.
std::uint64_t example_key(const data::LabeledExample& ex);

struct Forward {
    numerics::Tensor logits;  // (batch, classes)
    std::optional<SpikeStats> spikes;
};

/// Inference on a batch of examples of any kind.
Forward forward(const ModelSpec& spec, const numerics::ParameterSet& params,
                std::span<const data::LabeledExample* const> batch);

struct LossOptions {
    std::size_t microbatch = 16;  // tape size bound; does not change results' meaning
    numerics::SpikeForward spike_forward = numerics::SpikeForward::Heaviside;
    bool gradients = true;  // false: loss and accuracy only, `grads` stays empty
};

struct LossAndGrads {
    double loss = 0.0;  // mean softmax cross-entropy
    numerics::GradientSet grads;
    double accuracy = 0.0;
    std::optional<SpikeStats> spikes;
};

LossAndGrads loss_and_grads(const ModelSpec& spec, const numerics::ParameterSet& params,
                            std::span<const data::LabeledExample* const> batch, const LossOptions& opt = {});

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<int> predictions;
    std::optional<SpikeStats> spikes;
    std::uint64_t macs = 0;  // dense multiply-accumulates executed by the kernels
};

Evaluation evaluate(const ModelSpec& spec, const numerics::ParameterSet& params,
                    std::span<const data::LabeledExample* const> examples, std::size_t microbatch = 32);

/// Index of the largest logit in each row; ties go to the lowest index.
std::vector<int> argmax_rows(const numerics::Tensor& logits);

}  // namespace spikefed::models
