#pragma once

#include "spikefed/numerics/tape.hpp"

namespace spikefed::models {

enum class ResetMode { Subtract, Zero };

/// Discrete-time leaky integrate-and-fire neuron.
struct LifConfig {
    double beta = 0.9;       // membrane decay, in (0, 1)
    double threshold = 1.0;  // > 0
    ResetMode reset = ResetMode::Subtract;
    double slope = 2.0;      // surrogate steepness, > 0

    void validate() const;
    [[nodiscard]] numerics::SpikeParams spike_params(numerics::SpikeForward fwd) const {
        return {threshold, slope, fwd};
    }
};

struct LifStep {
    numerics::Tensor v;       // membrane after reset
    numerics::Tensor spikes;  // 0/1
};

/// u = beta * v + i; spikes = [u >= threshold]; then reset.
LifStep lif_step(const numerics::Tensor& v, const numerics::Tensor& i, const LifConfig& cfg);

struct LifVars {
    numerics::Var v;
    numerics::Var spikes;
};

/// Same dynamics recorded on a tape. `v` may be empty (tape == nullptr) for a
/// resting membrane, in which case u = i. The reset path keeps its gradient.
LifVars lif_step(numerics::Var v, numerics::Var i, const LifConfig& cfg,
                 numerics::SpikeForward fwd = numerics::SpikeForward::Heaviside);

}  // namespace spikefed::models
