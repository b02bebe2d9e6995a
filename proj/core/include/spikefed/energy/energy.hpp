#pragma once

#include "spikefed/models/models.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spikefed::energy {

/// Joules per operation. Defaults are common 45 nm estimates.
struct EnergyModel {
    double e_mac = 4.6e-12;
    double e_ac = 0.9e-12;

    void validate() const;
};

struct LayerOps {
    std::string name;
    std::uint64_t macs = 0;      // real-valued multiply-accumulates
    std::uint64_t synapses = 0;  // dense connections driven by spikes, per step
    std::size_t steps = 0;
    double rate = 0.0;           // measured presynaptic firing rate
    /// synapses * steps * rate.
    [[nodiscard]] double acs() const noexcept {
        return static_cast<double>(synapses) * static_cast<double>(steps) * rate;
    }
};

/// Per-inference operation counts of one model.
struct OpCounts {
    models::ModelKind kind = models::ModelKind::Snn;
    std::vector<LayerOps> layers;

    [[nodiscard]] std::uint64_t total_macs() const noexcept;
    [[nodiscard]] double total_acs() const noexcept;
};

/// Dense op count of a fully connected layer.
constexpr std::uint64_t fc_macs(std::uint64_t in, std::uint64_t out) noexcept { return in * out; }
/// out_positions * kernel * in_ch * out_ch.
constexpr std::uint64_t conv1d_macs(std::uint64_t positions, std::uint64_t kernel, std::uint64_t in_ch,
                                    std::uint64_t out_ch) noexcept {
    return positions * kernel * in_ch * out_ch;
}
/// 4 gates * (input + hidden) * hidden per step, times steps.
constexpr std::uint64_t lstm_macs(std::uint64_t input, std::uint64_t hidden, std::uint64_t steps) noexcept {
    return 4 * (input + hidden) * hidden * steps;
}

/// CNN and LSTM: exact MACs per layer. SNN: the layer fed by real-valued
/// currents in MACs (once, since a repeated input yields the same currents at
/// every step); every layer fed by spikes in ACs at the measured rate.
/// Throws ValidationError when spike stats are missing for the SNN or given
/// for a non-spiking model.
OpCounts count_ops(const models::ModelSpec& spec, const models::SpikeStats* spikes);

/// sum(MACs) * e_mac + sum(ACs) * e_ac.
double estimate_energy(const OpCounts& counts, const EnergyModel& model);

struct MethodResult {
    std::string method;
    double accuracy = 0.0;  // [0, 1]
    double energy = 0.0;    // joules per inference, > 0
};

struct WspEntry {
    std::string method;
    double accuracy = 0.0;
    double energy = 0.0;
    double wsp = 0.0;
    /// WSP of the first method divided by this one's.
    double first_over = 1.0;
};

struct WspReport {
    double accuracy_weight = 0.5;
    double energy_weight = 0.5;
    std::vector<WspEntry> entries;  // input order

    [[nodiscard]] std::size_t best() const noexcept;
};

/// WSP_m = 0.5 * acc_m / max(acc) + 0.5 * min(E) / E_m.
WspReport compute_wsp(std::span<const MethodResult> results);

/// Fraction of positions where the prediction equals the label.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

}  // namespace spikefed::energy
