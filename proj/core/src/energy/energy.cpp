#include "spikefed/energy/energy.hpp"

#include <algorithm>
#include <cmath>

namespace spikefed::energy {

void EnergyModel::validate() const {
    if (!(e_mac > 0.0) || !std::isfinite(e_mac)) throw ValidationError("e_mac must be positive");
    if (!(e_ac > 0.0) || !std::isfinite(e_ac)) throw ValidationError("e_ac must be positive");
    if (!(e_ac < e_mac)) throw ValidationError("e_ac must be smaller than e_mac");
}

std::uint64_t OpCounts::total_macs() const noexcept {
    std::uint64_t n = 0;
    for (const auto& l : layers) n += l.macs;
    return n;
}

double OpCounts::total_acs() const noexcept {
    double n = 0.0;
    for (const auto& l : layers) n += l.acs();
    return n;
}

OpCounts count_ops(const models::ModelSpec& spec, const models::SpikeStats* spikes) {
    spec.validate();
    const auto& a = spec.arch;
    OpCounts out;
    out.kind = spec.kind;
    const bool spiking = spec.kind == models::ModelKind::Snn;
    if (spiking && !spikes) throw ValidationError("count_ops: spiking model needs spike statistics");
    if (!spiking && spikes) throw ValidationError("count_ops: spike statistics given for a non-spiking model");

    const auto conv1 = conv1d_macs(a.conv1_length(), a.conv1_kernel, spiking ? spec.input_features() : a.channels,
                                   a.conv1_channels);
    const auto conv2 = conv1d_macs(a.conv2_length(), a.conv2_kernel, a.conv1_channels, a.conv2_channels);
    const auto fc1 = fc_macs(a.flat_features(), a.hidden);
    const auto readout = fc_macs(a.hidden, a.classes);

    switch (spec.kind) {
        case models::ModelKind::Cnn:
            out.layers = {{"conv1", conv1}, {"conv2", conv2}, {"fc1", fc1}, {"readout", readout}};
            break;
        case models::ModelKind::Lstm: {
            std::size_t in = a.channels;
            for (std::size_t l = 0; l < a.lstm_layers; ++l) {
                out.layers.push_back({"lstm" + std::to_string(l + 1), lstm_macs(in, a.lstm_hidden, a.window)});
                in = a.lstm_hidden;
            }
            out.layers.push_back({"head", fc_macs(a.lstm_hidden, a.classes)});
            break;
        }
        case models::ModelKind::Snn: {
            // Each spiking population drives the dense op that consumes it.
            const std::pair<const char*, const char*> feeds[] = {
                {"input", "conv1"}, {"lif1", "conv2"}, {"lif2", "fc1"}, {"lif3", "readout"}};
            if (!spikes->find("input")) out.layers.push_back({"conv1", conv1});
            for (const auto& [pop, layer] : feeds) {
                const auto* s = spikes->find(pop);
                if (!s) {
                    if (std::string_view(pop) == "input") continue;
                    throw ValidationError(std::string("count_ops: spike statistics lack layer '") + pop + "'");
                }
                LayerOps op;
                op.name = layer;
                op.synapses = s->synapses;
                op.steps = spikes->steps;
                op.rate = s->rate(spikes->steps, spikes->examples);
                if (!(op.rate >= 0.0 && op.rate <= 1.0))
                    throw ValidationError(std::string("count_ops: rate of '") + pop + "' outside [0, 1]");
                out.layers.push_back(op);
            }
            break;
        }
    }
    return out;
}

double estimate_energy(const OpCounts& counts, const EnergyModel& model) {
    return static_cast<double>(counts.total_macs()) * model.e_mac + counts.total_acs() * model.e_ac;
}

std::size_t WspReport::best() const noexcept {
    std::size_t b = 0;
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].wsp > entries[b].wsp) b = i;
    return b;
}

WspReport compute_wsp(std::span<const MethodResult> results) {
    if (results.empty()) throw ValidationError("compute_wsp: no methods");
    double max_acc = 0.0, min_energy = results.front().energy;
    for (const auto& r : results) {
        if (!(r.energy > 0.0) || !std::isfinite(r.energy))
            throw ValidationError("compute_wsp: energy of '" + r.method + "' must be positive");
        if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0))
            throw ValidationError("compute_wsp: accuracy of '" + r.method + "' outside [0, 1]");
        max_acc = std::max(max_acc, r.accuracy);
        min_energy = std::min(min_energy, r.energy);
    }
    WspReport rep;
    for (const auto& r : results) {
        WspEntry e{r.method, r.accuracy, r.energy};
        // All accuracies zero: the accuracy term carries no information.
        const double acc_term = max_acc > 0.0 ? r.accuracy / max_acc : 1.0;
        e.wsp = rep.accuracy_weight * acc_term + rep.energy_weight * (min_energy / r.energy);
        rep.entries.push_back(e);
    }
    for (auto& e : rep.entries) e.first_over = rep.entries.front().wsp / e.wsp;
    return rep;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.empty()) throw ValidationError("accuracy: empty input");
    if (predictions.size() != labels.size()) throw ValidationError("accuracy: length mismatch");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) hit += predictions[i] == labels[i];
    return static_cast<double>(hit) / static_cast<double>(predictions.size());
}

}  // namespace spikefed::energy
