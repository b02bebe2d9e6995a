#include "spikefed/models/architecture.hpp"

#include "spikefed/common/rng.hpp"

#include <cmath>

namespace spikefed::models {

using numerics::ParameterSet;
using numerics::Tensor;

std::string_view to_string(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::Snn: return "snn";
        case ModelKind::Cnn: return "cnn";
        case ModelKind::Lstm: return "lstm";
    }
    return "snn";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "snn") return ModelKind::Snn;
    if (text == "cnn") return ModelKind::Cnn;
    if (text == "lstm") return ModelKind::Lstm;
    throw ValidationError("unknown model kind '" + std::string(text) + "' (expected snn, cnn or lstm)");
}

Architecture Architecture::reference() {
    Architecture a;
    a.conv1_channels = 32;
    a.conv1_kernel = 7;
    a.conv1_stride = 4;
    a.conv2_channels = 32;
    a.conv2_kernel = 5;
    a.conv2_stride = 4;
    a.hidden = 128;
    return a;
}

void Architecture::validate() const {
    auto positive = [](std::size_t v, const char* key) {
        if (v == 0) throw ValidationError(std::string("model.") + key + " must be positive");
    };
    positive(channels, "channels");
    positive(window, "window");
    positive(classes, "classes");
    positive(conv1_channels, "conv1_channels");
    positive(conv1_kernel, "conv1_kernel");
    positive(conv1_stride, "conv1_stride");
    positive(conv2_channels, "conv2_channels");
    positive(conv2_kernel, "conv2_kernel");
    positive(conv2_stride, "conv2_stride");
    positive(hidden, "hidden");
    positive(lstm_hidden, "lstm_hidden");
    positive(lstm_layers, "lstm_layers");
    if (window < conv1_kernel) throw ValidationError("model.conv1_kernel exceeds the window length");
    if (conv1_length() < conv2_kernel) throw ValidationError("model.conv2_kernel exceeds the conv1 output length");
    if (!(init_gain > 0.0) || !std::isfinite(init_gain)) throw ValidationError("model.init_gain must be > 0");
}

void ModelSpec::validate() const {
    arch.validate();
    lif.validate();
    encoder.validate();
}

std::size_t ModelSpec::input_features() const noexcept {
    return kind == ModelKind::Snn ? encoding::encoded_features(encoder, arch.channels) : arch.channels;
}

namespace {

Tensor uniform_tensor(numerics::Shape shape, double bound, Rng& rng) {
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-bound, bound);
    return t;
}

}  // namespace

ParameterSet init_params(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto& a = spec.arch;
    const double g = a.init_gain;
    Rng rng(seed);
    ParameterSet p;
    if (spec.kind == ModelKind::Lstm) {
        std::size_t in = a.channels;
        const std::size_t h = a.lstm_hidden;
        const double bound = g / std::sqrt(static_cast<double>(h));
        for (std::size_t l = 1; l <= a.lstm_layers; ++l) {
            const std::string prefix = "lstm" + std::to_string(l);
            p.add(prefix + ".w_ih", uniform_tensor({in, 4 * h}, bound, rng));
            p.add(prefix + ".w_hh", uniform_tensor({h, 4 * h}, bound, rng));
            p.add(prefix + ".bias", Tensor({4 * h}));
            in = h;
        }
        p.add("head.weight", uniform_tensor({h, a.classes}, bound, rng));
        p.add("head.bias", Tensor({a.classes}));
        return p;
    }
    const std::size_t f = spec.input_features();
    auto bound = [g](std::size_t fan_in) { return g / std::sqrt(static_cast<double>(fan_in)); };
    p.add("conv1.weight", uniform_tensor({a.conv1_channels, f, a.conv1_kernel}, bound(f * a.conv1_kernel), rng));
    p.add("conv1.bias", Tensor({a.conv1_channels}));
    p.add("conv2.weight", uniform_tensor({a.conv2_channels, a.conv1_channels, a.conv2_kernel},
                                         bound(a.conv1_channels * a.conv2_kernel), rng));
    p.add("conv2.bias", Tensor({a.conv2_channels}));
    p.add("fc1.weight", uniform_tensor({a.flat_features(), a.hidden}, bound(a.flat_features()), rng));
    p.add("fc1.bias", Tensor({a.hidden}));
    p.add("readout.weight", uniform_tensor({a.hidden, a.classes}, bound(a.hidden), rng));
    p.add("readout.bias", Tensor({a.classes}));
    return p;
}

}  // namespace spikefed::models
