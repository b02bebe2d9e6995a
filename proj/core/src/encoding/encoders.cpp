#include "spikefed/encoding/encoders.hpp"

#include "spikefed/common/rng.hpp"

#include <algorithm>

namespace spikefed::encoding {

using numerics::Shape;
using numerics::Tensor;

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::DirectCurrent: return "direct";
        case Scheme::Rate: return "rate";
        case Scheme::Delta: return "delta";
    }
    return "direct";
}

Scheme parse_scheme(std::string_view text) {
    if (text == "direct" || text == "direct-current") return Scheme::DirectCurrent;
    if (text == "rate") return Scheme::Rate;
    if (text == "delta") return Scheme::Delta;
    throw ValidationError("unknown encoder scheme '" + std::string(text) + "'");
}

void EncoderConfig::validate() const {
    if (steps < 1) throw ValidationError("encoder.steps must be >= 1");
    if (!(delta_threshold > 0.0)) throw ValidationError("encoder.delta_threshold must be > 0");
}

SpikeTensor::SpikeTensor(Tensor t) : t_(std::move(t)) {
    if (t_.rank() != 3) throw numerics::ShapeError("spike tensor must be (steps, features, positions)");
    for (double v : t_.values())
        if (v != 0.0 && v != 1.0) throw ValidationError("spike tensor values must be 0 or 1");
}

std::size_t SpikeTensor::spike_count() const noexcept {
    return static_cast<std::size_t>(std::count(t_.values().begin(), t_.values().end(), 1.0));
}

double SpikeTensor::firing_rate() const noexcept {
    return t_.size() == 0 ? 0.0 : static_cast<double>(spike_count()) / static_cast<double>(t_.size());
}

Tensor SpikeTensor::step(std::size_t s) const {
    const std::size_t f = t_.dim(1), p = t_.dim(2);
    if (s >= t_.dim(0)) throw ValidationError("spike tensor step out of range");
    Tensor out({f, p});
    std::copy_n(t_.data() + s * f * p, f * p, out.data());
    return out;
}

namespace {

void require_window(const Tensor& w) {
    if (w.rank() != 2) throw numerics::ShapeError("window must be (channels, positions), got " + numerics::to_string(w.shape()));
}

}  // namespace

std::vector<Tensor> encode_direct(const Tensor& window, std::size_t steps) {
    if (steps < 1) throw ValidationError("direct coding needs at least one step");
    return std::vector<Tensor>(steps, window);
}

SpikeTensor encode_rate(const Tensor& window, std::size_t steps, std::uint64_t seed) {
    require_window(window);
    if (steps < 1) throw ValidationError("rate coding needs at least one step");
    const auto [lo_it, hi_it] = std::minmax_element(window.values().begin(), window.values().end());
    const double lo = window.size() ? *lo_it : 0.0;
    const double span = window.size() ? *hi_it - lo : 0.0;
    Tensor out({steps, window.dim(0), window.dim(1)});
    Rng rng(seed);
    const std::size_t n = window.size();
    for (std::size_t s = 0; s < steps; ++s)
        for (std::size_t i = 0; i < n; ++i) {
            const double p = span > 0.0 ? (window[i] - lo) / span : 0.0;
            out[s * n + i] = rng.uniform() < p ? 1.0 : 0.0;
        }
    return SpikeTensor(std::move(out));
}

SpikeTensor encode_delta(const Tensor& window, double threshold) {
    require_window(window);
    if (!(threshold > 0.0)) throw ValidationError("delta threshold must be > 0");
    const std::size_t ch = window.dim(0), len = window.dim(1);
    Tensor out({1, 2 * ch, len});
    for (std::size_t c = 0; c < ch; ++c) {
        const double* x = window.data() + c * len;
        double* on = out.data() + c * len;
        double* off = out.data() + (ch + c) * len;
        double ref = len ? x[0] : 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            if (x[t] - ref >= threshold) {
                on[t] = 1.0;
                ref += threshold;
            } else if (ref - x[t] >= threshold) {
                off[t] = 1.0;
                ref -= threshold;
            }
        }
    }
    return SpikeTensor(std::move(out));
}

std::size_t encoded_features(const EncoderConfig& cfg, std::size_t channels) noexcept {
    return cfg.scheme == Scheme::Delta ? 2 * channels : channels;
}

InputSequence encode(const Tensor& window, const EncoderConfig& cfg, std::uint64_t example_key) {
    cfg.validate();
    InputSequence seq;
    seq.step_count = cfg.steps;
    switch (cfg.scheme) {
        case Scheme::DirectCurrent:
            seq.steps.push_back(window);
            seq.repeated = true;
            break;
        case Scheme::Rate: {
            auto spikes = encode_rate(window, cfg.steps, derive_seed(cfg.seed, "encoder", {example_key}));
            for (std::size_t s = 0; s < cfg.steps; ++s) seq.steps.push_back(spikes.step(s));
            seq.binary = true;
            break;
        }
        case Scheme::Delta:
            seq.steps.push_back(encode_delta(window, cfg.delta_threshold).step(0));
            seq.repeated = true;
            seq.binary = true;
            break;
    }
    return seq;
}

}  // namespace spikefed::encoding
