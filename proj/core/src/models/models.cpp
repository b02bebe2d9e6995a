#include "spikefed/models/models.hpp"

#include "spikefed/common/hash.hpp"

#include <algorithm>

namespace spikefed::models {

using numerics::Shape;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

double LayerSpikes::rate(std::size_t steps, std::size_t examples) const noexcept {
    const double denom = static_cast<double>(neurons) * static_cast<double>(steps) * static_cast<double>(examples);
    return denom > 0.0 ? spikes / denom : 0.0;
}

const LayerSpikes* SpikeStats::find(std::string_view name) const noexcept {
    for (const auto& l : layers)
        if (l.name == name) return &l;
    return nullptr;
}

void SpikeStats::merge(const SpikeStats& other) {
    if (layers.empty() && examples == 0) {
        *this = other;
        return;
    }
    if (other.steps != steps || other.layers.size() != layers.size())
        throw ValidationError("cannot merge spike statistics of different layouts");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].name != other.layers[i].name || layers[i].neurons != other.layers[i].neurons)
            throw ValidationError("cannot merge spike statistics of different layouts");
        layers[i].spikes += other.layers[i].spikes;
    }
    examples += other.examples;
}

Tensor stack_windows(std::span<const Tensor* const> windows) {
    if (windows.empty()) throw ValidationError("empty batch");
    const Shape& s = windows.front()->shape();
    if (s.size() != 2) throw numerics::ShapeError("windows must be (channels, length), got " + numerics::to_string(s));
    const std::size_t n = windows.front()->size();
    Tensor out({windows.size(), s[0], s[1]});
    for (std::size_t b = 0; b < windows.size(); ++b) {
        if (windows[b]->shape() != s)
            throw numerics::ShapeError("batch mixes window shapes " + numerics::to_string(s) + " and " +
                                       numerics::to_string(windows[b]->shape()));
        std::copy_n(windows[b]->data(), n, out.data() + b * n);
    }
    return out;
}

namespace {

double total(const Tensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v;
    return s;
}

void require_input(const ModelSpec& spec, const Tensor& batch) {
    const Shape want{batch.rank() == 3 ? batch.dim(0) : 0, spec.arch.channels, spec.arch.window};
    if (batch.rank() != 3 || batch.shape() != want)
        throw numerics::ShapeError("model input must be (batch, " + std::to_string(spec.arch.channels) + ", " +
                                   std::to_string(spec.arch.window) + "), got " + numerics::to_string(batch.shape()));
}

}  // namespace

Var snn_logits(Tape& tape, const ModelSpec& spec, std::span<const encoding::InputSequence> inputs, SpikeStats* stats,
               numerics::SpikeForward fwd) {
    if (spec.kind != ModelKind::Snn) throw ValidationError("snn_logits needs an snn model spec");
    if (inputs.empty()) throw ValidationError("empty batch");
    const auto& a = spec.arch;
    const std::size_t batch = inputs.size();
    const std::size_t steps = spec.encoder.steps;
    const std::size_t feats = spec.input_features();
    bool repeated = true;
    for (const auto& in : inputs) {
        if (in.step_count != steps)
            throw numerics::ShapeError("input encoded for " + std::to_string(in.step_count) + " steps, model runs " +
                                       std::to_string(steps));
        if (in.steps.empty() || in.at(0).shape() != Shape{feats, a.window})
            throw numerics::ShapeError("encoded input must be (" + std::to_string(feats) + ", " +
                                       std::to_string(a.window) + ")");
        repeated = repeated && in.repeated;
    }
    const bool binary_input = inputs.front().binary;
    auto batch_step = [&](std::size_t t) {
        std::vector<const Tensor*> ptrs;
        ptrs.reserve(batch);
        for (const auto& in : inputs) ptrs.push_back(&in.at(t));
        return stack_windows(ptrs);
    };

    const std::size_t l1 = a.conv1_length(), l2 = a.conv2_length();
    SpikeStats local;
    const bool record = stats != nullptr && fwd == numerics::SpikeForward::Heaviside;
    if (record) {
        local.steps = steps;
        local.examples = batch;
        if (binary_input) local.layers.push_back({"input", feats * a.window, a.conv1_channels * l1 * feats * a.conv1_kernel, 0.0});
        local.layers.push_back({"lif1", a.conv1_channels * l1, a.conv2_channels * l2 * a.conv1_channels * a.conv2_kernel, 0.0});
        local.layers.push_back({"lif2", a.conv2_channels * l2, a.flat_features() * a.hidden, 0.0});
        local.layers.push_back({"lif3", a.hidden, a.hidden * a.classes, 0.0});
    }
    const std::size_t first_lif = binary_input ? 1 : 0;

    Var w1 = tape.parameter("conv1.weight"), b1 = tape.parameter("conv1.bias");
    Var w2 = tape.parameter("conv2.weight"), b2 = tape.parameter("conv2.bias");
    Var w3 = tape.parameter("fc1.weight"), b3 = tape.parameter("fc1.bias");
    Var w4 = tape.parameter("readout.weight"), b4 = tape.parameter("readout.bias");

    Var x_const{}, cur1_const{};
    if (repeated) {
        x_const = tape.constant(batch_step(0));
        cur1_const = numerics::conv1d(x_const, w1, b1, a.conv1_stride);
    }
    Var v1{}, v2{}, v3{}, counts{};
    for (std::size_t t = 0; t < steps; ++t) {
        Var cur1 = cur1_const;
        if (!repeated) {
            Var x = tape.constant(batch_step(t));
            if (record && binary_input) local.layers[0].spikes += total(x.value());
            cur1 = numerics::conv1d(x, w1, b1, a.conv1_stride);
        } else if (record && binary_input) {
            local.layers[0].spikes += total(x_const.value());
        }
        auto l1v = lif_step(v1, cur1, spec.lif, fwd);
        v1 = l1v.v;
        Var cur2 = numerics::conv1d(l1v.spikes, w2, b2, a.conv2_stride);
        auto l2v = lif_step(v2, cur2, spec.lif, fwd);
        v2 = l2v.v;
        Var flat = numerics::reshape(l2v.spikes, {batch, a.flat_features()});
        Var cur3 = numerics::add_bias(numerics::matmul(flat, w3), b3);
        auto l3v = lif_step(v3, cur3, spec.lif, fwd);
        v3 = l3v.v;
        counts = t == 0 ? l3v.spikes : numerics::add(counts, l3v.spikes);
        if (record) {
            local.layers[first_lif].spikes += total(l1v.spikes.value());
            local.layers[first_lif + 1].spikes += total(l2v.spikes.value());
            local.layers[first_lif + 2].spikes += total(l3v.spikes.value());
        }
    }
    if (record) stats->merge(local);
    return numerics::add_bias(numerics::matmul(counts, w4), b4);
}

Var cnn_logits(Tape& tape, const ModelSpec& spec, const Tensor& batch) {
    if (spec.kind != ModelKind::Cnn) throw ValidationError("cnn_logits needs a cnn model spec");
    require_input(spec, batch);
    const auto& a = spec.arch;
    Var x = tape.constant(batch);
    Var h1 = numerics::relu(numerics::conv1d(x, tape.parameter("conv1.weight"), tape.parameter("conv1.bias"), a.conv1_stride));
    Var h2 = numerics::relu(numerics::conv1d(h1, tape.parameter("conv2.weight"), tape.parameter("conv2.bias"), a.conv2_stride));
    Var flat = numerics::reshape(h2, {batch.dim(0), a.flat_features()});
    Var h3 = numerics::relu(numerics::add_bias(numerics::matmul(flat, tape.parameter("fc1.weight")), tape.parameter("fc1.bias")));
    return numerics::add_bias(numerics::matmul(h3, tape.parameter("readout.weight")), tape.parameter("readout.bias"));
}

Var lstm_logits(Tape& tape, const ModelSpec& spec, const Tensor& batch, LstmTrace* trace) {
    if (spec.kind != ModelKind::Lstm) throw ValidationError("lstm_logits needs an lstm model spec");
    require_input(spec, batch);
    const auto& a = spec.arch;
    const std::size_t b = batch.dim(0), len = a.window, h = a.lstm_hidden, layers = a.lstm_layers;

    struct Layer {
        Var w_ih, w_hh, bias, h, c;
    };
    std::vector<Layer> ls(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        const std::string prefix = "lstm" + std::to_string(l + 1);
        ls[l].w_ih = tape.parameter(prefix + ".w_ih");
        ls[l].w_hh = tape.parameter(prefix + ".w_hh");
        ls[l].bias = tape.parameter(prefix + ".bias");
        ls[l].h = tape.constant(Tensor({b, h}));
        ls[l].c = tape.constant(Tensor({b, h}));
    }
    // The first layer's input projection covers every step in one product.
    Var seq = numerics::swap_last_axes(tape.constant(batch));
    Var proj = numerics::matmul(numerics::reshape(seq, {b * len, a.channels}), ls[0].w_ih);
    proj = numerics::reshape(proj, {b, len, 4 * h});

    for (std::size_t t = 0; t < len; ++t) {
        Var below{};
        for (std::size_t l = 0; l < layers; ++l) {
            Layer& L = ls[l];
            Var gx = l == 0 ? numerics::time_step(proj, t) : numerics::matmul(below, L.w_ih);
            Var gates = numerics::add_bias(numerics::add(gx, numerics::matmul(L.h, L.w_hh)), L.bias);
            Var i = numerics::sigmoid(numerics::slice_cols(gates, 0, h));
            Var f = numerics::sigmoid(numerics::slice_cols(gates, h, 2 * h));
            Var g = numerics::tanh(numerics::slice_cols(gates, 2 * h, 3 * h));
            Var o = numerics::sigmoid(numerics::slice_cols(gates, 3 * h, 4 * h));
            L.c = numerics::add(numerics::mul(f, L.c), numerics::mul(i, g));
            L.h = numerics::mul(o, numerics::tanh(L.c));
            below = L.h;
        }
    }
    if (trace) {
        trace->h.clear();
        trace->c.clear();
        for (const auto& L : ls) {
            trace->h.push_back(L.h.value());
            trace->c.push_back(L.c.value());
        }
    }
    return numerics::add_bias(numerics::matmul(ls.back().h, tape.parameter("head.weight")), tape.parameter("head.bias"));
}

std::uint64_t example_key(const data::LabeledExample& ex) {
    Fnv1a64 h;
    h.update(ex.trial_id);
    return h.digest();
}

std::vector<int> argmax_rows(const Tensor& logits) {
    if (logits.rank() != 2) throw numerics::ShapeError("logits must be (batch, classes)");
    const std::size_t n = logits.dim(0), c = logits.dim(1);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = logits.data() + i * c;
        out[i] = static_cast<int>(std::max_element(row, row + c) - row);
    }
    return out;
}

namespace {

Var logits_on_tape(Tape& tape, const ModelSpec& spec, std::span<const data::LabeledExample* const> batch,
                   SpikeStats* stats, numerics::SpikeForward fwd) {
    if (spec.kind == ModelKind::Snn) {
        std::vector<encoding::InputSequence> inputs;
        inputs.reserve(batch.size());
        for (const auto* ex : batch) {
            if (ex->window.shape() != Shape{spec.arch.channels, spec.arch.window})
                throw numerics::ShapeError("example " + ex->trial_id + " has window " +
                                           numerics::to_string(ex->window.shape()));
            inputs.push_back(encoding::encode(ex->window, spec.encoder, example_key(*ex)));
        }
        return snn_logits(tape, spec, inputs, stats, fwd);
    }
    std::vector<const Tensor*> windows;
    windows.reserve(batch.size());
    for (const auto* ex : batch) windows.push_back(&ex->window);
    const Tensor x = stack_windows(windows);
    return spec.kind == ModelKind::Cnn ? cnn_logits(tape, spec, x) : lstm_logits(tape, spec, x);
}

template <class F>
void for_each_chunk(std::size_t n, std::size_t chunk, F&& f) {
    if (chunk == 0) throw ValidationError("microbatch must be positive");
    for (std::size_t begin = 0; begin < n; begin += chunk) f(begin, std::min(n, begin + chunk));
}

std::vector<int> labels_of(std::span<const data::LabeledExample* const> batch) {
    std::vector<int> labels;
    labels.reserve(batch.size());
    for (const auto* ex : batch) {
        if (ex->label < 0 || static_cast<std::size_t>(ex->label) >= data::kClassCount)
            throw ValidationError("example " + ex->trial_id + " has label out of range");
        labels.push_back(ex->label);
    }
    return labels;
}

}  // namespace

Forward forward(const ModelSpec& spec, const numerics::ParameterSet& params,
                std::span<const data::LabeledExample* const> batch) {
    spec.validate();
    if (batch.empty()) throw ValidationError("empty batch");
    Tape tape(&params);
    Forward out;
    SpikeStats stats;
    Var logits = logits_on_tape(tape, spec, batch, spec.kind == ModelKind::Snn ? &stats : nullptr,
                                numerics::SpikeForward::Heaviside);
    out.logits = logits.value();
    if (spec.kind == ModelKind::Snn) out.spikes = std::move(stats);
    return out;
}

LossAndGrads loss_and_grads(const ModelSpec& spec, const numerics::ParameterSet& params,
                            std::span<const data::LabeledExample* const> batch, const LossOptions& opt) {
    spec.validate();
    if (batch.empty()) throw ValidationError("loss_and_grads needs a non-empty batch");
    const auto labels = labels_of(batch);
    const double n = static_cast<double>(batch.size());
    LossAndGrads out;
    SpikeStats stats;
    std::size_t correct = 0;
    bool first = true;
    for_each_chunk(batch.size(), opt.microbatch, [&](std::size_t begin, std::size_t end) {
        Tape tape(&params);
        auto part = batch.subspan(begin, end - begin);
        Var logits = logits_on_tape(tape, spec, part, spec.kind == ModelKind::Snn ? &stats : nullptr, opt.spike_forward);
        const auto preds = argmax_rows(logits.value());
        for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == labels[begin + i] ? 1 : 0;
        Var ce = numerics::softmax_cross_entropy(logits, std::span(labels).subspan(begin, end - begin));
        Var loss = numerics::scale(ce, static_cast<double>(end - begin) / n);
        tape.mark_loss(loss);
        out.loss += loss.value().item();
        if (!opt.gradients) return;
        auto g = tape.backward();
        if (first) {
            out.grads = std::move(g);
            first = false;
        } else {
            for (std::size_t e = 0; e < g.size(); ++e) {
                auto dst = out.grads.values(e);
                const auto& src = g.tensor(e);
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
            }
        }
    });
    out.accuracy = static_cast<double>(correct) / n;
    if (spec.kind == ModelKind::Snn && opt.spike_forward == numerics::SpikeForward::Heaviside)
        out.spikes = std::move(stats);
    return out;
}

Evaluation evaluate(const ModelSpec& spec, const numerics::ParameterSet& params,
                    std::span<const data::LabeledExample* const> examples, std::size_t microbatch) {
    spec.validate();
    if (examples.empty()) throw ValidationError("evaluate needs at least one example");
    const auto labels = labels_of(examples);
    Evaluation out;
    SpikeStats stats;
    std::size_t correct = 0;
    numerics::ScopedMacCount macs;
    for_each_chunk(examples.size(), microbatch, [&](std::size_t begin, std::size_t end) {
        Tape tape(&params);
        auto part = examples.subspan(begin, end - begin);
        Var logits = logits_on_tape(tape, spec, part, spec.kind == ModelKind::Snn ? &stats : nullptr,
                                    numerics::SpikeForward::Heaviside);
        for (int p : argmax_rows(logits.value())) {
            correct += p == labels[out.predictions.size()] ? 1 : 0;
            out.predictions.push_back(p);
        }
        Var ce = numerics::softmax_cross_entropy(logits, std::span(labels).subspan(begin, end - begin));
        out.loss += ce.value().item() * static_cast<double>(end - begin);
    });
    out.macs = macs.count();
    out.loss /= static_cast<double>(examples.size());
    out.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
    if (spec.kind == ModelKind::Snn) out.spikes = std::move(stats);
    return out;
}

}  // namespace spikefed::models
