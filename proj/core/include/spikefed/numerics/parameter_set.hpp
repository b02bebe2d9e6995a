#pragma once

#include "spikefed/numerics/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spikefed::numerics {

/// Layout fingerprint of an ordered list of (name, shape) pairs.
std::uint64_t layout_fingerprint(std::span<const std::pair<std::string, Shape>> layout);

/// Ordered, uniquely named collection of tensors. Shapes are fixed at insertion;
/// afterwards only element values may change.
///
/// The tag keeps parameters and gradients apart at the type level while sharing
/// the layout machinery.
template <class Tag>
class NamedTensors {
public:
    struct Entry {
        std::string name;
        Tensor tensor;
    };

    NamedTensors() = default;

    /// Copies the layout of another collection with every element set to `fill`.
    template <class OtherTag>
    static NamedTensors zeros_like(const NamedTensors<OtherTag>& other, double fill = 0.0) {
        NamedTensors out;
        for (std::size_t i = 0; i < other.size(); ++i)
            out.add(other.name(i), Tensor(other.tensor(i).shape(), fill));
        return out;
    }

    void add(std::string name, Tensor tensor) {
        if (find(name)) throw ValidationError("duplicate tensor name '" + name + "'");
        entries_.push_back({std::move(name), std::move(tensor)});
        fingerprint_.reset();
    }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const std::string& name(std::size_t i) const { return entries_.at(i).name; }
    [[nodiscard]] const Tensor& tensor(std::size_t i) const { return entries_.at(i).tensor; }
    [[nodiscard]] std::span<double> values(std::size_t i) { return entries_.at(i).tensor.values(); }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const noexcept {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name == name) return i;
        return std::nullopt;
    }
    [[nodiscard]] const Tensor& at(std::string_view name) const {
        auto idx = find(name);
        if (!idx) throw ValidationError("no tensor named '" + std::string(name) + "'");
        return entries_[*idx].tensor;
    }
    [[nodiscard]] std::span<double> values(std::string_view name) {
        auto idx = find(name);
        if (!idx) throw ValidationError("no tensor named '" + std::string(name) + "'");
        return entries_[*idx].tensor.values();
    }

    [[nodiscard]] std::size_t element_count() const noexcept {
        std::size_t n = 0;
        for (const auto& e : entries_) n += e.tensor.size();
        return n;
    }

    [[nodiscard]] std::vector<std::pair<std::string, Shape>> layout() const {
        std::vector<std::pair<std::string, Shape>> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.emplace_back(e.name, e.tensor.shape());
        return out;
    }

    [[nodiscard]] std::uint64_t fingerprint() const {
        if (!fingerprint_) {
            auto l = layout();
            fingerprint_ = layout_fingerprint(l);
        }
        return *fingerprint_;
    }

    friend bool operator==(const NamedTensors& a, const NamedTensors& b) {
        if (a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i)
            if (a.entries_[i].name != b.entries_[i].name || !(a.entries_[i].tensor == b.entries_[i].tensor))
                return false;
        return true;
    }

    /// Bitwise identity of names, shapes and every element.
    [[nodiscard]] bool bit_identical(const NamedTensors& other) const noexcept {
        if (entries_.size() != other.entries_.size()) return false;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name != other.entries_[i].name ||
                !bit_equal(entries_[i].tensor, other.entries_[i].tensor))
                return false;
        return true;
    }

private:
    std::vector<Entry> entries_;
    mutable std::optional<std::uint64_t> fingerprint_;
};

struct ParameterTag {};
struct GradientTag {};

using ParameterSet = NamedTensors<ParameterTag>;
using GradientSet = NamedTensors<GradientTag>;

/// Throws ValidationError unless both layouts carry the same fingerprint.
template <class A, class B>
void require_same_layout(const NamedTensors<A>& a, const NamedTensors<B>& b, const char* context) {
    if (a.fingerprint() != b.fingerprint())
        throw ValidationError(std::string(context) + ": layout fingerprint mismatch");
}

/// Plain SGD: p <- p - lr * g, elementwise.
ParameterSet sgd_step(const ParameterSet& params, const GradientSet& grads, double lr);

/// In-place variant used by training loops.
void sgd_step_inplace(ParameterSet& params, const GradientSet& grads, double lr);

}  // namespace spikefed::numerics
