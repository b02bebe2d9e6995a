#include "spikefed/numerics/parameter_set.hpp"

#include "spikefed/common/hash.hpp"

namespace spikefed::numerics {

std::uint64_t layout_fingerprint(std::span<const std::pair<std::string, Shape>> layout) {
    Fnv1a64 h;
    h.update_u64(layout.size());
    for (const auto& [name, shape] : layout) {
        h.update_u64(name.size());
        h.update(name);
        h.update_u64(shape.size());
        for (auto d : shape) h.update_u64(d);
    }
    return h.digest();
}

void sgd_step_inplace(ParameterSet& params, const GradientSet& grads, double lr) {
    require_same_layout(params, grads, "sgd_step");
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params.values(i);
        auto g = grads.tensor(i).values();
        for (std::size_t j = 0; j < p.size(); ++j) p[j] -= lr * g[j];
    }
}

ParameterSet sgd_step(const ParameterSet& params, const GradientSet& grads, double lr) {
    ParameterSet out = params;
    sgd_step_inplace(out, grads, lr);
    return out;
}

}  // namespace spikefed::numerics
