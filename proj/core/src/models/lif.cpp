#include "spikefed/models/lif.hpp"

namespace spikefed::models {

using numerics::Tensor;
using numerics::Var;

void LifConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("lif.beta must lie in (0, 1)");
    if (!(threshold > 0.0)) throw ValidationError("lif.threshold must be > 0");
    if (!(slope > 0.0)) throw ValidationError("lif.slope must be > 0");
}

LifStep lif_step(const Tensor& v, const Tensor& i, const LifConfig& cfg) {
    if (v.shape() != i.shape())
        throw numerics::ShapeError("lif_step: membrane " + numerics::to_string(v.shape()) + " vs input " +
                                   numerics::to_string(i.shape()));
    LifStep out{Tensor(v.shape()), Tensor(v.shape())};
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double u = cfg.beta * v[k] + i[k];
        const bool fire = u >= cfg.threshold;
        out.spikes[k] = fire ? 1.0 : 0.0;
        if (cfg.reset == ResetMode::Subtract)
            out.v[k] = fire ? u - cfg.threshold : u;
        else
            out.v[k] = fire ? 0.0 : u;
    }
    return out;
}

LifVars lif_step(Var v, Var i, const LifConfig& cfg, numerics::SpikeForward fwd) {
    Var u = v.tape ? numerics::add(numerics::scale(v, cfg.beta), i) : i;
    Var s = numerics::spike(u, cfg.spike_params(fwd));
    Var next = cfg.reset == ResetMode::Subtract ? numerics::sub(u, numerics::scale(s, cfg.threshold))
                                                : numerics::mul(u, numerics::affine(s, -1.0, 1.0));
    return {next, s};
}

}  // namespace spikefed::models
