#include "spikefed/numerics/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spikefed::numerics {

namespace {

[[noreturn]] void shape_fail(Op op, const std::string& detail) {
    throw ShapeError(std::string(op_name(op)) + ": " + detail);
}

void require_rank(Op op, const Tensor& t, std::size_t rank) {
    if (t.rank() != rank)
        shape_fail(op, "expected rank " + std::to_string(rank) + ", got shape " + to_string(t.shape()));
}

void require_same_shape(Op op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_fail(op, to_string(a.shape()) + " vs " + to_string(b.shape()));
}

double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::size_t conv_out_len(std::size_t len, std::size_t kernel, std::size_t stride) {
    return (len - kernel) / stride + 1;
}

// ---------------------------------------------------------------------------
// Forward kernels

// c (m x n) += a (m x k) * b (k x n). Four rows of b are folded into each pass
// over a row of c; the additions still happen in increasing p order. Blocks
// whose a entries are all zero are skipped, which is what makes binary spike
// inputs cheap.
void gemm_acc(double* c, const double* a, const double* b, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const double* arow = a + i * k;
        std::size_t p = 0;
        for (; p + 4 <= k; p += 4) {
            const double a0 = arow[p], a1 = arow[p + 1], a2 = arow[p + 2], a3 = arow[p + 3];
            if (a0 == 0.0 && a1 == 0.0 && a2 == 0.0 && a3 == 0.0) continue;
            const double* b0 = b + p * n;
            const double* b1 = b0 + n;
            const double* b2 = b1 + n;
            const double* b3 = b2 + n;
            for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
        }
        for (; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

std::vector<double> transposed(const Tensor& t) {
    const std::size_t r = t.dim(0), c = t.dim(1);
    std::vector<double> out(r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = t[i * c + j];
    return out;
}

Tensor matmul_fwd(const Tensor& a, const Tensor& b) {
    require_rank(Op::MatMul, a, 2);
    require_rank(Op::MatMul, b, 2);
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) shape_fail(Op::MatMul, to_string(a.shape()) + " x " + to_string(b.shape()));
    Tensor c({m, n});
    gemm_acc(c.data(), a.data(), b.data(), m, k, n);
    mac_counter() += static_cast<std::uint64_t>(m) * k * n;
    return c;
}

Tensor conv1d_fwd(const Tensor& x, const Tensor& w, const Tensor& bias, std::size_t stride) {
    require_rank(Op::Conv1d, x, 3);
    require_rank(Op::Conv1d, w, 3);
    require_rank(Op::Conv1d, bias, 1);
    const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2);
    const std::size_t cout = w.dim(0), kernel = w.dim(2);
    if (w.dim(1) != cin) shape_fail(Op::Conv1d, "input channels " + std::to_string(cin) + " vs weight " +
                                                    to_string(w.shape()));
    if (bias.dim(0) != cout) shape_fail(Op::Conv1d, "bias " + to_string(bias.shape()));
    if (stride == 0) shape_fail(Op::Conv1d, "stride must be positive");
    if (len < kernel) shape_fail(Op::Conv1d, "input length shorter than kernel");
    const std::size_t lout = conv_out_len(len, kernel, stride);

    Tensor y({batch, cout, lout});
    const double* px = x.data();
    const double* pw = w.data();
    double* py = y.data();
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < cout; ++co) {
            double* yrow = py + (b * cout + co) * lout;
            std::fill(yrow, yrow + lout, bias[co]);
            for (std::size_t ci = 0; ci < cin; ++ci) {
                const double* xrow = px + (b * cin + ci) * len;
                const double* wrow = pw + (co * cin + ci) * kernel;
                for (std::size_t k = 0; k < kernel; ++k) {
                    const double wv = wrow[k];
                    const double* xs = xrow + k;
                    if (stride == 1) {
                        for (std::size_t t = 0; t < lout; ++t) yrow[t] += wv * xs[t];
                    } else {
                        for (std::size_t t = 0; t < lout; ++t) yrow[t] += wv * xs[t * stride];
                    }
                }
            }
        }
    }
    mac_counter() += static_cast<std::uint64_t>(batch) * cout * lout * cin * kernel;
    return y;
}

Tensor add_bias_fwd(const Tensor& x, const Tensor& bias) {
    require_rank(Op::AddBias, bias, 1);
    Tensor y = x;
    const std::size_t nb = bias.size();
    if (x.rank() == 3) {
        if (x.dim(1) != nb) shape_fail(Op::AddBias, to_string(x.shape()) + " + " + to_string(bias.shape()));
        const std::size_t len = x.dim(2);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] += bias[(i / len) % nb];
    } else {
        if (x.rank() == 0 || x.shape().back() != nb)
            shape_fail(Op::AddBias, to_string(x.shape()) + " + " + to_string(bias.shape()));
        for (std::size_t i = 0; i < x.size(); ++i) y[i] += bias[i % nb];
    }
    return y;
}

template <class F>
Tensor map_unary(const Tensor& x, F f) {
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
    return y;
}

template <class F>
Tensor map_binary(Op op, const Tensor& a, const Tensor& b, F f) {
    require_same_shape(op, a, b);
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = f(a[i], b[i]);
    return y;
}

Tensor spike_fwd(const Tensor& u, const OpAttrs& at) {
    const double theta = at.a, slope = at.b;
    if (at.spike_forward == SpikeForward::Heaviside)
        return map_unary(u, [theta](double v) { return v >= theta ? 1.0 : 0.0; });
    return map_unary(u, [theta, slope](double v) {
        const double d = v - theta;
        return d / (1.0 + slope * std::abs(d));
    });
}

Tensor swap_last_axes_fwd(const Tensor& x) {
    require_rank(Op::SwapLastAxes, x, 3);
    const std::size_t b = x.dim(0), c = x.dim(1), l = x.dim(2);
    Tensor y({b, l, c});
    for (std::size_t bi = 0; bi < b; ++bi)
        for (std::size_t ci = 0; ci < c; ++ci)
            for (std::size_t li = 0; li < l; ++li) y[(bi * l + li) * c + ci] = x[(bi * c + ci) * l + li];
    return y;
}

Tensor time_step_fwd(const Tensor& x, std::size_t t) {
    require_rank(Op::TimeStep, x, 3);
    const std::size_t b = x.dim(0), l = x.dim(1), f = x.dim(2);
    if (t >= l) shape_fail(Op::TimeStep, "step " + std::to_string(t) + " out of range");
    Tensor y({b, f});
    for (std::size_t bi = 0; bi < b; ++bi)
        std::copy_n(x.data() + (bi * l + t) * f, f, y.data() + bi * f);
    return y;
}

Tensor slice_cols_fwd(const Tensor& x, std::size_t begin, std::size_t end) {
    require_rank(Op::SliceCols, x, 2);
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (begin >= end || end > cols) shape_fail(Op::SliceCols, "bad column range");
    const std::size_t w = end - begin;
    Tensor y({rows, w});
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(x.data() + r * cols + begin, w, y.data() + r * w);
    return y;
}

Tensor softmax_ce_fwd(const Tensor& logits, const std::vector<int>& labels) {
    require_rank(Op::SoftmaxCrossEntropy, logits, 2);
    const std::size_t b = logits.dim(0), c = logits.dim(1);
    if (labels.size() != b || b == 0) shape_fail(Op::SoftmaxCrossEntropy, "label count does not match batch");
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const double* row = logits.data() + i * c;
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= c) shape_fail(Op::SoftmaxCrossEntropy, "label out of range");
        const double mx = *std::max_element(row, row + c);
        double se = 0.0;
        for (std::size_t j = 0; j < c; ++j) se += std::exp(row[j] - mx);
        total += (mx + std::log(se)) - row[y];
    }
    return Tensor::scalar(total / static_cast<double>(b));
}

Tensor forward_kernel(Op op, const OpAttrs& at, const std::vector<const Tensor*>& in) {
    switch (op) {
        case Op::MatMul: return matmul_fwd(*in[0], *in[1]);
        case Op::Conv1d: return conv1d_fwd(*in[0], *in[1], *in[2], at.i0);
        case Op::AddBias: return add_bias_fwd(*in[0], *in[1]);
        case Op::Add: return map_binary(op, *in[0], *in[1], [](double a, double b) { return a + b; });
        case Op::Sub: return map_binary(op, *in[0], *in[1], [](double a, double b) { return a - b; });
        case Op::Mul: return map_binary(op, *in[0], *in[1], [](double a, double b) { return a * b; });
        case Op::Affine: {
            const double s = at.a, c = at.b;
            return map_unary(*in[0], [s, c](double v) { return s * v + c; });
        }
        case Op::Relu: return map_unary(*in[0], [](double v) { return v > 0.0 ? v : 0.0; });
        case Op::Sigmoid: return map_unary(*in[0], stable_sigmoid);
        case Op::Tanh: return map_unary(*in[0], [](double v) { return std::tanh(v); });
        case Op::Spike: return spike_fwd(*in[0], at);
        case Op::Reshape: return in[0]->reshaped(at.shape);
        case Op::SwapLastAxes: return swap_last_axes_fwd(*in[0]);
        case Op::TimeStep: return time_step_fwd(*in[0], at.i0);
        case Op::SliceCols: return slice_cols_fwd(*in[0], at.i0, at.i1);
        case Op::TemporalMean: {
            if (in.empty()) shape_fail(op, "no inputs");
            Tensor y = *in[0];
            for (std::size_t k = 1; k < in.size(); ++k) {
                require_same_shape(op, y, *in[k]);
                for (std::size_t i = 0; i < y.size(); ++i) y[i] += (*in[k])[i];
            }
            const double n = static_cast<double>(in.size());
            for (auto& v : y.values()) v /= n;
            return y;
        }
        case Op::Sum: {
            double s = 0.0;
            for (double v : in[0]->values()) s += v;
            return Tensor::scalar(s);
        }
        case Op::SoftmaxCrossEntropy: return softmax_ce_fwd(*in[0], at.labels);
        case Op::Constant:
        case Op::Parameter: break;
    }
    shape_fail(op, "not a computed operation");
}

// ---------------------------------------------------------------------------
// Backward kernels. `g` holds d(loss)/d(output); each non-null entry of `gin`
// accumulates d(loss)/d(input).

void accumulate(Tensor* dst, const Tensor& src) {
    if (!dst) return;
    for (std::size_t i = 0; i < src.size(); ++i) (*dst)[i] += src[i];
}

void matmul_bwd(const Tensor& a, const Tensor& b, const Tensor& g, Tensor* ga, Tensor* gb) {
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (ga) gemm_acc(ga->data(), g.data(), transposed(b).data(), m, n, k);  // g * b^T
    if (gb) gemm_acc(gb->data(), transposed(a).data(), g.data(), k, m, n);  // a^T * g
}

void conv1d_bwd(const Tensor& x, const Tensor& w, const Tensor& g, std::size_t stride, Tensor* gx, Tensor* gw,
                Tensor* gbias) {
    const std::size_t batch = x.dim(0), cin = x.dim(1), len = x.dim(2);
    const std::size_t cout = w.dim(0), kernel = w.dim(2);
    const std::size_t lout = g.dim(2);
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < cout; ++co) {
            const double* grow = g.data() + (b * cout + co) * lout;
            if (gbias) {
                double s = 0.0;
                for (std::size_t t = 0; t < lout; ++t) s += grow[t];
                (*gbias)[co] += s;
            }
            for (std::size_t ci = 0; ci < cin; ++ci) {
                const double* xrow = x.data() + (b * cin + ci) * len;
                const double* wrow = w.data() + (co * cin + ci) * kernel;
                for (std::size_t k = 0; k < kernel; ++k) {
                    if (gw) {
                        double s = 0.0;
                        for (std::size_t t = 0; t < lout; ++t) s += grow[t] * xrow[t * stride + k];
                        (*gw)[(co * cin + ci) * kernel + k] += s;
                    }
                    if (gx) {
                        const double wv = wrow[k];
                        double* gxrow = gx->data() + (b * cin + ci) * len + k;
                        for (std::size_t t = 0; t < lout; ++t) gxrow[t * stride] += wv * grow[t];
                    }
                }
            }
        }
    }
}

void add_bias_bwd(const Tensor& x, const Tensor& g, Tensor* gx, Tensor* gbias) {
    accumulate(gx, g);
    if (!gbias) return;
    const std::size_t nb = gbias->size();
    if (x.rank() == 3) {
        const std::size_t len = x.dim(2);
        for (std::size_t i = 0; i < g.size(); ++i) (*gbias)[(i / len) % nb] += g[i];
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) (*gbias)[i % nb] += g[i];
    }
}

void backward_kernel(const Node& node, const std::vector<const Tensor*>& in, const Tensor& g,
                     const std::vector<Tensor*>& gin) {
    const auto& at = node.attrs;
    const Tensor& y = node.value;
    switch (node.op) {
        case Op::MatMul: matmul_bwd(*in[0], *in[1], g, gin[0], gin[1]); return;
        case Op::Conv1d: conv1d_bwd(*in[0], *in[1], g, at.i0, gin[0], gin[1], gin[2]); return;
        case Op::AddBias: add_bias_bwd(*in[0], g, gin[0], gin[1]); return;
        case Op::Add:
            accumulate(gin[0], g);
            accumulate(gin[1], g);
            return;
        case Op::Sub:
            accumulate(gin[0], g);
            if (gin[1])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[1])[i] -= g[i];
            return;
        case Op::Mul:
            if (gin[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += g[i] * (*in[1])[i];
            if (gin[1])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[1])[i] += g[i] * (*in[0])[i];
            return;
        case Op::Affine:
            if (gin[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += at.a * g[i];
            return;
        case Op::Relu:
            if (gin[0])
                for (std::size_t i = 0; i < g.size(); ++i)
                    if ((*in[0])[i] > 0.0) (*gin[0])[i] += g[i];
            return;
        case Op::Sigmoid:
            if (gin[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += g[i] * y[i] * (1.0 - y[i]);
            return;
        case Op::Tanh:
            if (gin[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*gin[0])[i] += g[i] * (1.0 - y[i] * y[i]);
            return;
        case Op::Spike:
            if (gin[0]) {
                const double theta = at.a, slope = at.b;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    const double d = slope * std::abs((*in[0])[i] - theta) + 1.0;
                    (*gin[0])[i] += g[i] / (d * d);
                }
            }
            return;
        case Op::Reshape: accumulate(gin[0], g); return;
        case Op::SwapLastAxes:
            if (gin[0]) {
                const std::size_t b = in[0]->dim(0), c = in[0]->dim(1), l = in[0]->dim(2);
                for (std::size_t bi = 0; bi < b; ++bi)
                    for (std::size_t ci = 0; ci < c; ++ci)
                        for (std::size_t li = 0; li < l; ++li)
                            (*gin[0])[(bi * c + ci) * l + li] += g[(bi * l + li) * c + ci];
            }
            return;
        case Op::TimeStep:
            if (gin[0]) {
                const std::size_t b = in[0]->dim(0), l = in[0]->dim(1), f = in[0]->dim(2);
                for (std::size_t bi = 0; bi < b; ++bi) {
                    double* dst = gin[0]->data() + (bi * l + at.i0) * f;
                    const double* src = g.data() + bi * f;
                    for (std::size_t j = 0; j < f; ++j) dst[j] += src[j];
                }
            }
            return;
        case Op::SliceCols:
            if (gin[0]) {
                const std::size_t rows = in[0]->dim(0), cols = in[0]->dim(1), w = at.i1 - at.i0;
                for (std::size_t r = 0; r < rows; ++r) {
                    double* dst = gin[0]->data() + r * cols + at.i0;
                    const double* src = g.data() + r * w;
                    for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
                }
            }
            return;
        case Op::TemporalMean: {
            const double inv = 1.0 / static_cast<double>(in.size());
            for (std::size_t k = 0; k < in.size(); ++k)
                if (gin[k])
                    for (std::size_t i = 0; i < g.size(); ++i) (*gin[k])[i] += g[i] * inv;
            return;
        }
        case Op::Sum:
            if (gin[0])
                for (auto& v : gin[0]->values()) v += g[0];
            return;
        case Op::SoftmaxCrossEntropy:
            if (gin[0]) {
                const Tensor& logits = *in[0];
                const std::size_t b = logits.dim(0), c = logits.dim(1);
                const double scale = g[0] / static_cast<double>(b);
                for (std::size_t i = 0; i < b; ++i) {
                    const double* row = logits.data() + i * c;
                    const double mx = *std::max_element(row, row + c);
                    double se = 0.0;
                    for (std::size_t j = 0; j < c; ++j) se += std::exp(row[j] - mx);
                    for (std::size_t j = 0; j < c; ++j) {
                        double p = std::exp(row[j] - mx) / se;
                        if (static_cast<int>(j) == at.labels[i]) p -= 1.0;
                        (*gin[0])[i * c + j] += scale * p;
                    }
                }
            }
            return;
        case Op::Constant:
        case Op::Parameter: return;
    }
}

Tape* same_tape(std::initializer_list<Var> vars) {
    Tape* t = vars.begin()->tape;
    for (const auto& v : vars)
        if (v.tape != t || t == nullptr) throw ValidationError("operands recorded on different tapes");
    return t;
}

}  // namespace

const char* op_name(Op op) noexcept {
    switch (op) {
        case Op::Constant: return "constant";
        case Op::Parameter: return "parameter";
        case Op::MatMul: return "matmul";
        case Op::Conv1d: return "conv1d";
        case Op::AddBias: return "add_bias";
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Affine: return "affine";
        case Op::Relu: return "relu";
        case Op::Sigmoid: return "sigmoid";
        case Op::Tanh: return "tanh";
        case Op::Spike: return "spike";
        case Op::Reshape: return "reshape";
        case Op::SwapLastAxes: return "swap_last_axes";
        case Op::TimeStep: return "time_step";
        case Op::SliceCols: return "slice_cols";
        case Op::TemporalMean: return "temporal_mean";
        case Op::Sum: return "sum";
        case Op::SoftmaxCrossEntropy: return "softmax_cross_entropy";
    }
    return "unknown";
}

std::uint64_t& mac_counter() noexcept {
    thread_local std::uint64_t count = 0;
    return count;
}

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) {
    value.require_finite("constant input");
    Node n;
    n.op = Op::Constant;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

Var Tape::parameter(std::string_view name) {
    if (!params_) throw ValidationError("tape has no parameter set bound");
    auto idx = params_->find(name);
    if (!idx) throw ValidationError("unknown parameter '" + std::string(name) + "'");
    if (auto it = param_nodes_.find(*idx); it != param_nodes_.end()) return {this, it->second};
    Node n;
    n.op = Op::Parameter;
    n.value = params_->tensor(*idx);
    n.value.require_finite("parameter");
    n.requires_grad = true;
    n.param_index = *idx;
    nodes_.push_back(std::move(n));
    const auto id = static_cast<NodeId>(nodes_.size() - 1);
    param_nodes_.emplace(*idx, id);
    return {this, id};
}

Var Tape::record(Op op, std::vector<NodeId> inputs, OpAttrs attrs) {
    std::vector<const Tensor*> in;
    in.reserve(inputs.size());
    bool needs_grad = false;
    for (auto id : inputs) {
        in.push_back(&nodes_.at(id).value);
        needs_grad = needs_grad || nodes_[id].requires_grad;
    }
    Tensor value = forward_kernel(op, attrs, in);
    value.require_finite(op_name(op));
    Node n;
    n.op = op;
    n.inputs = std::move(inputs);
    n.attrs = std::move(attrs);
    n.value = std::move(value);
    n.requires_grad = needs_grad;
    nodes_.push_back(std::move(n));
    return {this, static_cast<NodeId>(nodes_.size() - 1)};
}

void Tape::mark_loss(Var v) {
    if (v.tape != this) throw ValidationError("loss recorded on a different tape");
    if (nodes_.at(v.id).value.size() != 1) throw ShapeError("loss must be a scalar");
    losses_.push_back(v.id);
}

GradientSet Tape::backward() const {
    if (losses_.size() != 1)
        throw ValidationError("backward requires exactly one loss output, tape has " +
                              std::to_string(losses_.size()));
    GradientSet grads;
    if (params_) grads = GradientSet::zeros_like(*params_);

    std::vector<Tensor> g(nodes_.size());
    std::vector<bool> live(nodes_.size(), false);
    const NodeId loss = losses_.front();
    if (!nodes_[loss].requires_grad) return grads;
    g[loss] = Tensor(nodes_[loss].value.shape(), 1.0);
    live[loss] = true;

    std::vector<const Tensor*> in;
    std::vector<Tensor*> gin;
    for (std::size_t idx = loss + 1; idx-- > 0;) {
        if (!live[idx]) continue;
        const Node& n = nodes_[idx];
        if (n.op == Op::Parameter) {
            auto dst = grads.values(n.param_index);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[idx][i];
        } else if (n.op != Op::Constant) {
            in.clear();
            gin.clear();
            for (auto id : n.inputs) {
                in.push_back(&nodes_[id].value);
                if (nodes_[id].requires_grad) {
                    if (!live[id]) {
                        g[id] = Tensor(nodes_[id].value.shape());
                        live[id] = true;
                    }
                    gin.push_back(&g[id]);
                } else {
                    gin.push_back(nullptr);
                }
            }
            // Shared inputs (e.g. mul(x, x)) get one accumulator; route both slots to it.
            backward_kernel(n, in, g[idx], gin);
        }
        g[idx] = Tensor();
    }
    for (std::size_t i = 0; i < grads.size(); ++i) grads.tensor(i).require_finite("gradient");
    return grads;
}

bool Tape::replay_matches() const {
    std::vector<const Tensor*> in;
    for (const auto& n : nodes_) {
        if (n.op == Op::Constant || n.op == Op::Parameter) continue;
        in.clear();
        for (auto id : n.inputs) in.push_back(&nodes_[id].value);
        const std::uint64_t saved = mac_counter();
        Tensor again = forward_kernel(n.op, n.attrs, in);
        mac_counter() = saved;
        if (!bit_equal(again, n.value)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

Var matmul(Var a, Var b) { return same_tape({a, b})->record(Op::MatMul, {a.id, b.id}); }

Var conv1d(Var x, Var w, Var bias, std::size_t stride) {
    OpAttrs at;
    at.i0 = stride;
    return same_tape({x, w, bias})->record(Op::Conv1d, {x.id, w.id, bias.id}, std::move(at));
}

Var add_bias(Var x, Var bias) { return same_tape({x, bias})->record(Op::AddBias, {x.id, bias.id}); }
Var add(Var a, Var b) { return same_tape({a, b})->record(Op::Add, {a.id, b.id}); }
Var sub(Var a, Var b) { return same_tape({a, b})->record(Op::Sub, {a.id, b.id}); }
Var mul(Var a, Var b) { return same_tape({a, b})->record(Op::Mul, {a.id, b.id}); }

Var affine(Var x, double s, double offset) {
    OpAttrs at;
    at.a = s;
    at.b = offset;
    return same_tape({x})->record(Op::Affine, {x.id}, std::move(at));
}

Var relu(Var x) { return same_tape({x})->record(Op::Relu, {x.id}); }
Var sigmoid(Var x) { return same_tape({x})->record(Op::Sigmoid, {x.id}); }
Var tanh(Var x) { return same_tape({x})->record(Op::Tanh, {x.id}); }

Var spike(Var u, const SpikeParams& p) {
    if (!(p.threshold > 0.0) || !(p.slope > 0.0)) throw ValidationError("spike: threshold and slope must be > 0");
    OpAttrs at;
    at.a = p.threshold;
    at.b = p.slope;
    at.spike_forward = p.forward;
    return same_tape({u})->record(Op::Spike, {u.id}, std::move(at));
}

Var reshape(Var x, Shape shape) {
    OpAttrs at;
    at.shape = std::move(shape);
    return same_tape({x})->record(Op::Reshape, {x.id}, std::move(at));
}

Var swap_last_axes(Var x) { return same_tape({x})->record(Op::SwapLastAxes, {x.id}); }

Var time_step(Var x, std::size_t t) {
    OpAttrs at;
    at.i0 = t;
    return same_tape({x})->record(Op::TimeStep, {x.id}, std::move(at));
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
    OpAttrs at;
    at.i0 = begin;
    at.i1 = end;
    return same_tape({x})->record(Op::SliceCols, {x.id}, std::move(at));
}

Var temporal_mean(std::span<const Var> xs) {
    if (xs.empty()) throw ValidationError("temporal_mean of an empty sequence");
    std::vector<NodeId> ids;
    ids.reserve(xs.size());
    for (const auto& v : xs) {
        if (v.tape != xs.front().tape) throw ValidationError("operands recorded on different tapes");
        ids.push_back(v.id);
    }
    return xs.front().tape->record(Op::TemporalMean, std::move(ids));
}

Var sum(Var x) { return same_tape({x})->record(Op::Sum, {x.id}); }

Var softmax_cross_entropy(Var logits, std::span<const int> labels) {
    OpAttrs at;
    at.labels.assign(labels.begin(), labels.end());
    return same_tape({logits})->record(Op::SoftmaxCrossEntropy, {logits.id}, std::move(at));
}

}  // namespace spikefed::numerics
