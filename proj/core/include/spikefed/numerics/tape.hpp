#pragma once

#include "spikefed/numerics/parameter_set.hpp"
#include "spikefed/numerics/tensor.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spikefed::numerics {

using NodeId = std::uint32_t;

enum class Op : std::uint8_t {
    Constant,
    Parameter,
    MatMul,
    Conv1d,
    AddBias,
    Add,
    Sub,
    Mul,
    Affine,  // a * x + c with scalar a, c
    Relu,
    Sigmoid,
    Tanh,
    Spike,
    Reshape,
    SwapLastAxes,
    TimeStep,
    SliceCols,
    TemporalMean,
    Sum,
    SoftmaxCrossEntropy,
};

const char* op_name(Op op) noexcept;

/// Forward behaviour of the spike primitive. The backward pass always uses the
/// fast-sigmoid surrogate 1 / (slope * |u - theta| + 1)^2.
enum class SpikeForward : std::uint8_t {
    Heaviside,  // 0/1 output, the normal mode
    Relaxed,    // (u - theta) / (1 + slope * |u - theta|), whose exact derivative is the surrogate;
                // used only for finite-difference checks of the spiking path
};

struct SpikeParams {
    double threshold = 1.0;
    double slope = 25.0;
    SpikeForward forward = SpikeForward::Heaviside;
};

struct OpAttrs {
    double a = 0.0;  // scale / threshold
    double b = 0.0;  // offset / slope
    std::size_t i0 = 0;  // stride / begin / step
    std::size_t i1 = 0;  // end
    SpikeForward spike_forward = SpikeForward::Heaviside;
    Shape shape;               // Reshape target
    std::vector<int> labels;   // SoftmaxCrossEntropy targets
};

struct Node {
    Op op = Op::Constant;
    std::vector<NodeId> inputs;
    OpAttrs attrs;
    Tensor value;
    bool requires_grad = false;
    std::size_t param_index = 0;  // valid for Op::Parameter
};

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
    Tape* tape = nullptr;
    NodeId id = 0;

    [[nodiscard]] const Tensor& value() const;
    [[nodiscard]] const Shape& shape() const { return value().shape(); }
};

/// Define-by-run record of primitive operations for reverse-mode
/// differentiation. Each node holds its forward value; inputs always precede
/// the node that consumes them. A tape is a single-threaded unit of work.
class Tape {
public:
    /// `params` supplies the layout for parameter leaves and for the gradient
    /// set produced by backward(); it must outlive the tape.
    explicit Tape(const ParameterSet* params = nullptr) : params_(params) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    /// Leaf bound to a parameter entry. Repeated calls with the same name
    /// return the same node so gradients accumulate in one place.
    Var parameter(std::string_view name);

    void mark_loss(Var v);
    [[nodiscard]] std::size_t loss_count() const noexcept { return losses_.size(); }

    /// Gradient of the single marked loss with respect to every parameter entry.
    /// Entries the loss does not depend on receive zeros.
    [[nodiscard]] GradientSet backward() const;

    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] const Node& node(NodeId id) const { return nodes_.at(id); }
    [[nodiscard]] const Tensor& value(NodeId id) const { return nodes_.at(id).value; }

    /// Recomputes every non-leaf node from its recorded inputs and reports
    /// whether all values are reproduced bit for bit.
    [[nodiscard]] bool replay_matches() const;

    Var record(Op op, std::vector<NodeId> inputs, OpAttrs attrs = {});

private:
    const ParameterSet* params_;
    std::vector<Node> nodes_;
    std::vector<NodeId> losses_;
    std::unordered_map<std::size_t, NodeId> param_nodes_;
};

// Primitives. All operands must live on the same tape.

/// (M x K) * (K x N) -> (M x N)
Var matmul(Var a, Var b);
/// x: (B, Cin, L), w: (Cout, Cin, K), bias: (Cout) -> (B, Cout, (L - K) / stride + 1)
Var conv1d(Var x, Var w, Var bias, std::size_t stride);
/// x: (..., N) plus bias (N) on the last axis, or x: (B, C, L) plus bias (C).
Var add_bias(Var x, Var bias);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var affine(Var x, double scale, double offset);
inline Var scale(Var x, double s) { return affine(x, s, 0.0); }
Var relu(Var x);
Var sigmoid(Var x);
Var tanh(Var x);
Var spike(Var u, const SpikeParams& p);
Var reshape(Var x, Shape shape);
/// (B, C, L) -> (B, L, C)
Var swap_last_axes(Var x);
/// (B, L, F) -> (B, F) at time index t
Var time_step(Var x, std::size_t t);
/// Columns [begin, end) of a 2-D value.
Var slice_cols(Var x, std::size_t begin, std::size_t end);
/// Elementwise mean of equally shaped values.
Var temporal_mean(std::span<const Var> xs);
/// Sum of all elements, as a scalar.
Var sum(Var x);
/// Mean softmax cross-entropy of (B x C) logits against B class labels.
Var softmax_cross_entropy(Var logits, std::span<const int> labels);

/// Multiply-accumulate counter for the calling thread. Matmul and convolution
/// kernels add their dense MAC count on every forward evaluation.
std::uint64_t& mac_counter() noexcept;

class ScopedMacCount {
public:
    ScopedMacCount() : start_(mac_counter()) {}
    [[nodiscard]] std::uint64_t count() const noexcept { return mac_counter() - start_; }

private:
    std::uint64_t start_;
};

}  // namespace spikefed::numerics
