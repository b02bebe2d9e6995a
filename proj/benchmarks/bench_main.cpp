#include "spikefed/common/rng.hpp"
#include "spikefed/data/edf.hpp"
#include "spikefed/data/synthetic.hpp"
#include "spikefed/federated/fedavg.hpp"
#include "spikefed/models/models.hpp"
#include "spikefed/numerics/tape.hpp"

#include <benchmark/benchmark.h>

using namespace spikefed;
using numerics::Tensor;

namespace {

Tensor random_tensor(numerics::Shape shape, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = rng.normal();
    return t;
}

// Dense product at the fc1 size of the default SNN/CNN (batch 16).
void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Tensor a = random_tensor({16, n}, 1), b = random_tensor({n, 256}, 2);
    for (auto _ : state) {
        numerics::Tape t;
        benchmark::DoNotOptimize(numerics::matmul(t.constant(a), t.constant(b)).value().data());
    }
    state.SetItemsProcessed(state.iterations() * 16 * static_cast<std::int64_t>(n) * 256);
}
BENCHMARK(BM_Matmul)->Arg(256)->Arg(2496);

// Same product with a binary left operand at 15% density: the spike path.
void BM_MatmulSparse(benchmark::State& state) {
    Rng rng(3);
    Tensor a({16, 2496});
    for (auto& v : a.values()) v = rng.uniform(0.0, 1.0) < 0.15 ? 1.0 : 0.0;
    const Tensor b = random_tensor({2496, 256}, 4);
    for (auto _ : state) {
        numerics::Tape t;
        benchmark::DoNotOptimize(numerics::matmul(t.constant(a), t.constant(b)).value().data());
    }
}
BENCHMARK(BM_MatmulSparse);

void BM_Conv1d(benchmark::State& state) {
    const Tensor x = random_tensor({16, 64, 640}, 5), w = random_tensor({4, 64, 4}, 6), bias = random_tensor({4}, 7);
    for (auto _ : state) {
        numerics::Tape t;
        benchmark::DoNotOptimize(numerics::conv1d(t.constant(x), t.constant(w), t.constant(bias), 4).value().data());
    }
}
BENCHMARK(BM_Conv1d);

std::vector<data::LabeledExample> batch_of(std::size_t n) {
    std::vector<data::LabeledExample> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i].window = random_tensor({64, 640}, 10 + i);
        v[i].label = static_cast<int>(i % 4);
        v[i].subject = "S001";
        v[i].trial_id = "S001R04#" + std::to_string(i);
    }
    return v;
}

// One training step (forward and backward) per default model, 16 examples.
void BM_TrainStep(benchmark::State& state) {
    models::ModelSpec spec;
    spec.kind = static_cast<models::ModelKind>(state.range(0));
    const auto params = models::init_params(spec, 1);
    const auto data = batch_of(16);
    std::vector<const data::LabeledExample*> batch;
    for (const auto& e : data) batch.push_back(&e);
    for (auto _ : state) benchmark::DoNotOptimize(models::loss_and_grads(spec, params, batch).loss);
    state.SetLabel(std::string(models::to_string(spec.kind)));
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_TrainStep)
    ->Arg(static_cast<int>(models::ModelKind::Snn))
    ->Arg(static_cast<int>(models::ModelKind::Cnn))
    ->Arg(static_cast<int>(models::ModelKind::Lstm))
    ->Unit(benchmark::kMillisecond);

void BM_SnnInference(benchmark::State& state) {
    models::ModelSpec spec;
    const auto params = models::init_params(spec, 1);
    const auto data = batch_of(16);
    std::vector<const data::LabeledExample*> batch;
    for (const auto& e : data) batch.push_back(&e);
    for (auto _ : state) benchmark::DoNotOptimize(models::evaluate(spec, params, batch).accuracy);
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_SnnInference)->Unit(benchmark::kMillisecond);

// One motor-imagery run: 64 channels, ~2 min at 160 Hz plus annotations.
void BM_ParseEdf(benchmark::State& state) {
    data::SyntheticSpec spec;
    const auto bytes = data::write_edf(data::synthesize_run(spec, "S001", 4));
    for (auto _ : state) benchmark::DoNotOptimize(data::parse_edf(bytes).sample_count());
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseEdf)->Unit(benchmark::kMillisecond);

void BM_FedAvg(benchmark::State& state) {
    models::ModelSpec spec;
    std::vector<federated::ClientUpdate> ups(3);
    for (std::size_t k = 0; k < ups.size(); ++k) {
        ups[k].client_id = "S00" + std::to_string(k + 1);
        ups[k].params = models::init_params(spec, k);
        ups[k].sample_count = 60 + 10 * k;
    }
    for (auto _ : state) benchmark::DoNotOptimize(federated::fedavg_aggregate(ups).element_count());
}
BENCHMARK(BM_FedAvg)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
