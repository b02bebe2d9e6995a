#include "spikefed/federated/fedavg.hpp"

#include "spikefed/common/hash.hpp"
#include "spikefed/common/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

namespace spikefed::federated {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

void TrainingConfig::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be finite and >= 0");
    if (batch == 0) throw ValidationError("batch size must be positive");
    if (local_epochs == 0) throw ValidationError("local epochs must be positive");
    if (microbatch == 0) throw ValidationError("microbatch must be positive");
}

Client::Client(std::string id, std::vector<data::LabeledExample> train, std::uint64_t seed)
    : id_(std::move(id)), train_(std::move(train)), seed_(seed) {
    if (train_.empty()) throw ValidationError("client '" + id_ + "' has no training examples");
    for (const auto& ex : train_)
        if (ex.subject != id_)
            throw ValidationError("client '" + id_ + "' given an example of subject '" + ex.subject + "'");
}

std::vector<std::size_t> Client::epoch_order(std::size_t round, std::size_t epoch) const {
    std::vector<std::size_t> order(train_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed_, "epoch", {round, epoch}));
    rng.shuffle(order);
    return order;
}

ClientUpdate Client::local_train(const models::ModelSpec& spec, const Broadcast& global,
                                 const TrainingConfig& cfg) const {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    // Throws on a mismatching layout before any work is done.
    require_same_layout(global.params, models::init_params(spec, 0), "local_train");

    ClientUpdate up;
    up.client_id = id_;
    up.sample_count = train_.size();
    up.params = global.params;

    models::LossOptions opt;
    opt.microbatch = cfg.microbatch;
    double loss_sum = 0.0, acc_sum = 0.0;
    std::size_t seen = 0;
    std::vector<const data::LabeledExample*> batch;
    for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
        const auto order = epoch_order(global.round, epoch);
        for (std::size_t b = 0; b < order.size(); b += cfg.batch) {
            const std::size_t n = std::min(cfg.batch, order.size() - b);
            batch.clear();
            for (std::size_t k = 0; k < n; ++k) batch.push_back(&train_[order[b + k]]);
            auto res = models::loss_and_grads(spec, up.params, batch, opt);
            numerics::sgd_step_inplace(up.params, res.grads, cfg.lr);
            loss_sum += res.loss * static_cast<double>(n);
            acc_sum += res.accuracy * static_cast<double>(n);
            seen += n;
        }
    }
    up.train_loss = loss_sum / static_cast<double>(seen);
    up.train_accuracy = acc_sum / static_cast<double>(seen);
    up.duration_ms = elapsed_ms(start);
    return up;
}

std::uint64_t client_seed(std::uint64_t master_seed, std::string_view client_id) {
    Fnv1a64 h;
    h.update(client_id);
    return derive_seed(master_seed, "shuffle", {h.digest()});
}

Partition partition_by_subject(data::DatasetSplit split, std::uint64_t master_seed) {
    if (split.train.empty()) throw ValidationError("cannot partition an empty training set");
    std::map<std::string, std::vector<data::LabeledExample>> by_subject;
    for (auto& ex : split.train) by_subject[ex.subject].push_back(std::move(ex));
    for (const auto& ex : split.test)
        if (!by_subject.contains(ex.subject))
            throw ValidationError("subject '" + ex.subject + "' has an empty training partition");

    Partition p;
    p.clients.reserve(by_subject.size());
    for (auto& [id, examples] : by_subject) {
        auto seed = client_seed(master_seed, id);
        p.clients.emplace_back(id, std::move(examples), seed);
    }
    p.test = std::move(split.test);
    return p;
}

numerics::ParameterSet fedavg_aggregate(std::span<const ClientUpdate> updates) {
    if (updates.empty()) throw ValidationError("fedavg: no updates to aggregate");
    std::vector<const ClientUpdate*> sorted;
    double total = 0.0;
    for (const auto& u : updates) {
        if (u.sample_count == 0) throw ValidationError("fedavg: client '" + u.client_id + "' reports n = 0");
        require_same_layout(u.params, updates.front().params, "fedavg");
        sorted.push_back(&u);
        total += static_cast<double>(u.sample_count);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const ClientUpdate* a, const ClientUpdate* b) { return a->client_id < b->client_id; });
    for (std::size_t k = 1; k < sorted.size(); ++k)
        if (sorted[k]->client_id == sorted[k - 1]->client_id)
            throw ValidationError("fedavg: duplicate client id '" + sorted[k]->client_id + "'");

    // Accumulated as p_0 + sum_k w_k (p_k - p_0), which is the weighted mean
    // but returns p_0 exactly when every update agrees with it (one client, or
    // lr = 0).
    const auto& base = sorted.front()->params;
    numerics::ParameterSet acc = base;
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        const double w = static_cast<double>(sorted[k]->sample_count) / total;
        for (std::size_t e = 0; e < acc.size(); ++e) {
            auto dst = acc.values(e);
            const auto& src = sorted[k]->params.tensor(e);
            const auto& b = base.tensor(e);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * (src[i] - b[i]);
        }
    }
    return acc;
}

FederatedRun run_rounds(std::span<const Client> clients, const models::ModelSpec& spec,
                        numerics::ParameterSet initial, std::span<const data::LabeledExample> test,
                        const TrainingConfig& cfg, std::size_t rounds, const RoundCallback& on_round) {
    if (rounds == 0) throw ValidationError("rounds must be at least 1");
    if (clients.empty()) throw ValidationError("no clients");
    if (test.empty()) throw ValidationError("empty global test set");
    cfg.validate();
    require_same_layout(initial, models::init_params(spec, 0), "run_rounds");

    std::vector<const data::LabeledExample*> test_ptrs;
    for (const auto& ex : test) test_ptrs.push_back(&ex);

    FederatedRun run;
    run.global = std::move(initial);
    for (std::size_t r = 1; r <= rounds; ++r) {
        const auto start = std::chrono::steady_clock::now();
        Broadcast msg{r, run.global};

        std::vector<std::future<ClientUpdate>> pending;
        pending.reserve(clients.size());
        for (const auto& c : clients)
            pending.push_back(std::async(std::launch::async, [&c, &spec, &msg, &cfg] {
                return c.local_train(spec, msg, cfg);
            }));
        std::vector<ClientUpdate> updates;
        updates.reserve(clients.size());
        for (auto& f : pending) updates.push_back(f.get());

        run.global = fedavg_aggregate(updates);
        run.final_evaluation = models::evaluate(spec, run.global, test_ptrs);

        RoundResult rr;
        rr.round = r;
        rr.params_digest = params_digest(run.global);
        std::sort(updates.begin(), updates.end(),
                  [](const ClientUpdate& a, const ClientUpdate& b) { return a.client_id < b.client_id; });
        for (const auto& u : updates) rr.clients.push_back({u.client_id, u.train_loss, u.train_accuracy, u.duration_ms});
        rr.test_loss = run.final_evaluation.loss;
        rr.test_accuracy = run.final_evaluation.accuracy;
        rr.duration_ms = elapsed_ms(start);
        if (on_round) on_round(rr);
        run.rounds.push_back(std::move(rr));
    }
    return run;
}

std::uint64_t params_digest(const numerics::ParameterSet& params) {
    Fnv1a64 h;
    for (std::size_t e = 0; e < params.size(); ++e) {
        h.update(params.name(e));
        const auto& t = params.tensor(e);
        h.update_u64(t.shape().size());
        for (auto d : t.shape()) h.update_u64(d);
        for (std::size_t i = 0; i < t.size(); ++i) h.update_f64(t[i]);
    }
    return h.digest();
}

}  // namespace spikefed::federated
