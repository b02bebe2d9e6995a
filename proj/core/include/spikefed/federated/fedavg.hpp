#pragma once

#include "spikefed/data/dataset.hpp"
#include "spikefed/models/models.hpp"
#include "spikefed/numerics/parameter_set.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spikefed::federated {

struct TrainingConfig {
    double lr = 0.01;
    std::size_t batch = 64;
    std::size_t local_epochs = 1;
    std::size_t microbatch = 16;  // tape chunking inside a mini-batch; no effect on results

    void validate() const;
};

// Messages crossing the client/server boundary. Only parameters and scalars
// travel; examples stay inside Client.

/// Server -> client.
struct Broadcast {
    std::size_t round = 0;  // 1-based
    numerics::ParameterSet params;
};

/// Client -> server.
struct ClientUpdate {
    std::string client_id;
    numerics::ParameterSet params;
    std::size_t sample_count = 0;
    double train_loss = 0.0;      // mean mini-batch loss over the local epochs
    double train_accuracy = 0.0;  // mean mini-batch accuracy, same weighting
    double duration_ms = 0.0;
};

/// One subject's private training data plus its shuffle stream.
class Client {
public:
    Client(std::string id, std::vector<data::LabeledExample> train, std::uint64_t seed);

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return train_.size(); }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Copies the broadcast parameters and runs `local_epochs` passes of
    /// mini-batch SGD over a seeded shuffle of the local data.
    [[nodiscard]] ClientUpdate local_train(const models::ModelSpec& spec, const Broadcast& global,
                                           const TrainingConfig& cfg) const;

    /// Example order used in (round, epoch); exposed for reproduction by tests.
    [[nodiscard]] std::vector<std::size_t> epoch_order(std::size_t round, std::size_t epoch) const;

private:
    std::string id_;
    std::vector<data::LabeledExample> train_;
    std::uint64_t seed_;
};

/// Seed of a client's shuffle stream: derive_seed(master, "shuffle", {FNV-1a(id)}).
std::uint64_t client_seed(std::uint64_t master_seed, std::string_view client_id);

struct Partition {
    std::vector<Client> clients;               // ascending subject id
    std::vector<data::LabeledExample> test;    // union of all test partitions, server side
};

/// One client per subject. Throws ValidationError for an empty split or a
/// subject that has test examples but no training examples.
Partition partition_by_subject(data::DatasetSplit split, std::uint64_t master_seed);

/// Weighted mean with weights n_k / sum(n), accumulated in ascending client id
/// order so the result does not depend on the order updates arrive in. Updates
/// that all equal the first one come back bit for bit.
numerics::ParameterSet fedavg_aggregate(std::span<const ClientUpdate> updates);

struct ClientRound {
    std::string client_id;
    double loss = 0.0;
    double accuracy = 0.0;
    double duration_ms = 0.0;
};

struct RoundResult {
    std::size_t round = 0;
    std::uint64_t params_digest = 0;  // content digest of the aggregated parameters
    std::vector<ClientRound> clients;  // ascending id
    double test_loss = 0.0;
    double test_accuracy = 0.0;
    double duration_ms = 0.0;
};

struct FederatedRun {
    numerics::ParameterSet global;
    std::vector<RoundResult> rounds;
    models::Evaluation final_evaluation;
};

using RoundCallback = std::function<void(const RoundResult&)>;

/// Broadcast, train every client concurrently, aggregate, evaluate on the
/// server's test set; `rounds` times. Deterministic given the clients' seeds.
FederatedRun run_rounds(std::span<const Client> clients, const models::ModelSpec& spec,
                        numerics::ParameterSet initial, std::span<const data::LabeledExample> test,
                        const TrainingConfig& cfg, std::size_t rounds, const RoundCallback& on_round = {});

/// FNV-1a over names, shapes and raw element bits.
std::uint64_t params_digest(const numerics::ParameterSet& params);

}  // namespace spikefed::federated
