#include "doctest.h"

#include "spikefed/common/rng.hpp"
#include "spikefed/federated/fedavg.hpp"
#include "privacy_reflection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <type_traits>

using namespace spikefed;
using namespace spikefed::federated;
using numerics::ParameterSet;
using numerics::Tensor;

namespace {

models::ModelSpec small_spec(models::ModelKind kind) {
    models::ModelSpec s;
    s.kind = kind;
    auto& a = s.arch;
    a.channels = 3;
    a.window = 12;
    a.conv1_channels = 4;
    a.conv1_kernel = 3;
    a.conv1_stride = 3;
    a.conv2_channels = 4;
    a.conv2_kernel = 2;
    a.conv2_stride = 1;
    a.hidden = 8;
    a.lstm_hidden = 5;
    a.init_gain = 1.5;
    s.encoder.steps = 3;
    return s;
}

// Class-dependent offsets on one channel each, plus noise.
data::LabeledExample example(Rng& rng, const std::string& subject, std::size_t k, std::size_t ch = 3,
                             std::size_t len = 12) {
    data::LabeledExample ex;
    ex.label = static_cast<int>(rng.below(4));
    ex.subject = subject;
    ex.trial_id = subject + "R04#" + std::to_string(k);
    ex.window = Tensor({ch, len});
    for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t t = 0; t < len; ++t)
            ex.window[c * len + t] = rng.normal() + (static_cast<std::size_t>(ex.label) == c ? 1.5 : 0.0);
    return ex;
}

std::vector<data::LabeledExample> examples(Rng& rng, const std::string& subject, std::size_t n) {
    std::vector<data::LabeledExample> v;
    for (std::size_t k = 0; k < n; ++k) v.push_back(example(rng, subject, k));
    return v;
}

ParameterSet random_params(Rng& rng, const std::vector<std::size_t>& sizes) {
    ParameterSet p;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        Tensor t({sizes[i]});
        for (auto& v : t.values()) v = rng.normal();
        p.add("w" + std::to_string(i), std::move(t));
    }
    return p;
}

ClientUpdate update(std::string id, ParameterSet p, std::size_t n) {
    ClientUpdate u;
    u.client_id = std::move(id);
    u.params = std::move(p);
    u.sample_count = n;
    return u;
}

std::vector<const data::LabeledExample*> ptrs(const std::vector<data::LabeledExample>& v) {
    std::vector<const data::LabeledExample*> out;
    for (const auto& e : v) out.push_back(&e);
    return out;
}

}  // namespace

TEST_CASE("fedavg_aggregate") {
    Rng rng(3);
    SUBCASE("a single update is returned bit for bit") {
        for (int trial = 0; trial < 20; ++trial) {
            auto p = random_params(rng, {7, 3, 11});
            std::vector<ClientUpdate> ups{update("S001", p, 1 + rng.below(200))};
            CHECK(fedavg_aggregate(ups).bit_identical(p));
        }
    }
    SUBCASE("weighted mean by hand") {
        ParameterSet a, b;
        a.add("w", Tensor({1}, 2.0));
        b.add("w", Tensor({1}, 4.0));
        std::vector<ClientUpdate> ups{update("S001", a, 1), update("S002", b, 3)};
        CHECK(fedavg_aggregate(ups).at("w")[0] == 3.5);
    }
    SUBCASE("equal sample counts give the unweighted mean") {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<ClientUpdate> ups;
            for (int k = 0; k < 3; ++k) ups.push_back(update("S00" + std::to_string(k), random_params(rng, {5, 4}), 40));
            auto avg = fedavg_aggregate(ups);
            for (std::size_t e = 0; e < avg.size(); ++e)
                for (std::size_t i = 0; i < avg.tensor(e).size(); ++i) {
                    const double hand = (ups[0].params.tensor(e)[i] + ups[1].params.tensor(e)[i] +
                                         ups[2].params.tensor(e)[i]) / 3.0;
                    CHECK(std::abs(avg.tensor(e)[i] - hand) <= 1e-12);
                }
        }
    }
    SUBCASE("arrival order does not matter") {
        std::vector<ClientUpdate> ups;
        for (int k = 0; k < 4; ++k)
            ups.push_back(update("S00" + std::to_string(k), random_params(rng, {9}), 10 + rng.below(90)));
        const auto ref = fedavg_aggregate(ups);
        std::vector<std::size_t> perm{0, 1, 2, 3};
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<ClientUpdate> shuffled;
            for (auto i : perm) shuffled.push_back(ups[i]);
            CHECK(fedavg_aggregate(shuffled).bit_identical(ref));
        }
    }
    SUBCASE("weights sum to one") {
        ParameterSet one;
        one.add("w", Tensor({1}, 1.0));
        std::vector<ClientUpdate> ups{update("a", one, 100), update("b", one, 80), update("c", one, 120)};
        CHECK(std::abs(fedavg_aggregate(ups).at("w")[0] - 1.0) <= 1e-12);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(fedavg_aggregate({}), ValidationError);
        auto p = random_params(rng, {3});
        auto q = random_params(rng, {4});
        std::vector<ClientUpdate> mismatch{update("a", p, 1), update("b", q, 1)};
        CHECK_THROWS_AS(fedavg_aggregate(mismatch), ValidationError);
        std::vector<ClientUpdate> empty_client{update("a", p, 0)};
        CHECK_THROWS_AS(fedavg_aggregate(empty_client), ValidationError);
        std::vector<ClientUpdate> dup{update("a", p, 1), update("a", p, 2)};
        CHECK_THROWS_AS(fedavg_aggregate(dup), ValidationError);
    }
}

TEST_CASE("partition_by_subject") {
    Rng rng(5);
    SUBCASE("counts, union and disjointness") {
        data::DatasetSplit split;
        const std::map<std::string, std::size_t> sizes{{"S002", 100}, {"S001", 80}, {"S003", 120}};
        for (const auto& [s, n] : sizes) {
            auto tr = examples(rng, s, n);
            for (auto& e : tr) split.train.push_back(std::move(e));
            auto te = examples(rng, s, 5);
            for (auto& e : te) {
                e.trial_id += "t";
                split.test.push_back(std::move(e));
            }
        }
        std::multiset<std::string> all_ids;
        for (const auto& e : split.train) all_ids.insert(e.trial_id);
        auto part = partition_by_subject(split, 9);
        REQUIRE(part.clients.size() == 3);
        CHECK(part.clients[0].id() == "S001");
        CHECK(part.clients[1].id() == "S002");
        CHECK(part.clients[2].id() == "S003");
        CHECK(part.clients[0].sample_count() == 80);
        CHECK(part.clients[1].sample_count() == 100);
        CHECK(part.clients[2].sample_count() == 120);
        CHECK(part.test.size() == 15);
        std::size_t total = 0;
        for (const auto& c : part.clients) total += c.sample_count();
        CHECK(total == all_ids.size());
        // Seeds are distinct per client and stable per (master, id).
        CHECK(part.clients[0].seed() != part.clients[1].seed());
        CHECK(part.clients[0].seed() == client_seed(9, "S001"));
    }
    SUBCASE("one subject") {
        data::DatasetSplit split;
        split.train = examples(rng, "S007", 12);
        split.test = examples(rng, "S007", 3);
        auto part = partition_by_subject(split, 1);
        REQUIRE(part.clients.size() == 1);
        CHECK(part.clients[0].sample_count() == 12);
    }
    SUBCASE("a subject without training examples is rejected") {
        data::DatasetSplit split;
        split.train = examples(rng, "S001", 4);
        split.test = examples(rng, "S002", 2);
        CHECK_THROWS_AS(partition_by_subject(split, 1), ValidationError);
        CHECK_THROWS_AS(partition_by_subject(data::DatasetSplit{}, 1), ValidationError);
    }
    SUBCASE("a client only accepts its own subject") {
        auto ex = examples(rng, "S001", 2);
        CHECK_THROWS_AS(Client("S002", ex, 1), ValidationError);
        CHECK_THROWS_AS(Client("S001", {}, 1), ValidationError);
    }
}

TEST_CASE("local_train") {
    Rng rng(8);
    const auto spec = small_spec(models::ModelKind::Snn);
    Client client("S001", examples(rng, "S001", 150), 77);
    const auto init = models::init_params(spec, 4);

    SUBCASE("lr = 0 returns the broadcast parameters exactly") {
        TrainingConfig cfg;
        cfg.lr = 0.0;
        auto up = client.local_train(spec, {1, init}, cfg);
        CHECK(up.params.bit_identical(init));
        CHECK(up.sample_count == 150);
        CHECK(up.client_id == "S001");
    }
    SUBCASE("equals centralized mini-batch SGD bit for bit") {
        TrainingConfig cfg;
        cfg.batch = 64;
        for (std::size_t round : {1u, 2u, 5u}) {
            auto up = client.local_train(spec, {round, init}, cfg);
            // Centralized oracle: the same data in the client's order, plain SGD.
            std::vector<data::LabeledExample> data;
            {
                Rng again(8);
                data = examples(again, "S001", 150);
            }
            auto order = client.epoch_order(round, 0);
            ParameterSet p = init;
            for (std::size_t b = 0; b < order.size(); b += cfg.batch) {
                std::vector<const data::LabeledExample*> batch;
                for (std::size_t k = b; k < std::min(order.size(), b + cfg.batch); ++k) batch.push_back(&data[order[k]]);
                auto g = models::loss_and_grads(spec, p, batch);
                for (std::size_t e = 0; e < p.size(); ++e) {
                    auto v = p.values(e);
                    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= cfg.lr * g.grads.tensor(e)[i];
                }
            }
            CHECK(up.params.bit_identical(p));
        }
    }
    SUBCASE("shuffles differ between rounds and are permutations") {
        auto a = client.epoch_order(1, 0), b = client.epoch_order(2, 0);
        CHECK(a != b);
        std::sort(a.begin(), a.end());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == i);
    }
    SUBCASE("a mismatching layout is rejected") {
        auto other = models::init_params(small_spec(models::ModelKind::Lstm), 1);
        CHECK_THROWS_AS((void)client.local_train(spec, {1, other}, TrainingConfig{}), ValidationError);
    }
}

TEST_CASE("one local epoch lowers the local loss on at least 90% of seeded runs") {
    std::size_t descended = 0;
    const std::size_t runs = 20;
    for (std::size_t seed = 0; seed < runs; ++seed) {
        Rng rng(100 + seed);
        auto spec = small_spec(seed % 2 ? models::ModelKind::Cnn : models::ModelKind::Snn);
        Client client("S001", examples(rng, "S001", 192), seed);
        auto data = [&] {
            Rng again(100 + seed);
            return examples(again, "S001", 192);
        }();
        const auto init = models::init_params(spec, seed);
        TrainingConfig cfg;
        cfg.lr = 0.05;
        auto before = models::evaluate(spec, init, ptrs(data)).loss;
        auto up = client.local_train(spec, {1, init}, cfg);
        auto after = models::evaluate(spec, up.params, ptrs(data)).loss;
        descended += after <= before;
    }
    CHECK(descended >= 18);
}

TEST_CASE("run_rounds") {
    Rng rng(12);
    const auto spec = small_spec(models::ModelKind::Snn);
    std::vector<Client> clients;
    for (const char* s : {"S001", "S002", "S003"}) clients.emplace_back(s, examples(rng, s, 40), client_seed(6, s));
    auto test = examples(rng, "S001", 30);
    const auto init = models::init_params(spec, 2);

    SUBCASE("R = 1 with lr = 0 keeps the parameters and their accuracy") {
        TrainingConfig cfg;
        cfg.lr = 0.0;
        auto run = run_rounds(clients, spec, init, test, cfg, 1);
        CHECK(run.global.bit_identical(init));
        REQUIRE(run.rounds.size() == 1);
        CHECK(run.rounds[0].test_accuracy == models::evaluate(spec, init, ptrs(test)).accuracy);
    }
    SUBCASE("deterministic and independent of client order") {
        TrainingConfig cfg;
        auto a = run_rounds(clients, spec, init, test, cfg, 3);
        auto b = run_rounds(clients, spec, init, test, cfg, 3);
        std::vector<Client> reversed(clients.rbegin(), clients.rend());
        auto c = run_rounds(reversed, spec, init, test, cfg, 3);
        REQUIRE(a.rounds.size() == 3);
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(a.rounds[r].round == r + 1);
            CHECK(a.rounds[r].params_digest == b.rounds[r].params_digest);
            CHECK(a.rounds[r].params_digest == c.rounds[r].params_digest);
            CHECK(a.rounds[r].test_accuracy == c.rounds[r].test_accuracy);
            REQUIRE(c.rounds[r].clients.size() == 3);
            CHECK(c.rounds[r].clients[0].client_id == "S001");
            for (std::size_t k = 0; k < 3; ++k) CHECK(a.rounds[r].clients[k].loss == c.rounds[r].clients[k].loss);
            CHECK(a.rounds[r].test_accuracy >= 0.0);
            CHECK(a.rounds[r].test_accuracy <= 1.0);
        }
        CHECK(a.global.bit_identical(c.global));
    }
    SUBCASE("identical clients reduce to a single local_train") {
        Rng same(44);
        auto base = examples(same, "X", 50);
        std::vector<Client> twins;
        for (const char* s : {"A", "B", "C"}) {
            auto copy = base;
            for (auto& e : copy) e.subject = s;
            twins.emplace_back(s, std::move(copy), 5);
        }
        auto run = run_rounds(twins, spec, init, test, TrainingConfig{}, 1);
        auto solo = twins[0].local_train(spec, {1, init}, TrainingConfig{});
        for (std::size_t e = 0; e < solo.params.size(); ++e)
            for (std::size_t i = 0; i < solo.params.tensor(e).size(); ++i)
                CHECK(std::abs(run.global.tensor(e)[i] - solo.params.tensor(e)[i]) <= 1e-12);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(run_rounds(clients, spec, init, test, TrainingConfig{}, 0), ValidationError);
        CHECK_THROWS_AS(run_rounds({}, spec, init, test, TrainingConfig{}, 1), ValidationError);
    }
}


TEST_CASE("only parameters and scalars cross the client/server boundary") {
    static_assert(testing::reflect::field_count<Broadcast>() == 2);
    static_assert(testing::reflect::field_count<ClientUpdate>() == 6);
    static_assert(testing::reflect::payload_ok<Broadcast>());
    static_assert(testing::reflect::payload_ok<ClientUpdate>());

    // The checker itself rejects types that could carry examples.
    struct Leaky {
        ParameterSet params;
        std::vector<data::LabeledExample> batch;
    };
    struct Pointer {
        const data::LabeledExample* ex;
    };
    static_assert(!testing::reflect::payload_ok<Leaky>());
    static_assert(!testing::reflect::payload_ok<Pointer>());
    static_assert(!testing::reflect::payload_ok<data::LabeledExample>());

    // Both boundary functions have exactly these signatures: a broadcast in, an
    // update out; updates in, parameters out.
    static_assert(std::is_same_v<decltype(&Client::local_train),
                                 ClientUpdate (Client::*)(const models::ModelSpec&, const Broadcast&,
                                                          const TrainingConfig&) const>);
    static_assert(std::is_same_v<decltype(&fedavg_aggregate), ParameterSet (*)(std::span<const ClientUpdate>)>);
    // The client keeps its examples private: nothing but the constructor takes them.
    static_assert(!std::is_aggregate_v<Client>);
    CHECK(true);
}
