#include "doctest.h"

#include "spikefed/common/rng.hpp"
#include "spikefed/encoding/encoders.hpp"

#include <cmath>

using namespace spikefed;
using namespace spikefed::encoding;
using numerics::Tensor;

namespace {

Tensor random_window(Rng& rng, std::size_t ch, std::size_t len) {
    Tensor w({ch, len});
    for (auto& v : w.values()) v = rng.normal();
    return w;
}

bool binary(const Tensor& t) {
    for (double v : t.values())
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

}  // namespace

TEST_CASE("direct coding repeats the window") {
    Rng rng(3);
    const auto w = random_window(rng, 2, 5);
    auto one = encode_direct(w, 1);
    REQUIRE(one.size() == 1);
    CHECK(numerics::bit_equal(one[0], w));
    auto four = encode_direct(w, 4);
    REQUIRE(four.size() == 4);
    for (const auto& s : four) CHECK(numerics::bit_equal(s, w));
    CHECK_THROWS_AS(encode_direct(w, 0), ValidationError);
}

TEST_CASE("rate coding") {
    SUBCASE("extremes of the scaled range") {
        Tensor w = Tensor::vector({0.0, 1.0}).reshaped({1, 2});
        auto s = encode_rate(w, 200, 11);
        for (std::size_t t = 0; t < 200; ++t) {
            CHECK(s.tensor()[t * 2] == 0.0);
            CHECK(s.tensor()[t * 2 + 1] == 1.0);
        }
    }
    SUBCASE("law of large numbers at 0.5") {
        Tensor w = Tensor::vector({0.0, 0.5, 1.0}).reshaped({1, 3});
        const std::size_t steps = 10000;
        auto s = encode_rate(w, steps, 5);
        double count = 0;
        for (std::size_t t = 0; t < steps; ++t) count += s.tensor()[t * 3 + 1];
        CHECK(std::abs(count / steps - 0.5) <= 0.02);
    }
    SUBCASE("seeded determinism") {
        Rng rng(8);
        const auto w = random_window(rng, 4, 32);
        auto a = encode_rate(w, 20, 99);
        auto b = encode_rate(w, 20, 99);
        auto c = encode_rate(w, 20, 100);
        CHECK(numerics::bit_equal(a.tensor(), b.tensor()));
        CHECK_FALSE(numerics::bit_equal(a.tensor(), c.tensor()));
        CHECK(binary(a.tensor()));
        CHECK(a.shape() == numerics::Shape{20, 4, 32});
    }
    SUBCASE("different seeds share the expected rate") {
        Tensor w({1, 400});
        for (std::size_t i = 0; i < 400; ++i) w[i] = static_cast<double>(i % 5) / 4.0;  // mean 0.5
        auto a = encode_rate(w, 50, 1);
        auto b = encode_rate(w, 50, 2);
        CHECK(std::abs(a.firing_rate() - 0.5) < 0.02);
        CHECK(std::abs(b.firing_rate() - 0.5) < 0.02);
    }
    SUBCASE("constant window never fires") {
        Tensor w({2, 3});
        for (auto& v : w.values()) v = 4.0;
        CHECK(encode_rate(w, 10, 1).spike_count() == 0);
    }
}

TEST_CASE("delta coding") {
    SUBCASE("hand-simulated example") {
        Tensor w = Tensor::vector({0.0, 0.3, 0.1, 0.5}).reshaped({1, 4});
        auto s = encode_delta(w, 0.15);
        REQUIRE(s.shape() == numerics::Shape{1, 2, 4});
        const auto on = s.step(0);
        CHECK(on[0] == 0.0);
        CHECK(on[1] == 1.0);
        CHECK(on[2] == 0.0);
        CHECK(on[3] == 1.0);
        for (std::size_t t = 0; t < 4; ++t) CHECK(on[4 + t] == 0.0);
    }
    SUBCASE("constant signal is silent") {
        Tensor w({3, 16});
        for (auto& v : w.values()) v = -2.5;
        CHECK(encode_delta(w, 0.1).spike_count() == 0);
    }
    SUBCASE("negation swaps planes") {
        Rng rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            const auto w = random_window(rng, 3, 50);
            Tensor neg = w;
            for (auto& v : neg.values()) v = -v;
            const auto a = encode_delta(w, 0.3).step(0);
            const auto b = encode_delta(neg, 0.3).step(0);
            const std::size_t half = 3 * 50;
            for (std::size_t i = 0; i < half; ++i) {
                CHECK(a[i] == b[half + i]);
                CHECK(a[half + i] == b[i]);
            }
        }
    }
    SUBCASE("spike count is non-increasing in the threshold") {
        Rng rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            const auto w = random_window(rng, 2, 64);
            std::size_t prev = static_cast<std::size_t>(-1);
            for (double th : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
                const auto n = encode_delta(w, th).spike_count();
                CHECK(n <= prev);
                prev = n;
            }
        }
    }
    SUBCASE("at most one spike per position") {
        Rng rng(6);
        const auto w = random_window(rng, 2, 40);
        const auto s = encode_delta(w, 0.05).step(0);
        for (std::size_t i = 0; i < 80; ++i) CHECK(s[i] + s[80 + i] <= 1.0);
    }
    CHECK_THROWS_AS(encode_delta(Tensor({1, 2}), 0.0), ValidationError);
}

TEST_CASE("model-facing sequences") {
    Rng rng(1);
    const auto w = random_window(rng, 4, 10);
    EncoderConfig cfg;
    cfg.steps = 6;
    auto direct = encode(w, cfg, 0);
    CHECK(direct.repeated);
    CHECK(direct.step_count == 6);
    CHECK(numerics::bit_equal(direct.at(5), w));

    cfg.scheme = Scheme::Rate;
    cfg.seed = 12;
    auto r1 = encode(w, cfg, 7);
    auto r2 = encode(w, cfg, 7);
    auto r3 = encode(w, cfg, 8);
    REQUIRE(r1.steps.size() == 6);
    for (std::size_t s = 0; s < 6; ++s) CHECK(numerics::bit_equal(r1.at(s), r2.at(s)));
    bool differs = false;
    for (std::size_t s = 0; s < 6; ++s) differs |= !numerics::bit_equal(r1.at(s), r3.at(s));
    CHECK(differs);

    cfg.scheme = Scheme::Delta;
    auto d = encode(w, cfg, 0);
    CHECK(d.at(0).shape() == numerics::Shape{8, 10});
    CHECK(encoded_features(cfg, 4) == 8);

    cfg.steps = 0;
    CHECK_THROWS_AS(encode(w, cfg, 0), ValidationError);
    CHECK(parse_scheme("direct-current") == Scheme::DirectCurrent);
    CHECK_THROWS_AS(parse_scheme("latency"), ValidationError);
}
