#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "codedcache/valuation.hpp"
#include "test_util.hpp"

using namespace codedcache;
using testutil::SplitMix64;

namespace {

// Storage nodes 0..5 as deployed in the reference system; latencies are the
// measured averages from the Victoria frontend.
const std::vector<double> kVictoria = {479.3, 345.5, 686.3, 803.9, 128.3, 179.3};
constexpr NodeId kTokyo = 0;
constexpr NodeId kOregon = 4;
constexpr NodeId kNorthCalifornia = 5;
constexpr NodeId kOhio = 1;

PlacementMap single_item_placement(const std::vector<NodeId>& nodes) {
    PlacementMap p;
    p.data_loc.resize(1);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        p.data_loc[0].push_back({nodes[i], static_cast<ServerId>(i)});
    p.parity_loc.resize(1);
    return p;
}

// Random placement/profile/rate instance for property checks.
struct RandomInstance {
    PlacementMap placement;
    LatencyProfile profile;
    std::vector<double> rates;
};

RandomInstance random_instance(SplitMix64& rng, int m_items, int k, int n_nodes) {
    RandomInstance inst;
    inst.profile.node_latency_ms.resize(n_nodes);
    for (double& l : inst.profile.node_latency_ms) l = rng.uniform(20.0, 900.0);
    inst.placement.data_loc.resize(m_items);
    inst.placement.parity_loc.resize(m_items);
    for (int m = 0; m < m_items; ++m) {
        for (int c = 0; c < k; ++c)
            inst.placement.data_loc[m].push_back(
                {static_cast<NodeId>(rng.range(0, n_nodes - 1)), static_cast<ServerId>(c)});
        inst.rates.push_back(rng.uniform(0.0, 5.0));
    }
    return inst;
}

}  // namespace

TEST_CASE("chunk latency is the hosting node's profile latency") {
    LatencyProfile victoria{kVictoria};
    auto p = single_item_placement({kTokyo, kOregon, kNorthCalifornia});
    CHECK(chunk_latency(p, victoria, 0, 0) == 479.3);
    CHECK(chunk_latency(p, victoria, 0, 1) == 128.3);
    CHECK_THROWS_AS(chunk_latency(p, victoria, 0, 9), std::domain_error);
    CHECK_THROWS_AS(chunk_latency(p, victoria, 3, 0), std::domain_error);
}

TEST_CASE("constant profiles make every chunk equally distant") {
    LatencyProfile flat{{250.0, 250.0, 250.0}};
    auto p = single_item_placement({0, 1, 2});
    for (ChunkIndex k = 0; k < 3; ++k) CHECK(chunk_latency(p, flat, 0, k) == 250.0);
}

TEST_CASE("uncached items are as slow as their farthest chunk") {
    // Victoria view of an item whose last two chunks sit in Tokyo.
    LatencyProfile victoria{kVictoria};
    auto p = single_item_placement({kOregon, kOregon, kNorthCalifornia, kOhio, kTokyo, kTokyo});
    const auto v = build_valuation(p, victoria, {1.0});
    CHECK(v.item_latency(0, 0) == 479.3);
    CHECK(v.item_latency(0, 6) == 0.0);
}

TEST_CASE("partial caching exposes the next-slowest chunk") {
    LatencyProfile profile{{800.0, 600.0, 100.0}};
    auto p = single_item_placement({0, 1, 2});
    const auto v = build_valuation(p, profile, {1.0});
    CHECK(v.item_latency(0, 1) == 600.0);
    CHECK_THROWS_AS(v.item_latency(0, 4), std::domain_error);
}

TEST_CASE("valuation row follows the sorted latency gaps") {
    LatencyProfile profile{{800.0, 600.0, 100.0}};
    auto p = single_item_placement({0, 1, 2});
    const auto v = build_valuation(p, profile, {2.0});
    CHECK(v.row(0) == std::vector<double>{0.0, 400.0, 1400.0, 1600.0});
    CHECK(v.sorted_chunks(0) == std::vector<ChunkIndex>{0, 1, 2});
}

TEST_CASE("zero request rate zeroes the whole row") {
    LatencyProfile profile{{800.0, 600.0, 100.0}};
    auto p = single_item_placement({0, 1, 2});
    const auto v = build_valuation(p, profile, {0.0});
    CHECK(v.row(0) == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("equidistant chunks only pay off when fully cached") {
    LatencyProfile profile{{300.0, 300.0}};
    auto p = single_item_placement({0, 1});
    const auto v = build_valuation(p, profile, {1.0});
    CHECK(v.row(0) == std::vector<double>{0.0, 0.0, 300.0});
}

TEST_CASE("latency ties order by node id then chunk index") {
    LatencyProfile profile{{500.0, 500.0, 500.0}};
    auto p = single_item_placement({2, 0, 0});
    const auto v = build_valuation(p, profile, {1.0});
    // Chunks 1 and 2 share node 0, chunk 0 sits on node 2; equal latencies
    // order by node id first, then chunk index.
    CHECK(v.sorted_chunks(0) == std::vector<ChunkIndex>{1, 2, 0});
}

TEST_CASE("negative rates are rejected") {
    LatencyProfile profile{{100.0}};
    auto p = single_item_placement({0});
    CHECK_THROWS_AS(build_valuation(p, profile, {-1.0}), std::invalid_argument);
}

TEST_CASE("item latency never increases and tau never decreases in eps") {
    SplitMix64 rng(0xabc1);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = static_cast<int>(rng.range(1, 6));
        const int m_items = static_cast<int>(rng.range(1, 10));
        auto inst = random_instance(rng, m_items, k, 5);
        const auto v = build_valuation(inst.placement, inst.profile, inst.rates);
        for (int m = 0; m < m_items; ++m) {
            for (int e = 1; e <= k; ++e) {
                CHECK(v.item_latency(m, e) <= v.item_latency(m, e - 1));
                CHECK(v.value(m, e) >= v.value(m, e - 1));
            }
            CHECK(v.value(m, 0) == 0.0);
            CHECK(v.value(m, k) == doctest::Approx(v.item_latency(m, 0) * inst.rates[m]));
        }
    }
}

TEST_CASE("tau and the residual latency tell one consistent story") {
    SplitMix64 rng(0xabc2);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = static_cast<int>(rng.range(1, 5));
        const int m_items = static_cast<int>(rng.range(1, 8));
        auto inst = random_instance(rng, m_items, k, 4);
        const auto v = build_valuation(inst.placement, inst.profile, inst.rates);
        for (int m = 0; m < m_items; ++m) {
            const double l_max = v.item_latency(m, 0);
            for (int e = 0; e < k; ++e) {
                CHECK(v.value(m, e) ==
                      doctest::Approx((l_max - v.item_latency(m, e)) * inst.rates[m])
                          .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("total latency plus total reduced value is decision-invariant") {
    SplitMix64 rng(0xabc3);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = static_cast<int>(rng.range(1, 5));
        const int m_items = static_cast<int>(rng.range(1, 8));
        auto inst = random_instance(rng, m_items, k, 4);
        const auto v = build_valuation(inst.placement, inst.profile, inst.rates);

        double full = 0.0;
        for (int m = 0; m < m_items; ++m) full += v.item_latency(m, 0) * inst.rates[m];

        std::vector<int> eps(m_items);
        for (int m = 0; m < m_items; ++m) eps[m] = static_cast<int>(rng.range(0, k));
        double combined = 0.0;
        for (int m = 0; m < m_items; ++m)
            combined += v.item_latency(m, eps[m]) * inst.rates[m] + v.value(m, eps[m]);
        CHECK(combined == doctest::Approx(full).epsilon(1e-9));
    }
}

TEST_CASE("refresh_row rebuilds a row from new latencies") {
    auto v = testutil::make_valuation({{0, 0, 0}, {0, 0, 0}});
    v.refresh_row(0, {800.0, 600.0}, 2.0);
    CHECK(v.row(0) == std::vector<double>{0.0, 400.0, 1600.0});
    CHECK(v.sorted_chunks(0) == std::vector<ChunkIndex>{0, 1});
    std::vector<NodeId> nodes = {3, 1};
    v.refresh_row(1, {500.0, 500.0}, 1.0, &nodes);
    CHECK(v.sorted_chunks(1) == std::vector<ChunkIndex>{1, 0});
}
