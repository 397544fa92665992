#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "codedcache/cache_state.hpp"
#include "codedcache/online.hpp"
#include "codedcache/types.hpp"

namespace codedcache {

enum class PolicyKind { backend, lru, lfu, agar, optimal, online };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

/// Uniform driver interface for all caching policies. The simulator serves a
/// request against the current cache, then calls record() with the observed
/// samples and decide() for the caching update, strictly in trace order.
class CachePolicy {
public:
    virtual ~CachePolicy() = default;

    virtual PolicyKind kind() const = 0;
    virtual const CacheState& cache() const = 0;

    virtual void record(double /*now_ms*/, ItemId /*item*/,
                        const std::vector<LatencySample>& /*samples*/) {}

    virtual OnlineDecision decide(double now_ms, ItemId item) = 0;

    /// Called after a degraded read recovered a data chunk, so policies that
    /// hold the item can keep the recovered chunk and skip future decodes.
    virtual void keep_recovered_chunk(ItemId /*item*/, ChunkIndex /*chunk*/) {}
};

/// No caching at all; every request goes to the backend.
class BackendPolicy final : public CachePolicy {
public:
    explicit BackendPolicy(int n_items, int k_data) : cache_(n_items, k_data, 0) {}
    PolicyKind kind() const override { return PolicyKind::backend; }
    const CacheState& cache() const override { return cache_; }
    OnlineDecision decide(double, ItemId) override { return {}; }

private:
    CacheState cache_;
};

/// Whole-item LRU over a chunk budget: an item occupies K chunks or none.
class LruPolicy final : public CachePolicy {
public:
    LruPolicy(int n_items, int k_data, long capacity);
    PolicyKind kind() const override { return PolicyKind::lru; }
    const CacheState& cache() const override { return cache_; }
    OnlineDecision decide(double now_ms, ItemId item) override;

private:
    CacheState cache_;
    std::map<long, ItemId> by_recency_;     // use counter -> item
    std::vector<long> last_use_;            // per item, -1 if uncached
    long tick_ = 0;
};

/// Whole-item LFU with decayed counters; ties evict the least recent.
class LfuPolicy final : public CachePolicy {
public:
    LfuPolicy(int n_items, int k_data, long capacity, double decay_ratio, double period_ms);
    PolicyKind kind() const override { return PolicyKind::lfu; }
    const CacheState& cache() const override { return cache_; }
    OnlineDecision decide(double now_ms, ItemId item) override;

private:
    CacheState cache_;
    DreCounter counter_;
    std::vector<long> last_use_;
    long tick_ = 0;
};

/// Greedy chunk-level configurator: every `interval` requests it rebuilds
/// the whole configuration by repeatedly taking the largest per-chunk gain
/// tau[m][e+1] - tau[m][e] until the budget is spent. Static in between.
class AgarPolicy final : public CachePolicy {
public:
    AgarPolicy(const PlacementMap& placement, int n_nodes, long capacity, long interval,
               const OnlineConfig& estimators = {});
    PolicyKind kind() const override { return PolicyKind::agar; }
    const CacheState& cache() const override { return cache_; }
    void record(double now_ms, ItemId item, const std::vector<LatencySample>& samples) override;
    OnlineDecision decide(double now_ms, ItemId item) override;
    void keep_recovered_chunk(ItemId item, ChunkIndex chunk) override;
    void set_failed_server(ChunkLocation failed);

    /// One greedy configuration pass over a valuation snapshot.
    static std::vector<int> greedy_configuration(const ValuationArray& valuation, long capacity);

private:
    void reconfigure(double now_ms);
    double chunk_latency_view(ItemId item, ChunkIndex k) const;

    const PlacementMap& placement_;
    long capacity_;
    long interval_;
    CacheState cache_;
    DreCounter dre_;
    EwmaLatency ewma_;
    ValuationArray valuation_;
    bool has_failure_ = false;
    ChunkLocation failed_{};
    long requests_seen_ = 0;
};

/// Offline-optimal static configuration; the experiment driver computes the
/// assignment from full-trace knowledge and installs it up front.
class OptimalPolicy final : public CachePolicy {
public:
    OptimalPolicy(int n_items, int k_data, long capacity) : cache_(n_items, k_data, capacity) {}
    PolicyKind kind() const override { return PolicyKind::optimal; }
    const CacheState& cache() const override { return cache_; }
    OnlineDecision decide(double, ItemId) override { return {}; }
    void keep_recovered_chunk(ItemId item, ChunkIndex chunk) override;

    /// Installs eps per item; chunk selections follow the valuation order.
    void install(const std::vector<int>& eps, const ValuationArray& valuation);

private:
    CacheState cache_;
};

/// Adapter running the per-request online engine as a policy.
class OnlinePolicy final : public CachePolicy {
public:
    OnlinePolicy(const PlacementMap& placement, int n_nodes, long capacity,
                 const OnlineConfig& config)
        : engine_(placement, n_nodes, capacity, config) {}
    PolicyKind kind() const override { return PolicyKind::online; }
    const CacheState& cache() const override { return engine_.cache(); }
    void record(double now_ms, ItemId item, const std::vector<LatencySample>& samples) override {
        engine_.record_request(now_ms, item, samples);
    }
    OnlineDecision decide(double now_ms, ItemId item) override {
        return engine_.on_request(now_ms, item);
    }
    void keep_recovered_chunk(ItemId item, ChunkIndex chunk) override;
    OnlineEngine& engine() { return engine_; }

private:
    OnlineEngine engine_;
};

}  // namespace codedcache
