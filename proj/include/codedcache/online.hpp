#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "codedcache/assignment.hpp"
#include "codedcache/cache_state.hpp"
#include "codedcache/types.hpp"
#include "codedcache/valuation.hpp"

namespace codedcache {

/// Decayed per-item request counter: +1 per read, multiplied by decay_ratio
/// once per period of simulated time. Decay is applied lazily per item.
class DreCounter {
public:
    DreCounter() = default;
    DreCounter(int n_items, double decay_ratio, double period_ms)
        : value_(n_items, 0.0), epoch_(n_items, 0), ratio_(decay_ratio), period_ms_(period_ms) {}

    void increment(ItemId item, double now_ms) {
        const long e = epoch_of(now_ms);
        value_[item] = decayed(item, e) + 1.0;
        epoch_[item] = e;
    }

    double rate(ItemId item, double now_ms) const { return decayed(item, epoch_of(now_ms)); }

    double decay_ratio() const { return ratio_; }
    double period_ms() const { return period_ms_; }

private:
    long epoch_of(double now_ms) const {
        return period_ms_ > 0.0 ? static_cast<long>(now_ms / period_ms_) : 0;
    }
    double decayed(ItemId item, long epoch_now) const {
        const long behind = epoch_now - epoch_[item];
        if (behind <= 0) return value_[item];
        double v = value_[item];
        for (long i = 0; i < behind && v > 0.0; ++i) v *= ratio_;
        return v;
    }

    std::vector<double> value_;
    std::vector<long> epoch_;
    double ratio_ = 0.5;
    double period_ms_ = 10'000.0;
};

/// Per-node exponentially weighted latency estimate. The first sample seeds
/// the estimate directly so unseen nodes never look free.
class EwmaLatency {
public:
    EwmaLatency() = default;
    EwmaLatency(int n_nodes, double alpha)
        : estimate_(n_nodes, 0.0), seen_(n_nodes, 0), alpha_(alpha) {}

    void record(NodeId node, double sample_ms) {
        if (seen_[node]) {
            estimate_[node] = alpha_ * estimate_[node] + (1.0 - alpha_) * sample_ms;
        } else {
            estimate_[node] = sample_ms;
            seen_[node] = 1;
        }
    }

    bool has_estimate(NodeId node) const { return seen_[node] != 0; }
    double estimate(NodeId node) const {
        if (!seen_[node]) throw std::domain_error("EwmaLatency: node has no samples yet");
        return estimate_[node];
    }
    double alpha() const { return alpha_; }

    /// Mean over seen nodes; prior for nodes never contacted.
    double fallback() const {
        double sum = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < estimate_.size(); ++i) {
            if (seen_[i]) {
                sum += estimate_[i];
                ++n;
            }
        }
        return n > 0 ? sum / n : 1.0;
    }

private:
    std::vector<double> estimate_;
    std::vector<char> seen_;
    double alpha_ = 0.8;
};

struct OnlineConfig {
    double dre_decay_ratio = 0.5;
    double dre_period_s = 10.0;
    double ewma_alpha = 0.8;
    SolveOptions solver;
};

/// One observed chunk fetch: the node contacted and its measured latency.
struct LatencySample {
    NodeId node;
    double latency_ms;
};

struct OnlineDecision {
    int eps_before = 0;
    int eps_after = 0;
    std::vector<ItemId> evicted;
    double subproblem_theta = 0.0;
    std::uint64_t partitions_examined = 0;
    int candidate_count = 0;   // |M'| when the sub-problem ran, else 0
    long freed_capacity = 0;   // capacity given to the sub-problem
};

/// Per-request caching decisions driven by the decayed popularity counters
/// and the EWMA latency estimates. Requests must be fed strictly in order;
/// the engine is single-threaded by contract.
class OnlineEngine {
public:
    OnlineEngine(const PlacementMap& placement, int n_nodes, long capacity,
                 const OnlineConfig& config = {});

    /// Marks one storage server as failed; its data chunks are valued at the
    /// cheapest live parity's estimate from now on.
    void set_failed_server(ChunkLocation failed);

    /// Estimator update after serving a request: one DRE tick for the item,
    /// one EWMA sample per fetched chunk.
    void record_request(double now_ms, ItemId item, const std::vector<LatencySample>& samples);

    /// Caching decision for the request that was just served.
    OnlineDecision on_request(double now_ms, ItemId item);

    const CacheState& cache() const { return cache_; }
    const ValuationArray& valuation() const { return valuation_; }
    const DreCounter& popularity() const { return dre_; }
    const EwmaLatency& latency() const { return ewma_; }

    /// Reduced-latency objective of the current decision on the stored
    /// valuation snapshot.
    double current_objective() const;

    /// Estimated latency of fetching data chunk k of an item, with failed
    /// chunks replaced by their cheapest live parity.
    double effective_chunk_latency(ItemId item, ChunkIndex k) const;

    /// Keeps a recovered data chunk in place of the cheapest cached chunk.
    void keep_recovered_chunk(ItemId item, ChunkIndex chunk);

private:
    void refresh_row(double now_ms, ItemId item);
    double node_estimate(NodeId node) const;

    const PlacementMap& placement_;
    long capacity_;
    OnlineConfig config_;
    CacheState cache_;
    ValuationArray valuation_;
    DreCounter dre_;
    EwmaLatency ewma_;
    bool has_failure_ = false;
    ChunkLocation failed_{};
};

/// EWMA view of one data chunk's fetch latency, substituting the cheapest
/// live parity estimate when the chunk sits on the failed server (nodes
/// without samples fall back to the mean of the seen estimates).
double estimated_chunk_latency(const PlacementMap& placement, ItemId item, ChunkIndex k,
                               const EwmaLatency& ewma, bool has_failure, ChunkLocation failed);

}  // namespace codedcache
