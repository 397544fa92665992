#include "codedcache/baselines.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "codedcache/cache_ops.hpp"

namespace codedcache {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::backend: return "backend";
        case PolicyKind::lru: return "lru";
        case PolicyKind::lfu: return "lfu";
        case PolicyKind::agar: return "agar";
        case PolicyKind::optimal: return "optimal";
        case PolicyKind::online: return "online";
    }
    return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
    if (name == "backend") return PolicyKind::backend;
    if (name == "lru") return PolicyKind::lru;
    if (name == "lfu") return PolicyKind::lfu;
    if (name == "agar") return PolicyKind::agar;
    if (name == "optimal") return PolicyKind::optimal;
    if (name == "online") return PolicyKind::online;
    throw std::invalid_argument("unknown policy: " + name);
}

namespace {

std::vector<ChunkIndex> whole_item(int k) {
    std::vector<ChunkIndex> all(k);
    for (int i = 0; i < k; ++i) all[i] = i;
    return all;
}

// Latency of one cached chunk according to a valuation snapshot.
double latency_from_valuation(const ValuationArray& v, ItemId item, ChunkIndex chunk) {
    const auto& order = v.sorted_chunks(item);
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == chunk) return v.sorted_latency(item)[i];
    return 0.0;
}

}  // namespace

// ---------------------------------------------------------------- LRU ----

LruPolicy::LruPolicy(int n_items, int k_data, long capacity)
    : cache_(n_items, k_data, capacity), last_use_(n_items, -1) {}

OnlineDecision LruPolicy::decide(double, ItemId item) {
    OnlineDecision d;
    d.eps_before = cache_.eps(item);
    d.eps_after = d.eps_before;
    const int k = cache_.k_data();
    ++tick_;

    if (d.eps_before == k) {  // hit: refresh recency
        by_recency_.erase(last_use_[item]);
        last_use_[item] = tick_;
        by_recency_[tick_] = item;
        return d;
    }
    if (k > cache_.capacity()) return d;  // item can never fit

    while (cache_.used() + k > cache_.capacity()) {
        const auto oldest = by_recency_.begin();
        const ItemId victim = oldest->second;
        by_recency_.erase(oldest);
        last_use_[victim] = -1;
        cache_.set_decision(victim, 0, {});
        d.evicted.push_back(victim);
    }
    cache_.set_decision(item, k, whole_item(k));
    last_use_[item] = tick_;
    by_recency_[tick_] = item;
    d.eps_after = k;
    return d;
}

// ---------------------------------------------------------------- LFU ----

LfuPolicy::LfuPolicy(int n_items, int k_data, long capacity, double decay_ratio,
                     double period_ms)
    : cache_(n_items, k_data, capacity),
      counter_(n_items, decay_ratio, period_ms),
      last_use_(n_items, -1) {}

OnlineDecision LfuPolicy::decide(double now_ms, ItemId item) {
    OnlineDecision d;
    d.eps_before = cache_.eps(item);
    d.eps_after = d.eps_before;
    const int k = cache_.k_data();
    ++tick_;
    counter_.increment(item, now_ms);
    last_use_[item] = tick_;

    if (d.eps_before == k) return d;
    if (k > cache_.capacity()) return d;

    while (cache_.used() + k > cache_.capacity()) {
        ItemId victim = -1;
        double victim_count = 0.0;
        for (ItemId n : cache_.cached_items()) {
            const double c = counter_.rate(n, now_ms);
            if (victim < 0 || c < victim_count ||
                (c == victim_count && last_use_[n] < last_use_[victim])) {
                victim = n;
                victim_count = c;
            }
        }
        cache_.set_decision(victim, 0, {});
        d.evicted.push_back(victim);
    }
    cache_.set_decision(item, k, whole_item(k));
    d.eps_after = k;
    return d;
}

// --------------------------------------------------------------- Agar ----

AgarPolicy::AgarPolicy(const PlacementMap& placement, int n_nodes, long capacity, long interval,
                       const OnlineConfig& estimators)
    : placement_(placement),
      capacity_(capacity),
      interval_(interval),
      cache_(placement.n_items(), placement.k_data(), capacity),
      dre_(placement.n_items(), estimators.dre_decay_ratio, estimators.dre_period_s * 1000.0),
      ewma_(n_nodes, estimators.ewma_alpha) {
    const int m = placement.n_items();
    const int k = placement.k_data();
    std::vector<std::vector<double>> tau(m, std::vector<double>(k + 1, 0.0));
    std::vector<std::vector<ChunkIndex>> chunks(m, whole_item(k));
    std::vector<std::vector<double>> lat(m, std::vector<double>(k, 0.0));
    valuation_ = ValuationArray(std::move(tau), std::move(chunks), std::move(lat));
}

void AgarPolicy::set_failed_server(ChunkLocation failed) {
    has_failure_ = true;
    failed_ = failed;
}

void AgarPolicy::record(double now_ms, ItemId item, const std::vector<LatencySample>& samples) {
    dre_.increment(item, now_ms);
    for (const LatencySample& s : samples) ewma_.record(s.node, s.latency_ms);
}

double AgarPolicy::chunk_latency_view(ItemId item, ChunkIndex k) const {
    return estimated_chunk_latency(placement_, item, k, ewma_, has_failure_, failed_);
}

std::vector<int> AgarPolicy::greedy_configuration(const ValuationArray& valuation,
                                                  long capacity) {
    const int m = valuation.n_items();
    const int k = valuation.k_data();
    std::vector<int> eps(m, 0);
    // Max-heap of the next per-chunk gain of each item.
    using Entry = std::tuple<double, ItemId, int>;  // (gain, item, next level)
    auto less = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
        return std::get<2>(a) > std::get<2>(b);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(less)> heap(less);
    for (ItemId i = 0; i < m; ++i)
        if (k >= 1) heap.emplace(valuation.value(i, 1) - valuation.value(i, 0), i, 1);

    long budget = capacity;
    while (budget > 0 && !heap.empty()) {
        const auto [gain, item, level] = heap.top();
        heap.pop();
        if (gain <= 0.0) break;  // nothing left worth caching
        eps[item] = level;
        --budget;
        if (level < k)
            heap.emplace(valuation.value(item, level + 1) - valuation.value(item, level), item,
                         level + 1);
    }
    return eps;
}

void AgarPolicy::reconfigure(double now_ms) {
    const int m = placement_.n_items();
    const int k = placement_.k_data();
    std::vector<double> lat(k);
    std::vector<NodeId> nodes(k);
    for (ItemId i = 0; i < m; ++i) {
        for (int c = 0; c < k; ++c) {
            lat[c] = chunk_latency_view(i, c);
            nodes[c] = placement_.data_chunk(i, c).node;
        }
        valuation_.refresh_row(i, lat, dre_.rate(i, now_ms), &nodes);
    }
    const std::vector<int> eps = greedy_configuration(valuation_, capacity_);
    cache_.clear();
    for (ItemId i = 0; i < m; ++i) {
        if (eps[i] == 0) continue;
        const auto& order = valuation_.sorted_chunks(i);
        cache_.set_decision(i, eps[i],
                            std::vector<ChunkIndex>(order.begin(), order.begin() + eps[i]));
    }
}

OnlineDecision AgarPolicy::decide(double now_ms, ItemId item) {
    OnlineDecision d;
    d.eps_before = cache_.eps(item);
    if (requests_seen_ % interval_ == 0) {
        std::vector<char> was_cached(placement_.n_items(), 0);
        for (ItemId n : cache_.cached_items()) was_cached[n] = 1;
        reconfigure(now_ms);
        for (ItemId n = 0; n < placement_.n_items(); ++n)
            if (was_cached[n] && cache_.eps(n) == 0) d.evicted.push_back(n);
    }
    ++requests_seen_;
    d.eps_after = cache_.eps(item);
    return d;
}

void AgarPolicy::keep_recovered_chunk(ItemId item, ChunkIndex chunk) {
    keep_recovered_data_chunk(cache_, item, chunk, [this](ItemId i, ChunkIndex c) {
        return latency_from_valuation(valuation_, i, c);
    });
}

// ------------------------------------------------------------- Optimal ----

void OptimalPolicy::install(const std::vector<int>& eps, const ValuationArray& valuation) {
    cache_.clear();
    for (ItemId i = 0; i < static_cast<ItemId>(eps.size()); ++i) {
        if (eps[i] == 0) continue;
        const auto& order = valuation.sorted_chunks(i);
        cache_.set_decision(i, eps[i],
                            std::vector<ChunkIndex>(order.begin(), order.begin() + eps[i]));
    }
    valuation_snapshot_ = valuation;
}

void OptimalPolicy::keep_recovered_chunk(ItemId item, ChunkIndex chunk) {
    keep_recovered_data_chunk(cache_, item, chunk, [this](ItemId i, ChunkIndex c) {
        return latency_from_valuation(valuation_snapshot_, i, c);
    });
}

// -------------------------------------------------------------- Online ----

void OnlinePolicy::keep_recovered_chunk(ItemId item, ChunkIndex chunk) {
    keep_recovered_data_chunk(engine_.cache_for_recovery(), item, chunk,
                              [this](ItemId i, ChunkIndex c) {
                                  return engine_.effective_chunk_latency(i, c);
                              });
}

}  // namespace codedcache
