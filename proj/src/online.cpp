#include "codedcache/online.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <stdexcept>

namespace codedcache {

namespace {

ValuationArray zero_valuation(int m_items, int k) {
    std::vector<std::vector<double>> tau(m_items, std::vector<double>(k + 1, 0.0));
    std::vector<std::vector<ChunkIndex>> chunks(m_items, std::vector<ChunkIndex>(k));
    std::vector<std::vector<double>> lat(m_items, std::vector<double>(k, 0.0));
    for (auto& c : chunks)
        for (int i = 0; i < k; ++i) c[i] = i;
    return ValuationArray(std::move(tau), std::move(chunks), std::move(lat));
}

}  // namespace

OnlineEngine::OnlineEngine(const PlacementMap& placement, int n_nodes, long capacity,
                           const OnlineConfig& config)
    : placement_(placement),
      capacity_(capacity),
      config_(config),
      cache_(placement.n_items(), placement.k_data(), capacity),
      valuation_(zero_valuation(placement.n_items(), placement.k_data())),
      dre_(placement.n_items(), config.dre_decay_ratio, config.dre_period_s * 1000.0),
      ewma_(n_nodes, config.ewma_alpha) {}

void OnlineEngine::set_failed_server(ChunkLocation failed) {
    has_failure_ = true;
    failed_ = failed;
}

double estimated_chunk_latency(const PlacementMap& placement, ItemId item, ChunkIndex k,
                               const EwmaLatency& ewma, bool has_failure, ChunkLocation failed) {
    const auto estimate = [&](NodeId node) {
        return ewma.has_estimate(node) ? ewma.estimate(node) : ewma.fallback();
    };
    const ChunkLocation& loc = placement.data_chunk(item, k);
    if (!has_failure || !(loc == failed)) return estimate(loc.node);
    // Unavailable data chunk: it is served through the cheapest live parity.
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < placement.r_parity(); ++r) {
        const ChunkLocation& ploc = placement.parity_chunk(item, r);
        if (ploc == failed) continue;
        best = std::min(best, estimate(ploc.node));
    }
    if (!std::isfinite(best))
        throw std::runtime_error("online: no live parity chunk for failed data chunk");
    return best;
}

double OnlineEngine::node_estimate(NodeId node) const {
    return ewma_.has_estimate(node) ? ewma_.estimate(node) : ewma_.fallback();
}

double OnlineEngine::effective_chunk_latency(ItemId item, ChunkIndex k) const {
    return estimated_chunk_latency(placement_, item, k, ewma_, has_failure_, failed_);
}

void OnlineEngine::record_request(double now_ms, ItemId item,
                                  const std::vector<LatencySample>& samples) {
    placement_.check_item(item);
    dre_.increment(item, now_ms);
    for (const LatencySample& s : samples) ewma_.record(s.node, s.latency_ms);
}

void OnlineEngine::refresh_row(double now_ms, ItemId item) {
    const int k = placement_.k_data();
    std::vector<double> lat(k);
    std::vector<NodeId> nodes(k);
    for (int c = 0; c < k; ++c) {
        lat[c] = effective_chunk_latency(item, c);
        nodes[c] = placement_.data_chunk(item, c).node;
    }
    valuation_.refresh_row(item, lat, dre_.rate(item, now_ms), &nodes);
}

double OnlineEngine::current_objective() const {
    double theta = 0.0;
    for (ItemId n : cache_.cached_items()) theta += valuation_.value(n, cache_.eps(n));
    return theta;
}

OnlineDecision OnlineEngine::on_request(double now_ms, ItemId item) {
    placement_.check_item(item);
    const int k = placement_.k_data();
    OnlineDecision d;
    d.eps_before = cache_.eps(item);
    d.eps_after = d.eps_before;

    refresh_row(now_ms, item);

    if (d.eps_before == k) return d;  // already fully cached
    if (capacity_ < k) return d;      // no decision can ever cache K chunks

    if (cache_.used() <= capacity_ - k) {
        // Plenty of room: cache the item whole.
        const auto& order = valuation_.sorted_chunks(item);
        cache_.set_decision(item, k, std::vector<ChunkIndex>(order.begin(), order.end()));
        d.eps_after = k;
        return d;
    }

    // Cache nearly full: gather replacement candidates with the lowest
    // valuation per cached chunk until the requested item fits whole.
    std::vector<ItemId> candidates = {item};
    std::vector<char> chosen(placement_.n_items(), 0);
    chosen[item] = 1;
    long avail = capacity_ - cache_.used() + d.eps_before;
    while (avail < k) {
        ItemId best = -1;
        double best_ratio = 0.0;
        for (ItemId n : cache_.cached_items()) {
            if (chosen[n]) continue;
            const double ratio = valuation_.value(n, cache_.eps(n)) / cache_.eps(n);
            if (best < 0 || ratio < best_ratio) {
                best = n;
                best_ratio = ratio;
            }
        }
        if (best < 0)
            throw std::logic_error("online: candidate pool exhausted before K chunks freed");
        chosen[best] = 1;
        candidates.push_back(best);
        avail += cache_.eps(best);
    }
    assert(avail <= 2 * k - 1);
    assert(static_cast<int>(candidates.size()) <= k + 1);

    std::sort(candidates.begin(), candidates.end());
    for (ItemId n : candidates)
        if (n != item) refresh_row(now_ms, n);

    // Free the candidates' capacity and re-solve the small instance exactly.
    std::vector<int> old_eps(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        old_eps[i] = cache_.eps(candidates[i]);
        if (old_eps[i] > 0) cache_.set_decision(candidates[i], 0, {});
    }

    std::vector<std::vector<double>> sub_tau(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        sub_tau[i] = valuation_.row(candidates[i]);
    std::vector<std::vector<ChunkIndex>> sub_chunks(candidates.size());
    std::vector<std::vector<double>> sub_lat(candidates.size(), std::vector<double>(k, 0.0));
    for (auto& c : sub_chunks) {
        c.resize(k);
        for (int i = 0; i < k; ++i) c[i] = i;
    }
    ValuationArray sub(std::move(sub_tau), std::move(sub_chunks), std::move(sub_lat));

    SolveStats stats;
    const Assignment a = optimal_offline_serial(sub, avail, config_.solver, &stats);

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const ItemId n = candidates[i];
        const int eps = a.eps[i];
        if (eps > 0) {
            const auto& order = valuation_.sorted_chunks(n);
            cache_.set_decision(n, eps,
                                std::vector<ChunkIndex>(order.begin(), order.begin() + eps));
        }
        if (old_eps[i] > 0 && eps == 0) d.evicted.push_back(n);
    }
    assert(cache_.used() <= capacity_);

    d.eps_after = cache_.eps(item);
    d.subproblem_theta = a.objective;
    d.partitions_examined = stats.partitions_examined;
    d.candidate_count = static_cast<int>(candidates.size());
    d.freed_capacity = avail;
    return d;
}

}  // namespace codedcache
