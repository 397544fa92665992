#include "codedcache/valuation.hpp"

#include <algorithm>
#include <cmath>

namespace codedcache {

ValuationArray::ValuationArray(std::vector<std::vector<double>> tau,
                               std::vector<std::vector<ChunkIndex>> sorted_chunks,
                               std::vector<std::vector<double>> sorted_latency)
    : tau_(std::move(tau)),
      sorted_chunks_(std::move(sorted_chunks)),
      sorted_latency_(std::move(sorted_latency)) {
    k_ = tau_.empty() ? 0 : static_cast<int>(tau_[0].size()) - 1;
}

void ValuationArray::refresh_row(ItemId item, const std::vector<double>& chunk_latency_ms,
                                 double rate, const std::vector<NodeId>* chunk_node) {
    check(item, 0);
    if (static_cast<int>(chunk_latency_ms.size()) != k_)
        throw std::invalid_argument("ValuationArray: refresh needs one latency per data chunk");
    if (rate < 0.0) throw std::invalid_argument("ValuationArray: negative request rate");

    std::vector<ChunkIndex>& order = sorted_chunks_[item];
    order.resize(k_);
    for (int k = 0; k < k_; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](ChunkIndex a, ChunkIndex b) {
        if (chunk_latency_ms[a] != chunk_latency_ms[b])
            return chunk_latency_ms[a] > chunk_latency_ms[b];
        if (chunk_node && (*chunk_node)[a] != (*chunk_node)[b])
            return (*chunk_node)[a] < (*chunk_node)[b];
        return a < b;
    });

    std::vector<double>& lat = sorted_latency_[item];
    lat.resize(k_);
    for (int k = 0; k < k_; ++k) lat[k] = chunk_latency_ms[order[k]];

    std::vector<double>& row = tau_[item];
    row.assign(k_ + 1, 0.0);
    for (int j = 1; j < k_; ++j) row[j] = (lat[0] - lat[j]) * rate;
    row[k_] = lat[0] * rate;
}

double chunk_latency(const PlacementMap& placement, const LatencyProfile& profile, ItemId item,
                     ChunkIndex k) {
    return profile.latency(placement.data_chunk(item, k).node);
}

ValuationArray build_valuation(const PlacementMap& placement, const LatencyProfile& profile,
                               const std::vector<double>& rates) {
    const int m_items = placement.n_items();
    if (static_cast<int>(rates.size()) != m_items)
        throw std::invalid_argument("build_valuation: one rate per item required");
    const int k = placement.k_data();

    std::vector<std::vector<double>> tau(m_items);
    std::vector<std::vector<ChunkIndex>> sorted_chunks(m_items);
    std::vector<std::vector<double>> sorted_latency(m_items);

    for (ItemId m = 0; m < m_items; ++m) {
        if (rates[m] < 0.0)
            throw std::invalid_argument("build_valuation: negative request rate");

        std::vector<ChunkIndex> order(k);
        for (int i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](ChunkIndex a, ChunkIndex b) {
            const double la = profile.latency(placement.data_loc[m][a].node);
            const double lb = profile.latency(placement.data_loc[m][b].node);
            if (la != lb) return la > lb;
            const NodeId na = placement.data_loc[m][a].node;
            const NodeId nb = placement.data_loc[m][b].node;
            if (na != nb) return na < nb;
            return a < b;
        });

        std::vector<double> lat(k);
        for (int i = 0; i < k; ++i) lat[i] = profile.latency(placement.data_loc[m][order[i]].node);

        std::vector<double> row(k + 1, 0.0);
        for (int j = 1; j < k; ++j) row[j] = (lat[0] - lat[j]) * rates[m];
        if (k >= 1) row[k] = lat[0] * rates[m];

        tau[m] = std::move(row);
        sorted_chunks[m] = std::move(order);
        sorted_latency[m] = std::move(lat);
    }
    return ValuationArray(std::move(tau), std::move(sorted_chunks), std::move(sorted_latency));
}

ValuationArray build_valuation_from_latencies(
    const std::vector<std::vector<double>>& chunk_latency_ms, const std::vector<double>& rates) {
    const int m_items = static_cast<int>(chunk_latency_ms.size());
    if (static_cast<int>(rates.size()) != m_items)
        throw std::invalid_argument("build_valuation: one rate per item required");
    const int k = m_items == 0 ? 0 : static_cast<int>(chunk_latency_ms[0].size());

    std::vector<std::vector<double>> tau(m_items, std::vector<double>(k + 1, 0.0));
    std::vector<std::vector<ChunkIndex>> sorted_chunks(m_items);
    std::vector<std::vector<double>> sorted_latency(m_items, std::vector<double>(k, 0.0));
    ValuationArray out(std::move(tau), std::move(sorted_chunks), std::move(sorted_latency));
    for (ItemId m = 0; m < m_items; ++m) out.refresh_row(m, chunk_latency_ms[m], rates[m]);
    return out;
}

}  // namespace codedcache
