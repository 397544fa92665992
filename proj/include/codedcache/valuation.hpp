#pragma once

#include <vector>

#include "codedcache/types.hpp"

namespace codedcache {

/// Per-item reduced-latency valuations.
///
/// For each item the K data-chunk latencies are sorted in descending order
/// (ties broken by ascending node id, then chunk index). Row m of tau holds
/// the K+1 values of caching 0..K chunks of item m, farthest chunks first:
///
///   tau[m][0]   = 0
///   tau[m][j]   = (l_sorted[0] - l_sorted[j]) * rate[m]     for 0 < j < K
///   tau[m][K]   = l_sorted[0] * rate[m]
///
/// sorted_chunks[m] lists the data-chunk indices in that latency order, so
/// the first eps entries are exactly the chunks a decision eps caches.
class ValuationArray {
public:
    ValuationArray() = default;
    ValuationArray(std::vector<std::vector<double>> tau,
                   std::vector<std::vector<ChunkIndex>> sorted_chunks,
                   std::vector<std::vector<double>> sorted_latency);

    int n_items() const { return static_cast<int>(tau_.size()); }
    int k_data() const { return k_; }

    double value(ItemId item, int eps) const {
        check(item, eps);
        return tau_[item][eps];
    }

    const std::vector<double>& row(ItemId item) const {
        check(item, 0);
        return tau_[item];
    }

    /// Residual access latency f_m(eps): latency of the (eps+1)-th slowest
    /// data chunk, 0 once all K chunks are cached.
    double item_latency(ItemId item, int eps) const {
        check(item, eps);
        return eps == k_ ? 0.0 : sorted_latency_[item][eps];
    }

    /// Data-chunk indices of item in descending-latency order.
    const std::vector<ChunkIndex>& sorted_chunks(ItemId item) const {
        check(item, 0);
        return sorted_chunks_[item];
    }

    const std::vector<double>& sorted_latency(ItemId item) const {
        check(item, 0);
        return sorted_latency_[item];
    }

    /// Replaces row `item` from fresh chunk latencies and request rate.
    /// When `chunk_node` is given, equal latencies order by ascending node id
    /// then chunk index; otherwise by chunk index alone.
    void refresh_row(ItemId item, const std::vector<double>& chunk_latency_ms, double rate,
                     const std::vector<NodeId>* chunk_node = nullptr);

private:
    void check(ItemId item, int eps) const {
        if (item < 0 || item >= n_items())
            throw std::domain_error("ValuationArray: unknown item " + std::to_string(item));
        if (eps < 0 || eps > k_)
            throw std::domain_error("ValuationArray: cached-chunk count out of range");
    }

    std::vector<std::vector<double>> tau_;
    std::vector<std::vector<ChunkIndex>> sorted_chunks_;
    std::vector<std::vector<double>> sorted_latency_;
    int k_ = 0;
};

/// Average latency of fetching data chunk k of `item`: the profile latency
/// of the node hosting it.
double chunk_latency(const PlacementMap& placement, const LatencyProfile& profile, ItemId item,
                     ChunkIndex k);

/// Builds the valuation array from a placement, a latency profile and
/// per-item request rates.
ValuationArray build_valuation(const PlacementMap& placement, const LatencyProfile& profile,
                               const std::vector<double>& rates);

/// Same, but from explicit per-item per-chunk latencies. Callers that model
/// server failure substitute the unavailable chunk's latency before calling.
ValuationArray build_valuation_from_latencies(
    const std::vector<std::vector<double>>& chunk_latency_ms, const std::vector<double>& rates);

}  // namespace codedcache
