#pragma once

#include <utility>

#include "codedcache/cache_state.hpp"

namespace codedcache {

/// Swaps a just-recovered data chunk into the item's cached set, evicting
/// the cached chunk with the lowest latency under `chunk_latency_ms`, so
/// later requests skip the decode. No-op when the item is uncached or the
/// chunk is already held. Returns true when a swap happened.
template <typename LatencyFn>
bool keep_recovered_data_chunk(CacheState& state, ItemId item, ChunkIndex recovered,
                               LatencyFn&& chunk_latency_ms) {
    if (state.eps(item) <= 0) return false;
    ChunkIndex cheapest = -1;
    double cheapest_ms = 0.0;
    for (ChunkIndex c : state.cached_chunks(item)) {
        if (c == recovered) return false;  // already cached
        const double l = chunk_latency_ms(item, c);
        if (cheapest < 0 || l < cheapest_ms) {
            cheapest = c;
            cheapest_ms = l;
        }
    }
    state.replace_chunk(item, cheapest, recovered);
    return true;
}

}  // namespace codedcache
