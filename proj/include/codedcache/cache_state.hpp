#pragma once

#include <set>
#include <vector>

#include "codedcache/types.hpp"

namespace codedcache {

/// Current caching decision: how many and which data chunks of each item the
/// frontend holds. Mutation is confined to a single decision thread; reads
/// are safe concurrently between mutations.
class CacheState {
public:
    CacheState() = default;
    CacheState(int n_items, int k_data, long capacity)
        : epsilon_(n_items, 0), chunks_(n_items), k_(k_data), capacity_(capacity) {}

    int n_items() const { return static_cast<int>(epsilon_.size()); }
    int k_data() const { return k_; }
    long capacity() const { return capacity_; }
    long used() const { return used_; }

    int eps(ItemId item) const { return epsilon_.at(item); }
    const std::set<ItemId>& cached_items() const { return cached_; }
    const std::vector<ChunkIndex>& cached_chunks(ItemId item) const { return chunks_.at(item); }

    bool is_cached(ItemId item, ChunkIndex k) const {
        for (ChunkIndex c : chunks_.at(item))
            if (c == k) return true;
        return false;
    }

    /// Sets item's decision to eps and stores the given chunk selection.
    /// Throws if the capacity bound would be violated.
    void set_decision(ItemId item, int eps, std::vector<ChunkIndex> chunk_ids) {
        if (eps < 0 || eps > k_) throw std::domain_error("CacheState: eps out of range");
        if (static_cast<int>(chunk_ids.size()) != eps)
            throw std::invalid_argument("CacheState: chunk selection size must equal eps");
        const long next = used_ - epsilon_.at(item) + eps;
        if (next > capacity_) throw std::domain_error("CacheState: capacity exceeded");
        used_ = next;
        epsilon_[item] = eps;
        chunks_[item] = std::move(chunk_ids);
        if (eps > 0)
            cached_.insert(item);
        else
            cached_.erase(item);
    }

    /// Swaps one cached chunk of `item` for `incoming` without changing eps.
    /// Used after a degraded read to keep the recovered data chunk.
    void replace_chunk(ItemId item, ChunkIndex outgoing, ChunkIndex incoming) {
        for (ChunkIndex& c : chunks_.at(item)) {
            if (c == outgoing) {
                c = incoming;
                return;
            }
        }
        throw std::domain_error("CacheState: chunk to replace is not cached");
    }

    void clear() {
        std::fill(epsilon_.begin(), epsilon_.end(), 0);
        for (auto& c : chunks_) c.clear();
        cached_.clear();
        used_ = 0;
    }

private:
    std::vector<int> epsilon_;
    std::vector<std::vector<ChunkIndex>> chunks_;
    std::set<ItemId> cached_;
    long used_ = 0;
    long capacity_ = 0;
    int k_ = 0;
};

}  // namespace codedcache
