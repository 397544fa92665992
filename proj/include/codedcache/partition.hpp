#pragma once

#include <cstdint>
#include <vector>

#include "codedcache/types.hpp"

namespace codedcache {

/// A cache partition {x_1..x_K}: x_k items each cache k chunks.
/// Feasible iff sum(k * x_k) == C and sum(x_k) <= M.
struct CachePartition {
    std::vector<long> counts;  // counts[k-1] = x_k

    long total_chunks() const {
        long s = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) s += static_cast<long>(i + 1) * counts[i];
        return s;
    }
    long total_items() const {
        long s = 0;
        for (long c : counts) s += c;
        return s;
    }
    bool operator==(const CachePartition&) const = default;
};

/// Lazily walks all cache partitions for capacity C, chunk count K and item
/// count M, in odometer order: x_2 advances fastest, x_K slowest, and
/// x_1 = C - sum(k * x_k) is implied. Digit bounds are nested, so x_1 is
/// never negative; candidates with sum(x_k) > M are skipped.
class PartitionEnumerator {
public:
    PartitionEnumerator(long capacity, int k_data, long n_items);

    /// Writes the next partition into `out`; returns false when exhausted.
    bool next(CachePartition& out);

    /// Number of candidate odometer states visited so far (feasible or not).
    std::uint64_t states_visited() const { return states_; }

private:
    bool advance();  // moves digits_ to the next odometer state

    long capacity_;
    int k_;
    long m_;
    std::vector<long> digits_;  // digits_[i] = x_{i+2}
    bool fresh_ = true;
    bool done_ = false;
    std::uint64_t states_ = 0;
};

/// Materializes the full partition set (tests, CLI dumps, small instances).
std::vector<CachePartition> enumerate_partitions(long capacity, int k_data, long n_items);

/// Upper bound on the number of odometer states and on |chi|:
/// product over k in 2..K of (floor(C/k) + 1). Saturates at uint64 max.
std::uint64_t partition_count_bound(long capacity, int k_data);

}  // namespace codedcache
