#include "codedcache/partition.hpp"

#include <limits>
#include <stdexcept>

namespace codedcache {

PartitionEnumerator::PartitionEnumerator(long capacity, int k_data, long n_items)
    : capacity_(capacity), k_(k_data), m_(n_items) {
    if (capacity < 0) throw std::invalid_argument("PartitionEnumerator: capacity must be >= 0");
    if (k_data < 1) throw std::invalid_argument("PartitionEnumerator: k_data must be >= 1");
    if (n_items < 0) throw std::invalid_argument("PartitionEnumerator: n_items must be >= 0");
    digits_.assign(k_ >= 2 ? k_ - 1 : 0, 0);
}

bool PartitionEnumerator::advance() {
    // Increment x_2 first; on overflow reset and carry into x_3, and so on.
    // The bound of x_k depends on the higher digits only, so it is stable
    // while x_k itself is being incremented.
    for (std::size_t i = 0; i < digits_.size(); ++i) {
        long above = 0;
        for (std::size_t j = i + 1; j < digits_.size(); ++j)
            above += static_cast<long>(j + 2) * digits_[j];
        const long bound = (capacity_ - above) / static_cast<long>(i + 2);
        if (digits_[i] < bound) {
            ++digits_[i];
            return true;
        }
        digits_[i] = 0;  // carry
    }
    return false;
}

bool PartitionEnumerator::next(CachePartition& out) {
    if (done_) return false;
    while (true) {
        if (fresh_) {
            fresh_ = false;
        } else if (!advance()) {
            done_ = true;
            return false;
        }
        ++states_;

        long weighted = 0;
        long items = 0;
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            weighted += static_cast<long>(i + 2) * digits_[i];
            items += digits_[i];
        }
        const long x1 = capacity_ - weighted;  // >= 0 by digit bounds
        if (x1 + items > m_) continue;         // Algorithm feasibility filter

        out.counts.assign(k_, 0);
        out.counts[0] = x1;
        for (std::size_t i = 0; i < digits_.size(); ++i) out.counts[i + 1] = digits_[i];
        return true;
    }
}

std::vector<CachePartition> enumerate_partitions(long capacity, int k_data, long n_items) {
    PartitionEnumerator gen(capacity, k_data, n_items);
    std::vector<CachePartition> all;
    CachePartition p;
    while (gen.next(p)) all.push_back(p);
    return all;
}

std::uint64_t partition_count_bound(long capacity, int k_data) {
    if (capacity < 0) throw std::invalid_argument("partition_count_bound: capacity must be >= 0");
    if (k_data < 1) throw std::invalid_argument("partition_count_bound: k_data must be >= 1");
    std::uint64_t bound = 1;
    for (int k = 2; k <= k_data; ++k) {
        const std::uint64_t factor = static_cast<std::uint64_t>(capacity / k) + 1;
        if (bound > std::numeric_limits<std::uint64_t>::max() / factor)
            return std::numeric_limits<std::uint64_t>::max();
        bound *= factor;
    }
    return bound;
}

}  // namespace codedcache
