#pragma once

#include <cstdint>
#include <vector>

#include "codedcache/partition.hpp"
#include "codedcache/valuation.hpp"

namespace codedcache {

/// Buyer-side claim structure: claims[k-1] holds the x_k items picked by
/// chunk-count level k, in (payoff desc, item id asc) order. Items may be
/// claimed by several levels; that is the competition the auction resolves.
struct PreferredSellerGraph {
    std::vector<std::vector<ItemId>> claims;
};

/// Items claimed by two or more levels, and every level claiming one of
/// them. Both empty iff the graph is a valid assignment.
struct ConstrictedSet {
    std::vector<ItemId> items;
    std::vector<int> levels;  // 1-based chunk-count levels

    bool empty() const { return items.empty() && levels.empty(); }
};

/// A conflict-free caching decision for one partition (or the best across
/// all partitions): eps[m] chunks cached per item, objective = sum of
/// tau[m][eps[m]] over the pristine valuation array.
struct Assignment {
    std::vector<int> eps;
    double objective = 0.0;
};

struct SolveOptions {
    /// Price raise used by the literal pseudocode mode when the competition
    /// gap is zero. The default mode raises by the exact gap and resolves
    /// exact ties structurally, which keeps real-valued instances optimal.
    double price_unit = 1.0;
    /// Replicate the pseudocode raise max{price_unit, gap} verbatim. Can
    /// livelock on instances whose competition gaps are below the unit;
    /// kept for experiments only.
    bool literal_unit_raise = false;
    /// Threads for the partition scan (1 = serial reference path).
    int threads = 1;
    /// Extra allowance on top of the 4*M*(K+2) sweep guard.
    long guard_slack = 64;
};

struct SolveStats {
    std::uint64_t partitions_examined = 0;
    std::uint64_t sweeps = 0;
    std::uint64_t tie_resolutions = 0;
};

/// Result of clearing one partition, with the final prices for inspection.
struct ClearMarketResult {
    Assignment assignment;
    std::vector<double> prices;
    std::uint64_t sweeps = 0;
    std::uint64_t tie_resolutions = 0;
};

/// For every level k with x_k > 0, selects the x_k items with the largest
/// payoff in column k, ties broken toward the lower item id.
PreferredSellerGraph preferred_seller_graph(const std::vector<std::vector<double>>& payoff,
                                            const CachePartition& partition);

ConstrictedSet constricted_set(const PreferredSellerGraph& graph);

/// Runs the ascending-price auction for one partition and returns the
/// conflict-free assignment, with the objective evaluated against the
/// pristine valuation array. Throws std::runtime_error if the sweep guard
/// trips (degenerate non-clearing instance in literal mode).
ClearMarketResult clear_market(const ValuationArray& valuation, const CachePartition& partition,
                               const SolveOptions& options = {});

/// Scans every cache partition for the given capacity, clears each market,
/// and returns the assignment with the maximum objective (first partition in
/// enumeration order wins ties). Empty partition sets yield the all-zero
/// assignment.
Assignment optimal_offline(const ValuationArray& valuation, long capacity,
                           const SolveOptions& options = {}, SolveStats* stats = nullptr);

/// Single-threaded reference scan; optimal_offline with threads > 1 must
/// produce the identical assignment.
Assignment optimal_offline_serial(const ValuationArray& valuation, long capacity,
                                  const SolveOptions& options = {}, SolveStats* stats = nullptr);

}  // namespace codedcache
