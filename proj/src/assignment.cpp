#include "codedcache/assignment.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace codedcache {

namespace {

/// Working state of the ascending-price auction for one cache partition.
///
/// Payoffs are tau[m][k] - price[m]. Each active level k keeps all items in
/// (payoff desc, id asc) order; its first x_k entries are the level's
/// current claims. Raising an item's price only moves it rightwards, so
/// order repair is a local sink and claim counts update incrementally.
struct AuctionState {
    const double* tau = nullptr;  // M x (K+1), row-major, pristine
    int m_items = 0;
    int k_levels = 0;
    const long* x = nullptr;

    // Mutable payoff matrix. Raising an item by its exact competition gap
    // writes the runner-up's payoff into the argmax column verbatim, so the
    // intended tie is bit-exact instead of drifting by rounding.
    std::vector<double> payoff_;
    std::vector<double> price;
    std::vector<ItemId> raised_;           // rows differing from tau
    std::vector<std::vector<ItemId>> ord;  // per level 1..K, active levels only
    std::vector<std::vector<int>> pos;     // position of each item per level
    std::vector<int> active;               // levels with x_k > 0, ascending
    std::vector<int> claim_count;          // per item
    std::set<ItemId> contested;            // items with claim_count >= 2

    std::uint64_t sweeps = 0;
    std::uint64_t tie_resolutions = 0;

    double payoff(ItemId m, int lvl) const { return payoff_[m * (k_levels + 1) + lvl]; }
    double& payoff_ref(ItemId m, int lvl) { return payoff_[m * (k_levels + 1) + lvl]; }

    bool ranks_before(int lvl, ItemId a, ItemId b) const {
        const double pa = payoff(a, lvl);
        const double pb = payoff(b, lvl);
        if (pa != pb) return pa > pb;
        return a < b;
    }

    void add_claim(ItemId m) {
        if (++claim_count[m] == 2) contested.insert(m);
    }
    void drop_claim(ItemId m) {
        if (--claim_count[m] == 1) contested.erase(m);
    }

    void reset(const double* tau_in, int m, int k, const long* counts,
               const std::vector<std::vector<ItemId>>* base_order) {
        const std::size_t cells = static_cast<std::size_t>(m) * (k + 1);
        if (tau != tau_in || m != m_items || k != k_levels) {
            tau = tau_in;
            payoff_.assign(tau_in, tau_in + cells);
            price.assign(m, 0.0);
        } else {
            // Same valuation array as the previous partition: only rows that
            // were re-priced need restoring.
            for (ItemId r : raised_) {
                std::copy(tau + r * (k + 1), tau + (r + 1) * (k + 1),
                          payoff_.begin() + static_cast<std::size_t>(r) * (k + 1));
                price[r] = 0.0;
            }
        }
        raised_.clear();
        m_items = m;
        k_levels = k;
        x = counts;
        claim_count.assign(m, 0);
        contested.clear();
        sweeps = 0;
        tie_resolutions = 0;
        ord.resize(k + 1);
        pos.resize(k + 1);
        active.clear();
        for (int lvl = 1; lvl <= k; ++lvl) {
            if (x[lvl - 1] <= 0) continue;
            active.push_back(lvl);
            if (base_order) {
                ord[lvl] = (*base_order)[lvl];
            } else {
                ord[lvl].resize(m);
                std::iota(ord[lvl].begin(), ord[lvl].end(), 0);
                std::sort(ord[lvl].begin(), ord[lvl].end(),
                          [&](ItemId a, ItemId b) { return ranks_before(lvl, a, b); });
            }
            pos[lvl].resize(m);
            for (int i = 0; i < m; ++i) pos[lvl][ord[lvl][i]] = i;
            for (long i = 0; i < x[lvl - 1]; ++i) add_claim(ord[lvl][i]);
        }
    }

    void note_raised(ItemId m) {
        if (price[m] == 0.0) raised_.push_back(m);
    }

    /// Restores column order after m's price increased; keeps claim counts
    /// current when m crosses a level's top-x_k boundary. Sinking is stable:
    /// m moves below strictly greater payoffs only, so after a raise by the
    /// exact competition gap the priced item stays ahead of the runner-up it
    /// now ties and remains claimed by its argmax level.
    void sink(ItemId m) {
        for (int lvl : active) {
            auto& o = ord[lvl];
            auto& q = pos[lvl];
            const int start = q[m];
            const double mine = payoff(m, lvl);
            int i = start;
            while (i + 1 < m_items && payoff(o[i + 1], lvl) > mine) {
                o[i] = o[i + 1];
                q[o[i]] = i;
                ++i;
            }
            o[i] = m;
            q[m] = i;
            const long boundary = x[lvl - 1];
            if (start < boundary && i >= boundary) {
                drop_claim(m);
                add_claim(o[boundary - 1]);
            }
        }
    }

    bool claimed_by(ItemId m, int lvl) const { return pos[lvl][m] < x[lvl - 1]; }

    /// V_k - V_k^m for a claiming level: the drop in its top-x_k sum if m
    /// left, i.e. m's payoff minus the runner-up's, clamped at zero.
    double competition_gap(ItemId m, int lvl) const {
        const long xk = x[lvl - 1];
        const double mine = payoff(m, lvl);
        if (xk >= m_items) return std::max(0.0, mine);
        return std::max(0.0, mine - payoff(ord[lvl][xk], lvl));
    }

    // -- exact-tie stall handling -------------------------------------------
    //
    // Reached when every contested item ties its runner-up exactly in every
    // claiming level, so no positive raise exists and the claim rule alone
    // cannot split the tied items. Strictly-held claims are fixed, then the
    // tied boundary groups are matched so every level still realizes its
    // full top-x_k sum, preferring items that already carry a price so paid
    // items stay in the market. If a tie group is over-demanded (Hall
    // violation), the entire group is re-priced to the next payoff tier and
    // the auction resumes.

    std::vector<int> fixed_level;              // per item: level fixed to, or 0
    std::vector<long> fixed_count;             // per level
    std::vector<std::vector<int>> elig;        // per item: tie-pool levels
    std::vector<std::vector<ItemId>> matched;  // per level
    std::vector<int> matched_level;            // per item, or 0

    bool augment(ItemId item, std::vector<char>& visited) {
        // Free capacity first, displacement second, so co-optimal ties land
        // on the lowest level with room.
        for (int lvl : elig[item]) {
            if (visited[lvl]) continue;
            const long cap = x[lvl - 1] - fixed_count[lvl];
            if (static_cast<long>(matched[lvl].size()) < cap) {
                matched[lvl].push_back(item);
                matched_level[item] = lvl;
                return true;
            }
        }
        for (int lvl : elig[item]) {
            if (visited[lvl]) continue;
            visited[lvl] = 1;
            for (std::size_t i = 0; i < matched[lvl].size(); ++i) {
                const ItemId occupant = matched[lvl][i];
                if (augment(occupant, visited)) {
                    matched[lvl][i] = item;
                    matched_level[item] = lvl;
                    return true;
                }
            }
        }
        return false;
    }

    bool resolve_stall(std::vector<std::vector<ItemId>>& out_final) {
        ++tie_resolutions;
        fixed_level.assign(m_items, 0);
        fixed_count.assign(k_levels + 1, 0);
        elig.assign(m_items, {});
        matched.assign(k_levels + 1, {});
        matched_level.assign(m_items, 0);

        std::vector<double> threshold(k_levels + 1, 0.0);
        std::vector<int> run_begin(k_levels + 1, 0);
        std::vector<int> run_end(k_levels + 1, 0);

        for (int lvl : active) {
            const long xk = x[lvl - 1];
            const auto& o = ord[lvl];
            const double t = payoff(o[xk - 1], lvl);
            threshold[lvl] = t;
            int begin = static_cast<int>(xk) - 1;
            while (begin > 0 && payoff(o[begin - 1], lvl) == t) --begin;
            int end = static_cast<int>(xk);
            while (end < m_items && payoff(o[end], lvl) == t) ++end;
            run_begin[lvl] = begin;
            run_end[lvl] = end;
            for (int i = 0; i < begin; ++i) {
                // Strictly held; cannot be contested at a stall, hence not
                // yet fixed to another level.
                assert(fixed_level[o[i]] == 0);
                fixed_level[o[i]] = lvl;
                ++fixed_count[lvl];
            }
        }

        std::vector<ItemId> pool_items;
        for (int lvl : active) {
            const auto& o = ord[lvl];
            for (int i = run_begin[lvl]; i < run_end[lvl]; ++i) {
                const ItemId m = o[i];
                if (fixed_level[m] != 0) continue;
                if (elig[m].empty()) pool_items.push_back(m);
                elig[m].push_back(lvl);
            }
        }
        std::sort(pool_items.begin(), pool_items.end(), [&](ItemId a, ItemId b) {
            if (price[a] != price[b]) return price[a] > price[b];
            return a < b;
        });

        std::vector<char> visited(k_levels + 1, 0);
        for (ItemId m : pool_items) {
            std::fill(visited.begin(), visited.end(), 0);
            augment(m, visited);
        }

        std::vector<int> deficient;
        for (int lvl : active)
            if (static_cast<long>(matched[lvl].size()) < x[lvl - 1] - fixed_count[lvl])
                deficient.push_back(lvl);

        if (deficient.empty()) {
            out_final.assign(k_levels + 1, {});
            for (int lvl : active) {
                auto& dest = out_final[lvl];
                const auto& o = ord[lvl];
                for (int i = 0; i < run_begin[lvl]; ++i) dest.push_back(o[i]);
                dest.insert(dest.end(), matched[lvl].begin(), matched[lvl].end());
            }
            return true;
        }

        // Over-demanded tie group: gather the levels reachable from the
        // deficient ones through shared pool items, then raise every pooled
        // item of that group to its next payoff tier.
        std::vector<char> in_group(k_levels + 1, 0);
        std::vector<char> item_in_group(m_items, 0);
        std::vector<int> queue = deficient;
        for (int lvl : deficient) in_group[lvl] = 1;
        while (!queue.empty()) {
            const int lvl = queue.back();
            queue.pop_back();
            for (ItemId m : pool_items) {
                if (item_in_group[m]) continue;
                if (std::find(elig[m].begin(), elig[m].end(), lvl) == elig[m].end()) continue;
                item_in_group[m] = 1;
                const int ml = matched_level[m];
                if (ml != 0 && !in_group[ml]) {
                    in_group[ml] = 1;
                    queue.push_back(ml);
                }
            }
        }

        double delta = -1.0;
        int k_min = 0;
        double next_value = 0.0;
        for (int lvl : active) {
            if (!in_group[lvl]) continue;
            if (run_end[lvl] >= m_items) continue;
            const double below = payoff(ord[lvl][run_end[lvl]], lvl);
            const double gap = threshold[lvl] - below;
            if (gap > 0.0 && (delta < 0.0 || gap < delta)) {
                delta = gap;
                k_min = lvl;
                next_value = below;
            }
        }
        if (delta <= 0.0)
            throw std::logic_error("clear_market: over-demanded tie group cannot be re-priced");

        for (ItemId m = 0; m < m_items; ++m) {
            if (!item_in_group[m]) continue;
            note_raised(m);
            price[m] += delta;
            for (int lvl : active) {
                // The group merges exactly into the next tier of the level
                // that fixed delta; write that tier's payoff verbatim.
                if (lvl == k_min && payoff(m, lvl) == threshold[k_min])
                    payoff_ref(m, lvl) = next_value;
                else
                    payoff_ref(m, lvl) -= delta;
            }
            sink(m);
        }
        return false;
    }

    /// Runs the auction to a conflict-free claim structure.
    std::vector<std::vector<ItemId>> run(const SolveOptions& opts) {
        // Near-tie cascades on real-valued instances can need several times
        // the nominal M*(K+2) sweeps before the boundary settles.
        const std::uint64_t guard =
            4 * static_cast<std::uint64_t>(std::max(m_items, 1)) * (k_levels + 2) +
            opts.guard_slack;
        std::vector<std::vector<ItemId>> final_claims;
        std::vector<ItemId> snapshot;
        while (true) {
            if (++sweeps > guard)
                throw std::runtime_error(
                    "clear_market: price adjustment did not converge (M=" +
                    std::to_string(m_items) + ", K=" + std::to_string(k_levels) + ")");

            if (contested.empty()) {
                final_claims.assign(k_levels + 1, {});
                for (int lvl : active)
                    final_claims[lvl].assign(ord[lvl].begin(), ord[lvl].begin() + x[lvl - 1]);
                return final_claims;
            }

            snapshot.assign(contested.begin(), contested.end());
            bool progress = false;
            for (ItemId m : snapshot) {
                if (claim_count[m] < 2) continue;  // resolved earlier this sweep
                double delta = 0.0;
                int argmax_lvl = 0;
                for (int lvl : active) {
                    if (!claimed_by(m, lvl)) continue;
                    const double gap = competition_gap(m, lvl);
                    if (gap > delta) {
                        delta = gap;
                        argmax_lvl = lvl;
                    }
                }
                if (opts.literal_unit_raise) {
                    const double raise = std::max(delta, opts.price_unit);
                    note_raised(m);
                    price[m] += raise;
                    for (int lvl : active) payoff_ref(m, lvl) -= raise;
                    sink(m);
                    progress = true;
                    continue;
                }
                if (delta > 0.0) {
                    note_raised(m);
                    price[m] += delta;
                    // In the argmax column the raise lands m exactly on its
                    // runner-up, so write that payoff verbatim; elsewhere the
                    // plain subtraction sinks m below the competition.
                    const long xk = x[argmax_lvl - 1];
                    const double target =
                        xk < m_items ? payoff(ord[argmax_lvl][xk], argmax_lvl) : 0.0;
                    for (int lvl : active) {
                        if (lvl == argmax_lvl)
                            payoff_ref(m, lvl) = target;
                        else
                            payoff_ref(m, lvl) -= delta;
                    }
                    sink(m);
                    progress = true;
                }
            }
            if (!progress) {
                if (resolve_stall(final_claims)) return final_claims;
            }
        }
    }
};

/// Canonical objective: sum of tau[m][eps[m]] in ascending item order, so
/// serial and parallel scans produce bit-identical values.
double theta_of(const std::vector<int>& eps, const double* tau, int m_items, int k_levels) {
    double theta = 0.0;
    for (ItemId m = 0; m < m_items; ++m) theta += tau[m * (k_levels + 1) + eps[m]];
    return theta;
}

void claims_to_eps(const std::vector<std::vector<ItemId>>& claims, std::vector<int>& eps) {
    std::fill(eps.begin(), eps.end(), 0);
    for (int lvl = 1; lvl < static_cast<int>(claims.size()); ++lvl) {
        for (ItemId m : claims[lvl]) {
            assert(eps[m] == 0);
            eps[m] = lvl;
        }
    }
}

std::vector<double> flatten(const ValuationArray& v) {
    const int m = v.n_items();
    const int k = v.k_data();
    std::vector<double> flat(static_cast<std::size_t>(m) * (k + 1));
    for (ItemId i = 0; i < m; ++i) {
        const auto& row = v.row(i);
        std::copy(row.begin(), row.end(), flat.begin() + static_cast<std::size_t>(i) * (k + 1));
    }
    return flat;
}

void validate_partition(const CachePartition& p, int m_items, int k) {
    if (static_cast<int>(p.counts.size()) != k)
        throw std::invalid_argument("clear_market: partition arity must equal K");
    for (long c : p.counts)
        if (c < 0) throw std::invalid_argument("clear_market: negative partition count");
    if (p.total_items() > m_items)
        throw std::invalid_argument("clear_market: partition needs more items than exist");
}

std::vector<std::vector<ItemId>> base_orders(const std::vector<double>& flat, int m, int k) {
    std::vector<std::vector<ItemId>> base(k + 1);
    for (int lvl = 1; lvl <= k; ++lvl) {
        auto& o = base[lvl];
        o.resize(m);
        std::iota(o.begin(), o.end(), 0);
        std::sort(o.begin(), o.end(), [&](ItemId a, ItemId b) {
            const double pa = flat[static_cast<std::size_t>(a) * (k + 1) + lvl];
            const double pb = flat[static_cast<std::size_t>(b) * (k + 1) + lvl];
            if (pa != pb) return pa > pb;
            return a < b;
        });
    }
    return base;
}

}  // namespace

PreferredSellerGraph preferred_seller_graph(const std::vector<std::vector<double>>& payoff,
                                            const CachePartition& partition) {
    const int m = static_cast<int>(payoff.size());
    const int k = static_cast<int>(partition.counts.size());
    validate_partition(partition, m, k);

    PreferredSellerGraph g;
    g.claims.assign(k, {});
    std::vector<ItemId> order(m);
    for (int lvl = 1; lvl <= k; ++lvl) {
        const long xk = partition.counts[lvl - 1];
        if (xk == 0) continue;
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
            if (payoff[a][lvl] != payoff[b][lvl]) return payoff[a][lvl] > payoff[b][lvl];
            return a < b;
        });
        g.claims[lvl - 1].assign(order.begin(), order.begin() + xk);
    }
    return g;
}

ConstrictedSet constricted_set(const PreferredSellerGraph& graph) {
    ConstrictedSet cs;
    ItemId max_item = -1;
    for (const auto& level : graph.claims)
        for (ItemId m : level) max_item = std::max(max_item, m);
    std::vector<int> count(static_cast<std::size_t>(max_item) + 1, 0);
    for (const auto& level : graph.claims)
        for (ItemId m : level) ++count[m];
    for (ItemId m = 0; m <= max_item; ++m)
        if (count[m] >= 2) cs.items.push_back(m);
    for (std::size_t lvl = 0; lvl < graph.claims.size(); ++lvl) {
        for (ItemId m : graph.claims[lvl]) {
            if (count[m] >= 2) {
                cs.levels.push_back(static_cast<int>(lvl) + 1);
                break;
            }
        }
    }
    return cs;
}

ClearMarketResult clear_market(const ValuationArray& valuation, const CachePartition& partition,
                               const SolveOptions& options) {
    const int m = valuation.n_items();
    const int k = valuation.k_data();
    validate_partition(partition, m, k);
    const std::vector<double> flat = flatten(valuation);

    AuctionState auction;
    auction.reset(flat.data(), m, k, partition.counts.data(), nullptr);
    const auto claims = auction.run(options);

    ClearMarketResult result;
    result.assignment.eps.assign(m, 0);
    claims_to_eps(claims, result.assignment.eps);
    result.assignment.objective = theta_of(result.assignment.eps, flat.data(), m, k);
    result.prices = std::move(auction.price);
    result.sweeps = auction.sweeps;
    result.tie_resolutions = auction.tie_resolutions;
    return result;
}

namespace {

Assignment offline_scan(const ValuationArray& valuation, long capacity,
                        const SolveOptions& options, SolveStats* stats, int threads) {
    const int m = valuation.n_items();
    const int k = valuation.k_data();
    if (capacity < 0) throw std::invalid_argument("optimal_offline: capacity must be >= 0");
    if (capacity > static_cast<long>(m) * k)
        throw std::invalid_argument("optimal_offline: capacity exceeds M*K");

    const std::vector<double> flat = flatten(valuation);
    const std::vector<std::vector<ItemId>> base = base_orders(flat, m, k);

    Assignment best;
    best.eps.assign(m, 0);
    best.objective = 0.0;
    long best_index = -1;

    std::uint64_t total_partitions = 0;
    std::uint64_t total_sweeps = 0;
    std::uint64_t total_ties = 0;

    PartitionEnumerator gen(capacity, k, m);

#ifdef _OPENMP
    const int nthreads = std::max(1, threads);
#else
    const int nthreads = 1;
    (void)threads;
#endif

    if (nthreads == 1) {
        AuctionState auction;
        CachePartition p;
        std::vector<int> eps(m, 0);
        long index = 0;
        while (gen.next(p)) {
            auction.reset(flat.data(), m, k, p.counts.data(), &base);
            const auto claims = auction.run(options);
            claims_to_eps(claims, eps);
            const double theta = theta_of(eps, flat.data(), m, k);
            total_sweeps += auction.sweeps;
            total_ties += auction.tie_resolutions;
            ++total_partitions;
            if (best_index < 0 || theta > best.objective) {
                best.eps = eps;
                best.objective = theta;
                best_index = index;
            }
            ++index;
        }
    } else {
#ifdef _OPENMP
        constexpr int kBatch = 32;
        long feed_index = 0;
#pragma omp parallel num_threads(nthreads)
        {
            AuctionState auction;
            std::vector<CachePartition> batch;
            std::vector<long> batch_index;
            std::vector<int> eps(m, 0);
            Assignment local_best;
            local_best.eps.assign(m, 0);
            long local_index = -1;
            std::uint64_t local_sweeps = 0, local_ties = 0;

            while (true) {
                batch.clear();
                batch_index.clear();
#pragma omp critical(codedcache_partition_feed)
                {
                    CachePartition p;
                    for (int i = 0; i < kBatch; ++i) {
                        if (!gen.next(p)) break;
                        batch.push_back(p);
                        batch_index.push_back(feed_index++);
                    }
                }
                if (batch.empty()) break;
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    auction.reset(flat.data(), m, k, batch[i].counts.data(), &base);
                    const auto claims = auction.run(options);
                    claims_to_eps(claims, eps);
                    const double theta = theta_of(eps, flat.data(), m, k);
                    local_sweeps += auction.sweeps;
                    local_ties += auction.tie_resolutions;
                    if (local_index < 0 || theta > local_best.objective ||
                        (theta == local_best.objective && batch_index[i] < local_index)) {
                        local_best.eps = eps;
                        local_best.objective = theta;
                        local_index = batch_index[i];
                    }
                }
            }

#pragma omp critical(codedcache_offline_reduce)
            {
                total_sweeps += local_sweeps;
                total_ties += local_ties;
                if (local_index >= 0 &&
                    (best_index < 0 || local_best.objective > best.objective ||
                     (local_best.objective == best.objective && local_index < best_index))) {
                    best = std::move(local_best);
                    best_index = local_index;
                }
            }
        }
        total_partitions = static_cast<std::uint64_t>(feed_index);
#endif
    }

    if (stats) {
        stats->partitions_examined += total_partitions;
        stats->sweeps += total_sweeps;
        stats->tie_resolutions += total_ties;
    }
    return best;
}

}  // namespace

Assignment optimal_offline(const ValuationArray& valuation, long capacity,
                           const SolveOptions& options, SolveStats* stats) {
    return offline_scan(valuation, capacity, options, stats, options.threads);
}

Assignment optimal_offline_serial(const ValuationArray& valuation, long capacity,
                                  const SolveOptions& options, SolveStats* stats) {
    return offline_scan(valuation, capacity, options, stats, 1);
}

}  // namespace codedcache
