// Scratch: find and print a minimal instance where clear_market misses the
// per-partition brute-force optimum. Not part of the test suite.
#include <cstdio>

#include "codedcache/assignment.hpp"
#include "test_util.hpp"

using namespace codedcache;
using testutil::SplitMix64;

int main() {
    SplitMix64 rng(0x5eed0001);
    for (int trial = 0; trial < 5000; ++trial) {
        const int m = static_cast<int>(rng.range(2, 7));
        const int k = static_cast<int>(rng.range(1, 3));
        auto tau = testutil::random_tau(rng, m, k);
        const long cap = rng.range(1, std::min<long>(8, static_cast<long>(m) * k));
        for (const auto& p : enumerate_partitions(cap, k, m)) {
            const auto v = testutil::make_valuation(tau);
            ClearMarketResult r;
            try {
                r = clear_market(v, p);
            } catch (const std::exception& e) {
                std::printf("EXCEPTION: %s\ntrial=%d M=%d K=%d cap=%ld\npartition:", e.what(),
                            trial, m, k, cap);
                for (long c : p.counts) std::printf(" %ld", c);
                std::printf("\ntau:\n");
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j <= k; ++j) std::printf(" %.17g", tau[i][j]);
                    std::printf("\n");
                }
                return 2;
            }
            const double want = testutil::brute_force_partition_theta(tau, p.counts);
            if (r.assignment.objective < want - 1e-9 * want) {
                std::printf("trial=%d M=%d K=%d cap=%ld\n", trial, m, k, cap);
                std::printf("partition:");
                for (long c : p.counts) std::printf(" %ld", c);
                std::printf("\ntau:\n");
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j <= k; ++j) std::printf(" %.6f", tau[i][j]);
                    std::printf("\n");
                }
                std::printf("got=%.9f want=%.9f sweeps=%llu ties=%llu\n",
                            r.assignment.objective, want,
                            static_cast<unsigned long long>(r.sweeps),
                            static_cast<unsigned long long>(r.tie_resolutions));
                std::printf("eps:");
                for (int e : r.assignment.eps) std::printf(" %d", e);
                std::printf("\nprices:");
                for (double pr : r.prices) std::printf(" %.6f", pr);
                std::printf("\n");
                return 1;
            }
        }
    }
    std::printf("no mismatch found\n");
    return 0;
}
