#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace codedcache {

using ItemId = std::int32_t;
using NodeId = std::int32_t;
using ServerId = std::int32_t;
using ChunkIndex = std::int32_t;

/// Physical location of one coded chunk: a server inside a storage node.
struct ChunkLocation {
    NodeId node = -1;
    ServerId server = -1;

    bool operator==(const ChunkLocation&) const = default;
};

/// Static description of the storage deployment and the cache budget.
///
/// Every item is coded into k_data data chunks plus r_parity parity chunks,
/// spread over n_nodes storage nodes with servers_per_node servers each.
/// capacity is the frontend cache budget counted in chunks.
struct SystemConfig {
    int n_nodes = 0;
    int servers_per_node = 1;
    int n_items = 0;
    int k_data = 0;
    int r_parity = 0;
    long capacity = 0;
    double chunk_size_mb = 1.0;  // informational only

    int total_servers() const { return n_nodes * servers_per_node; }

    void validate() const {
        if (n_nodes < 1) throw std::invalid_argument("SystemConfig: n_nodes must be >= 1");
        if (servers_per_node < 1)
            throw std::invalid_argument("SystemConfig: servers_per_node must be >= 1");
        if (k_data < 1) throw std::invalid_argument("SystemConfig: k_data must be >= 1");
        if (r_parity < 0) throw std::invalid_argument("SystemConfig: r_parity must be >= 0");
        if (n_items < 0) throw std::invalid_argument("SystemConfig: n_items must be >= 0");
        if (capacity < 0) throw std::invalid_argument("SystemConfig: capacity must be >= 0");
        if (capacity > static_cast<long>(n_items) * k_data)
            throw std::invalid_argument("SystemConfig: capacity exceeds n_items * k_data");
        if (k_data + r_parity > total_servers())
            throw std::invalid_argument(
                "SystemConfig: k_data + r_parity chunks cannot occupy distinct servers");
    }
};

/// Placement of every data and parity chunk of every item.
///
/// Invariant: the k_data + r_parity chunks of one item sit on pairwise
/// distinct servers.
struct PlacementMap {
    // data_loc[item][k] and parity_loc[item][r]
    std::vector<std::vector<ChunkLocation>> data_loc;
    std::vector<std::vector<ChunkLocation>> parity_loc;

    int n_items() const { return static_cast<int>(data_loc.size()); }
    int k_data() const { return data_loc.empty() ? 0 : static_cast<int>(data_loc[0].size()); }
    int r_parity() const {
        return parity_loc.empty() ? 0 : static_cast<int>(parity_loc[0].size());
    }

    const ChunkLocation& data_chunk(ItemId item, ChunkIndex k) const {
        check_item(item);
        if (k < 0 || k >= static_cast<ChunkIndex>(data_loc[item].size()))
            throw std::domain_error("PlacementMap: data chunk index out of range");
        return data_loc[item][k];
    }

    const ChunkLocation& parity_chunk(ItemId item, ChunkIndex r) const {
        check_item(item);
        if (r < 0 || r >= static_cast<ChunkIndex>(parity_loc[item].size()))
            throw std::domain_error("PlacementMap: parity chunk index out of range");
        return parity_loc[item][r];
    }

    void check_item(ItemId item) const {
        if (item < 0 || item >= n_items())
            throw std::domain_error("PlacementMap: unknown item " + std::to_string(item));
    }
};

/// Average access latency from each storage node to one frontend, in ms.
struct LatencyProfile {
    std::vector<double> node_latency_ms;

    double latency(NodeId node) const {
        if (node < 0 || node >= static_cast<NodeId>(node_latency_ms.size()))
            throw std::domain_error("LatencyProfile: unknown node " + std::to_string(node));
        return node_latency_ms[node];
    }

    void validate() const {
        for (double l : node_latency_ms)
            if (!(l > 0.0) || !(l < 1e12))
                throw std::invalid_argument("LatencyProfile: latencies must be positive finite");
    }
};

}  // namespace codedcache
