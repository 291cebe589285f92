#pragma once

#include <cstdint>
#include <vector>

#include "fkcg/geometry.hpp"

// Configurations living on a fixed EdgeSet: bond occupations, couplings,
// and boundary wiring partitions.

namespace fkcg {

/// omega: one bit per edge, indexed by the EdgeSet's edge order.
struct BondConfig {
    std::vector<std::uint8_t> open;

    BondConfig() = default;
    explicit BondConfig(std::size_t n, bool all_open = false)
        : open(n, all_open ? 1 : 0) {}
    std::size_t size() const { return open.size(); }
    bool is_open(std::size_t e) const { return open[e] != 0; }
    void set(std::size_t e, bool v) { open[e] = v ? 1 : 0; }
};

/// J: coupling in [0,1] per edge; an edge is J-open iff J_e > 0.
struct Media {
    std::vector<double> J;

    Media() = default;
    explicit Media(std::size_t n, double value = 1.0) : J(n, value) {}
    std::size_t size() const { return J.size(); }
};

/// A wiring partition of the boundary span of an EdgeSet, stored as a
/// restricted-growth string over E.boundary_span (group[k] is the group of
/// the k-th boundary vertex; labels appear in first-use order). Two
/// partitions give the same measure iff their strings coincide.
struct BoundaryPartition {
    std::vector<int> group;

    int groups() const {
        int g = 0;
        for (int v : group) g = std::max(g, v + 1);
        return g;
    }
    bool operator==(const BoundaryPartition &o) const { return group == o.group; }

    static BoundaryPartition free_bc(const EdgeSet &E) {
        BoundaryPartition pi;
        pi.group.resize(E.boundary_span.size());
        for (std::size_t k = 0; k < pi.group.size(); ++k) pi.group[k] = static_cast<int>(k);
        return pi;
    }
    static BoundaryPartition wired_bc(const EdgeSet &E) {
        BoundaryPartition pi;
        pi.group.assign(E.boundary_span.size(), 0);
        return pi;
    }
};

}  // namespace fkcg
