#pragma once

#include <optional>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/geometry.hpp"

// Deterministic graph analysis of bond configurations: clusters, crossing
// clusters, double connections, pivotal bonds, horizontal interfaces.

namespace fkcg {

struct ClusterDecomposition {
    int count = 0;
    std::vector<int> cluster_of;              // per span vertex of E
    std::vector<std::vector<int>> members;    // span indices per cluster
    std::vector<int> cluster_size;
    std::vector<int> diameter;                // l_infinity over member vertices
};

/// Connected components of (span of E, open edges), with the groups of pi
/// contracted when supplied.
ClusterDecomposition decompose(const EdgeSet &E, const BondConfig &omega,
                               const BoundaryPartition *pi = nullptr);

/// Ids of clusters touching all 2d faces of the exterior boundary of box,
/// ascending.
std::vector<int> crossing_ids(const EdgeSet &E, const ClusterDecomposition &cd, const Box &box);

/// Cluster id (within decompose(E^w(box), omega)) of a cluster touching all
/// 2d faces of the exterior boundary, if any.
std::optional<int> crossing_cluster(const EdgeSet &E, const BondConfig &omega, const Box &box);

/// True iff a crossing cluster exists and every cluster of diameter >= l
/// equals it.
bool unique_large(const EdgeSet &E, const BondConfig &omega, const Box &box, int l);

/// C^2_x: all vertices joined to x by two edge-disjoint open paths
/// (x included). Returned as span indices of E.
std::vector<int> doubly_connected_set(const EdgeSet &E, const BondConfig &omega, const Point &x);

struct PivotalReport {
    bool connected = false;
    std::vector<std::size_t> pivotal;            // edge indices into E
    std::optional<std::size_t> first_pivotal;    // unique pivotal touching C^2_x
};

/// Pivotal bonds of the connection x <-> y: open edges whose closure
/// disconnects them. The first pivotal bond is the unique one incident to
/// C^2_x, when such an edge exists.
PivotalReport first_pivotal_bond(const EdgeSet &E, const BondConfig &omega, const Point &x,
                                 const Point &y);

/// True iff no *-connected path (sup-norm adjacency) within region minus
/// interface joins the bottom layer to the top layer (layers along the last
/// coordinate).
bool horizontal_interface(const std::vector<Point> &interface, const Box &region);

/// |cluster| / |box|.
double density(const ClusterDecomposition &cd, int cluster, const Box &box);

/// Number of clusters containing no vertex of the exterior boundary of box,
/// of size <= threshold (threshold < 0 means no size bound).
int isolated_small_clusters(const EdgeSet &E, const BondConfig &omega, const Box &box,
                            long long threshold = -1);

}  // namespace fkcg
