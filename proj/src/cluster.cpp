#include "fkcg/cluster.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <unordered_set>

namespace fkcg {

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Adjacency over open edges: per span vertex, list of (neighbor, edge index).
std::vector<std::vector<std::pair<int, int>>> open_adjacency(const EdgeSet &E,
                                                             const BondConfig &omega) {
    std::vector<std::vector<std::pair<int, int>>> adj(E.span.size());
    for (std::size_t e = 0; e < E.size(); ++e) {
        if (!omega.is_open(e)) continue;
        int a = E.edge_ends[0][e], b = E.edge_ends[1][e];
        adj[a].emplace_back(b, static_cast<int>(e));
        adj[b].emplace_back(a, static_cast<int>(e));
    }
    return adj;
}

// Indices of open edges that are bridges of the open subgraph.
std::vector<char> find_bridges(const EdgeSet &E, const BondConfig &omega) {
    auto adj = open_adjacency(E, omega);
    int n = static_cast<int>(E.span.size());
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<char> bridge(E.size(), 0);
    int timer = 0;
    // iterative DFS: frames of (vertex, entering edge, next neighbor slot)
    std::vector<std::array<int, 3>> stack;
    for (int root = 0; root < n; ++root) {
        if (disc[root] >= 0) continue;
        stack.push_back({root, -1, 0});
        disc[root] = low[root] = timer++;
        while (!stack.empty()) {
            auto &[v, in_edge, slot] = stack.back();
            if (slot < static_cast<int>(adj[v].size())) {
                auto [w, e] = adj[v][slot++];
                if (e == in_edge) continue;
                if (disc[w] < 0) {
                    disc[w] = low[w] = timer++;
                    stack.push_back({w, e, 0});
                } else {
                    low[v] = std::min(low[v], disc[w]);
                }
            } else {
                stack.pop_back();
                if (!stack.empty()) {
                    int parent = stack.back()[0];
                    low[parent] = std::min(low[parent], low[v]);
                    if (low[v] > disc[parent]) bridge[in_edge] = 1;
                }
            }
        }
    }
    return bridge;
}

}  // namespace

ClusterDecomposition decompose(const EdgeSet &E, const BondConfig &omega,
                               const BoundaryPartition *pi) {
    int n = static_cast<int>(E.span.size());
    Dsu dsu(n);
    for (std::size_t e = 0; e < E.size(); ++e)
        if (omega.is_open(e)) dsu.unite(E.edge_ends[0][e], E.edge_ends[1][e]);
    if (pi) {
        std::vector<int> rep;  // first boundary vertex of each wired group
        for (std::size_t k = 0; k < pi->group.size(); ++k) {
            int g = pi->group[k];
            if (g >= static_cast<int>(rep.size())) rep.resize(g + 1, -1);
            int v = E.boundary_span[k];
            if (rep[g] < 0)
                rep[g] = v;
            else
                dsu.unite(rep[g], v);
        }
    }
    ClusterDecomposition cd;
    cd.cluster_of.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        int r = dsu.find(v);
        if (cd.cluster_of[r] < 0) {
            cd.cluster_of[r] = cd.count++;
            cd.members.emplace_back();
        }
        cd.cluster_of[v] = cd.cluster_of[r];
        cd.members[cd.cluster_of[v]].push_back(v);
    }
    cd.cluster_size.resize(cd.count);
    cd.diameter.assign(cd.count, 0);
    int d = n ? E.span[0].d : 0;
    for (int c = 0; c < cd.count; ++c) {
        cd.cluster_size[c] = static_cast<int>(cd.members[c].size());
        for (int k = 0; k < d; ++k) {
            int lo = E.span[cd.members[c][0]][k], hi = lo;
            for (int v : cd.members[c]) {
                lo = std::min(lo, E.span[v][k]);
                hi = std::max(hi, E.span[v][k]);
            }
            cd.diameter[c] = std::max(cd.diameter[c], hi - lo);
        }
    }
    return cd;
}

std::vector<int> crossing_ids(const EdgeSet &E, const ClusterDecomposition &cd, const Box &box) {
    int d = box.dim();
    std::vector<char> crosses(cd.count, 1);
    for (int k = 0; k < d; ++k)
        for (int s = 0; s < 2; ++s) {
            std::vector<char> on_face(cd.count, 0);
            for (const Point &p : boundary_face(box, k, s)) {
                int v = E.span_index(p);
                if (v >= 0) on_face[cd.cluster_of[v]] = 1;
            }
            for (int c = 0; c < cd.count; ++c)
                if (!on_face[c]) crosses[c] = 0;
        }
    std::vector<int> out;
    for (int c = 0; c < cd.count; ++c)
        if (crosses[c]) out.push_back(c);
    return out;
}

std::optional<int> crossing_cluster(const EdgeSet &E, const BondConfig &omega, const Box &box) {
    ClusterDecomposition cd = decompose(E, omega);
    auto ids = crossing_ids(E, cd, box);
    if (ids.empty()) return std::nullopt;
    return ids.front();
}

bool unique_large(const EdgeSet &E, const BondConfig &omega, const Box &box, int l) {
    ClusterDecomposition cd = decompose(E, omega);
    auto cross = crossing_ids(E, cd, box);
    if (cross.empty()) return false;
    std::vector<int> large;
    for (int c = 0; c < cd.count; ++c)
        if (cd.diameter[c] >= l) large.push_back(c);
    if (large.empty()) return true;  // uniqueness clause vacuous
    return large.size() == 1 && std::find(cross.begin(), cross.end(), large[0]) != cross.end();
}

std::vector<int> doubly_connected_set(const EdgeSet &E, const BondConfig &omega, const Point &x) {
    int xv = E.span_index(x);
    if (xv < 0) throw std::invalid_argument("doubly_connected_set: x not in vertex span");
    auto bridge = find_bridges(E, omega);
    Dsu dsu(static_cast<int>(E.span.size()));
    for (std::size_t e = 0; e < E.size(); ++e)
        if (omega.is_open(e) && !bridge[e]) dsu.unite(E.edge_ends[0][e], E.edge_ends[1][e]);
    std::vector<int> out;
    int r = dsu.find(xv);
    for (int v = 0; v < static_cast<int>(E.span.size()); ++v)
        if (dsu.find(v) == r) out.push_back(v);
    return out;
}

PivotalReport first_pivotal_bond(const EdgeSet &E, const BondConfig &omega, const Point &x,
                                 const Point &y) {
    PivotalReport rep;
    int xv = E.span_index(x), yv = E.span_index(y);
    if (xv < 0 || yv < 0) throw std::invalid_argument("first_pivotal_bond: endpoint not in span");
    ClusterDecomposition cd = decompose(E, omega);
    rep.connected = cd.cluster_of[xv] == cd.cluster_of[yv];
    if (!rep.connected) return rep;

    auto bridge = find_bridges(E, omega);
    int n = static_cast<int>(E.span.size());
    Dsu dsu(n);
    for (std::size_t e = 0; e < E.size(); ++e)
        if (omega.is_open(e) && !bridge[e]) dsu.unite(E.edge_ends[0][e], E.edge_ends[1][e]);

    // Walk the bridge tree from C^2_x's component toward y; the bridges on
    // that path are exactly the pivotal bonds, in order from x.
    std::vector<std::vector<std::pair<int, std::size_t>>> tree(n);  // rep -> (rep, bridge)
    for (std::size_t e = 0; e < E.size(); ++e)
        if (omega.is_open(e) && bridge[e]) {
            int a = dsu.find(E.edge_ends[0][e]), b = dsu.find(E.edge_ends[1][e]);
            tree[a].emplace_back(b, e);
            tree[b].emplace_back(a, e);
        }
    int src = dsu.find(xv), dst = dsu.find(yv);
    std::vector<int> prev(n, -2);
    std::vector<std::size_t> prev_edge(n, 0);
    std::queue<int> bfs;
    bfs.push(src);
    prev[src] = -1;
    while (!bfs.empty() && prev[dst] == -2) {
        int v = bfs.front();
        bfs.pop();
        for (auto [w, e] : tree[v])
            if (prev[w] == -2) {
                prev[w] = v;
                prev_edge[w] = e;
                bfs.push(w);
            }
    }
    std::vector<std::size_t> path;
    for (int v = dst; v != src; v = prev[v]) path.push_back(prev_edge[v]);
    std::reverse(path.begin(), path.end());
    rep.pivotal = path;
    if (!path.empty()) rep.first_pivotal = path.front();
    return rep;
}

bool horizontal_interface(const std::vector<Point> &interface, const Box &region) {
    std::unordered_set<Point, PointHash> blocked(interface.begin(), interface.end());
    int d = region.dim();
    std::unordered_set<Point, PointHash> seen;
    std::queue<Point> bfs;
    for (const Point &p : boundary_face(region, d - 1, 0)) {
        Point q = p.shifted(d - 1, 1);  // bottom layer of the region itself
        if (region.contains(q) && !blocked.count(q) && seen.insert(q).second) bfs.push(q);
    }
    int top = region.upper[d - 1];
    while (!bfs.empty()) {
        Point p = bfs.front();
        bfs.pop();
        if (p[d - 1] == top) return false;
        // *-neighbors: all points at sup distance 1
        Point off = Point::zero(d);
        for (int k = 0; k < d; ++k) off.x[k] = -1;
        while (true) {
            Point q = p;
            bool all_zero = true;
            for (int k = 0; k < d; ++k) {
                q.x[k] += off[k];
                if (off[k] != 0) all_zero = false;
            }
            if (!all_zero && region.contains(q) && !blocked.count(q) && seen.insert(q).second)
                bfs.push(q);
            int k = d - 1;
            while (k >= 0) {
                if (off.x[k] < 1) {
                    ++off.x[k];
                    break;
                }
                off.x[k] = -1;
                --k;
            }
            if (k < 0) break;
        }
    }
    return true;
}

double density(const ClusterDecomposition &cd, int cluster, const Box &box) {
    return static_cast<double>(cd.cluster_size[cluster]) / static_cast<double>(box.volume());
}

int isolated_small_clusters(const EdgeSet &E, const BondConfig &omega, const Box &box,
                            long long threshold) {
    ClusterDecomposition cd = decompose(E, omega);
    std::vector<char> touches(cd.count, 0);
    for (const Point &p : exterior_boundary(box)) {
        int v = E.span_index(p);
        if (v >= 0) touches[cd.cluster_of[v]] = 1;
    }
    // ignore span vertices lying outside box and its boundary entirely
    std::vector<char> in_box(cd.count, 0);
    for (int v = 0; v < static_cast<int>(E.span.size()); ++v)
        if (box.contains(E.span[v])) in_box[cd.cluster_of[v]] = 1;
    int count = 0;
    for (int c = 0; c < cd.count; ++c)
        if (in_box[c] && !touches[c] && (threshold < 0 || cd.cluster_size[c] <= threshold)) ++count;
    return count;
}

}  // namespace fkcg
