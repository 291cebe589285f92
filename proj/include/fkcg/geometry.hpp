#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Lattice geometry: boxes in Z^d, boundaries, edge sets, block
// decompositions, facets and the (L,L')-covering. Everything here is
// deterministic and pure; dimension d is a runtime parameter, 1 <= d <= 4.

namespace fkcg {

inline constexpr int kMaxDim = 4;

struct Point {
    int d = 0;
    std::array<int, kMaxDim> x{};

    Point() = default;
    Point(std::initializer_list<int> coords) {
        d = static_cast<int>(coords.size());
        if (d > kMaxDim) throw std::invalid_argument("Point: dimension > 4");
        int k = 0;
        for (int c : coords) x[k++] = c;
    }
    static Point zero(int dim) {
        Point p;
        p.d = dim;
        return p;
    }
    int operator[](int k) const { return x[k]; }
    int &operator[](int k) { return x[k]; }

    bool operator==(const Point &o) const { return d == o.d && x == o.x; }
    bool operator!=(const Point &o) const { return !(*this == o); }
    bool operator<(const Point &o) const {
        for (int k = 0; k < d; ++k)
            if (x[k] != o.x[k]) return x[k] < o.x[k];
        return false;
    }
    Point shifted(int k, int delta) const {
        Point p = *this;
        p.x[k] += delta;
        return p;
    }
};

struct PointHash {
    std::size_t operator()(const Point &p) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.d);
        for (int k = 0; k < p.d; ++k) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x[k])) + 0x9e3779b97f4a7c15ULL +
                 (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

/// Nearest neighbors: ||x-y||_2 == 1.
bool adjacent(const Point &a, const Point &b);

/// An unordered nearest-neighbor edge, stored with a < b.
struct Edge {
    Point a, b;
    Edge() = default;
    Edge(Point u, Point v);
    bool operator==(const Edge &o) const { return a == o.a && b == o.b; }
    bool operator<(const Edge &o) const { return a < o.a || (a == o.a && b < o.b); }
};

struct EdgeHash {
    std::size_t operator()(const Edge &e) const {
        PointHash h;
        return h(e.a) * 1000003u ^ h(e.b);
    }
};

/// Axis-aligned inclusive integer box: lower <= x <= upper coordinatewise.
struct Box {
    Point lower, upper;

    Box() = default;
    Box(Point lo, Point hi);

    int dim() const { return lower.d; }
    int side(int k) const { return upper[k] - lower[k] + 1; }
    long long volume() const;
    bool contains(const Point &p) const;
    bool empty() const { return lower.d == 0; }

    /// All vertices in lexicographic order.
    std::vector<Point> vertices() const;

    // Canonical regions of the lattice.
    static Box lambda(int d, int N);        // {1..N-1}^d
    static Box lambda_hat(int d, int N);    // {-N..N}^d
    static Box slab(int d, int N, int H);   // {1..N-1}^(d-1) x {1..H-1}
    static Box log_slab(int d, int n, int L);  // {1..Ln-1}^(d-1) x {1..L*ceil(log n)-1}
};

enum class EdgeKind { wired, free, explicit_set };

/// A finite edge set with a fixed, deterministic edge order. Bond and media
/// configurations index into this order.
struct EdgeSet {
    EdgeKind kind = EdgeKind::explicit_set;
    std::vector<Edge> edges;               // sorted
    std::vector<Point> span;               // all endpoints, sorted
    std::vector<int> edge_ends[2];         // span indices of each edge's endpoints
    std::vector<int> boundary_span;        // span indices with an incident edge outside E

    std::size_t size() const { return edges.size(); }
    int span_index(const Point &p) const;  // -1 if absent
    int edge_index(const Edge &e) const;   // -1 if absent

    static EdgeSet wired(const Box &box);
    static EdgeSet free(const Box &box);
    static EdgeSet from_edges(std::vector<Edge> es);
};

/// {x not in L : exists y in L, x ~ y}.
std::vector<Point> exterior_boundary(const Box &box);

/// The 2d maximal faces of the exterior boundary, indexed by (axis k, side
/// eps in {0,1}); face (k,0) sits at lower[k]-1, face (k,1) at upper[k]+1.
/// Corner vertices of the boundary belong to several faces.
std::vector<Point> boundary_face(const Box &box, int axis, int side);

struct BlockIndex {
    Point i;
    int L = 0;
};

/// Decomposition of an L-admissible box Lambda = prod {1..a_k L - 1} into
/// blocks of side L. Edge-block indices follow the index set
/// I = {i : interior block inside Lambda}.
struct BlockDecomposition {
    Box domain;
    int L = 0;
    std::vector<Point> indices;  // I_{Lambda,L}, lexicographic

    Box interior_block(const Point &i) const;  // {1..L-1}^d + Li
    Box closed_block(const Point &i) const;    // {0..L}^d + Li
    EdgeSet interior_edges(const Point &i) const;  // E^w(interior block)
    EdgeSet block_edges(const Point &i) const;     // E^f(closed block) cap E^w(domain)
    std::vector<Edge> lateral_edges() const;       // E^w(domain) minus all interior blocks

    /// B^{L,n}_i = (Li + {-nL+1 .. (n+1)L-1}^d) cap domain.
    Box enlarged_block(const Point &i, int n) const;
};

/// Throws if the domain is not L-admissible, naming the violated constraint.
BlockDecomposition block_partition(const Box &domain, int L);

bool is_admissible(const Box &domain, int L, std::string *why = nullptr);

/// The (L,L')-covering: tiles Delta_i of side L covering Lambda, enlarged
/// overlapping blocks Delta'_i of side L + 2L'.
struct Covering {
    Box domain;
    int L = 0, Lp = 0;
    std::vector<Point> indices;   // prod {0 .. ceil(L_k/L)-1}
    std::vector<Point> x;         // base corners of Delta_i
    std::vector<Point> xp;        // base corners of Delta'_i

    Box delta(std::size_t idx) const;        // x_i + {1..L}^d
    Box delta_prime(std::size_t idx) const;  // x'_i + {-L'+1 .. L+L'}^d
    std::size_t count() const { return indices.size(); }
    int index_of(const Point &i) const;
};

/// Requires L' <= L and L + 2L' <= min side. Throws on violation.
Covering make_covering(const Box &domain, int L, int Lp);

/// Audit of the covering's structural guarantees: the union of the Delta_i
/// equals the domain; each Delta_i sits inside Delta'_i at sup-distance
/// >= L'+1 from the rest of the domain; for nearest-neighbor indices both
/// enlarged blocks contain the leading slab of thickness L' of the second;
/// points with all coordinates at least L below the upper domain corner lie
/// in exactly one Delta_i; and no point lies in more than 6^d of the
/// Delta'_i. The domain is a product and every tile is a product of
/// per-axis intervals depending on one index coordinate, so all clauses are
/// checked per axis, which covers every vertex. Returns one message per
/// violation (empty = all clauses hold).
std::vector<std::string> covering_violations(const Box &domain, int L, int Lp);

/// A sub-scale facet on a block face: the (d-1)-dimensional cube of side
/// H-1 placed at offset Hj on face (axis,side) of the closed block of i.
struct Facet {
    BlockIndex block;
    int axis = 0, side = 0;
    Point j;
    int H = 1;

    std::vector<Point> vertices() const;
    EdgeSet interior_edges() const;  // E^f of the facet vertex set
};

/// Admissible facet offsets for a face normal to `axis`:
/// j . e_axis = 0 and L <= 3H (j . e_k) and 3H (j . e_k + 1) <= 2L for k != axis.
std::vector<Point> facet_offsets(int d, int L, int H, int axis);

/// All facets of a face in lexicographic offset order.
std::vector<Facet> facets(const BlockIndex &block, int d, int H, int axis, int side);

}  // namespace fkcg
