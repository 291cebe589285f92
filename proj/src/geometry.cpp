#include "fkcg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

namespace fkcg {

bool adjacent(const Point &a, const Point &b) {
    if (a.d != b.d) return false;
    int diff = 0;
    for (int k = 0; k < a.d; ++k) {
        int dk = std::abs(a.x[k] - b.x[k]);
        if (dk > 1) return false;
        diff += dk;
    }
    return diff == 1;
}

Edge::Edge(Point u, Point v) {
    if (!adjacent(u, v)) throw std::invalid_argument("Edge: endpoints are not nearest neighbors");
    if (v < u) std::swap(u, v);
    a = u;
    b = v;
}

Box::Box(Point lo, Point hi) : lower(lo), upper(hi) {
    if (lo.d != hi.d || lo.d == 0) throw std::invalid_argument("Box: inconsistent dimension");
    for (int k = 0; k < lo.d; ++k)
        if (lo.x[k] > hi.x[k]) throw std::invalid_argument("Box: lower > upper");
}

long long Box::volume() const {
    long long v = 1;
    for (int k = 0; k < dim(); ++k) v *= side(k);
    return v;
}

bool Box::contains(const Point &p) const {
    if (p.d != dim()) return false;
    for (int k = 0; k < dim(); ++k)
        if (p.x[k] < lower.x[k] || p.x[k] > upper.x[k]) return false;
    return true;
}

std::vector<Point> Box::vertices() const {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(volume()));
    Point p = lower;
    while (true) {
        out.push_back(p);
        int k = dim() - 1;
        while (k >= 0) {
            if (p.x[k] < upper.x[k]) {
                ++p.x[k];
                break;
            }
            p.x[k] = lower.x[k];
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

Box Box::lambda(int d, int N) {
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d; ++k) {
        lo.x[k] = 1;
        hi.x[k] = N - 1;
    }
    return Box(lo, hi);
}

Box Box::lambda_hat(int d, int N) {
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d; ++k) {
        lo.x[k] = -N;
        hi.x[k] = N;
    }
    return Box(lo, hi);
}

Box Box::slab(int d, int N, int H) {
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d - 1; ++k) {
        lo.x[k] = 1;
        hi.x[k] = N - 1;
    }
    lo.x[d - 1] = 1;
    hi.x[d - 1] = H - 1;
    return Box(lo, hi);
}

Box Box::log_slab(int d, int n, int L) {
    int height = L * static_cast<int>(std::ceil(std::log(static_cast<double>(n))));
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d - 1; ++k) {
        lo.x[k] = 1;
        hi.x[k] = L * n - 1;
    }
    lo.x[d - 1] = 1;
    hi.x[d - 1] = height - 1;
    return Box(lo, hi);
}

std::vector<Point> exterior_boundary(const Box &box) {
    if (box.empty()) throw std::invalid_argument("exterior_boundary: empty box");
    std::unordered_set<Point, PointHash> seen;
    std::vector<Point> out;
    // Only vertices one step off a face can qualify; walk the box surface.
    for (const Point &p : box.vertices()) {
        for (int k = 0; k < box.dim(); ++k) {
            for (int s : {-1, 1}) {
                Point q = p.shifted(k, s);
                if (!box.contains(q) && seen.insert(q).second) out.push_back(q);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Point> boundary_face(const Box &box, int axis, int side) {
    std::vector<Point> out;
    Box face = box;
    int coord = side == 0 ? box.lower[axis] - 1 : box.upper[axis] + 1;
    face.lower.x[axis] = coord;
    face.upper.x[axis] = coord;
    return face.vertices();
}

int EdgeSet::span_index(const Point &p) const {
    auto it = std::lower_bound(span.begin(), span.end(), p);
    if (it == span.end() || !(*it == p)) return -1;
    return static_cast<int>(it - span.begin());
}

int EdgeSet::edge_index(const Edge &e) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || !(*it == e)) return -1;
    return static_cast<int>(it - edges.begin());
}

static EdgeSet finish_edge_set(std::vector<Edge> es, EdgeKind kind) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    EdgeSet out;
    out.kind = kind;
    out.edges = std::move(es);
    for (const Edge &e : out.edges) {
        out.span.push_back(e.a);
        out.span.push_back(e.b);
    }
    std::sort(out.span.begin(), out.span.end());
    out.span.erase(std::unique(out.span.begin(), out.span.end()), out.span.end());
    out.edge_ends[0].resize(out.edges.size());
    out.edge_ends[1].resize(out.edges.size());
    std::vector<int> degree(out.span.size(), 0);
    for (std::size_t i = 0; i < out.edges.size(); ++i) {
        out.edge_ends[0][i] = out.span_index(out.edges[i].a);
        out.edge_ends[1][i] = out.span_index(out.edges[i].b);
        ++degree[out.edge_ends[0][i]];
        ++degree[out.edge_ends[1][i]];
    }
    // A span vertex touches the complement iff some incident lattice edge is
    // missing from E, i.e. its degree within E is below 2d.
    int d = out.span.empty() ? 0 : out.span[0].d;
    for (std::size_t v = 0; v < out.span.size(); ++v)
        if (degree[v] < 2 * d) out.boundary_span.push_back(static_cast<int>(v));
    return out;
}

EdgeSet EdgeSet::wired(const Box &box) {
    if (box.empty()) throw std::invalid_argument("EdgeSet::wired: empty box");
    std::vector<Edge> es;
    for (const Point &p : box.vertices())
        for (int k = 0; k < box.dim(); ++k)
            for (int s : {-1, 1}) es.emplace_back(p, p.shifted(k, s));
    return finish_edge_set(std::move(es), EdgeKind::wired);
}

EdgeSet EdgeSet::free(const Box &box) {
    if (box.empty()) throw std::invalid_argument("EdgeSet::free: empty box");
    std::vector<Edge> es;
    for (const Point &p : box.vertices())
        for (int k = 0; k < box.dim(); ++k) {
            Point q = p.shifted(k, 1);
            if (box.contains(q)) es.emplace_back(p, q);
        }
    return finish_edge_set(std::move(es), EdgeKind::free);
}

EdgeSet EdgeSet::from_edges(std::vector<Edge> es) {
    return finish_edge_set(std::move(es), EdgeKind::explicit_set);
}

bool is_admissible(const Box &domain, int L, std::string *why) {
    if (L < 1) {
        if (why) *why = "L must be >= 1";
        return false;
    }
    for (int k = 0; k < domain.dim(); ++k) {
        if (domain.lower[k] != 1) {
            if (why) *why = "lower corner must be (1,...,1)";
            return false;
        }
        int side = domain.upper[k];  // upper = a_k L - 1
        if ((side + 1) % L != 0) {
            if (why) *why = "side " + std::to_string(k) + " is not a_k L - 1";
            return false;
        }
        if ((side + 1) / L < 2) {
            if (why) *why = "side " + std::to_string(k) + " needs a_k >= 2";
            return false;
        }
    }
    return true;
}

BlockDecomposition block_partition(const Box &domain, int L) {
    std::string why;
    if (!is_admissible(domain, L, &why))
        throw std::invalid_argument("block_partition: domain not L-admissible: " + why);
    BlockDecomposition out;
    out.domain = domain;
    out.L = L;
    int d = domain.dim();
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d; ++k) hi.x[k] = (domain.upper[k] + 1) / L - 1;
    out.indices = Box(lo, hi).vertices();
    return out;
}

Box BlockDecomposition::interior_block(const Point &i) const {
    Point lo = i, hi = i;
    for (int k = 0; k < domain.dim(); ++k) {
        lo.x[k] = L * i[k] + 1;
        hi.x[k] = L * i[k] + L - 1;
    }
    return Box(lo, hi);
}

Box BlockDecomposition::closed_block(const Point &i) const {
    Point lo = i, hi = i;
    for (int k = 0; k < domain.dim(); ++k) {
        lo.x[k] = L * i[k];
        hi.x[k] = L * i[k] + L;
    }
    return Box(lo, hi);
}

EdgeSet BlockDecomposition::interior_edges(const Point &i) const {
    return EdgeSet::wired(interior_block(i));
}

EdgeSet BlockDecomposition::block_edges(const Point &i) const {
    EdgeSet closed = EdgeSet::free(closed_block(i));
    EdgeSet whole = EdgeSet::wired(domain);
    std::vector<Edge> kept;
    for (const Edge &e : closed.edges)
        if (whole.edge_index(e) >= 0) kept.push_back(e);
    return EdgeSet::from_edges(std::move(kept));
}

std::vector<Edge> BlockDecomposition::lateral_edges() const {
    std::unordered_set<Edge, EdgeHash> interior;
    for (const Point &i : indices)
        for (const Edge &e : interior_edges(i).edges) interior.insert(e);
    std::vector<Edge> out;
    for (const Edge &e : EdgeSet::wired(domain).edges)
        if (!interior.count(e)) out.push_back(e);
    return out;
}

Box BlockDecomposition::enlarged_block(const Point &i, int n) const {
    Point lo = i, hi = i;
    for (int k = 0; k < domain.dim(); ++k) {
        lo.x[k] = std::max(L * i[k] - n * L + 1, domain.lower[k]);
        hi.x[k] = std::min(L * i[k] + (n + 1) * L - 1, domain.upper[k]);
    }
    return Box(lo, hi);
}

Covering make_covering(const Box &domain, int L, int Lp) {
    if (Lp > L) throw std::invalid_argument("make_covering: requires L' <= L");
    int min_side = domain.side(0);
    for (int k = 1; k < domain.dim(); ++k) min_side = std::min(min_side, domain.side(k));
    if (L + 2 * Lp > min_side)
        throw std::invalid_argument("make_covering: requires L + 2L' <= min side");
    Covering out;
    out.domain = domain;
    out.L = L;
    out.Lp = Lp;
    int d = domain.dim();
    Point lo = Point::zero(d), hi = Point::zero(d);
    for (int k = 0; k < d; ++k) hi.x[k] = (domain.side(k) + L - 1) / L - 1;
    out.indices = Box(lo, hi).vertices();
    for (const Point &i : out.indices) {
        Point xi = Point::zero(d), xpi = Point::zero(d);
        for (int k = 0; k < d; ++k) {
            int Lk = domain.side(k);
            int z = domain.lower[k] - 1;  // domain = z + prod {1..L_k}
            xi.x[k] = z + std::min(L * i[k], Lk - L);
            xpi.x[k] = z + std::min(std::max(L * i[k], Lp), Lk - L - Lp);
        }
        out.x.push_back(xi);
        out.xp.push_back(xpi);
    }
    return out;
}

Box Covering::delta(std::size_t idx) const {
    Point lo = x[idx], hi = x[idx];
    for (int k = 0; k < domain.dim(); ++k) {
        lo.x[k] += 1;
        hi.x[k] += L;
    }
    return Box(lo, hi);
}

Box Covering::delta_prime(std::size_t idx) const {
    Point lo = xp[idx], hi = xp[idx];
    for (int k = 0; k < domain.dim(); ++k) {
        lo.x[k] += -Lp + 1;
        hi.x[k] += L + Lp;
    }
    return Box(lo, hi);
}

int Covering::index_of(const Point &i) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    if (it == indices.end() || !(*it == i)) return -1;
    return static_cast<int>(it - indices.begin());
}

std::vector<Point> facet_offsets(int d, int L, int H, int axis) {
    if (H < 1) throw std::invalid_argument("facet_offsets: H >= 1 required");
    // Integer solutions of L <= 3Hj_k and 3H(j_k + 1) <= 2L per transverse axis.
    int lo = (L + 3 * H - 1) / (3 * H);
    int hi = (2 * L) / (3 * H) - 1;
    while (3 * H * (hi + 1) > 2 * L) --hi;  // guard against exact-division edge
    std::vector<Point> out;
    if (hi < lo) return out;
    Point j = Point::zero(d);
    std::vector<int> free_axes;
    for (int k = 0; k < d; ++k)
        if (k != axis) free_axes.push_back(k);
    for (int k : free_axes) j.x[k] = lo;
    while (true) {
        out.push_back(j);
        int t = static_cast<int>(free_axes.size()) - 1;
        while (t >= 0) {
            int k = free_axes[t];
            if (j.x[k] < hi) {
                ++j.x[k];
                break;
            }
            j.x[k] = lo;
            --t;
        }
        if (t < 0) break;
    }
    return out;
}

std::vector<Facet> facets(const BlockIndex &block, int d, int H, int axis, int side) {
    std::vector<Facet> out;
    for (const Point &j : facet_offsets(d, block.L, H, axis)) {
        Facet f;
        f.block = block;
        f.axis = axis;
        f.side = side;
        f.j = j;
        f.H = H;
        out.push_back(f);
    }
    return out;
}

std::vector<Point> Facet::vertices() const {
    int d = block.i.d;
    Point base = Point::zero(d);
    for (int k = 0; k < d; ++k) base.x[k] = block.L * block.i[k] + H * j[k];
    base.x[axis] += block.L * side;
    // The facet is {0..H-1}^d restricted to the face hyperplane.
    std::vector<Point> out;
    Point off = Point::zero(d);
    while (true) {
        Point p = base;
        for (int k = 0; k < d; ++k) p.x[k] += off[k];
        out.push_back(p);
        int k = d - 1;
        while (k >= 0) {
            int cap = (k == axis) ? 0 : H - 1;
            if (off.x[k] < cap) {
                ++off.x[k];
                break;
            }
            off.x[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

std::vector<std::string> covering_violations(const Box &domain, int L, int Lp) {
    Covering cv = make_covering(domain, L, Lp);
    std::vector<std::string> out;
    int d = domain.dim();
    auto note = [&](int axis, int ik, const std::string &what) {
        out.push_back(what + " (axis " + std::to_string(axis) + ", index " +
                      std::to_string(ik) + ", L=" + std::to_string(L) +
                      ", L'=" + std::to_string(Lp) + ")");
    };

    // Per-axis interval structure: on axis k, index component ik yields the
    // tile interval a+{1..L} and the enlarged interval b+{-L'+1..L+L'},
    // in coordinates relative to the domain corner z = lower - 1.
    long long max_overlap = 1;
    for (int k = 0; k < d; ++k) {
        int Lk = domain.side(k);
        int nk = (Lk + L - 1) / L;
        std::vector<int> tile_cnt(Lk + 1, 0), big_cnt(Lk + 1, 0);
        for (int ik = 0; ik < nk; ++ik) {
            int a = std::min(L * ik, Lk - L);
            int b = std::min(std::max(L * ik, Lp), Lk - L - Lp);
            if (a + 1 < 1 || a + L > Lk) note(k, ik, "tile leaves the domain");
            if (b - Lp + 1 < 1 || b + L + Lp > Lk) note(k, ik, "enlarged tile leaves the domain");
            for (int c = std::max(1, a + 1); c <= std::min(Lk, a + L); ++c) ++tile_cnt[c];
            for (int c = std::max(1, b - Lp + 1); c <= std::min(Lk, b + L + Lp); ++c)
                ++big_cnt[c];
            // tile inside the enlarged tile
            if (a < b - Lp || a > b + Lp) note(k, ik, "tile not inside its enlarged tile");
            // sup-distance L'+1 from the tile to the domain beyond each
            // enlarged face that is strictly inside the domain
            if (b - Lp + 1 > 1 && (a + 1) - (b - Lp) < Lp + 1)
                note(k, ik, "domain comes too close below the tile");
            if (b + L + Lp < Lk && (b + L + Lp + 1) - (a + L) < Lp + 1)
                note(k, ik, "domain comes too close above the tile");
            // neighbor slab: the first L' columns of the next enlarged tile
            // must also lie in this one
            if (ik + 1 < nk) {
                int bn = std::min(std::max(L * (ik + 1), Lp), Lk - L - Lp);
                if (bn < b || bn > b + L) note(k, ik, "neighbor slab not shared");
            }
        }
        for (int c = 1; c <= Lk; ++c) {
            if (tile_cnt[c] < 1) note(k, c, "point not covered by any tile");
            if (c <= Lk - L && tile_cnt[c] != 1)
                note(k, c, "interior point covered by several tiles");
        }
        long long axis_max = 0;
        for (int c = 1; c <= Lk; ++c) axis_max = std::max<long long>(axis_max, big_cnt[c]);
        max_overlap *= axis_max;
    }
    long long bound = 1;
    for (int k = 0; k < d; ++k) bound *= 6;
    if (max_overlap > bound)
        out.push_back("a point lies in " + std::to_string(max_overlap) +
                      " enlarged tiles, bound " + std::to_string(bound));
    return out;
}

EdgeSet Facet::interior_edges() const {
    std::vector<Point> vs = vertices();
    std::unordered_set<Point, PointHash> in(vs.begin(), vs.end());
    std::vector<Edge> es;
    for (const Point &p : vs)
        for (int k = 0; k < p.d; ++k) {
            Point q = p.shifted(k, 1);
            if (in.count(q)) es.emplace_back(p, q);
        }
    return EdgeSet::from_edges(std::move(es));
}

}  // namespace fkcg
