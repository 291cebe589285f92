#include "fkcg/renorm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "fkcg/cluster.hpp"
#include "fkcg/sampler.hpp"

namespace fkcg {

namespace {

// ---- tiny exact-enumeration machinery -------------------------------------

// Component counting on a fixed small vertex set with optional extra unions,
// allocation-free; vertices are span indices < 32.
struct TinyGraph {
    int nv = 0;
    std::vector<std::array<int, 2>> ends;   // edge endpoints
    std::vector<std::array<int, 2>> wires;  // unions applied regardless of the mask

    int count(std::uint32_t mask) const {
        std::array<int, 32> parent;
        for (int v = 0; v < nv; ++v) parent[v] = v;
        int comps = nv;
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        auto unite = [&](int a, int b) {
            a = find(a);
            b = find(b);
            if (a != b) {
                parent[b] = a;
                --comps;
            }
        };
        for (std::size_t e = 0; e < ends.size(); ++e)
            if (mask >> e & 1u) unite(ends[e][0], ends[e][1]);
        for (const auto &w : wires) unite(w[0], w[1]);
        return comps;
    }
};

// Extra unions encoding a boundary wiring.
std::vector<std::array<int, 2>> wiring_unions(const EdgeSet &E, const BoundaryPartition &pi) {
    std::vector<std::array<int, 2>> out;
    std::vector<int> rep;
    for (std::size_t k = 0; k < pi.group.size(); ++k) {
        int g = pi.group[k];
        if (g >= static_cast<int>(rep.size())) rep.resize(g + 1, -1);
        int v = E.boundary_span[k];
        if (rep[g] < 0)
            rep[g] = v;
        else
            out.push_back({rep[g], v});
    }
    return out;
}

// Everything grid-independent about one instance: boundary classes, their
// cluster counts per configuration, and the covering relation of the
// refinement order (each class -> classes obtained by merging two groups).
struct InstanceAnalysis {
    int nv = 0, ne = 0;
    std::size_t size = 0;  // 2^ne
    std::vector<std::array<int, 2>> ends;
    std::vector<BoundaryPartition> classes;
    std::vector<std::vector<std::uint8_t>> counts;  // per class, per mask
    std::vector<std::vector<int>> coarser;          // covering classes per class
};

std::vector<int> canonical_rgs(const std::vector<int> &group) {
    std::vector<int> relabel(group.size(), -1), out(group.size());
    int next = 0;
    for (std::size_t k = 0; k < group.size(); ++k) {
        if (relabel[group[k]] < 0) relabel[group[k]] = next++;
        out[k] = relabel[group[k]];
    }
    return out;
}

InstanceAnalysis analyze_instance(const EdgeSet &E) {
    if (E.size() > 12) throw std::invalid_argument("verify_inequalities: |E| > 12");
    InstanceAnalysis a;
    a.nv = static_cast<int>(E.span.size());
    a.ne = static_cast<int>(E.size());
    a.size = std::size_t{1} << a.ne;
    for (std::size_t e = 0; e < E.size(); ++e)
        a.ends.push_back({E.edge_ends[0][e], E.edge_ends[1][e]});
    a.classes = boundary_classes(E);

    std::map<std::vector<int>, int> index_of;
    for (std::size_t c = 0; c < a.classes.size(); ++c)
        index_of[a.classes[c].group] = static_cast<int>(c);

    TinyGraph g;
    g.nv = a.nv;
    g.ends = a.ends;
    for (const BoundaryPartition &pi : a.classes) {
        g.wires = wiring_unions(E, pi);
        std::vector<std::uint8_t> cnt(a.size);
        for (std::uint32_t m = 0; m < a.size; ++m)
            cnt[m] = static_cast<std::uint8_t>(g.count(m));
        a.counts.push_back(std::move(cnt));

        // covering coarsenings: merge each pair of distinct groups
        int ngroups = 0;
        for (int v : pi.group) ngroups = std::max(ngroups, v + 1);
        std::vector<int> up;
        for (int g1 = 0; g1 < ngroups; ++g1)
            for (int g2 = g1 + 1; g2 < ngroups; ++g2) {
                std::vector<int> merged = pi.group;
                for (int &v : merged)
                    if (v == g2) v = g1;
                up.push_back(index_of.at(canonical_rgs(merged)));
            }
        a.coarser.push_back(std::move(up));
    }
    return a;
}

// Unnormalized weights prod p^m (1-p)^(1-m) q^count for one class.
std::vector<double> class_weights(const InstanceAnalysis &a, std::size_t cls,
                                  const std::vector<double> &p, double q) {
    std::vector<double> w(a.size);
    std::vector<double> qpow(a.nv + 1, 1.0);
    for (int k = 1; k <= a.nv; ++k) qpow[k] = qpow[k - 1] * q;
    for (std::uint32_t m = 0; m < a.size; ++m) {
        double v = 1.0;
        for (int e = 0; e < a.ne; ++e) v *= (m >> e & 1u) ? p[e] : 1.0 - p[e];
        w[m] = v * qpow[a.counts[cls][m]];
    }
    return w;
}

// Normalize, then superset-sum: up[m] = P(omega >= m).
std::vector<double> upset_table(const InstanceAnalysis &a, std::vector<double> w) {
    double z = 0.0;
    for (double v : w) z += v;
    for (double &v : w) v /= z;
    for (int b = 0; b < a.ne; ++b)
        for (std::uint32_t m = 0; m < a.size; ++m)
            if (!(m >> b & 1u)) w[m] += w[m | (1u << b)];
    return w;
}

// Sub-measure cluster counts for the spatial-consistency check: edges in
// `sub` (a submask of the full edge set), wiring induced by the outside
// configuration xi plus the class wiring.
std::vector<std::uint8_t> induced_sub_counts(const InstanceAnalysis &a,
                                             const std::vector<std::array<int, 2>> &wires,
                                             std::uint32_t sub, std::uint32_t xi) {
    // vertices of the sub edge set
    std::array<int, 32> label;
    label.fill(-1);
    int nsub = 0;
    for (int e = 0; e < a.ne; ++e)
        if (sub >> e & 1u)
            for (int s : {0, 1})
                if (label[a.ends[e][s]] < 0) label[a.ends[e][s]] = nsub++;

    // connectivity through (xi, wiring) on the full vertex set
    std::array<int, 32> parent;
    for (int v = 0; v < a.nv; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    auto unite = [&](int x, int y) {
        x = find(x);
        y = find(y);
        if (x != y) parent[y] = x;
    };
    for (int e = 0; e < a.ne; ++e)
        if (xi >> e & 1u) unite(a.ends[e][0], a.ends[e][1]);
    for (const auto &w : wires) unite(w[0], w[1]);

    // induced wiring on the sub vertex set
    TinyGraph g;
    g.nv = nsub;
    for (int e = 0; e < a.ne; ++e)
        if (sub >> e & 1u) g.ends.push_back({label[a.ends[e][0]], label[a.ends[e][1]]});
    std::array<int, 32> seen_root;
    seen_root.fill(-1);
    for (int v = 0; v < a.nv; ++v) {
        if (label[v] < 0) continue;
        int r = find(v);
        if (seen_root[r] < 0)
            seen_root[r] = label[v];
        else
            g.wires.push_back({seen_root[r], label[v]});
    }

    // counts indexed by the packed submask position; g's k-th edge is the
    // k-th set bit of `sub`, so the packed mask is already g's edge mask
    std::uint32_t nbits = static_cast<std::uint32_t>(__builtin_popcount(sub));
    std::vector<std::uint8_t> out(std::size_t{1} << nbits);
    for (std::uint32_t packed = 0; packed < out.size(); ++packed)
        out[packed] = static_cast<std::uint8_t>(g.count(packed));
    return out;
}

struct Margin {
    double value = 1e300;
    void feed(double m) { value = std::min(value, m); }
};

// Grid-independent checks: the lattice condition (supermodularity of the
// cluster count, which implies positive association for q >= 1) and the
// spatial-consistency count identity (which implies the conditioning
// property exactly at every parameter value).
void integer_checks(const InstanceAnalysis &a, const EdgeSet &E, Margin &lattice, Margin &dlr) {
    for (std::size_t c = 0; c < a.classes.size(); ++c) {
        const auto &cnt = a.counts[c];
        for (std::uint32_t x = 0; x < a.size; ++x)
            for (std::uint32_t y = x + 1; y < a.size; ++y)
                lattice.feed(static_cast<double>(cnt[x | y]) + cnt[x & y] - cnt[x] - cnt[y]);

        auto wires = wiring_unions(E, a.classes[c]);
        std::uint32_t full = static_cast<std::uint32_t>(a.size - 1);
        for (std::uint32_t sub = 0; sub < full; ++sub) {  // proper subsets incl. empty
            std::uint32_t rest = full & ~sub;
            // iterate xi over submasks of rest
            std::uint32_t xi = rest;
            while (true) {
                auto subcnt = induced_sub_counts(a, wires, sub, xi);
                // pack a-submasks of `sub` and compare count differences
                std::vector<int> bits;
                for (int e = 0; e < a.ne; ++e)
                    if (sub >> e & 1u) bits.push_back(e);
                int base_diff = 0;
                bool first = true;
                double worst = 0.0;
                for (std::uint32_t packed = 0; packed < subcnt.size(); ++packed) {
                    std::uint32_t amask = 0;
                    for (std::size_t k = 0; k < bits.size(); ++k)
                        if (packed >> k & 1u) amask |= 1u << bits[k];
                    int diff = static_cast<int>(a.counts[c][amask | xi]) - subcnt[packed];
                    if (first) {
                        base_diff = diff;
                        first = false;
                    }
                    worst = std::max(worst, std::abs(static_cast<double>(diff - base_diff)));
                }
                dlr.feed(-worst);  // 0 when the identity holds exactly
                if (xi == 0) break;
                xi = (xi - 1) & rest;
            }
        }
    }
}

// Numeric spatial-consistency check at one parameter point for one class.
void dlr_numeric(const InstanceAnalysis &a, const EdgeSet &E, const BoundaryPartition &pi,
                 const std::vector<double> &p, double q, Margin &margin) {
    TinyGraph g;
    g.nv = a.nv;
    g.ends = a.ends;
    auto wires = wiring_unions(E, pi);
    g.wires = wires;
    std::vector<double> w(a.size);
    for (std::uint32_t m = 0; m < a.size; ++m) {
        double v = 1.0;
        for (int e = 0; e < a.ne; ++e) v *= (m >> e & 1u) ? p[e] : 1.0 - p[e];
        w[m] = v * std::pow(q, g.count(m));
    }
    std::uint32_t full = static_cast<std::uint32_t>(a.size - 1);
    for (std::uint32_t sub = 0; sub < full; ++sub) {
        std::uint32_t rest = full & ~sub;
        std::vector<int> bits;
        for (int e = 0; e < a.ne; ++e)
            if (sub >> e & 1u) bits.push_back(e);
        std::uint32_t xi = rest;
        while (true) {
            auto subcnt = induced_sub_counts(a, wires, sub, xi);
            // sub-measure weights and normalization
            double zs = 0.0, zc = 0.0;
            std::vector<double> ws(subcnt.size());
            for (std::uint32_t packed = 0; packed < subcnt.size(); ++packed) {
                std::uint32_t amask = 0;
                for (std::size_t k = 0; k < bits.size(); ++k)
                    if (packed >> k & 1u) amask |= 1u << bits[k];
                double v = 1.0;
                for (int bk : bits) v *= (amask >> bk & 1u) ? p[bk] : 1.0 - p[bk];
                ws[packed] = v * std::pow(q, subcnt[packed]);
                zs += ws[packed];
                zc += w[amask | xi];
            }
            for (std::uint32_t packed = 0; packed < subcnt.size(); ++packed) {
                std::uint32_t amask = 0;
                for (std::size_t k = 0; k < bits.size(); ++k)
                    if (packed >> k & 1u) amask |= 1u << bits[k];
                margin.feed(-std::abs(w[amask | xi] / zc - ws[packed] / zs));
            }
            if (xi == 0) break;
            xi = (xi - 1) & rest;
        }
    }
}

// All parameter-dependent checks for one instance at one (p, q) point,
// given the precomputed analysis. Appends margins into the accumulators.
struct PointMargins {
    Margin fkg_upsets, wiring_mono, pmap_mono, sandwich_lo, sandwich_hi;
};

void point_checks(const InstanceAnalysis &a, const std::vector<double> &p, double q,
                  PointMargins &m) {
    for (double pe : p)
        if (!(pe > 0.0 && pe < 1.0))
            throw std::invalid_argument("verify_inequalities: needs 0 < p < 1");
    std::vector<double> p_boost(p);
    for (double &v : p_boost) v = std::sqrt(v);  // pointwise larger map
    std::vector<double> p_tilde_v(p);
    for (double &v : p_tilde_v) v = p_tilde(v, q);

    std::vector<std::vector<double>> up(a.classes.size());
    for (std::size_t c = 0; c < a.classes.size(); ++c)
        up[c] = upset_table(a, class_weights(a, c, p, q));

    for (std::size_t c = 0; c < a.classes.size(); ++c) {
        // positive association on principal up-set pairs
        for (std::uint32_t g1 = 0; g1 < a.size; ++g1)
            for (std::uint32_t g2 = g1; g2 < a.size; ++g2)
                m.fkg_upsets.feed(up[c][g1 | g2] - up[c][g1] * up[c][g2]);

        // monotonicity along the wiring: finer <= coarser on every up-set
        for (int cc : a.coarser[c])
            for (std::uint32_t g = 0; g < a.size; ++g)
                m.wiring_mono.feed(up[cc][g] - up[c][g]);

        // monotonicity along a pointwise-larger edge-probability map
        std::vector<double> up_boost = upset_table(a, class_weights(a, c, p_boost, q));
        for (std::uint32_t g = 0; g < a.size; ++g) m.pmap_mono.feed(up_boost[g] - up[c][g]);

        // Bernoulli sandwich between the effective single-edge probability
        // and p itself
        for (std::uint32_t g = 0; g < a.size; ++g) {
            double lo = 1.0, hi = 1.0;
            for (int e = 0; e < a.ne; ++e)
                if (g >> e & 1u) {
                    lo *= p_tilde_v[e];
                    hi *= p[e];
                }
            m.sandwich_lo.feed(up[c][g] - lo);
            m.sandwich_hi.feed(hi - up[c][g]);
        }
    }
}

VerificationReport make_report(const std::string &name, const Margin &m, double tolerance) {
    VerificationReport r;
    r.inequality = name;
    r.worst_margin = m.value;
    r.pass = m.value >= -tolerance;
    return r;
}

// ---- sampling helpers ------------------------------------------------------

Schedule pick_schedule(const FKParams &params, long equil_sweeps) {
    Schedule s;
    bool integer_q = std::abs(params.q - std::round(params.q)) < 1e-12;
    if (params.q == 1.0) {
        s.dynamics = Dynamics::direct;
        s.burn_in = 0;
        s.sweeps = 1;
        s.thin = 1;
    } else if (integer_q) {
        s.dynamics = Dynamics::swendsen_wang;
        s.burn_in = equil_sweeps;
        s.sweeps = equil_sweeps + 1;
        s.thin = 1;
    } else {
        s.dynamics = Dynamics::heat_bath;
        s.burn_in = 8 * equil_sweeps;
        s.sweeps = 8 * equil_sweeps + 1;
        s.thin = 1;
    }
    return s;
}

// One equilibrium-ish sample of (J, omega) for replica r of a master stream.
std::pair<Media, BondConfig> replica_sample(const EdgeSet &E, const DisorderLaw &rho,
                                            const FKParams &params, const BoundaryPartition &pi,
                                            const Schedule &sched, Stream &master, int r) {
    Stream s = master.derive(static_cast<std::uint64_t>(r));
    Stream js = s.derive(0);
    Media J = sample_media(E, rho, js);
    SampleBatch batch = sample_quenched(E, J, params, pi, sched, s.derive(1).next_u64());
    return {std::move(J), batch.configs.back()};
}

double mean_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double> &v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (static_cast<double>(v.size()) - 1.0) /
                     static_cast<double>(v.size()));
}

}  // namespace

// ---- closed-form constants -------------------------------------------------

double lss_threshold(int K) {
    if (K < 2) throw std::invalid_argument("lss_threshold: K >= 2 required");
    return 1.0 - std::pow(K - 1.0, K - 1.0) / std::pow(static_cast<double>(K), K);
}

double r_lss(int K, double p) {
    double thr = lss_threshold(K);
    if (!(p >= thr - 1e-15) || p > 1.0)
        throw std::domain_error("r_lss: requires p >= " + std::to_string(thr));
    double k = static_cast<double>(K);
    double f1 = 1.0 - std::pow(1.0 - p, 1.0 / k) / std::pow(k - 1.0, (k - 1.0) / k);
    double f2 = 1.0 - std::pow((1.0 - p) * (k - 1.0), 1.0 / k);
    return f1 * f2;
}

double r_prime(int K, double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("r_prime: p in [0,1] required");
    double inner = 1.0 - std::sqrt(1.0 - p);
    double r = r_lss(K, inner);
    return r * r;
}

// ---- inequality verification -----------------------------------------------

std::vector<VerificationReport> verify_inequalities_grid(const EdgeSet &E, const Media &J,
                                                         const std::vector<FKParams> &grid,
                                                         double tolerance) {
    if (grid.empty()) throw std::invalid_argument("verify_inequalities: empty grid");
    if (E.boundary_span.size() > 8)
        throw std::invalid_argument("verify_inequalities: boundary span > 8");
    InstanceAnalysis a = analyze_instance(E);

    Margin lattice, dlr_int;
    integer_checks(a, E, lattice, dlr_int);

    PointMargins pm;
    Margin dlr_num;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> p(a.ne);
        for (int e = 0; e < a.ne; ++e) p[e] = grid[k].interaction(J.J[e]);
        point_checks(a, p, grid[k].q, pm);
        // The integer count identity above is parameter-free and forces the
        // conditional measure to coincide with the sub-measure at every
        // (p, q); one direct numeric evaluation cross-validates that
        // reduction, so it only needs the first grid point.
        if (k == 0)
            for (const BoundaryPartition &pi : a.classes)
                dlr_numeric(a, E, pi, p, grid[k].q, dlr_num);
    }

    return {
        make_report("positive-association-lattice", lattice, tolerance),
        make_report("positive-association-upsets", pm.fkg_upsets, tolerance),
        make_report("wiring-monotonicity", pm.wiring_mono, tolerance),
        make_report("edge-probability-monotonicity", pm.pmap_mono, tolerance),
        make_report("bernoulli-sandwich-lower", pm.sandwich_lo, tolerance),
        make_report("bernoulli-sandwich-upper", pm.sandwich_hi, tolerance),
        make_report("spatial-consistency-counts", dlr_int, tolerance),
        make_report("spatial-consistency", dlr_num, tolerance),
    };
}

std::vector<VerificationReport> verify_inequalities(const EdgeSet &E, const Media &J,
                                                    const FKParams &params, double tolerance) {
    return verify_inequalities_grid(E, J, {params}, tolerance);
}

std::vector<EdgeSet> edge_set_corpus(int max_edges) {
    using Key = std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>;
    auto canonical = [](std::vector<Edge> es) -> Key {
        Point mn = es[0].a;
        for (const Edge &e : es)
            for (const Point &p : {e.a, e.b})
                if (p < mn) mn = p;
        Key key;
        for (const Edge &e : es)
            key.push_back({{e.a[0] - mn[0], e.a[1] - mn[1]}, {e.b[0] - mn[0], e.b[1] - mn[1]}});
        std::sort(key.begin(), key.end());
        return key;
    };

    std::set<Key> seen;
    std::vector<Key> frontier;
    Point o{0, 0};
    for (const Point &n : {Point{1, 0}, Point{0, 1}}) {
        Key k = canonical({Edge(o, n)});
        if (seen.insert(k).second) frontier.push_back(k);
    }
    std::vector<Key> all(frontier);
    for (int sz = 2; sz <= max_edges; ++sz) {
        std::vector<Key> next;
        for (const Key &k : frontier) {
            std::vector<Edge> es;
            std::set<std::pair<int, int>> verts;
            for (const auto &[pa, pb] : k) {
                es.emplace_back(Point{pa.first, pa.second}, Point{pb.first, pb.second});
                verts.insert(pa);
                verts.insert(pb);
            }
            for (const auto &[x, y] : verts) {
                Point v{x, y};
                for (int axis : {0, 1})
                    for (int dir : {-1, 1}) {
                        Edge cand(v, v.shifted(axis, dir));
                        if (std::find(es.begin(), es.end(), cand) != es.end()) continue;
                        std::vector<Edge> grown = es;
                        grown.push_back(cand);
                        Key gk = canonical(std::move(grown));
                        if (seen.insert(gk).second) next.push_back(gk);
                    }
            }
        }
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
    }

    std::vector<EdgeSet> out;
    for (const Key &k : all) {
        std::vector<Edge> es;
        for (const auto &[pa, pb] : k)
            es.emplace_back(Point{pa.first, pa.second}, Point{pb.first, pb.second});
        out.push_back(EdgeSet::from_edges(std::move(es)));
    }
    return out;
}

// ---- averaged-measure conditioning counterexample ---------------------------

DlrFailureReport demonstrate_dlr_failure(double lambda, double p, double q) {
    if (!(lambda > 0.0 && lambda < 1.0 && p > 0.0 && p < 1.0))
        throw std::invalid_argument("demonstrate_dlr_failure: lambda, p in (0,1)");
    if (q < 1.0) throw std::invalid_argument("demonstrate_dlr_failure: q >= 1 required");

    // two-edge path with the outer endpoints wired together
    EdgeSet path = EdgeSet::from_edges({Edge(Point{0}, Point{1}), Edge(Point{1}, Point{2})});
    BoundaryPartition wired = BoundaryPartition::wired_bc(path);
    FKParams params{q, Interaction::scale(p)};
    DisorderLaw rho = DisorderLaw::bernoulli(lambda);

    int e = path.edge_index(Edge(Point{0}, Point{1}));
    int f = path.edge_index(Edge(Point{1}, Point{2}));
    auto both = exact_averaged(path, rho, params, wired,
                               [&](const Media &, const BondConfig &w) {
                                   return w.is_open(e) && w.is_open(f) ? 1.0 : 0.0;
                               });
    auto f_open = exact_averaged(path, rho, params, wired,
                                 [&](const Media &, const BondConfig &w) {
                                     return w.is_open(f) ? 1.0 : 0.0;
                                 });

    // sup over wirings of the averaged single-edge marginal
    EdgeSet single = EdgeSet::from_edges({Edge(Point{0}, Point{1})});
    double sup = 0.0;
    for (const BoundaryPartition &pi : boundary_classes(single))
        sup = std::max(sup, exact_averaged(single, rho, params, pi,
                                           [](const Media &, const BondConfig &w) {
                                               return w.is_open(0) ? 1.0 : 0.0;
                                           }));

    DlrFailureReport rep;
    rep.conditional = both / f_open;
    rep.unconditional_sup = sup;
    rep.margin = rep.conditional - rep.unconditional_sup;
    return rep;
}

// ---- finite-size estimators --------------------------------------------------

std::vector<CurvePoint> estimate_theta(const std::vector<int> &Ns, int d, const DisorderLaw &rho,
                                       const FKParams &params, bool wired, int replicas,
                                       std::uint64_t seed) {
    std::vector<CurvePoint> out;
    Stream master(seed);
    Schedule sched = pick_schedule(params, 48);
    for (int N : Ns) {
        Box box = Box::lambda_hat(d, N);
        EdgeSet E = wired ? EdgeSet::wired(box) : EdgeSet::free(box);
        BoundaryPartition pi =
            wired ? BoundaryPartition::wired_bc(E) : BoundaryPartition::free_bc(E);
        Point origin = Point::zero(d);
        int ov = E.span_index(origin);
        std::vector<int> border;
        for (int v = 0; v < static_cast<int>(E.span.size()); ++v) {
            int mx = 0;
            for (int k = 0; k < d; ++k) mx = std::max(mx, std::abs(E.span[v][k]));
            if (mx == N) border.push_back(v);
        }

        Stream nstream = master.derive(static_cast<std::uint64_t>(N));
        std::vector<double> hits(replicas);
        for (int r = 0; r < replicas; ++r) {
            auto [J, w] = replica_sample(E, rho, params, pi, sched, nstream, r);
            ClusterDecomposition cd = decompose(E, w);
            int oc = cd.cluster_of[ov];
            bool hit = std::any_of(border.begin(), border.end(),
                                   [&](int v) { return cd.cluster_of[v] == oc; });
            hits[r] = hit ? 1.0 : 0.0;
        }
        out.push_back({N, mean_of(hits), std_error_of(hits), replicas});
    }
    return out;
}

CurvePoint crossing_experiment(int N, int l, int d, const DisorderLaw &rho,
                               const FKParams &params, bool wired, int replicas,
                               std::uint64_t seed) {
    Box box = Box::lambda(d, N);
    EdgeSet E = EdgeSet::wired(box);
    BoundaryPartition pi =
        wired ? BoundaryPartition::wired_bc(E) : BoundaryPartition::free_bc(E);
    Stream master(seed);
    Schedule sched = pick_schedule(params, 48);
    std::vector<double> hits(replicas);
    for (int r = 0; r < replicas; ++r) {
        auto [J, w] = replica_sample(E, rho, params, pi, sched, master, r);
        hits[r] = unique_large(E, w, box, l) ? 1.0 : 0.0;
    }
    return {N, mean_of(hits), std_error_of(hits), replicas};
}

DensityReport density_experiment(int N, int d, const DisorderLaw &rho, const FKParams &params,
                                 bool wired, int replicas, std::uint64_t seed, double lo,
                                 double hi) {
    Box box = Box::lambda(d, N);
    EdgeSet E = EdgeSet::wired(box);
    BoundaryPartition pi =
        wired ? BoundaryPartition::wired_bc(E) : BoundaryPartition::free_bc(E);
    Stream master(seed);
    Schedule sched = pick_schedule(params, 48);
    DensityReport rep;
    int crossings = 0, outside = 0;
    double dens_sum = 0.0;
    for (int r = 0; r < replicas; ++r) {
        auto [J, w] = replica_sample(E, rho, params, pi, sched, master, r);
        ClusterDecomposition cd = decompose(E, w);
        auto cross = crossing_ids(E, cd, box);
        if (cross.empty()) {
            rep.densities.push_back(-1.0);
            ++outside;
            continue;
        }
        int inside = 0;
        for (int v : cd.members[cross.front()])
            if (box.contains(E.span[v])) ++inside;
        double dens = static_cast<double>(inside) / static_cast<double>(box.volume());
        rep.densities.push_back(dens);
        ++crossings;
        dens_sum += dens;
        if (dens < lo || dens > hi) ++outside;
    }
    rep.crossing_fraction = static_cast<double>(crossings) / replicas;
    rep.mean_density = crossings ? dens_sum / crossings : 0.0;
    rep.outside_fraction = static_cast<double>(outside) / replicas;
    return rep;
}

SlabStats slab_probe(int N, int H, int d, const DisorderLaw &rho, const FKParams &params,
                     int replicas, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("slab_probe: d >= 2 required");
    Box slab = Box::slab(d, N, H);
    EdgeSet E = EdgeSet::wired(slab);
    BoundaryPartition pi = BoundaryPartition::free_bc(E);
    Stream master(seed);
    Schedule sched = pick_schedule(params, 48);

    // sampled vertex pairs for d >= 3 pair connectivities
    Stream picker = master.derive(0xabcdULL);
    auto verts = slab.vertices();
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < 5; ++k) {
        int x = E.span_index(verts[picker.next_below(verts.size())]);
        int y = E.span_index(verts[picker.next_below(verts.size())]);
        pairs.emplace_back(x, y);
    }

    std::vector<double> crossing(replicas);
    std::vector<std::vector<double>> pair_hits(pairs.size(), std::vector<double>(replicas));
    int isolated = 0;
    for (int r = 0; r < replicas; ++r) {
        auto [J, w] = replica_sample(E, rho, params, pi, sched, master, r);
        ClusterDecomposition cd = decompose(E, w);

        // horizontal crossing along axis 0
        std::vector<char> left(cd.count, 0), right(cd.count, 0);
        for (int s : {0, 1})
            for (const Point &p : boundary_face(slab, 0, s)) {
                int v = E.span_index(p);
                if (v >= 0) (s ? right : left)[cd.cluster_of[v]] = 1;
            }
        bool crossed = false;
        for (int c = 0; c < cd.count; ++c)
            if (left[c] && right[c]) crossed = true;
        crossing[r] = crossed ? 1.0 : 0.0;

        for (std::size_t k = 0; k < pairs.size(); ++k)
            pair_hits[k][r] =
                cd.cluster_of[pairs[k].first] == cd.cluster_of[pairs[k].second] ? 1.0 : 0.0;

        // J-isolated bottom vertex: a bottom-layer vertex all of whose
        // incident couplings vanish
        std::vector<char> has_live(E.span.size(), 0);
        for (std::size_t e = 0; e < E.size(); ++e)
            if (J.J[e] > 0.0) {
                has_live[E.edge_ends[0][e]] = 1;
                has_live[E.edge_ends[1][e]] = 1;
            }
        bool found = false;
        for (int v = 0; v < static_cast<int>(E.span.size()); ++v)
            if (slab.contains(E.span[v]) && E.span[v][d - 1] == slab.lower[d - 1] &&
                !has_live[v])
                found = true;
        if (found) ++isolated;
    }

    SlabStats st;
    st.crossing_prob = mean_of(crossing);
    st.crossing_err = std_error_of(crossing);
    st.min_pair_connectivity = 1.0;
    for (const auto &h : pair_hits)
        st.min_pair_connectivity = std::min(st.min_pair_connectivity, mean_of(h));
    st.isolated_fraction = static_cast<double>(isolated) / replicas;
    return st;
}

// ---- stochastic-domination testing -------------------------------------------

double normal_upper_quantile(double a) {
    if (!(a > 0.0 && a <= 0.5)) throw std::invalid_argument("normal_upper_quantile: a in (0, 0.5]");
    double lo = 0.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(mid / std::sqrt(2.0)) > a)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

DominationReport domination_test(const std::vector<BondConfig> &sample_a,
                                 const std::vector<BondConfig> &sample_b,
                                 const std::vector<UpSet> &events, double alpha) {
    if (sample_a.empty() || sample_b.empty())
        throw std::invalid_argument("domination_test: empty sample");
    DominationReport rep;
    rep.events = static_cast<int>(events.size());
    rep.alpha = alpha;
    rep.threshold = normal_upper_quantile(alpha / static_cast<double>(events.size()));

    auto stats = [](const std::vector<BondConfig> &sample, const UpSet &ev) {
        double hits = 0.0;
        for (const BondConfig &w : sample)
            if (ev.contains(mask_from_config(w))) hits += 1.0;
        double n = static_cast<double>(sample.size());
        double m = hits / n;
        return std::pair<double, double>{m, m * (1.0 - m) / n};
    };

    for (const UpSet &ev : events) {
        auto [ma, va] = stats(sample_a, ev);
        auto [mb, vb] = stats(sample_b, ev);
        double se = std::sqrt(va + vb);
        double z;
        if (se > 0.0)
            z = (ma - mb) / se;
        else
            z = ma > mb ? 1e300 : 0.0;
        rep.z.push_back(z);
        if (z > rep.threshold) ++rep.rejections;
    }
    rep.pass = rep.rejections == 0;
    return rep;
}

}  // namespace fkcg
