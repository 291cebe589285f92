#include "fkcg/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkcg/cluster.hpp"
#include "fkcg/sampler.hpp"

namespace fkcg {

namespace {

// omega on the sub edge set, read through the host's edge order; edges of
// `sub` absent from the host count as closed.
BondConfig restrict_or_closed(const EdgeSet &sub, const EdgeSet &host, const BondConfig &omega) {
    BondConfig out(sub.size());
    for (std::size_t e = 0; e < sub.size(); ++e) {
        int g = host.edge_index(sub.edges[e]);
        if (g >= 0) out.set(e, omega.is_open(g));
    }
    return out;
}

bool block_index_valid(const BlockDecomposition &bd, const Point &i) {
    return std::find(bd.indices.begin(), bd.indices.end(), i) != bd.indices.end();
}

}  // namespace

double cutoff_epsilon(const DisorderLaw &rho, int L) {
    rho.validate();
    std::vector<double> candidates{1.0};
    for (auto [v, p] : rho.atoms)
        if (v > 0.0) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    double bound = std::exp(-static_cast<double>(L));
    for (double eps : candidates) {
        double mass = 0.0;
        for (auto [v, p] : rho.atoms)
            if (v > 0.0 && v < eps) mass += p;
        if (mass <= bound) return eps;
    }
    // the smallest positive atom always qualifies: the open interval below
    // it carries no mass
    throw std::logic_error("cutoff_epsilon: no admissible cutoff");
}

std::optional<Facet> find_seed(const EdgeSet &E, const BondConfig &omega, const Box &lambda,
                               const BlockIndex &block, int axis, int side, int H) {
    if (H < 1) throw std::invalid_argument("find_seed: H < 1");
    int d = lambda.dim();
    for (const Facet &f : facets(block, d, H, axis, side)) {
        auto verts = f.vertices();
        bool meets = std::any_of(verts.begin(), verts.end(),
                                 [&](const Point &p) { return lambda.contains(p); });
        if (!meets) return f;
        EdgeSet fe = f.interior_edges();
        bool all_open = true;
        for (const Edge &e : fe.edges) {
            int g = E.edge_index(e);
            if (g < 0 || !omega.is_open(g)) {
                all_open = false;
                break;
            }
        }
        if (all_open) return f;
    }
    return std::nullopt;
}

bool event_E_LH(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i,
                int L, int H) {
    BlockDecomposition bd = block_partition(lambda, L);
    if (!block_index_valid(bd, i))
        throw std::invalid_argument("event_E_LH: block index outside the index set");
    BlockIndex block{i, L};
    std::vector<Facet> seeds;
    for (int axis = 0; axis < lambda.dim(); ++axis)
        for (int side : {0, 1}) {
            auto s = find_seed(E, omega, lambda, block, axis, side, H);
            if (!s) return false;
            seeds.push_back(*s);
        }

    // connectivity of the seeds under omega restricted to the block edge
    // set; seed facets disjoint from the domain are exempt (they contribute
    // no vertices to the restricted graph)
    EdgeSet EL = bd.block_edges(i);
    BondConfig wL = restrict_or_closed(EL, E, omega);
    ClusterDecomposition cd = decompose(EL, wL);
    int common = -1;
    for (const Facet &f : seeds) {
        bool meets = false;
        for (const Point &p : f.vertices())
            if (lambda.contains(p)) meets = true;
        if (!meets) continue;
        for (const Point &p : f.vertices()) {
            int v = EL.span_index(p);
            if (v < 0) continue;
            int c = cd.cluster_of[v];
            if (common < 0) common = c;
            if (c != common) return false;
        }
    }
    return true;
}

bool event_E_L(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i,
               int L, double delta) {
    if (delta <= 0) throw std::invalid_argument("event_E_L: delta <= 0");
    int d = lambda.dim();
    int H = static_cast<int>(std::floor(std::pow(delta * std::log(static_cast<double>(L)),
                                                 1.0 / static_cast<double>(d))));
    if (H < 1) throw std::invalid_argument("event_E_L: derived sub-scale H < 1");
    return event_E_LH(E, omega, lambda, i, L, H);
}

bool event_D(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i, int L,
             double delta) {
    if (L % 3 != 0) throw std::invalid_argument("event_D: L not divisible by 3");
    int d = lambda.dim();
    int Ls = L / 3;
    // sub-blocks 3i + {0,1,2}^d at scale L/3
    Point j = Point::zero(d);
    Point off = Point::zero(d);
    while (true) {
        for (int k = 0; k < d; ++k) j[k] = 3 * i[k] + off[k];
        if (!event_E_L(E, omega, lambda, j, Ls, delta)) return false;
        int k = d - 1;
        while (k >= 0) {
            if (off[k] < 2) {
                ++off[k];
                break;
            }
            off[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return true;
}

bool event_G(const EdgeSet &E, const Media &J, const Box &lambda, const Point &i, int L,
             double eps_L) {
    BlockDecomposition bd = block_partition(lambda, L);
    if (!block_index_valid(bd, i))
        throw std::invalid_argument("event_G: block index outside the index set");

    // (a) exactly one J-open cluster of sup-norm diameter >= L in E^w(B^{L,1}_i)
    Box b1 = bd.enlarged_block(i, 1);
    EdgeSet E1 = EdgeSet::wired(b1);
    BondConfig j_open(E1.size());
    for (std::size_t e = 0; e < E1.size(); ++e) {
        int g = E.edge_index(E1.edges[e]);
        if (g >= 0 && J.J[g] > 0.0) j_open.set(e, true);
    }
    ClusterDecomposition cd = decompose(E1, j_open);
    int large = 0;
    for (int c = 0; c < cd.count; ++c)
        if (cd.diameter[c] >= L) ++large;
    if (large != 1) return false;

    // (b) every coupling on E^w(B^{L,3}_i) vanishes or clears the cutoff
    Box b3 = bd.enlarged_block(i, 3);
    EdgeSet E3 = EdgeSet::wired(b3);
    for (const Edge &e : E3.edges) {
        int g = E.edge_index(e);
        if (g >= 0 && J.J[g] != 0.0 && J.J[g] < eps_L) return false;
    }
    return true;
}

bool event_T(const EdgeSet &E, const Media &J, const BondConfig &omega, const Box &lambda,
             const Point &i, int L, double delta, double eps_L) {
    return event_D(E, omega, lambda, i, L, delta) && event_G(E, J, lambda, i, L, eps_L);
}

InterfaceResult event_L(const EdgeSet &E, const Media &J, const BondConfig &omega, int d, int n,
                        int L, double eps_L) {
    Box lambda = Box::log_slab(d, n, L);
    int m = static_cast<int>(std::ceil(std::log(static_cast<double>(n))));
    if (m < 2) throw std::invalid_argument("event_L: need ceil(log n) >= 2");
    BlockDecomposition bd = block_partition(lambda, L);

    Point o = Point::zero(d);
    for (int k = 0; k < d; ++k) o[k] = 1;
    std::vector<int> c2 = doubly_connected_set(E, omega, o);

    // index region: the slab's block grid with the bottom layer removed
    Point rlo = Point::zero(d), rhi = Point::zero(d);
    for (int k = 0; k < d - 1; ++k) rhi[k] = n - 1;
    rlo[d - 1] = 1;
    rhi[d - 1] = m - 1;
    Box region(rlo, rhi);

    InterfaceResult out;
    for (const Point &i : region.vertices()) {
        Box b = bd.closed_block(i);
        bool touched = std::any_of(c2.begin(), c2.end(),
                                   [&](int v) { return b.contains(E.span[v]); });
        if (touched && event_G(E, J, lambda, i, L, eps_L)) out.qualifying.push_back(i);
    }
    out.holds = horizontal_interface(out.qualifying, region);
    return out;
}

ProbeResult j_good_slab_probe(const Box &slab, const Media &J, const FKParams &params,
                              int vertex_samples, int mc_samples, std::uint64_t seed) {
    EdgeSet E = EdgeSet::wired(slab);
    if (J.size() != E.size()) throw std::invalid_argument("j_good_slab_probe: |J| != |E^w(slab)|");
    int d = slab.dim();
    Point o = Point::zero(d);
    for (int k = 0; k < d; ++k) o[k] = 1;
    int ov = E.span_index(o);

    // bottom and top layers of the slab
    std::vector<int> bottom, top;
    for (int v = 0; v < static_cast<int>(E.span.size()); ++v) {
        if (!slab.contains(E.span[v])) continue;
        if (E.span[v][d - 1] == slab.lower[d - 1]) bottom.push_back(v);
        if (E.span[v][d - 1] == slab.upper[d - 1]) top.push_back(v);
    }

    Stream master(seed);
    std::vector<int> probes;
    for (int k = 0; k < vertex_samples; ++k)
        probes.push_back(bottom[master.next_below(static_cast<std::uint64_t>(bottom.size()))]);

    bool integer_q = std::abs(params.q - std::round(params.q)) < 1e-12;
    Schedule sched;
    sched.dynamics = params.q == 1.0 ? Dynamics::direct
                     : integer_q    ? Dynamics::swendsen_wang
                                    : Dynamics::heat_bath;
    sched.burn_in = 64;
    sched.thin = 4;
    sched.sweeps = sched.burn_in + sched.thin * mc_samples;

    ProbeResult out;
    out.min_estimate = 1.0;
    int probe_id = 0;
    for (int xv : probes) {
        for (bool wired : {false, true}) {
            BoundaryPartition pi =
                wired ? BoundaryPartition::wired_bc(E) : BoundaryPartition::free_bc(E);
            for (bool full_overlay : {false, true}) {
                int hits = 0, total = 0;
                SampleBatch batch = sample_quenched(E, J, params, pi, sched,
                                                    master.derive(++probe_id).next_u64());
                for (const BondConfig &w : batch.configs) {
                    BondConfig composite = w;
                    if (full_overlay)
                        for (std::size_t e = 0; e < E.size(); ++e) composite.set(e, true);
                    ClusterDecomposition cd = decompose(E, composite, &pi);
                    bool to_o = cd.cluster_of[xv] == cd.cluster_of[ov];
                    bool to_top = std::any_of(top.begin(), top.end(), [&](int t) {
                        return cd.cluster_of[t] == cd.cluster_of[xv];
                    });
                    if (to_o || !to_top) ++hits;
                    ++total;
                }
                double est = total ? static_cast<double>(hits) / total : 0.0;
                if (est < out.min_estimate) {
                    out.min_estimate = est;
                    out.std_error = total ? std::sqrt(est * (1.0 - est) / total) : 0.0;
                }
                ++out.evaluations;
            }
        }
    }
    return out;
}

}  // namespace fkcg
