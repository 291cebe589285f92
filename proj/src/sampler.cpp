#include "fkcg/sampler.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include "fkcg/cluster.hpp"

namespace fkcg {

ChainState make_chain(const EdgeSet &E, const Media &J, const FKParams &params,
                      const BoundaryPartition &pi, std::uint64_t seed) {
    if (J.size() != E.size()) throw std::invalid_argument("make_chain: |J| != |E|");
    ChainState st;
    st.E = &E;
    st.J = J;
    st.params = params;
    st.pi = pi;
    st.omega = BondConfig(E.size());
    st.rng = Stream(seed);
    st.p.resize(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) {
        st.p[e] = params.interaction(J.J[e]);
        if (st.p[e] < 0.0 || st.p[e] > 1.0)
            throw std::invalid_argument("make_chain: p(J_e) outside [0,1]");
    }
    // contract pi groups to single vertices
    int n = static_cast<int>(E.span.size());
    std::vector<int> map(n);
    for (int v = 0; v < n; ++v) map[v] = v;
    std::vector<int> rep;
    for (std::size_t k = 0; k < pi.group.size(); ++k) {
        int g = pi.group[k];
        if (g >= static_cast<int>(rep.size())) rep.resize(g + 1, -1);
        if (rep[g] < 0)
            rep[g] = E.boundary_span[k];
        else
            map[E.boundary_span[k]] = rep[g];
    }
    st.contracted.resize(n);
    std::vector<int> relabel(n, -1);
    st.n_contracted = 0;
    for (int v = 0; v < n; ++v) {
        int r = map[v];
        if (relabel[r] < 0) relabel[r] = st.n_contracted++;
        st.contracted[v] = relabel[r];
    }
    return st;
}

double heat_bath_open_prob(const ChainState &st, std::size_t e) {
    const EdgeSet &E = *st.E;
    double p = st.p[e];
    if (p == 0.0) return 0.0;
    int src = st.contracted[E.edge_ends[0][e]];
    int dst = st.contracted[E.edge_ends[1][e]];
    bool connected = src == dst;
    if (!connected) {
        std::vector<std::vector<int>> adj(st.n_contracted);
        for (std::size_t f = 0; f < E.size(); ++f) {
            if (f == e || !st.omega.is_open(f)) continue;
            int a = st.contracted[E.edge_ends[0][f]];
            int b = st.contracted[E.edge_ends[1][f]];
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<char> seen(st.n_contracted, 0);
        std::queue<int> q;
        q.push(src);
        seen[src] = 1;
        while (!q.empty() && !seen[dst]) {
            int v = q.front();
            q.pop();
            for (int u : adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    q.push(u);
                }
        }
        connected = seen[dst];
    }
    return connected ? p : p / (p + st.params.q * (1.0 - p));
}

void heat_bath_step(ChainState &st, std::size_t e) {
    st.omega.set(e, st.rng.bernoulli(heat_bath_open_prob(st, e)));
}

void heat_bath_sweep(ChainState &st) {
    for (std::size_t e = 0; e < st.E->size(); ++e) heat_bath_step(st, e);
    ++st.sweeps;
}

void sw_sweep(ChainState &st) {
    double qr = std::round(st.params.q);
    if (std::abs(st.params.q - qr) > 1e-12 || qr < 1.0)
        throw std::invalid_argument("sw_sweep: q must be a positive integer");
    auto nq = static_cast<std::uint64_t>(qr);
    ClusterDecomposition cd = decompose(*st.E, st.omega, &st.pi);
    std::vector<std::uint64_t> color(cd.count);
    for (int c = 0; c < cd.count; ++c) color[c] = st.rng.next_below(nq);
    const EdgeSet &E = *st.E;
    for (std::size_t e = 0; e < E.size(); ++e) {
        int a = cd.cluster_of[E.edge_ends[0][e]];
        int b = cd.cluster_of[E.edge_ends[1][e]];
        st.omega.set(e, color[a] == color[b] && st.rng.bernoulli(st.p[e]));
    }
    ++st.sweeps;
}

void direct_sample(ChainState &st) {
    if (std::abs(st.params.q - 1.0) > 1e-12)
        throw std::invalid_argument("direct_sample: exact only at q = 1");
    for (std::size_t e = 0; e < st.E->size(); ++e) st.omega.set(e, st.rng.bernoulli(st.p[e]));
    ++st.sweeps;
}

namespace {

void advance(ChainState &st, Dynamics dyn) {
    switch (dyn) {
        case Dynamics::heat_bath:
            heat_bath_sweep(st);
            break;
        case Dynamics::swendsen_wang:
            sw_sweep(st);
            break;
        case Dynamics::direct:
            direct_sample(st);
            break;
    }
}

}  // namespace

SampleBatch sample_quenched(const EdgeSet &E, const Media &J, const FKParams &params,
                            const BoundaryPartition &pi, const Schedule &schedule,
                            std::uint64_t seed) {
    if (schedule.sweeps <= schedule.burn_in)
        throw std::invalid_argument("sample_quenched: sweeps must exceed burn_in");
    if (schedule.thin < 1) throw std::invalid_argument("sample_quenched: thin >= 1 required");
    ChainState st = make_chain(E, J, params, pi, seed);
    SampleBatch batch;
    for (long s = 0; s < schedule.sweeps; ++s) {
        advance(st, schedule.dynamics);
        if (s >= schedule.burn_in && (s - schedule.burn_in) % schedule.thin == 0)
            batch.configs.push_back(st.omega);
    }
    return batch;
}

Media sample_media(const EdgeSet &E, const DisorderLaw &rho, Stream &stream) {
    rho.validate();
    std::vector<double> cum;
    double acc = 0.0;
    for (auto [v, p] : rho.atoms) {
        acc += p;
        cum.push_back(acc);
    }
    Media J(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) {
        double u = stream.next_double();
        std::size_t k = 0;
        while (k + 1 < cum.size() && u >= cum[k]) ++k;
        J.J[e] = rho.atoms[k].first;
    }
    return J;
}

std::vector<std::pair<Media, SampleBatch>> sample_averaged(const EdgeSet &E,
                                                           const DisorderLaw &rho,
                                                           const FKParams &params,
                                                           const BoundaryPartition &pi,
                                                           int replicas,
                                                           const Schedule &schedule,
                                                           std::uint64_t seed) {
    std::vector<std::pair<Media, SampleBatch>> out(replicas);
    Stream master(seed);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < replicas; ++r) {
        Stream s = master.derive(static_cast<std::uint64_t>(r));
        Stream js = s.derive(0);
        Media J = sample_media(E, rho, js);
        SampleBatch batch =
            sample_quenched(E, J, params, pi, schedule, s.derive(1).next_u64());
        batch.replica = static_cast<std::uint64_t>(r);
        out[r] = {std::move(J), std::move(batch)};
    }
    return out;
}

namespace {

// One sample from the quenched free-boundary measure on a block edge set:
// exact inverse-CDF for small blocks, otherwise the best exact-stationary
// dynamics available for the given q.
BondConfig block_sample(const EdgeSet &E, const Media &J, const FKParams &params, Stream &s) {
    BoundaryPartition pi = BoundaryPartition::free_bc(E);
    if (E.size() <= 16) {
        ProbabilityTable t = exact_distribution(E, J, params, pi, false);
        double u = s.next_double(), acc = 0.0;
        for (std::size_t mask = 0; mask < t.prob.size(); ++mask) {
            acc += t.prob[mask];
            if (u < acc) return config_from_mask(static_cast<std::uint32_t>(mask), E.size());
        }
        return config_from_mask(static_cast<std::uint32_t>(t.prob.size() - 1), E.size());
    }
    ChainState st = make_chain(E, J, params, pi, s.next_u64());
    double qr = std::round(params.q);
    bool integer_q = std::abs(params.q - qr) <= 1e-12 && qr >= 1.0;
    if (std::abs(params.q - 1.0) <= 1e-12) {
        direct_sample(st);
    } else if (integer_q) {
        for (int t = 0; t < 128; ++t) sw_sweep(st);
    } else {
        for (int t = 0; t < 1024; ++t) heat_bath_sweep(st);
    }
    return st.omega;
}

}  // namespace

std::pair<Media, BondConfig> sample_psi(const Box &lambda, int L, const DisorderLaw &rho,
                                        const FKParams &params, std::uint64_t seed) {
    BlockDecomposition bp = block_partition(lambda, L);
    EdgeSet E = EdgeSet::wired(lambda);
    Media J(E.size());
    BondConfig w(E.size());
    Stream master(seed);
    std::size_t t = 0;
    for (const Point &i : bp.indices) {
        Stream s = master.derive(t++);
        EdgeSet blockE = bp.interior_edges(i);
        Stream js = s.derive(0);
        Media blockJ = sample_media(blockE, rho, js);
        Stream ws = s.derive(1);
        BondConfig bw = block_sample(blockE, blockJ, params, ws);
        for (std::size_t e = 0; e < blockE.size(); ++e) {
            int g = E.edge_index(blockE.edges[e]);
            J.J[g] = blockJ.J[e];
            w.set(g, bw.is_open(e));
        }
    }
    // lateral edges: independent averaged single-edge free measures
    Stream lat = master.derive(t);
    std::vector<double> cum;
    double acc = 0.0;
    for (auto [v, p] : rho.atoms) {
        acc += p;
        cum.push_back(acc);
    }
    for (const Edge &ed : bp.lateral_edges()) {
        int g = E.edge_index(ed);
        double u = lat.next_double();
        std::size_t k = 0;
        while (k + 1 < cum.size() && u >= cum[k]) ++k;
        J.J[g] = rho.atoms[k].first;
        double p = params.interaction(J.J[g]);
        w.set(g, lat.bernoulli(p_tilde(p, params.q)));
    }
    return {std::move(J), std::move(w)};
}

}  // namespace fkcg
