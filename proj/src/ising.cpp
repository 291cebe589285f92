#include "fkcg/ising.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fkcg/cluster.hpp"

namespace fkcg {

namespace {

double logsumexp(const std::vector<double> &lw) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : lw) m = std::max(m, v);
    double s = 0.0;
    for (double v : lw) s += std::exp(v - m);
    return m + std::log(s);
}

BondConfig restrict_config(const EdgeSet &sub, const EdgeSet &E, const BondConfig &w) {
    BondConfig out(sub.size());
    for (std::size_t e = 0; e < sub.size(); ++e) {
        int g = E.edge_index(sub.edges[e]);
        if (g < 0) throw std::invalid_argument("restrict_config: edge missing from host set");
        out.set(e, w.is_open(g));
    }
    return out;
}

int spin_at(const EdgeSet &E, const SpinConfig &sigma, const Point &p) {
    int v = E.span_index(p);
    return v >= 0 ? sigma.sigma[v] : 1;  // +1 outside the configured region
}

}  // namespace

SpinTable ising_exact(const Box &box, const EdgeSet &E, const Media &J, double beta) {
    auto interior = box.vertices();
    if (interior.size() > 20) throw std::invalid_argument("ising_exact: |box| > 20");
    if (J.size() != E.size()) throw std::invalid_argument("ising_exact: |J| != |E|");
    std::size_t n = interior.size();
    std::vector<int> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = E.span_index(interior[k]);

    std::size_t count = std::size_t{1} << n;
    std::vector<double> lw(count);
    std::vector<int> sigma(E.span.size(), 1);
    std::vector<int> interior_of(E.span.size(), -1);
    for (std::size_t k = 0; k < n; ++k) interior_of[idx[k]] = static_cast<int>(k);
    for (std::size_t mask = 0; mask < count; ++mask) {
        for (std::size_t k = 0; k < n; ++k) sigma[idx[k]] = (mask & (1u << k)) ? 1 : -1;
        double h = 0.0;
        for (std::size_t e = 0; e < E.size(); ++e)
            h += J.J[e] * sigma[E.edge_ends[0][e]] * sigma[E.edge_ends[1][e]];
        lw[mask] = beta * h;
    }
    SpinTable t;
    t.log_Z = logsumexp(lw);
    t.prob.resize(count);
    for (std::size_t mask = 0; mask < count; ++mask) t.prob[mask] = std::exp(lw[mask] - t.log_Z);
    return t;
}

double es_bond_p(double beta, double J) { return 1.0 - std::exp(-2.0 * beta * J); }

SpinConfig es_spin_given_bond(const EdgeSet &E, const BondConfig &omega, const Box &box,
                              Stream &rng) {
    ClusterDecomposition cd = decompose(E, omega);
    std::vector<char> touches(cd.count, 0);
    for (int v = 0; v < static_cast<int>(E.span.size()); ++v)
        if (!box.contains(E.span[v])) touches[cd.cluster_of[v]] = 1;
    std::vector<std::int8_t> color(cd.count);
    for (int c = 0; c < cd.count; ++c)
        color[c] = touches[c] ? 1 : (rng.bernoulli(0.5) ? 1 : -1);
    SpinConfig s;
    s.sigma.resize(E.span.size());
    for (int v = 0; v < static_cast<int>(E.span.size()); ++v) s.sigma[v] = color[cd.cluster_of[v]];
    return s;
}

BondConfig es_bond_given_spin(const EdgeSet &E, const SpinConfig &sigma, const Media &J,
                              double beta, Stream &rng) {
    BondConfig w(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) {
        bool matched = sigma.sigma[E.edge_ends[0][e]] == sigma.sigma[E.edge_ends[1][e]];
        w.set(e, matched && rng.bernoulli(es_bond_p(beta, J.J[e])));
    }
    return w;
}

void sw_ising_sweep(const EdgeSet &E, const Box &box, SpinConfig &sigma, const Media &J,
                    double beta, Stream &rng) {
    BondConfig w = es_bond_given_spin(E, sigma, J, beta, rng);
    sigma = es_spin_given_bond(E, w, box, rng);
}

double block_magnetization(const EdgeSet &E, const SpinConfig &sigma, const Box &delta) {
    double sum = 0.0;
    for (const Point &p : delta.vertices()) sum += spin_at(E, sigma, p);
    return sum / static_cast<double>(delta.volume());
}

PhaseLabels phase_labels(const EdgeSet &E, const SpinConfig &sigma, const BondConfig &omega,
                         const Box &box, int L, double delta, double delta_prime, double m_beta,
                         long long isolated_threshold) {
    PhaseLabels out;
    out.covering = make_covering(box, L, L);
    out.delta = delta;
    out.delta_prime = delta_prime;
    out.m_beta = m_beta;
    double diam_cut = std::cbrt(static_cast<double>(L));
    double vol = std::pow(static_cast<double>(L), box.dim());

    for (std::size_t t = 0; t < out.covering.count(); ++t) {
        Box dp = out.covering.delta_prime(t);
        Box dl = out.covering.delta(t);
        EdgeSet Edp = EdgeSet::wired(dp);
        BondConfig wdp = restrict_config(Edp, E, omega);
        ClusterDecomposition cdp = decompose(Edp, wdp);
        auto crossp = crossing_ids(Edp, cdp, dp);

        // unique large cluster in E^w(Delta'): exactly one of diameter
        // >= L^(1/3) and it crosses
        std::vector<int> large;
        for (int c = 0; c < cdp.count; ++c)
            if (static_cast<double>(cdp.diameter[c]) >= diam_cut) large.push_back(c);
        bool structure = !crossp.empty() && large.size() == 1 &&
                         std::find(crossp.begin(), crossp.end(), large[0]) != crossp.end();

        int eps = 0;
        double mag = block_magnetization(E, sigma, dl);
        bool good = false;
        if (structure) {
            EdgeSet Ed = EdgeSet::wired(dl);
            BondConfig wd = restrict_config(Ed, E, omega);
            ClusterDecomposition cdd = decompose(Ed, wd);
            auto cross = crossing_ids(Ed, cdd, dl);
            if (!cross.empty()) {
                int main_cluster = cross.front();
                int inside = 0;
                int probe = -1;
                for (int v : cdd.members[main_cluster])
                    if (dl.contains(Ed.span[v])) {
                        ++inside;
                        probe = v;
                    }
                double dens = inside / vol;
                bool dens_ok = dens >= m_beta * (1.0 - delta / 2.0) &&
                               dens <= m_beta * (1.0 + delta / 2.0);
                bool isolated_ok =
                    isolated_small_clusters(Ed, wd, dl, isolated_threshold) >=
                    delta_prime * vol;
                // compatibility checked on edges inside Delta_i only, so the
                // label depends on sigma|Delta_i and omega|E^w(Delta'_i) alone
                bool compatible = true;
                for (std::size_t e = 0; e < Ed.size(); ++e)
                    if (wd.is_open(e) && dl.contains(Ed.edges[e].a) &&
                        dl.contains(Ed.edges[e].b) &&
                        spin_at(E, sigma, Ed.edges[e].a) != spin_at(E, sigma, Ed.edges[e].b))
                        compatible = false;
                if (dens_ok && isolated_ok && compatible && probe >= 0) {
                    eps = spin_at(E, sigma, Ed.span[probe]);
                    good = std::abs(mag - m_beta * eps) <= delta;
                }
            }
        }
        out.phi.push_back(good ? eps : 0);
        out.magnetization.push_back(mag);
    }

    // construction invariants: magnetization bracket and neighbor signs
    for (std::size_t t = 0; t < out.phi.size(); ++t)
        if (out.phi[t] != 0 &&
            std::abs(out.magnetization[t] - m_beta * out.phi[t]) > delta + 1e-12)
            throw std::runtime_error("phase_labels: magnetization bracket violated");
    int d = box.dim();
    for (std::size_t t = 0; t < out.phi.size(); ++t) {
        const Point &i = out.covering.indices[t];
        for (int k = 0; k < d; ++k)
            for (int s : {-1, 1}) {
                Point j = i.shifted(k, s);
                int u = out.covering.index_of(j);
                int other = u >= 0 ? out.phi[u] : 1;  // +1 extension off-grid
                if (out.phi[t] * other < 0)
                    throw std::runtime_error("phase_labels: neighbor sign rule violated");
            }
    }
    return out;
}

double legendre_lambda_star(double x) {
    if (!(x > -1.0 && x < 1.0))
        throw std::domain_error("legendre_lambda_star: requires -1 < x < 1");
    auto term = [](double u) { return u == 0.0 ? 0.0 : u * std::log(u); };
    return 0.5 * (term(1.0 + x) + term(1.0 - x));
}

}  // namespace fkcg
