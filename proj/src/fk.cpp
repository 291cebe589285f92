#include "fkcg/fk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fkcg/cluster.hpp"
#include "fkcg/rng.hpp"

namespace fkcg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Small union-find on the stack for per-configuration cluster counts.
struct FastDsu {
    std::vector<int> parent;
    int comps;
    explicit FastDsu(int n) : parent(n), comps(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
            --comps;
        }
    }
    void reset() {
        comps = static_cast<int>(parent.size());
        for (int i = 0; i < comps; ++i) parent[i] = i;
    }
};

// Pairs of span vertices identified by the wiring partition.
std::vector<std::pair<int, int>> wiring_pairs(const EdgeSet &E, const BoundaryPartition &pi) {
    std::vector<int> rep;
    std::vector<std::pair<int, int>> out;
    for (std::size_t k = 0; k < pi.group.size(); ++k) {
        int g = pi.group[k];
        if (g >= static_cast<int>(rep.size())) rep.resize(g + 1, -1);
        int v = E.boundary_span[k];
        if (rep[g] < 0)
            rep[g] = v;
        else
            out.emplace_back(rep[g], v);
    }
    return out;
}

int count_clusters_mask(const EdgeSet &E, std::uint32_t mask,
                        const std::vector<std::pair<int, int>> &wires, FastDsu &dsu) {
    dsu.reset();
    for (std::size_t e = 0; e < E.size(); ++e)
        if (mask & (1u << e)) dsu.unite(E.edge_ends[0][e], E.edge_ends[1][e]);
    for (auto [a, b] : wires) dsu.unite(a, b);
    return dsu.comps;
}

// Fixed-order log-sum-exp; the summation order never depends on threading.
double logsumexp(const std::vector<double> &lw) {
    double m = kNegInf;
    for (double v : lw) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : lw) s += std::exp(v - m);
    return m + std::log(s);
}

void check_enum_size(const EdgeSet &E) {
    if (E.size() > kMaxEnumEdges)
        throw std::invalid_argument("enumeration bound exceeded: |E| = " +
                                    std::to_string(E.size()) + " > " +
                                    std::to_string(kMaxEnumEdges));
}

}  // namespace

double Interaction::operator()(double J) const {
    switch (family) {
        case Family::exp_beta:
            return 1.0 - std::exp(-param * J);
        case Family::linear:
            return param * J;
    }
    return 0.0;
}

void DisorderLaw::validate() const {
    double total = 0.0;
    for (auto [v, p] : atoms) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("DisorderLaw: atom value outside [0,1]");
        if (p < 0.0) throw std::invalid_argument("DisorderLaw: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("DisorderLaw: probabilities sum to " + std::to_string(total));
}

double p_tilde(double p, double q) { return p / (p + q * (1.0 - p)); }

double p_hat(double p, double q) { return p / (1.0 + (1.0 - p) * (1.0 - p) * (q - 1.0)); }

int cluster_count(const EdgeSet &E, const BondConfig &omega, const BoundaryPartition &pi) {
    return decompose(E, omega, &pi).count;
}

double ProbabilityTable::probability(const BondConfig &omega) const {
    return prob[mask_from_config(omega)];
}

double ProbabilityTable::marginal(std::size_t e) const {
    double s = 0.0;
    for (std::size_t mask = 0; mask < prob.size(); ++mask)
        if (mask & (1u << e)) s += prob[mask];
    return s;
}

double ProbabilityTable::expect(const std::function<double(const BondConfig &)> &f) const {
    std::size_t n = 0;
    while ((1u << n) < prob.size()) ++n;
    double s = 0.0;
    for (std::size_t mask = 0; mask < prob.size(); ++mask)
        s += prob[mask] * f(config_from_mask(static_cast<std::uint32_t>(mask), n));
    return s;
}

BondConfig config_from_mask(std::uint32_t mask, std::size_t n_edges) {
    BondConfig w(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) w.set(e, mask & (1u << e));
    return w;
}

std::uint32_t mask_from_config(const BondConfig &omega) {
    std::uint32_t m = 0;
    for (std::size_t e = 0; e < omega.size(); ++e)
        if (omega.is_open(e)) m |= 1u << e;
    return m;
}

ProbabilityTable exact_distribution(const EdgeSet &E, const Media &J, const FKParams &params,
                                    const BoundaryPartition &pi, bool parallel) {
    check_enum_size(E);
    if (J.size() != E.size()) throw std::invalid_argument("exact_distribution: |J| != |E|");
    std::size_t n = E.size();
    std::vector<double> log_p(n), log_1mp(n);
    for (std::size_t e = 0; e < n; ++e) {
        double p = params.interaction(J.J[e]);
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("interaction value outside [0,1]");
        log_p[e] = p > 0.0 ? std::log(p) : kNegInf;
        log_1mp[e] = p < 1.0 ? std::log1p(-p) : kNegInf;
    }
    double log_q = std::log(params.q);
    auto wires = wiring_pairs(E, pi);
    std::size_t count = std::size_t{1} << n;
    std::vector<double> lw(count);

    auto kernel = [&](std::size_t lo, std::size_t hi) {
        FastDsu dsu(static_cast<int>(E.span.size()));
        for (std::size_t mask = lo; mask < hi; ++mask) {
            double w = 0.0;
            for (std::size_t e = 0; e < n; ++e) w += (mask & (1u << e)) ? log_p[e] : log_1mp[e];
            if (w != kNegInf)
                w += log_q *
                     count_clusters_mask(E, static_cast<std::uint32_t>(mask), wires, dsu);
            lw[mask] = w;
        }
    };

    if (parallel && count >= 4096) {
        // fixed chunk grid independent of the thread count
        const std::size_t chunks = 64;
        std::size_t step = (count + chunks - 1) / chunks;
#pragma omp parallel for schedule(dynamic)
        for (std::size_t c = 0; c < chunks; ++c)
            kernel(c * step, std::min(count, (c + 1) * step));
    } else {
        kernel(0, count);
    }

    ProbabilityTable table;
    table.log_Z = logsumexp(lw);
    table.prob.resize(count);
    for (std::size_t mask = 0; mask < count; ++mask)
        table.prob[mask] = lw[mask] == kNegInf ? 0.0 : std::exp(lw[mask] - table.log_Z);
    return table;
}

std::vector<BoundaryPartition> boundary_classes(const EdgeSet &E) {
    std::size_t n = E.boundary_span.size();
    if (n > 12) throw std::invalid_argument("boundary_classes: span too large (> 12 vertices)");
    std::vector<BoundaryPartition> out;
    std::vector<int> g(n, 0);
    // enumerate restricted-growth strings in lexicographic order
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int maxg) {
        if (k == n) {
            BoundaryPartition pi;
            pi.group = g;
            out.push_back(pi);
            return;
        }
        for (int v = 0; v <= maxg + 1; ++v) {
            g[k] = v;
            rec(k + 1, std::max(maxg, v));
        }
    };
    if (n == 0) {
        out.push_back(BoundaryPartition{});
    } else {
        rec(0, -1);
    }
    return out;
}

std::pair<BoundaryPartition, double> worst_boundary(
    const EdgeSet &E, const Media &J, const FKParams &params,
    const std::function<bool(const BondConfig &)> &event) {
    auto classes = boundary_classes(E);
    BoundaryPartition best = classes.front();
    double best_p = -1.0;
    for (const auto &pi : classes) {
        ProbabilityTable t = exact_distribution(E, J, params, pi, false);
        double p = 0.0;
        for (std::size_t mask = 0; mask < t.prob.size(); ++mask)
            if (event(config_from_mask(static_cast<std::uint32_t>(mask), E.size())))
                p += t.prob[mask];
        if (p > best_p) {
            best_p = p;
            best = pi;
        }
    }
    return {best, best_p};
}

double exact_averaged(const EdgeSet &E, const DisorderLaw &rho, const FKParams &params,
                      const BoundaryPartition &pi,
                      const std::function<double(const Media &, const BondConfig &)> &f) {
    rho.validate();
    std::size_t n = E.size();
    double work = std::pow(static_cast<double>(rho.atoms.size()), static_cast<double>(n)) *
                  std::pow(2.0, static_cast<double>(n));
    if (work > 1e7) throw std::invalid_argument("exact_averaged: instance too large");

    std::vector<std::size_t> digit(n, 0);
    double total = 0.0;
    while (true) {
        Media J(n);
        double pj = 1.0;
        for (std::size_t e = 0; e < n; ++e) {
            J.J[e] = rho.atoms[digit[e]].first;
            pj *= rho.atoms[digit[e]].second;
        }
        if (pj > 0.0) {
            ProbabilityTable t = exact_distribution(E, J, params, pi, false);
            double inner = 0.0;
            for (std::size_t mask = 0; mask < t.prob.size(); ++mask)
                if (t.prob[mask] > 0.0)
                    inner += t.prob[mask] *
                             f(J, config_from_mask(static_cast<std::uint32_t>(mask), n));
            total += pj * inner;
        }
        std::size_t e = 0;
        while (e < n && ++digit[e] == rho.atoms.size()) digit[e++] = 0;
        if (e == n) break;
    }
    return total;
}

double log_partition_Y(const EdgeSet &E, const Media &J, const FKParams &params,
                       const BoundaryPartition &pi) {
    check_enum_size(E);
    std::size_t n = E.size();
    std::vector<double> log_r(n);
    for (std::size_t e = 0; e < n; ++e) {
        double p = params.interaction(J.J[e]);
        if (p >= 1.0) throw std::invalid_argument("log_partition_Y: p(J_e) = 1 not allowed");
        log_r[e] = p > 0.0 ? std::log(p) - std::log1p(-p) : kNegInf;
    }
    double log_q = std::log(params.q);
    auto wires = wiring_pairs(E, pi);
    std::size_t count = std::size_t{1} << n;
    std::vector<double> lw(count);
    FastDsu dsu(static_cast<int>(E.span.size()));
    for (std::size_t mask = 0; mask < count; ++mask) {
        double w = 0.0;
        for (std::size_t e = 0; e < n; ++e)
            if (mask & (1u << e)) w += log_r[e];
        if (w != kNegInf)
            w += log_q * count_clusters_mask(E, static_cast<std::uint32_t>(mask), wires, dsu);
        lw[mask] = w;
    }
    return logsumexp(lw);
}

PressureEstimate pressure_estimate(int d, int N, const DisorderLaw &rho, const FKParams &params,
                                   bool wired, int replicas, std::uint64_t seed) {
    rho.validate();
    Box box = Box::lambda_hat(d, N);
    EdgeSet E = EdgeSet::wired(box);
    check_enum_size(E);
    BoundaryPartition pi = wired ? BoundaryPartition::wired_bc(E) : BoundaryPartition::free_bc(E);
    double norm = std::pow(2.0 * N + 1.0, d);

    std::vector<double> cum;
    double acc = 0.0;
    for (auto [v, p] : rho.atoms) {
        acc += p;
        cum.push_back(acc);
    }

    Stream master(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < replicas; ++r) {
        Stream s = master.derive(static_cast<std::uint64_t>(r));
        Media J(E.size());
        for (std::size_t e = 0; e < E.size(); ++e) {
            double u = s.next_double();
            std::size_t k = 0;
            while (k + 1 < cum.size() && u >= cum[k]) ++k;
            J.J[e] = rho.atoms[k].first;
        }
        double v = log_partition_Y(E, J, params, pi) / norm;
        sum += v;
        sum2 += v * v;
    }
    PressureEstimate out;
    out.replicas = replicas;
    out.mean = sum / replicas;
    double var = std::max(0.0, sum2 / replicas - out.mean * out.mean);
    out.std_error = replicas > 1 ? std::sqrt(var / (replicas - 1)) : 0.0;
    return out;
}

}  // namespace fkcg
