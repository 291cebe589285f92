#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fkcg/cluster.hpp"
#include "fkcg/ising.hpp"
#include "fkcg/sampler.hpp"

using namespace fkcg;

namespace {

// Exact conditional P(sigma | omega) of the Edwards-Sokal coupling: +1 on
// boundary-touching clusters, uniform on the rest.
double spin_given_bond_prob(const EdgeSet &E, const BondConfig &w, const Box &box,
                            const std::vector<int> &sigma) {
    ClusterDecomposition cd = decompose(E, w);
    std::vector<char> touches(cd.count, 0);
    for (int v = 0; v < (int)E.span.size(); ++v)
        if (!box.contains(E.span[v])) touches[cd.cluster_of[v]] = 1;
    double pr = 1.0;
    for (int c = 0; c < cd.count; ++c) {
        int first = cd.members[c][0];
        for (int v : cd.members[c])
            if (sigma[v] != sigma[first]) return 0.0;
        if (touches[c]) {
            if (sigma[first] != 1) return 0.0;
        } else {
            pr *= 0.5;
        }
    }
    return pr;
}

// Exact conditional P(omega | sigma): matched edges open independently.
double bond_given_spin_prob(const EdgeSet &E, const std::vector<int> &sigma, const Media &J,
                            double beta, const BondConfig &w) {
    double pr = 1.0;
    for (std::size_t e = 0; e < E.size(); ++e) {
        bool matched = sigma[E.edge_ends[0][e]] == sigma[E.edge_ends[1][e]];
        double p = es_bond_p(beta, J.J[e]);
        if (!matched)
            pr *= w.is_open(e) ? 0.0 : 1.0;
        else
            pr *= w.is_open(e) ? p : 1.0 - p;
    }
    return pr;
}

std::vector<int> spins_from_mask(const EdgeSet &E, const Box &box, std::uint32_t mask) {
    auto interior = box.vertices();
    std::vector<int> sigma(E.span.size(), 1);
    for (std::size_t k = 0; k < interior.size(); ++k)
        sigma[E.span_index(interior[k])] = (mask & (1u << k)) ? 1 : -1;
    return sigma;
}

}  // namespace

TEST_CASE("ising exact basics") {
    // beta = 0: uniform
    Box box = Box::lambda(2, 3);
    EdgeSet E = EdgeSet::wired(box);
    Media J(E.size(), 1.0);
    SpinTable t0 = ising_exact(box, E, J, 0.0);
    for (double p : t0.prob) CHECK(p == doctest::Approx(1.0 / 16).epsilon(1e-12));

    // single site, d=1: P(+1) = e^{2 beta} / (e^{2 beta} + e^{-2 beta})
    Box one(Point{1}, Point{1});
    EdgeSet E1 = EdgeSet::wired(one);
    Media J1(E1.size(), 1.0);
    double beta = 0.7;
    SpinTable t1 = ising_exact(one, E1, J1, beta);
    double expect = std::exp(2 * beta) / (std::exp(2 * beta) + std::exp(-2 * beta));
    CHECK(t1.prob[1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("edwards-sokal marginals on a 2x2 box") {
    Box box = Box::lambda(2, 3);
    EdgeSet E = EdgeSet::wired(box);
    Media J(E.size(), 1.0);
    double beta = 0.35;
    FKParams fk{2.0, Interaction::beta(2.0 * beta)};  // p = 1 - e^{-2 beta J}
    BoundaryPartition wired = BoundaryPartition::wired_bc(E);
    ProbabilityTable fk_table = exact_distribution(E, J, fk, wired);
    SpinTable spin_table = ising_exact(box, E, J, beta);

    std::size_t n_spins = box.vertices().size();

    // spin marginal of the ES joint equals the Ising table (TV < 1e-10)
    double tv = 0.0;
    for (std::uint32_t sm = 0; sm < (1u << n_spins); ++sm) {
        auto sigma = spins_from_mask(E, box, sm);
        double p = 0.0;
        for (std::size_t wm = 0; wm < fk_table.prob.size(); ++wm)
            p += fk_table.prob[wm] *
                 spin_given_bond_prob(E, config_from_mask((std::uint32_t)wm, E.size()), box, sigma);
        tv += std::abs(p - spin_table.prob[sm]);
    }
    CHECK(tv / 2 < 1e-10);

    // bond marginal reconstructed through the spin conditional equals the
    // wired FK table (TV < 1e-10)
    tv = 0.0;
    for (std::size_t wm = 0; wm < fk_table.prob.size(); ++wm) {
        BondConfig w = config_from_mask((std::uint32_t)wm, E.size());
        double p = 0.0;
        for (std::uint32_t sm = 0; sm < (1u << n_spins); ++sm) {
            auto sigma = spins_from_mask(E, box, sm);
            p += spin_table.prob[sm] * bond_given_spin_prob(E, sigma, J, beta, w);
        }
        tv += std::abs(p - fk_table.prob[wm]);
    }
    CHECK(tv / 2 < 1e-10);
}

TEST_CASE("swendsen-wang composite kernel is stationary for the Ising measure") {
    Box box = Box::lambda(2, 3);
    EdgeSet E = EdgeSet::wired(box);
    Media J(E.size(), 1.0);
    double beta = 0.4;
    SpinTable t = ising_exact(box, E, J, beta);
    std::size_t n_spins = box.vertices().size();
    std::size_t spin_count = std::size_t{1} << n_spins;

    double residual = 0.0;
    for (std::uint32_t s2 = 0; s2 < spin_count; ++s2) {
        auto sig2 = spins_from_mask(E, box, s2);
        double next = 0.0;
        for (std::uint32_t s1 = 0; s1 < spin_count; ++s1) {
            auto sig1 = spins_from_mask(E, box, s1);
            double kern = 0.0;
            for (std::size_t wm = 0; wm < (std::size_t{1} << E.size()); ++wm) {
                BondConfig w = config_from_mask((std::uint32_t)wm, E.size());
                kern += bond_given_spin_prob(E, sig1, J, beta, w) *
                        spin_given_bond_prob(E, w, box, sig2);
            }
            next += t.prob[s1] * kern;
        }
        residual = std::max(residual, std::abs(next - t.prob[s2]));
    }
    CHECK(residual < 1e-10);
}

TEST_CASE("es samplers respect their conditionals") {
    Box box = Box::lambda(2, 3);
    EdgeSet E = EdgeSet::wired(box);
    Media J(E.size(), 1.0);
    Stream rng(9);

    // fully wired configuration: everything touches the boundary -> all +1
    BondConfig all_open(E.size(), true);
    SpinConfig s = es_spin_given_bond(E, all_open, box, rng);
    for (auto v : s.sigma) CHECK(v == 1);

    // alternating spins with J = 1: unsatisfied edges always closed
    SpinConfig alt = SpinConfig::all_plus(E);
    for (std::size_t v = 0; v < E.span.size(); ++v) {
        const Point &p = E.span[v];
        alt.sigma[v] = ((p[0] + p[1]) % 2 == 0) ? 1 : -1;
    }
    BondConfig w = es_bond_given_spin(E, alt, J, 1.5, rng);
    for (std::size_t e = 0; e < E.size(); ++e) CHECK(!w.is_open(e));
}

TEST_CASE("block magnetization") {
    Box box = Box::lambda(2, 5);
    EdgeSet E = EdgeSet::wired(box);
    SpinConfig plus = SpinConfig::all_plus(E);
    Box delta(Point{1, 1}, Point{2, 2});
    CHECK(block_magnetization(E, plus, delta) == doctest::Approx(1.0));
    SpinConfig minus = plus;
    for (auto &v : minus.sigma) v = -1;
    CHECK(block_magnetization(E, minus, delta) == doctest::Approx(-1.0));
    SpinConfig checker = plus;
    for (std::size_t v = 0; v < E.span.size(); ++v)
        checker.sigma[v] = ((E.span[v][0] + E.span[v][1]) % 2 == 0) ? 1 : -1;
    CHECK(block_magnetization(E, checker, delta) == doctest::Approx(0.0));
}

TEST_CASE("phase labels trivial cases") {
    Box box = Box::lambda(2, 12);  // {1..11}^2, L = 3 covering
    EdgeSet E = EdgeSet::wired(box);
    SpinConfig plus = SpinConfig::all_plus(E);

    BondConfig closed(E.size());
    PhaseLabels p0 = phase_labels(E, plus, closed, box, 3, 0.1, 0.01, 0.9);
    for (int v : p0.phi) CHECK(v == 0);

    BondConfig open(E.size(), true);
    PhaseLabels p1 = phase_labels(E, plus, open, box, 3, 0.1, 0.0, 1.0);
    for (int v : p1.phi) CHECK(v == 1);

    // flipping every interior spin under fully open bonds manufactures an
    // all-minus labeling that contradicts the plus extension: hard error
    SpinConfig minus = plus;
    for (std::size_t v = 0; v < E.span.size(); ++v)
        if (box.contains(E.span[v])) minus.sigma[v] = -1;
    CHECK_THROWS_AS(phase_labels(E, minus, open, box, 3, 0.1, 0.0, 1.0), std::runtime_error);
}

TEST_CASE("phase labels: locality under masking") {
    Box box = Box::lambda(2, 12);
    EdgeSet E = EdgeSet::wired(box);
    Media J(E.size(), 1.0);
    double beta = 1.0;  // strongly supercritical

    SpinConfig sigma = SpinConfig::all_plus(E);
    Stream rng(2718);
    for (int s = 0; s < 30; ++s) sw_ising_sweep(E, box, sigma, J, beta, rng);
    BondConfig omega = es_bond_given_spin(E, sigma, J, beta, rng);

    double m_beta = 0.98;
    PhaseLabels base = phase_labels(E, sigma, omega, box, 3, 0.3, 0.0, m_beta);

    // mutate sigma and omega outside Delta_t / E^w(Delta'_t): label t fixed
    for (std::size_t t = 0; t < base.covering.count(); t += 3) {
        Box dl = base.covering.delta(t);
        Box dp = base.covering.delta_prime(t);
        EdgeSet Edp = EdgeSet::wired(dp);
        SpinConfig sig2 = sigma;
        BondConfig om2 = omega;
        Stream noise(t);
        for (std::size_t v = 0; v < E.span.size(); ++v)
            if (!dl.contains(E.span[v]) && noise.bernoulli(0.5)) sig2.sigma[v] *= -1;
        for (std::size_t e = 0; e < E.size(); ++e)
            if (Edp.edge_index(E.edges[e]) < 0 && noise.bernoulli(0.5))
                om2.set(e, !om2.is_open(e));
        // recompute on the mutated pair; other blocks may throw the sign
        // invariant, so compare through a fresh computation of block t only
        PhaseLabels masked;
        try {
            masked = phase_labels(E, sig2, om2, box, 3, 0.3, 0.0, m_beta);
        } catch (const std::runtime_error &) {
            continue;  // masking broke a *different* block's invariant
        }
        CHECK(masked.phi[t] == base.phi[t]);
    }
}

TEST_CASE("legendre transform") {
    CHECK(legendre_lambda_star(0.0) == doctest::Approx(0.0));
    for (int k = 1; k < 99; ++k) {
        double x = -0.99 + 0.02 * k;
        CHECK(legendre_lambda_star(x) ==
              doctest::Approx(legendre_lambda_star(-x)).epsilon(1e-12));
        CHECK(legendre_lambda_star(x) >= x * x / 2 - 1e-12);
    }
    CHECK_THROWS(legendre_lambda_star(1.0));
    CHECK_THROWS(legendre_lambda_star(-1.2));
}
