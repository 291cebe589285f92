#pragma once

#include <cstdint>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/fk.hpp"
#include "fkcg/geometry.hpp"
#include "fkcg/rng.hpp"

// Dilute Ising model with plus boundary condition, the Edwards-Sokal
// coupling with the wired q=2 random-cluster measure at
// p(J) = 1 - exp(-2 beta J), Swendsen-Wang spin sampling, block
// magnetizations and phase labels.

namespace fkcg {

/// Spins on the span of E^w(box), +1 forced outside the box.
struct SpinConfig {
    std::vector<std::int8_t> sigma;  // indexed like EdgeSet::span

    static SpinConfig all_plus(const EdgeSet &E) {
        SpinConfig s;
        s.sigma.assign(E.span.size(), 1);
        return s;
    }
};

/// Exact distribution over the 2^|box| interior spin assignments (bit k of
/// the mask = spin of the k-th vertex of box, set = +1), with sigma = +1
/// outside. Requires |box| <= 20; J lives on E = E^w(box).
struct SpinTable {
    std::vector<double> prob;
    double log_Z = 0.0;
};

SpinTable ising_exact(const Box &box, const EdgeSet &E, const Media &J, double beta);

/// p(J) = 1 - exp(-2 beta J), the Edwards-Sokal bond parameter.
double es_bond_p(double beta, double J);

/// Spin constant on each omega-cluster: +1 on clusters touching the
/// complement of box, uniform +-1 independently on the others.
SpinConfig es_spin_given_bond(const EdgeSet &E, const BondConfig &omega, const Box &box,
                              Stream &rng);

/// omega_e = 1 with probability 1{sigma_x = sigma_y} p(J_e), independently.
BondConfig es_bond_given_spin(const EdgeSet &E, const SpinConfig &sigma, const Media &J,
                              double beta, Stream &rng);

/// One Swendsen-Wang spin update: bonds given spins, then spins given bonds.
void sw_ising_sweep(const EdgeSet &E, const Box &box, SpinConfig &sigma, const Media &J,
                    double beta, Stream &rng);

/// L^{-d} sum of sigma over delta.
double block_magnetization(const EdgeSet &E, const SpinConfig &sigma, const Box &delta);

struct PhaseLabels {
    Covering covering;
    std::vector<int> phi;                 // per covering index, in {-1, 0, +1}
    std::vector<double> magnetization;    // M_i per covering index
    double m_beta = 0.0, delta = 0.1, delta_prime = 0.01;
};

/// Block phase labels from a compatible (sigma, omega) pair on E^w(box),
/// using the (L,L)-covering. phi_i = spin of the crossing cluster of
/// Delta_i when the block passes all structural clauses, else 0. Throws if
/// an output violates the magnetization bracket or the neighbor sign rule:
/// those are construction invariants, so a violation is an implementation
/// bug, not data.
PhaseLabels phase_labels(const EdgeSet &E, const SpinConfig &sigma, const BondConfig &omega,
                         const Box &box, int L, double delta, double delta_prime, double m_beta,
                         long long isolated_threshold = -1);

/// ((1+x)/2) log(1+x) + ((1-x)/2) log(1-x); requires |x| < 1.
double legendre_lambda_star(double x);

}  // namespace fkcg
