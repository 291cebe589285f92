#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/fk.hpp"
#include "fkcg/rng.hpp"

// Monte Carlo sampling of the quenched measure (heat bath for any q >= 1,
// Swendsen-Wang for integer q, direct sampling at q = 1), of the averaged
// measure by disorder replication, and of the block product measure Psi.

namespace fkcg {

struct ChainState {
    const EdgeSet *E = nullptr;
    Media J;
    FKParams params;
    BoundaryPartition pi;
    BondConfig omega;     // invariant: J_e = 0 implies omega_e = 0
    Stream rng{0};
    long sweeps = 0;

    std::vector<double> p;         // p(J_e) per edge
    std::vector<int> contracted;   // span vertex -> pi-contracted vertex id
    int n_contracted = 0;
};

/// Fresh chain started from the all-closed configuration.
ChainState make_chain(const EdgeSet &E, const Media &J, const FKParams &params,
                      const BoundaryPartition &pi, std::uint64_t seed);

/// Exact conditional P(omega_e = 1 | omega restricted off e): p(J_e) when the
/// endpoints are connected off e (through open edges plus wiring), else
/// p/(p + q(1-p)).
double heat_bath_open_prob(const ChainState &state, std::size_t e);

void heat_bath_step(ChainState &state, std::size_t e);

/// Systematic scan over all edges in the fixed edge order.
void heat_bath_sweep(ChainState &state);

/// Swendsen-Wang: color clusters uniformly among q colors, reopen matched
/// edges with probability p(J_e). Requires integer q >= 1.
void sw_sweep(ChainState &state);

/// Independent Bernoulli(p(J_e)) resampling; exact at q = 1 only.
void direct_sample(ChainState &state);

enum class Dynamics { heat_bath, swendsen_wang, direct };

struct Schedule {
    long sweeps = 1000;
    long burn_in = 100;  // heuristic default; the dynamics carry no a priori
    long thin = 10;      // mixing guarantee, see the README diagnostics note
    Dynamics dynamics = Dynamics::heat_bath;
};

struct SampleBatch {
    std::vector<BondConfig> configs;
    std::uint64_t replica = 0;
};

SampleBatch sample_quenched(const EdgeSet &E, const Media &J, const FKParams &params,
                            const BoundaryPartition &pi, const Schedule &schedule,
                            std::uint64_t seed);

/// J drawn i.i.d. from rho per edge.
Media sample_media(const EdgeSet &E, const DisorderLaw &rho, Stream &stream);

/// One disorder replica per entry; replica r uses substream derive(r).
std::vector<std::pair<Media, SampleBatch>> sample_averaged(const EdgeSet &E,
                                                           const DisorderLaw &rho,
                                                           const FKParams &params,
                                                           const BoundaryPartition &pi,
                                                           int replicas,
                                                           const Schedule &schedule,
                                                           std::uint64_t seed);

/// The block product measure on E^w(Lambda): independent averaged
/// free-boundary samples per interior block, independent averaged
/// single-edge free samples on lateral edges.
std::pair<Media, BondConfig> sample_psi(const Box &lambda, int L, const DisorderLaw &rho,
                                        const FKParams &params, std::uint64_t seed);

}  // namespace fkcg
