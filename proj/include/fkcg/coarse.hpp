#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/fk.hpp"
#include "fkcg/geometry.hpp"

// Block events of the coarse graining: seeds on block faces, the
// seed-connecting events at fixed and derived sub-scale, the double
// connection event, the coupling-structure event, their conjunction, the
// interface event on the logarithmic slab, and the good-slab probe.

namespace fkcg {

/// Largest cutoff eps in {positive atom values} U {1} with
/// P(0 < J_e < eps) <= e^{-L} (open-interval mass). Bernoulli laws give 1.
double cutoff_epsilon(const DisorderLaw &rho, int L);

/// Lexicographically first admissible facet on face (axis,side) of the
/// closed block of i that either lies outside lambda or has all its facet
/// edges open. omega lives on E (edges absent from E count as closed).
std::optional<Facet> find_seed(const EdgeSet &E, const BondConfig &omega, const Box &lambda,
                               const BlockIndex &block, int axis, int side, int H);

/// Every face of the closed block owns a seed and all seed facets meeting
/// lambda lie in one cluster of omega restricted to the block edge set.
bool event_E_LH(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i,
                int L, int H);

/// event_E_LH at the derived sub-scale H = floor((delta log L)^{1/d}).
bool event_E_L(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i,
               int L, double delta);

/// Conjunction of event_E_L at scale L/3 over the 3^d sub-blocks 3i + {0,1,2}^d.
bool event_D(const EdgeSet &E, const BondConfig &omega, const Box &lambda, const Point &i, int L,
             double delta);

/// (a) exactly one J-open cluster of sup-norm diameter >= L in
/// E^w(B^{L,1}_i); (b) every coupling on E^w(B^{L,3}_i) is 0 or >= eps_L.
bool event_G(const EdgeSet &E, const Media &J, const Box &lambda, const Point &i, int L,
             double eps_L);

/// event_D and event_G.
bool event_T(const EdgeSet &E, const Media &J, const BondConfig &omega, const Box &lambda,
             const Point &i, int L, double delta, double eps_L);

struct InterfaceResult {
    bool holds = false;
    std::vector<Point> qualifying;  // block indices passing both per-block tests
};

/// Interface event on the logarithmic slab of n blocks of side L: the set of
/// block indices i in {0..n-1}^{d-1} x {1..ceil(log n)-1} with
/// C^2_o cap B^L_i nonempty and J in the structure event, tested for a
/// horizontal interface.
InterfaceResult event_L(const EdgeSet &E, const Media &J, const BondConfig &omega, int d, int n,
                        int L, double eps_L);

struct ProbeResult {
    double min_estimate = 1.0;  // worst sampled value of the probed bound
    double std_error = 0.0;
    int evaluations = 0;
};

/// Diagnostic probe of the good-slab property: over sampled bottom vertices
/// x, extreme wirings and overlays, Monte Carlo estimate of
/// P(x connected to o, or x not connected to the top layer). A heuristic
/// probe of the quantified property, never a certificate.
ProbeResult j_good_slab_probe(const Box &slab, const Media &J, const FKParams &params,
                              int vertex_samples, int mc_samples, std::uint64_t seed);

}  // namespace fkcg
