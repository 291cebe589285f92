#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/fk.hpp"
#include "fkcg/geometry.hpp"

// Closed-form domination constants, correlation-inequality verification on
// enumerable instances, finite-size estimators (theta, crossings, block
// densities, slabs), the averaged-measure conditioning counterexample, and
// one-sided stochastic-domination tests on sampled data.

namespace fkcg {

/// 1 - (K-1)^{K-1} / K^K, the validity threshold for r_lss.
double lss_threshold(int K);

/// (1 - (1-p)^{1/K} / (K-1)^{(K-1)/K}) (1 - ((1-p)(K-1))^{1/K});
/// requires K >= 2 and p >= lss_threshold(K).
double r_lss(int K, double p);

/// r_lss(K, 1 - sqrt(1-p))^2; requires the inner argument in the r_lss
/// domain.
double r_prime(int K, double p);

/// An increasing event as a union of principal up-sets: the event holds for
/// mask m iff some generator g satisfies g & m == g.
struct UpSet {
    std::vector<std::uint32_t> generators;  // minimal elements, as edge masks

    bool contains(std::uint32_t mask) const {
        for (std::uint32_t g : generators)
            if ((mask & g) == g) return true;
        return false;
    }
};

struct VerificationReport {
    std::string inequality;
    double worst_margin = 0.0;  // smallest slack; negative = violation
    bool pass = false;
};

/// Exhaustive inequality checks on one enumerable instance: positive
/// association (lattice condition and principal up-set pairs), monotonicity
/// in the boundary wiring over refinement-covering class pairs and in a
/// pointwise-larger edge-probability map, the Bernoulli sandwich between
/// the single-edge effective probability and p itself, and the spatial
/// consistency of the quenched measure over every proper sub edge set.
/// Requires |E| <= 12 and boundary span <= 12.
std::vector<VerificationReport> verify_inequalities(const EdgeSet &E, const Media &J,
                                                    const FKParams &params, double tolerance);

/// Same checks over a whole parameter grid. The cluster-count structure and
/// its integer identities are parameter-free and computed once; the grid
/// loop only reweights them, so this is much cheaper than one call per
/// point. Margins are the worst over the grid.
std::vector<VerificationReport> verify_inequalities_grid(const EdgeSet &E, const Media &J,
                                                         const std::vector<FKParams> &grid,
                                                         double tolerance);

/// All connected edge sets of Z^2 with 1..max_edges edges, up to
/// translation (anchored at the lexicographically smallest vertex).
std::vector<EdgeSet> edge_set_corpus(int max_edges);

struct DlrFailureReport {
    double conditional = 0.0;        // averaged P(e open | f open) on the wired pair
    double unconditional_sup = 0.0;  // sup over wirings of the averaged single-edge marginal
    double margin = 0.0;             // conditional - unconditional_sup
};

/// The two-edge demonstration that averaging destroys spatial consistency:
/// couplings Bernoulli(lambda), endpoints of the path wired together.
/// Requires lambda, p in (0,1) and q >= 1.
DlrFailureReport demonstrate_dlr_failure(double lambda, double p, double q);

struct CurvePoint {
    int N = 0;
    double value = 0.0;
    double std_error = 0.0;
    int replicas = 0;
};

/// MC estimate of the averaged probability that the origin reaches the
/// boundary of the centered box of radius N, per N.
std::vector<CurvePoint> estimate_theta(const std::vector<int> &Ns, int d, const DisorderLaw &rho,
                                       const FKParams &params, bool wired, int replicas,
                                       std::uint64_t seed);

/// Replica-averaged indicator of {crossing cluster exists and is the unique
/// cluster of diameter >= l} on the box {1..N-1}^d.
CurvePoint crossing_experiment(int N, int l, int d, const DisorderLaw &rho,
                               const FKParams &params, bool wired, int replicas,
                               std::uint64_t seed);

struct DensityReport {
    std::vector<double> densities;  // crossing-cluster density per replica, -1 if no crossing
    double mean_density = 0.0;      // over replicas with a crossing
    double crossing_fraction = 0.0;
    double outside_fraction = 0.0;  // density outside [lo, hi], counting missing crossings
};

/// Per-replica crossing-cluster relative density on {1..N-1}^d against the
/// bracket [lo, hi].
DensityReport density_experiment(int N, int d, const DisorderLaw &rho, const FKParams &params,
                                 bool wired, int replicas, std::uint64_t seed, double lo,
                                 double hi);

struct SlabStats {
    double crossing_prob = 0.0;       // d = 2: horizontal crossing of the slab
    double crossing_err = 0.0;
    double min_pair_connectivity = 1.0;  // d >= 3: worst sampled pair
    double isolated_fraction = 0.0;   // replicas with a J-isolated bottom vertex
};

/// Finite-size slab connectivity statistics on {1..N-1}^{d-1} x {1..H-1}.
SlabStats slab_probe(int N, int H, int d, const DisorderLaw &rho, const FKParams &params,
                     int replicas, std::uint64_t seed);

struct DominationReport {
    int events = 0;
    int rejections = 0;
    double alpha = 0.01;
    double threshold = 0.0;           // Bonferroni-corrected one-sided z threshold
    std::vector<double> z;            // (mean_A - mean_B) / pooled standard error
    bool pass = false;                // no rejections of H: mean_A <= mean_B
};

/// One-sided two-sample z-tests, per increasing event, of P_A(event) <=
/// P_B(event), Bonferroni-corrected across events.
DominationReport domination_test(const std::vector<BondConfig> &sample_a,
                                 const std::vector<BondConfig> &sample_b,
                                 const std::vector<UpSet> &events, double alpha = 0.01);

/// Upper quantile z with P(Z > z) = a for standard normal Z, a in (0, 1/2].
double normal_upper_quantile(double a);

}  // namespace fkcg
