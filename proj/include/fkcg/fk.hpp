#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fkcg/bonds.hpp"
#include "fkcg/geometry.hpp"

// Exact finite-volume random-cluster measure: weights, cluster counting
// under boundary wiring, full enumeration, boundary-condition classes,
// averaging over finite-support disorder, partition functions, pressure.

namespace fkcg {

/// Interaction map J -> p(J): either p(J) = 1 - exp(-beta J) or p(J) = c J.
struct Interaction {
    enum class Family { exp_beta, linear };
    Family family = Family::linear;
    double param = 1.0;  // beta, or the linear coefficient c

    double operator()(double J) const;
    static Interaction beta(double b) { return {Family::exp_beta, b}; }
    static Interaction scale(double c) { return {Family::linear, c}; }
};

struct FKParams {
    double q = 1.0;
    Interaction interaction = Interaction::scale(1.0);
};

/// Finite-support coupling law: atoms (value, probability).
struct DisorderLaw {
    std::vector<std::pair<double, double>> atoms;

    void validate() const;  // throws on bad support/probabilities
    static DisorderLaw bernoulli(double lambda) { return {{{0.0, 1.0 - lambda}, {1.0, lambda}}}; }
    static DisorderLaw delta(double v) { return {{{v, 1.0}}}; }
};

/// p / (p + q (1 - p)): single-edge free-boundary open probability.
double p_tilde(double p, double q);
/// p / (1 + (1 - p)^2 (q - 1)): conditional open probability in the
/// two-edge wiring counterexample.
double p_hat(double p, double q);

/// Number of clusters of (span of E, open edges, pi-wired groups); every
/// component counted contains an endpoint of an edge of E.
int cluster_count(const EdgeSet &E, const BondConfig &omega, const BoundaryPartition &pi);

/// Full distribution over the 2^|E| configurations, indexed by bitmask
/// (bit e set <=> omega_e open).
struct ProbabilityTable {
    std::vector<double> prob;
    double log_Z = 0.0;

    std::size_t config_count() const { return prob.size(); }
    double probability(const BondConfig &omega) const;
    /// P(omega_e = 1).
    double marginal(std::size_t e) const;
    double expect(const std::function<double(const BondConfig &)> &f) const;
};

BondConfig config_from_mask(std::uint32_t mask, std::size_t n_edges);
std::uint32_t mask_from_config(const BondConfig &omega);

inline constexpr std::size_t kMaxEnumEdges = 24;

/// Exact enumeration; requires |E| <= 24. The parallel kernel gives results
/// bit-identical to the serial one (fixed-order reduction).
ProbabilityTable exact_distribution(const EdgeSet &E, const Media &J, const FKParams &params,
                                    const BoundaryPartition &pi, bool parallel = true);

/// One representative per equivalence class of boundary wirings: all set
/// partitions of the boundary span, in restricted-growth order (the first
/// entry is the free class, the last generated wired one is among them).
std::vector<BoundaryPartition> boundary_classes(const EdgeSet &E);

/// argmax over boundary classes of Phi(event); ties keep the earliest class.
std::pair<BoundaryPartition, double> worst_boundary(
    const EdgeSet &E, const Media &J, const FKParams &params,
    const std::function<bool(const BondConfig &)> &event);

/// Exact E_rho Phi-expectation of f(J, omega) over the product disorder law.
double exact_averaged(const EdgeSet &E, const DisorderLaw &rho, const FKParams &params,
                      const BoundaryPartition &pi,
                      const std::function<double(const Media &, const BondConfig &)> &f);

/// log of Y = sum_omega prod (p/(1-p))^omega_e q^{C^pi(omega)}.
double log_partition_Y(const EdgeSet &E, const Media &J, const FKParams &params,
                       const BoundaryPartition &pi);

struct PressureEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int replicas = 0;
};

/// Monte Carlo over the disorder of the exactly computed
/// (2N+1)^{-d} log Y on the centered box of radius N.
PressureEstimate pressure_estimate(int d, int N, const DisorderLaw &rho, const FKParams &params,
                                   bool wired, int replicas, std::uint64_t seed);

}  // namespace fkcg
