#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fkcg/fk.hpp"

using namespace fkcg;

namespace {

// two-edge path 0-1-2 in d=1: e = {0,1}, f = {1,2}; boundary span {0, 2}
EdgeSet two_edge_path() {
    return EdgeSet::from_edges({Edge(Point{0}, Point{1}), Edge(Point{1}, Point{2})});
}

EdgeSet single_edge() { return EdgeSet::from_edges({Edge(Point{0}, Point{1})}); }

}  // namespace

TEST_CASE("cluster counting") {
    // all closed, free pi on E^f({1,2}^2): 4 isolated vertices
    EdgeSet ef = EdgeSet::free(Box::lambda(2, 3));
    BondConfig closed(ef.size());
    CHECK(cluster_count(ef, closed, BoundaryPartition::free_bc(ef)) == 4);

    // all closed, wired pi on E^w({1}) in d=1: boundary merged -> 2
    EdgeSet ew = EdgeSet::wired(Box(Point{1}, Point{1}));
    BondConfig c2(ew.size());
    CHECK(cluster_count(ew, c2, BoundaryPartition::wired_bc(ew)) == 2);

    // two-edge instance with x wired to z
    EdgeSet E = two_edge_path();
    BoundaryPartition pi = BoundaryPartition::wired_bc(E);
    CHECK(cluster_count(E, config_from_mask(0b00, 2), pi) == 2);  // {x,z}, {y}
    CHECK(cluster_count(E, config_from_mask(0b01, 2), pi) == 1);
    CHECK(cluster_count(E, config_from_mask(0b10, 2), pi) == 1);
    CHECK(cluster_count(E, config_from_mask(0b11, 2), pi) == 1);
}

TEST_CASE("single edge marginals") {
    EdgeSet E = single_edge();
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double q : {1.0, 1.5, 2.0, 4.0}) {
            FKParams params{q, Interaction::scale(p)};
            Media J(1, 1.0);
            auto wired = exact_distribution(E, J, params, BoundaryPartition::wired_bc(E));
            CHECK(wired.marginal(0) == doctest::Approx(p).epsilon(1e-13));
            auto free = exact_distribution(E, J, params, BoundaryPartition::free_bc(E));
            CHECK(free.marginal(0) == doctest::Approx(p_tilde(p, q)).epsilon(1e-13));
        }
}

TEST_CASE("q=1 is a product measure") {
    EdgeSet E = EdgeSet::free(Box::lambda(2, 3));
    Media J(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) J.J[e] = 0.2 + 0.15 * e;
    FKParams params{1.0, Interaction::scale(1.0)};
    auto t = exact_distribution(E, J, params, BoundaryPartition::free_bc(E));
    for (std::size_t mask = 0; mask < t.prob.size(); ++mask) {
        double expect = 1.0;
        for (std::size_t e = 0; e < E.size(); ++e)
            expect *= (mask & (1u << e)) ? J.J[e] : 1.0 - J.J[e];
        CHECK(t.prob[mask] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("distribution normalizes and parallel kernel matches serial") {
    EdgeSet E = EdgeSet::wired(Box::lambda(2, 3));
    Media J(E.size(), 1.0);
    FKParams params{2.0, Interaction::scale(0.5)};
    for (auto pi : {BoundaryPartition::free_bc(E), BoundaryPartition::wired_bc(E)}) {
        auto ts = exact_distribution(E, J, params, pi, false);
        auto tp = exact_distribution(E, J, params, pi, true);
        double sum = 0.0;
        for (std::size_t m = 0; m < ts.prob.size(); ++m) {
            sum += ts.prob[m];
            CHECK(ts.prob[m] == tp.prob[m]);  // bit-identical
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(ts.log_Z == tp.log_Z);
    }
}

TEST_CASE("boundary classes") {
    EdgeSet one = single_edge();
    CHECK(boundary_classes(one).size() == 2);  // Bell(2)

    EdgeSet E = EdgeSet::from_edges(
        {Edge(Point{1, 1}, Point{1, 2}), Edge(Point{1, 2}, Point{1, 3})});
    REQUIRE(E.boundary_span.size() == 3);
    auto classes = boundary_classes(E);
    CHECK(classes.size() == 5);  // Bell(3)
    CHECK(classes.front() == BoundaryPartition{{0, 0, 0}});  // wired comes first lexicographically

    // distinct classes give distinct cluster-count vectors
    for (std::size_t a = 0; a < classes.size(); ++a)
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            bool differ = false;
            for (std::uint32_t m = 0; m < 4; ++m)
                if (cluster_count(E, config_from_mask(m, 2), classes[a]) !=
                    cluster_count(E, config_from_mask(m, 2), classes[b]))
                    differ = true;
            CHECK(differ);
        }
}

TEST_CASE("worst boundary") {
    EdgeSet E = single_edge();
    Media J(1, 1.0);
    FKParams params{2.0, Interaction::scale(0.5)};
    auto [pi, prob] = worst_boundary(E, J, params,
                                     [](const BondConfig &w) { return w.is_open(0); });
    CHECK(pi == BoundaryPartition{{0, 0}});  // wired attains the sup
    CHECK(prob == doctest::Approx(0.5).epsilon(1e-13));

    auto [pi2, prob2] = worst_boundary(E, J, params, [](const BondConfig &) { return true; });
    CHECK(prob2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(pi2 == boundary_classes(E).front());  // ties keep the first class
}

TEST_CASE("averaged two-edge counterexample") {
    EdgeSet E = two_edge_path();
    BoundaryPartition pi = BoundaryPartition::wired_bc(E);  // x wired to z

    for (double lambda : {0.3, 0.5, 0.7})
        for (double p : {0.2, 0.5, 0.8})
            for (double q : {1.5, 2.0, 4.0}) {
                DisorderLaw rho = DisorderLaw::bernoulli(lambda);
                FKParams params{q, Interaction::scale(p)};
                double both = exact_averaged(E, rho, params, pi,
                                             [](const Media &, const BondConfig &w) {
                                                 return w.is_open(0) && w.is_open(1) ? 1.0 : 0.0;
                                             });
                CHECK(both ==
                      doctest::Approx(lambda * lambda * p * p_hat(p, q)).epsilon(1e-12));
                double f_only = exact_averaged(E, rho, params, pi,
                                               [](const Media &, const BondConfig &w) {
                                                   return !w.is_open(0) && w.is_open(1) ? 1.0 : 0.0;
                                               });
                double expect = lambda * lambda * (1 - p) * p_hat(p, q) +
                                (1 - lambda) * lambda * p_tilde(p, q);
                CHECK(f_only == doctest::Approx(expect).epsilon(1e-12));
                // conditional law of omega_e given omega_f = 1
                double cond = both / (both + f_only);
                double formula = lambda * p / (lambda + (1 - lambda) * p_tilde(p, q) / p_hat(p, q));
                CHECK(cond == doctest::Approx(formula).epsilon(1e-12));
            }

    // at lambda = p = 1/2, q = 2 the conditional is 3/11 and the excess 1/44
    DisorderLaw rho = DisorderLaw::bernoulli(0.5);
    FKParams params{2.0, Interaction::scale(0.5)};
    double both = exact_averaged(E, rho, params, pi, [](const Media &, const BondConfig &w) {
        return w.is_open(0) && w.is_open(1) ? 1.0 : 0.0;
    });
    double f_marg = exact_averaged(E, rho, params, pi, [](const Media &, const BondConfig &w) {
        return w.is_open(1) ? 1.0 : 0.0;
    });
    double cond = both / f_marg;
    CHECK(cond == doctest::Approx(3.0 / 11.0).epsilon(1e-13));
    CHECK(cond - 0.25 == doctest::Approx(1.0 / 44.0).epsilon(1e-12));
}

TEST_CASE("averaged delta_1 reduces to quenched") {
    EdgeSet E = two_edge_path();
    BoundaryPartition pi = BoundaryPartition::free_bc(E);
    FKParams params{2.0, Interaction::scale(0.6)};
    Media J(2, 1.0);
    auto t = exact_distribution(E, J, params, pi);
    double quenched = t.marginal(0);
    double averaged = exact_averaged(E, DisorderLaw::delta(1.0), params, pi,
                                     [](const Media &, const BondConfig &w) {
                                         return w.is_open(0) ? 1.0 : 0.0;
                                     });
    CHECK(averaged == doctest::Approx(quenched).epsilon(1e-13));
}

TEST_CASE("partition function Y") {
    EdgeSet E = single_edge();
    Media J(1, 1.0);
    double p = 0.4, q = 3.0, r = p / (1 - p);
    FKParams params{q, Interaction::scale(p)};
    double Y = std::exp(log_partition_Y(E, J, params, BoundaryPartition::free_bc(E)));
    CHECK(Y == doctest::Approx(q * q + r * q).epsilon(1e-12));

    // q = 1 factorizes
    EdgeSet E2 = EdgeSet::free(Box::lambda(2, 3));
    Media J2(E2.size());
    for (std::size_t e = 0; e < E2.size(); ++e) J2.J[e] = 0.1 + 0.2 * e;
    FKParams p1{1.0, Interaction::scale(1.0)};
    double expect = 0.0;
    for (std::size_t e = 0; e < E2.size(); ++e) expect += std::log1p(J2.J[e] / (1 - J2.J[e]));
    CHECK(log_partition_Y(E2, J2, p1, BoundaryPartition::free_bc(E2)) ==
          doctest::Approx(expect).epsilon(1e-12));

    CHECK_THROWS(log_partition_Y(E, Media(1, 1.0), FKParams{2.0, Interaction::scale(1.0)},
                                 BoundaryPartition::free_bc(E)));
}

TEST_CASE("log Y convex in log beta") {
    EdgeSet E = EdgeSet::free(Box::lambda(2, 3));
    Media J(E.size());
    for (std::size_t e = 0; e < E.size(); ++e) J.J[e] = 0.4 + 0.1 * e;
    BoundaryPartition pi = BoundaryPartition::wired_bc(E);
    double h = 0.1;
    for (double t = -2.0; t <= 1.0; t += h) {
        double y0 = log_partition_Y(E, J, {2.0, Interaction::beta(std::exp(t - h))}, pi);
        double y1 = log_partition_Y(E, J, {2.0, Interaction::beta(std::exp(t))}, pi);
        double y2 = log_partition_Y(E, J, {2.0, Interaction::beta(std::exp(t + h))}, pi);
        CHECK(y0 + y2 - 2 * y1 >= -1e-9);
    }
}

TEST_CASE("pressure estimate") {
    // rho = delta_0: only omega = 0 contributes, Y = q^{|span|}
    FKParams params{2.0, Interaction::beta(1.0)};
    auto est = pressure_estimate(1, 1, DisorderLaw::delta(0.0), params, false, 4, 1);
    // d=1, N=1: box {-1..1}, E^w spans 5 vertices, free pi: C = 5
    CHECK(est.mean == doctest::Approx(5.0 * std::log(2.0) / 3.0).epsilon(1e-12));
    CHECK(est.std_error == doctest::Approx(0.0));

    // beta = 0 gives the same value for any rho
    auto est2 =
        pressure_estimate(1, 1, DisorderLaw::bernoulli(0.5), {2.0, Interaction::beta(0.0)}, false, 8, 7);
    CHECK(est2.mean == doctest::Approx(est.mean).epsilon(1e-12));

    // determinism and free <= wired at matched disorder
    auto a = pressure_estimate(1, 2, DisorderLaw::bernoulli(0.5), params, false, 16, 99);
    auto b = pressure_estimate(1, 2, DisorderLaw::bernoulli(0.5), params, false, 16, 99);
    CHECK(a.mean == b.mean);
    auto w = pressure_estimate(1, 2, DisorderLaw::bernoulli(0.5), params, true, 16, 99);
    CHECK(w.mean <= a.mean + 1e-12);  // wiring only merges clusters, so Y^w <= Y^f
}
