#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace superflip;
using Catch::Approx;

namespace {

TorusState classical(double a, double b, double c) { return make_state(a, b, c, Grassmann(), Grassmann()); }

TorusState super_unit(int cls)
{
    return make_state(Grassmann::scalar(2, 1.0), 1.0, 1.0, Grassmann::generator(2, 1, 0.1), Grassmann::generator(2, 2, 0.1),
                      spin_of_class(cls));
}

} // namespace

TEST_CASE("region summand", "[identity]")
{
    double r1 = (3 + std::sqrt(5.0)) / 2;
    CHECK(summand_region(1, 3, 0).body() == Approx(1 / (3 * r1)).epsilon(1e-15));
    CHECK(summand_region(1, 3, 0).body() == Approx(1 / (r1 * r1 + 1)).epsilon(1e-14));
    CHECK(summand_region(1, 3, 0).body() == Approx(0.127322).margin(1e-6));
    CHECK(summand_region(2, 3, 0).body() == Approx(1 / (6 * (3 + 2 * std::sqrt(2.0)))).epsilon(1e-15));
    CHECK(summand_region(2, 3, 0).body() == Approx(0.028595).margin(1e-6));
    CHECK_THROWS_AS(summand_region(0.5, 3, 0), DomainError);
}

TEST_CASE("geodesic summand agrees with the region summand", "[identity]")
{
    double ell = 2 * std::acosh(1.5);
    CHECK(summand_geodesic(ell, 0).body() == Approx(1 / ((7 + 3 * std::sqrt(5.0)) / 2 + 1)).epsilon(1e-14));
    CHECK(summand_geodesic(1.7, 0).body() == Approx(1 / (std::exp(1.7) + 1)).epsilon(1e-15));
    CHECK_THROWS_AS(summand_geodesic(0.0, 0), DomainError);

    oracle::Rng rng(131);
    for (int k = 0; k < 200; ++k) {
        TorusState s = normalized(oracle::random_state(rng, 2 + rng.pick(3), 0.2));
        Grassmann h = semi_perimeter(s);
        auto w = w_invariants(s);
        for (int i = 0; i < 3; ++i) {
            if (!(s.lam(i).body() * h.body() > 2.05))
                continue;
            const Grassmann& W = w[static_cast<std::size_t>(i)];
            Grassmann r = eigen_r(s.lam(i), h, W);
            Grassmann ell = length_from_r(r);
            Grassmann x = summand_region(s.lam(i), h, W), y = summand_geodesic(ell, W);
            CHECK(oracle::rel_err(x, y) <= 1e-12);
            CHECK(x.body() > 0.0);
            CHECK(x.body() < 0.5);
        }
    }
}

TEST_CASE("classical modular torus", "[identity]")
{
    IdentityReport rep = verify_identity(classical(1, 1, 1), cutoff_from_length(24), 1e-6);
    CHECK(rep.body_deviation <= 1e-6);
    CHECK(rep.within_tol);
    REQUIRE(rep.rows.size() >= 3u);
    Grassmann three = rep.rows[0].summand + rep.rows[1].summand + rep.rows[2].summand;
    CHECK(three.body() == Approx(0.381966).margin(1e-6));
    for (const auto& row : rep.rows) {
        CHECK(row.summand.body() > 0.0);
        CHECK(row.summand.body() < 0.5);
    }
}

TEST_CASE("super identity in all spin classes", "[identity]")
{
    for (int cls = 0; cls < 4; ++cls) {
        IdentityReport rep = verify_identity(super_unit(cls), cutoff_from_length(24), 1e-5);
        CHECK(rep.deviation <= 1e-5);
        CHECK(rep.converged);
    }
}

TEST_CASE("deviation plus tail shrinks with the cutoff", "[identity]")
{
    for (const TorusState& s : {classical(1, 1, 1), super_unit(0), super_unit(3)}) {
        double prev = 1e300;
        for (double L : {8.0, 14.0, 20.0}) {
            IdentityReport rep = verify_identity(s, cutoff_from_length(L), 1e-5);
            double total = rep.deviation + rep.tail_bound;
            CHECK(total < prev);
            prev = total;
        }
    }
}

TEST_CASE("report is invariant under a global odd sign flip", "[identity]")
{
    TorusState s = super_unit(1), m = s;
    m.sigma = -m.sigma;
    m.theta = -m.theta;
    IdentityReport a = verify_identity(s, cutoff_from_length(16), 1e-5);
    IdentityReport b = verify_identity(m, cutoff_from_length(16), 1e-5);
    REQUIRE(a.rows.size() == b.rows.size());
    CHECK((a.partial_sum - b.partial_sum).norm() <= 1e-13);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        CHECK((a.rows[i].summand - b.rows[i].summand).norm() <= 1e-13);
    Enumeration ea = enumerate_regions(s, 1e3), eb = enumerate_regions(m, 1e3);
    CHECK(body_soul_report(ea.regions, 0.5).M == Approx(body_soul_report(eb.regions, 0.5).M).epsilon(1e-12));
}

TEST_CASE("body-soul comparison", "[identity]")
{
    CHECK(body_soul_report(enumerate_regions(classical(1, 1, 1), 1e3).regions, 0.5).M == 0.0);
    for (int cls = 0; cls < 4; ++cls) {
        BodySoulReport b = body_soul_report(enumerate_regions(super_unit(cls), 1e4).regions, 0.5);
        CHECK(std::isfinite(b.M));
        CHECK(b.violations.empty());
    }
    CHECK_THROWS_AS(body_soul_report({}, 0.5), std::invalid_argument);
}

TEST_CASE("growth counts", "[identity]")
{
    TorusState s = classical(1, 1, 1);
    double L = std::log(15.0);
    Enumeration en = enumerate_regions(s, required_cutoff(L, 3.0));
    auto table = growth_count(en.regions, {L}, required_cutoff(L, 3.0), 3.0);
    // Brute force over the tree: three regions each of 1 and 2, six each of 5 and 13.
    std::size_t expect = 0;
    walk_tree(root_vertex(s), 8, [&](const TreeVertex&, const TreeVertex& w, int k) {
        if (w.st.lam(k).body() < 15.0)
            ++expect;
    });
    expect += 3;
    CHECK(table[0].n_rho == expect);
    CHECK(expect == 18u);
    CHECK_THROWS_AS(growth_count(en.regions, {L + 1}, required_cutoff(L, 3.0), 3.0), InsufficientCutoff);

    TorusState u = super_unit(0);
    double hb = semi_perimeter(u).body();
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i)
        grid.push_back(i);
    Enumeration eu = enumerate_regions(u, required_cutoff(10, hb));
    for (const auto& g : growth_count(eu.regions, grid, required_cutoff(10, hb), hb))
        CHECK(g.n_rho <= g.n_body);
}
