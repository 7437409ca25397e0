// Runs the acceptance checks and prints one PASS/FAIL line per check. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "oracles.hpp"
#include "superflip/io.hpp"

using namespace superflip;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

TorusState classical(double a, double b, double c) { return make_state(a, b, c, Grassmann(), Grassmann()); }

TorusState super_unit(int cls)
{
    return make_state(Grassmann::scalar(2, 1.0), 1.0, 1.0, Grassmann::generator(2, 1, 0.1), Grassmann::generator(2, 2, 0.1),
                      spin_of_class(cls));
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome classical_identity()
{
    auto t0 = Clock::now();
    IdentityReport rep = verify_identity(classical(1, 1, 1), cutoff_from_length(24), 1e-6, 1);
    double dt = seconds_since(t0);
    double first = 0.0;
    for (std::size_t i = 0; i < 3 && i < rep.rows.size(); ++i)
        first = std::max(first, std::fabs(rep.rows[i].summand.body() - 0.127322));
    bool ok = rep.rows.size() >= 3 && rep.body_deviation <= 1e-6 && first <= 1e-6 && dt <= 10.0;
    return {ok, "|sum-1/2| = " + fmt("%.3e", rep.body_deviation) + " (tol 1e-6), first three terms off 0.127322 by <= " +
                    fmt("%.2e", first) + " (tol 1e-6), " + fmt("%.2f", dt) + " s (limit 10 s)"};
}

Outcome super_identity()
{
    auto t0 = Clock::now();
    double worst = 0.0;
    for (int cls = 0; cls < 4; ++cls)
        worst = std::max(worst, verify_identity(super_unit(cls), cutoff_from_length(24), 1e-5, 1).deviation);
    double dt = seconds_since(t0);
    return {worst <= 1e-5 && dt <= 30.0,
            "max over 4 spin classes ||sum-1/2|| = " + fmt("%.3e", worst) + " (tol 1e-5), " + fmt("%.2f", dt) +
                " s (limit 30 s)"};
}

Outcome semi_perimeter_drift()
{
    oracle::Rng rng(1001);
    double worst = 0.0;
    int redrawn = 0;
    for (int k = 0; k < 1000; ++k) {
        TorusState s0 = oracle::random_state(rng, 2 + rng.pick(3), 0.2), s = s0;
        Grassmann h0 = semi_perimeter(s0);
        // A word whose lengths leave the double range is redrawn.
        for (bool done = false; !done;) {
            s = s0;
            try {
                for (int i = 0; i < 25; ++i)
                    s = flip(s, static_cast<Edge>(rng.pick(3)));
                done = std::isfinite(semi_perimeter(s).norm());
                redrawn += done ? 0 : 1;
            } catch (const RangeError&) {
                ++redrawn;
            }
        }
        Grassmann d = semi_perimeter(s) - h0;
        for (const auto& [m, c] : d.terms())
            worst = std::max(worst, std::fabs(c) / h0.norm());
    }
    return {worst <= 1e-9, "max relative drift " + fmt("%.3e", worst) + " (tol 1e-9) over 1000 states x 25 flips, " +
                               std::to_string(redrawn) + " overflowing words redrawn"};
}

Outcome flips_and_ptolemy()
{
    oracle::Rng rng(1002);
    double inv = 0.0, pt = 0.0, inv_mu = 0.0;
    for (int k = 0; k < 500; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2);
        TorusState n = normalized(s);
        for (Edge e : {Edge::a, Edge::b, Edge::c}) {
            TorusState b = flip(flip(s, e), e);
            for (int i = 0; i < 3; ++i)
                inv = std::max(inv, oracle::rel_err(b.lam(i), n.lam(i)));
            inv = std::max({inv, (b.sigma - n.sigma).norm(), (b.theta - n.theta).norm()});
        }
        PtolemyResult p = general_ptolemy(n.a, n.b, n.a, n.b, n.c, n.sigma, n.theta);
        Grassmann torus_f = (n.a * n.a + n.b * n.b + n.a * n.b * n.sigma * n.theta) / n.c;
        pt = std::max(pt, oracle::rel_err(p.f, torus_f));
        auto ev = [&] { return oracle::random_element(rng, n.n(), rng.uniform(0.5, 2), 0.2, 0); };
        PtolemyResult q = general_ptolemy(ev(), ev(), ev(), ev(), ev(), n.sigma, n.theta);
        inv_mu = std::max(inv_mu, (q.sigma * q.theta - n.sigma * n.theta).norm());
    }
    return {inv <= 1e-12 && pt <= 1e-14 && inv_mu <= 1e-13,
            "double flip " + fmt("%.2e", inv) + " (tol 1e-12), Ptolemy vs torus " + fmt("%.2e", pt) +
                " (tol 1e-14), sigma'theta' - sigma theta " + fmt("%.2e", inv_mu) + " (tol 1e-13)"};
}

Outcome generators()
{
    oracle::Rng rng(1003);
    double map = 0, osp = 0, ber = 0, str = 0, eig = 0;
    int covered = 0;
    for (int k = 0; k < 200; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2, k % 4);
        TorusState n = normalized(s);
        GeneratorPair gp = build_generators(s);
        Lifts L = lift_fundamental_domain(n);
        auto rel = [](const SuperVector& x, const SuperVector& y) { return distance(x, y) / std::max(1.0, norm(y)); };
        map = std::max({map, rel(adjoint(gp.g_a, L.B), L.A), rel(adjoint(gp.g_a, L.C), L.D),
                        rel(adjoint(gp.g_b, L.A), L.D), rel(adjoint(gp.g_b, L.B), L.C)});
        osp = std::max({osp, osp_residual(gp.g_a), osp_residual(gp.g_b)});
        ber = std::max({ber, (berezinian(gp.g_a) - 1.0).norm(), (berezinian(gp.g_b) - 1.0).norm()});
        if (gp.covered) {
            ++covered;
            Grassmann lhs = supertrace(gp.g_a) + 1.0;
            str = std::max(str, oracle::rel_err(lhs, gp.r_a + gp.r_a.inverse()));
            Eigenvectors ev = eigenvectors(gp.g_a, n);
            double scale = 1.0;
            for (const auto& v : {ev.v_plus, ev.v_minus, ev.v_zero})
                for (const auto& x : v)
                    scale = std::max(scale, x.norm());
            eig = std::max(eig, std::max({ev.res_plus, ev.res_minus, ev.res_zero}) / scale);
        }
    }
    bool ok = map <= 1e-9 && osp <= 1e-10 && ber <= 1e-10 && str <= 1e-10 && eig <= 1e-9 && covered > 0;
    return {ok, "mapping " + fmt("%.2e", map) + " (1e-9), OSp " + fmt("%.2e", osp) + " (1e-10), Berezinian " +
                    fmt("%.2e", ber) + " (1e-10), |str+1| vs r+1/r " + fmt("%.2e", str) + " (1e-10), eigenvectors " +
                    fmt("%.2e", eig) + " (1e-9), " + std::to_string(covered) + " covered states"};
}

Outcome recursion()
{
    oracle::Rng rng(1004);
    double worst_const = 0.0, worst_osc = 0.0;
    int n_const = 0, n_osc = 0;
    for (int k = 0; k < 40; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2, k % 4);
        for (Edge ax : {Edge::a, Edge::b, Edge::c}) {
            if (!(s.lam(ax).body() * semi_perimeter(s).body() > 2.05))
                continue;
            RecursionSolution sol = solve_recursion(s, ax);
            double w = 0.0;
            for (const auto& t : twist_sequence(s, ax, 15))
                w = std::max(w, oracle::rel_err(sol.value(t.k), t.lam));
            if (sol.oscillating) {
                worst_osc = std::max(worst_osc, w);
                ++n_osc;
            } else {
                worst_const = std::max(worst_const, w);
                ++n_const;
            }
        }
    }
    return {worst_const <= 1e-8 && worst_osc <= 1e-8 && n_const > 0 && n_osc > 0,
            "constant W " + fmt("%.2e", worst_const) + " over " + std::to_string(n_const) + " axes, oscillating W " +
                fmt("%.2e", worst_osc) + " over " + std::to_string(n_osc) + " axes (tol 1e-8, |n| <= 15)"};
}

Outcome tree_relations()
{
    oracle::Rng rng(1005);
    double vres = 0.0, eres = 0.0;
    std::size_t vertices = 0;
    for (int k = 0; k < 4; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2, k);
        TreeVertex root = root_vertex(s);
        Grassmann h = semi_perimeter(root.st);
        auto vr = [&](const TreeVertex& v) {
            const auto& t = v.st;
            vres = std::max(vres, vertex_residual(t).norm() / (semi_perimeter(t) * t.a * t.b * t.c).norm());
            ++vertices;
        };
        vr(root);
        walk_tree(root, 10, [&](const TreeVertex& v, const TreeVertex& w, int k2) {
            vr(w);
            auto W = w_invariants(v.st);
            int i = (k2 + 1) % 3, j = (k2 + 2) % 3;
            Grassmann r = edge_residual(v.st.lam(k2), v.st.lam(i), v.st.lam(j), w.st.lam(k2), W[static_cast<std::size_t>(i)],
                                        W[static_cast<std::size_t>(j)], h);
            eres = std::max(eres, r.norm() / (h * v.st.lam(i) * v.st.lam(j)).norm());
        });
    }
    double psi_err = 0.0;
    for (int k = 0; k < 100; ++k) {
        TorusState s = oracle::random_state(rng, 2 + rng.pick(3), 0.2);
        std::set<std::vector<int>> words{{}};
        std::vector<std::vector<int>> list{{}};
        int target = 1 + rng.pick(60);
        for (int tries = 0; static_cast<int>(list.size()) < target && tries < 5000; ++tries) {
            auto w = list[static_cast<std::size_t>(rng.pick(static_cast<int>(list.size())))];
            int slot = rng.pick(3);
            if (w.size() >= 10 || (!w.empty() && w.back() == slot))
                continue;
            w.push_back(slot);
            if (words.insert(w).second)
                list.push_back(w);
        }
        psi_err = std::max(psi_err, (subtree_sum(s, {list.begin(), list.end()}) - 1.0).norm());
    }
    return {vres <= 1e-11 && eres <= 1e-11 && psi_err <= 1e-10,
            "vertex " + fmt("%.2e", vres) + ", edge " + fmt("%.2e", eres) + " (tol 1e-11) on " + std::to_string(vertices) +
                " vertices; subtree psi-sum off 1 by " + fmt("%.2e", psi_err) + " (tol 1e-10)"};
}

Outcome sinks()
{
    oracle::Rng rng(1006);
    int ok = 0;
    long max_steps = 0;
    for (int k = 0; k < 20; ++k) {
        int n = 2;
        TorusState s = make_state(1.0 + Grassmann::term(n, {1, 2}, rng.uniform(-0.1, 0.1)), 1.0, 1.0,
                                  oracle::random_element(rng, n, 0.0, 0.2, 1), oracle::random_element(rng, n, 0.0, 0.2, 1),
                                  spin_of_class(k % 4));
        int len = 1 + rng.pick(12);
        for (int i = 0; i < len; ++i)
            s = flip(s, static_cast<Edge>(rng.pick(3)));
        try {
            SinkResult r = find_sink(s);
            max_steps = std::max(max_steps, r.steps);
            if (!enumerate_regions(s, 3.0).regions.empty())
                ++ok;
        } catch (const NonConvergence&) {
        }
    }
    return {ok == 20, std::to_string(ok) + "/20 states reach a sink with a region of eps(ah) <= 3 (max " +
                          std::to_string(max_steps) + " steps)"};
}

Outcome markoff_triples()
{
    auto rows = markoff_bfs(classical(1, 1, 1), 6);
    double worst = 0.0;
    std::set<long> values;
    for (const auto& r : rows) {
        worst = std::max(worst, r.residual);
        for (double x : {r.a, r.b, r.c})
            if (x <= 200.0)
                values.insert(std::lround(x));
    }
    std::set<long> oracle_values = oracle::markoff_numbers(200);
    std::set<long> listed{1, 2, 5, 13, 29, 34, 89, 169, 194};
    return {worst <= 1e-12 && values == oracle_values && oracle_values == listed,
            std::to_string(rows.size()) + " triples, max residual " + fmt("%.2e", worst) + " (tol 1e-12), " +
                std::to_string(values.size()) + " values <= 200 " + (values == oracle_values ? "match" : "differ from") +
                " the exhaustive search"};
}

Outcome growth_and_body_soul()
{
    bool dominated = true;
    std::size_t violations = 0;
    double M = 0.0;
    for (int cls = 0; cls < 4; ++cls) {
        TorusState s = super_unit(cls);
        double hb = semi_perimeter(s).body();
        std::vector<double> grid;
        for (int i = 1; i <= 10; ++i)
            grid.push_back(i);
        Enumeration en = enumerate_regions(s, required_cutoff(10, hb));
        for (const auto& g : growth_count(en.regions, grid, required_cutoff(10, hb), hb))
            dominated = dominated && g.n_rho <= g.n_body;
        BodySoulReport b = body_soul_report(enumerate_regions(s, 1e4).regions, 0.5);
        violations += b.violations.size();
        M = std::max(M, b.M);
    }
    return {dominated && violations == 0 && std::isfinite(M),
            std::string("N_rho <= N_body on L = 1..10: ") + (dominated ? "yes" : "no") + "; delta 0.5: M = " +
                fmt("%.3e", M) + ", " + std::to_string(violations) + " violations up to eps(ah) <= 1e4"};
}

Outcome determinism()
{
    auto report = [](int workers) {
        std::string all;
        for (int cls = 0; cls < 4; ++cls) {
            IdentityReport rep = verify_identity(super_unit(cls), cutoff_from_length(24), 1e-5, workers);
            all += dump(to_json(rep)) + identity_csv(rep) + dump(identity_sidecar(rep));
        }
        return all;
    };
    std::string r1 = report(1), r4 = report(4);
    return {r1 == r4, std::to_string(r1.size()) + " report bytes, workers 1 vs 4 " + (r1 == r4 ? "identical" : "differ")};
}

} // namespace

int main()
{
    struct Item {
        const char* name;
        std::function<Outcome()> run;
    };
    const Item items[] = {
        {"classical identity", classical_identity},
        {"super identity", super_identity},
        {"semi-perimeter invariance", semi_perimeter_drift},
        {"flip involution and Ptolemy", flips_and_ptolemy},
        {"generators", generators},
        {"twist recursion", recursion},
        {"tree relations", tree_relations},
        {"sinks and bounded regions", sinks},
        {"Markoff triples", markoff_triples},
        {"growth and body-soul", growth_and_body_soul},
        {"determinism", determinism},
    };
    int failed = 0, idx = 0;
    for (const auto& it : items) {
        ++idx;
        Outcome o;
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("[%2d] %s  %s: %s\n", idx, o.pass ? "PASS" : "FAIL", it.name, o.detail.c_str());
    }
    std::printf("%d/%d passed\n", idx - failed, idx);
    return failed == 0 ? 0 : 1;
}
