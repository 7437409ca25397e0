#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "superflip/io.hpp"
#include "superflip/superflip.hpp"

using namespace superflip;

namespace {

struct Config {
    std::string state_path;
    std::string edge = "c";
    std::string word;
    std::string out;
    double cutoff_length = 24.0;
    double delta = 0.5;
    double tol = 0.0; // 0 selects the subcommand default
    double Lmax = 10.0;
    int workers = 1;
    int depth = 6;
    int count = 1;
    unsigned long long seed = 1;
    bool body_only = false;
};

// Each subcommand records its asserted tolerances here; the summary is printed as JSON and the
// exit code is 0 iff every check passed.
struct Checks {
    json list = json::array();
    bool ok = true;

    void add(const std::string& name, double value, double tol)
    {
        bool pass = std::isfinite(value) && value <= tol;
        ok = ok && pass;
        list.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
    }
    void require(const std::string& name, bool cond)
    {
        ok = ok && cond;
        list.push_back({{"name", name}, {"pass", cond}});
    }
};

int finish(const std::string& command, const Checks& c, json extra = json::object())
{
    json s = {{"command", command}, {"status", c.ok ? "pass" : "fail"}, {"checks", c.list}};
    for (auto& [k, v] : extra.items())
        s[k] = v;
    std::cout << s.dump(2) << "\n";
    return c.ok ? 0 : 1;
}

double tol_or(const Config& cfg, double def) { return cfg.tol > 0.0 ? cfg.tol : def; }

TorusState load_state(const Config& cfg)
{
    if (cfg.state_path.empty())
        return make_state(1, 1, 1, Grassmann(), Grassmann());
    return read_state(cfg.state_path);
}

std::string sidecar_path(const std::string& out, const std::string& suffix)
{
    auto dot = out.find_last_of('.');
    auto slash = out.find_last_of('/');
    std::string stem = (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? out.substr(0, dot) : out;
    return stem + suffix;
}

std::vector<Edge> parse_word(const std::string& w)
{
    std::vector<Edge> out;
    for (char ch : w)
        out.push_back(parse_edge(std::string(1, ch)));
    return out;
}

double rel_drift(const Grassmann& h0, const Grassmann& h1) { return (h1 - h0).norm() / h0.norm(); }

int cmd_flip(const Config& cfg)
{
    TorusState s = load_state(cfg);
    Grassmann h0 = semi_perimeter(s);
    std::vector<Edge> word = cfg.word.empty() ? std::vector<Edge>{parse_edge(cfg.edge)} : parse_word(cfg.word);
    for (Edge e : word)
        s = flip(s, e);
    Grassmann h1 = semi_perimeter(s);
    if (!cfg.out.empty())
        write_text(cfg.out, dump(to_json(s)));
    Checks c;
    c.add("h_drift", rel_drift(h0, h1), tol_or(cfg, 1e-11));
    return finish("flip", c, {{"h_before", to_json(h0)}, {"h_after", to_json(h1)}, {"state", to_json(s)}});
}

int cmd_twist(const Config& cfg)
{
    TorusState s = load_state(cfg);
    Grassmann h0 = semi_perimeter(s);
    Edge axis = parse_edge(cfg.edge);
    for (int i = 0; i < std::abs(cfg.count); ++i)
        s = cfg.count > 0 ? dehn_twist(s, axis) : inverse_dehn_twist(s, axis);
    Grassmann h1 = semi_perimeter(s);
    if (!cfg.out.empty())
        write_text(cfg.out, dump(to_json(s)));
    Checks c;
    c.add("h_drift", rel_drift(h0, h1), tol_or(cfg, 1e-11));
    return finish("twist", c, {{"h_before", to_json(h0)}, {"h_after", to_json(h1)}, {"state", to_json(s)}});
}

// States along a flip word; without --word a random word of length --depth is drawn from --seed.
int cmd_orbit(const Config& cfg)
{
    TorusState s = load_state(cfg);
    std::string word = cfg.word;
    if (word.empty()) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> pick(0, 2);
        for (int i = 0; i < cfg.depth; ++i)
            word += "abc"[pick(rng)];
    }
    Grassmann h0 = semi_perimeter(s);
    json steps = json::array();
    steps.push_back({{"step", 0}, {"edge", ""}, {"state", to_json(s)}});
    double drift = 0.0;
    int i = 0;
    for (Edge e : parse_word(word)) {
        s = flip(s, e);
        drift = std::max(drift, rel_drift(h0, semi_perimeter(s)));
        steps.push_back({{"step", ++i}, {"edge", std::string(1, edge_name(e))}, {"state", to_json(s)}});
    }
    json doc = {{"word", word}, {"h", to_json(h0)}, {"states", steps}};
    if (!cfg.out.empty())
        write_text(cfg.out, dump(doc));
    Checks c;
    c.add("h_drift", drift, tol_or(cfg, 1e-11));
    return finish("orbit", c, {{"word", word}, {"final", to_json(s)}});
}

int cmd_markoff(const Config& cfg)
{
    TorusState s = load_state(cfg);
    bool classical_state = s.sigma.is_zero() && s.theta.is_zero() && s.a.soul().is_zero() && s.b.soul().is_zero() &&
                           s.c.soul().is_zero();
    if (!classical_state && !cfg.body_only) {
        Checks c;
        c.require("classical_state", false);
        return finish("markoff", c, {{"error", "state has odd or soul parts; pass --body-only to use bodies"}});
    }
    TorusState b = make_state(s.a.body(), s.b.body(), s.c.body(), Grassmann(), Grassmann());
    auto rows = markoff_bfs(b, cfg.depth);
    std::string csv = "depth,a,b,c,residual\n";
    double worst = 0.0;
    for (const auto& r : rows) {
        csv += std::to_string(r.depth) + "," + fmt_real(r.a) + "," + fmt_real(r.b) + "," + fmt_real(r.c) + "," +
               fmt_real(r.residual) + "\n";
        worst = std::max(worst, r.residual);
    }
    if (cfg.out.empty())
        std::cout << csv;
    else
        write_text(cfg.out, csv);
    Checks c;
    c.add("max_residual", worst, tol_or(cfg, 1e-12));
    return finish("markoff", c, {{"rows", rows.size()}});
}

std::vector<double> growth_grid(double Lmax)
{
    std::vector<double> g;
    for (int i = 1; i <= 10; ++i)
        g.push_back(Lmax * i / 10.0);
    return g;
}

int cmd_identity(const Config& cfg)
{
    TorusState s = load_state(cfg);
    double tol = tol_or(cfg, 1e-5);
    double cutoff = cutoff_from_length(cfg.cutoff_length);
    auto t0 = std::chrono::steady_clock::now();
    IdentityReport rep = verify_identity(s, cutoff, tol, cfg.workers);
    log(LogLevel::info, "identity: " + std::to_string(rep.region_count) + " regions in " +
                            std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
                            " s");
    if (rep.flexible)
        log(LogLevel::info, "identity: flexible edge met during the sink walk");
    std::vector<RegionNode> regions;
    for (const auto& row : rep.rows)
        regions.push_back(row.region);
    json doc = to_json(rep);
    doc["cutoff_length"] = cfg.cutoff_length;
    doc["state"] = to_json(s);
    if (!regions.empty()) {
        BodySoulReport bs = body_soul_report(regions, cfg.delta);
        doc["body_soul"] = to_json(bs);
        double hb = rep.h.body();
        double Lmax = std::log(cutoff / hb) * (1.0 - 1e-12);
        doc["growth"] = to_json(growth_count(regions, growth_grid(Lmax), cutoff, hb));
    }
    if (!cfg.out.empty()) {
        write_text(cfg.out, dump(doc));
        write_text(sidecar_path(cfg.out, ".csv"), identity_csv(rep));
        write_text(sidecar_path(cfg.out, ".regions.json"), dump(identity_sidecar(rep)));
    }
    Checks c;
    c.add("deviation", rep.deviation, tol);
    return finish("identity", c,
                  {{"region_count", rep.region_count}, {"deviation", rep.deviation}, {"tail_bound", rep.tail_bound}});
}

int cmd_spectrum(const Config& cfg)
{
    TorusState s = load_state(cfg);
    double hb = semi_perimeter(s).body();
    double cutoff = required_cutoff(cfg.Lmax, hb);
    Enumeration en = enumerate_regions(s, cutoff, cfg.workers);
    auto table = growth_count(en.regions, growth_grid(cfg.Lmax), cutoff, en.h.body());
    std::string csv = region_csv_header(false);
    json side = json::array();
    std::size_t rows = 0;
    for (const auto& r : en.regions) {
        if (!(std::log(r.lam.norm()) < cfg.Lmax))
            continue;
        Grassmann rr = eigen_r(r.lam, en.h, r.W);
        Grassmann sm = summand_region(r.lam, en.h, r.W);
        csv += region_csv_row(r, length_from_r(rr).body(), sm, false);
        json j = to_json(r);
        j["summand"] = to_json(sm);
        side.push_back(j);
        ++rows;
    }
    if (cfg.out.empty()) {
        std::cout << csv;
    } else {
        write_text(cfg.out, csv);
        write_text(sidecar_path(cfg.out, ".regions.json"), dump({{"h", to_json(en.h)}, {"regions", side}}));
    }
    Checks c;
    bool dominated = true;
    for (const auto& g : table)
        dominated = dominated && g.n_rho <= g.n_body;
    c.require("norm_count_below_body_count", dominated);
    c.require("rows_match_growth_count", rows == table.back().n_rho);
    return finish("spectrum", c, {{"rows", rows}, {"growth", to_json(table)}});
}

int cmd_generators(const Config& cfg)
{
    TorusState s = load_state(cfg);
    TorusState n = normalized(s);
    GeneratorPair gp = build_generators(s);
    Lifts L = lift_fundamental_domain(n);
    auto rel = [](const SuperVector& x, const SuperVector& y) { return distance(x, y) / std::max(1.0, norm(y)); };
    double map_res = std::max({rel(adjoint(gp.g_a, L.B), L.A), rel(adjoint(gp.g_a, L.C), L.D),
                               rel(adjoint(gp.g_b, L.A), L.D), rel(adjoint(gp.g_b, L.B), L.C)});
    double osp_res = std::max(osp_residual(gp.g_a), osp_residual(gp.g_b));
    double ber_res = std::max((berezinian(gp.g_a) - 1.0).norm(), (berezinian(gp.g_b) - 1.0).norm());
    auto str_res = [](const SuperMatrix& g, const Grassmann& r) {
        Grassmann s1 = supertrace(g) + 1.0;
        if (s1.body() < 0)
            s1 = -s1;
        return (s1 - (r + r.inverse())).norm() / s1.norm();
    };
    double str_a = str_res(gp.g_a, gp.r_a), str_b = str_res(gp.g_b, gp.r_b);
    Checks c;
    c.add("mapping_residual", map_res, 1e-9);
    c.add("osp_residual", osp_res, 1e-10);
    c.add("berezinian_residual", ber_res, 1e-10);
    c.add("supertrace_relation_a", str_a, 1e-10);
    c.add("supertrace_relation_b", str_b, 1e-10);
    json doc = {{"state", to_json(s)}, {"g_a", to_json(gp.g_a)},       {"g_b", to_json(gp.g_b)},
                {"r_a", to_json(gp.r_a)}, {"r_b", to_json(gp.r_b)},     {"covered", gp.covered},
                {"spin_class", spin_class(s)}};
    if (gp.covered) {
        Eigenvectors ev = eigenvectors(gp.g_a, n);
        c.add("eigenvector_residual", std::max({ev.res_plus, ev.res_minus, ev.res_zero}), 1e-9);
        doc["closed_form_distance"] = distance(to_displayed(gp.g_a), closed_form_g_a(n));
    }
    doc["checks"] = c.list;
    if (!cfg.out.empty())
        write_text(cfg.out, dump(doc));
    return finish("generators", c);
}

int cmd_selftest(const Config& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> body(0.5, 2.0), soul(-0.2, 0.2);
    std::uniform_int_distribution<int> pick(0, 2), cls(0, 3);
    const int n = 2;
    auto even = [&] { return body(rng) + Grassmann::term(n, {1, 2}, soul(rng)); };
    auto odd = [&] { return Grassmann::generator(n, 1, soul(rng)) + Grassmann::generator(n, 2, soul(rng)); };
    double inv = 0.0, drift = 0.0, gen = 0.0;
    for (int k = 0; k < 50; ++k) {
        TorusState s = make_state(even(), even(), even(), odd(), odd(), spin_of_class(cls(rng)));
        Grassmann h0 = semi_perimeter(s);
        for (Edge e : {Edge::a, Edge::b, Edge::c}) {
            TorusState b = flip(flip(s, e), e);
            for (int i = 0; i < 3; ++i)
                inv = std::max(inv, (b.lam(i) - s.lam(i)).norm() / s.lam(i).norm());
        }
        // Words whose lengths leave the double range are redrawn.
        TorusState t = s;
        for (bool done = false; !done;) {
            t = s;
            try {
                for (int i = 0; i < 25; ++i)
                    t = flip(t, static_cast<Edge>(pick(rng)));
                done = std::isfinite(semi_perimeter(t).norm());
            } catch (const RangeError&) {
            }
        }
        drift = std::max(drift, rel_drift(h0, semi_perimeter(t)));
        GeneratorPair gp = build_generators(s);
        gen = std::max({gen, osp_residual(gp.g_a), osp_residual(gp.g_b)});
    }
    IdentityReport rep = verify_identity(make_state(1, 1, 1, Grassmann(), Grassmann()), cutoff_from_length(24), 1e-6);
    Checks c;
    c.add("double_flip", inv, 1e-12);
    c.add("h_drift", drift, 1e-9);
    c.add("generator_osp_residual", gen, 1e-10);
    c.add("classical_identity_deviation", rep.body_deviation, 1e-6);
    return finish("selftest", c);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decorated super Teichmueller coordinates of the once-punctured torus"};
    app.require_subcommand(1);
    Config cfg;

    auto add_state = [&](CLI::App* sub) { sub->add_option("--state", cfg.state_path, "State JSON file (default classical (1,1,1))"); };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "Output path"); };
    auto add_tol = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "Tolerance for the asserted check")->check(CLI::PositiveNumber);
    };
    auto add_workers = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "Enumeration threads")->check(CLI::Range(1, 1024));
    };
    auto add_edge = [&](CLI::App* sub) { sub->add_option("--edge", cfg.edge, "Edge a|b|c")->check(CLI::IsMember({"a", "b", "c"})); };

    auto* flip_cmd = app.add_subcommand("flip", "Flip an edge (or a word of edges) and write the new state");
    add_state(flip_cmd);
    add_edge(flip_cmd);
    flip_cmd->add_option("--word", cfg.word, "Sequence of edges, e.g. abca");
    add_out(flip_cmd);
    add_tol(flip_cmd);

    auto* twist_cmd = app.add_subcommand("twist", "Dehn twist along the curve dual to an edge");
    add_state(twist_cmd);
    add_edge(twist_cmd);
    twist_cmd->add_option("--count", cfg.count, "Number of twists; negative for inverse twists");
    add_out(twist_cmd);
    add_tol(twist_cmd);

    auto* orbit_cmd = app.add_subcommand("orbit", "States along a flip word");
    add_state(orbit_cmd);
    orbit_cmd->add_option("--word", cfg.word, "Sequence of edges");
    orbit_cmd->add_option("--depth", cfg.depth, "Length of the random word when --word is absent")->check(CLI::NonNegativeNumber);
    orbit_cmd->add_option("--seed", cfg.seed, "Seed for the random word");
    add_out(orbit_cmd);
    add_tol(orbit_cmd);

    auto* markoff_cmd = app.add_subcommand("markoff", "Breadth-first classical triples as CSV");
    add_state(markoff_cmd);
    markoff_cmd->add_option("--depth", cfg.depth, "Tree depth")->check(CLI::Range(0, 20));
    markoff_cmd->add_flag("--body-only", cfg.body_only, "Use the bodies of a super state");
    add_out(markoff_cmd);
    add_tol(markoff_cmd);

    auto* identity_cmd = app.add_subcommand("identity", "Verify the super McShane identity");
    add_state(identity_cmd);
    identity_cmd->add_option("--cutoff-length", cfg.cutoff_length, "Cutoff on body geodesic length")->check(CLI::PositiveNumber);
    identity_cmd->add_option("--delta", cfg.delta, "Exponent for the body-soul comparison")->check(CLI::NonNegativeNumber);
    add_tol(identity_cmd);
    add_workers(identity_cmd);
    identity_cmd->add_option("--seed", cfg.seed, "Unused; accepted for uniform configs");
    add_out(identity_cmd);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Regions with log-norm below Lmax as CSV");
    add_state(spectrum_cmd);
    spectrum_cmd->add_option("--Lmax", cfg.Lmax, "Largest log-norm")->check(CLI::PositiveNumber);
    add_workers(spectrum_cmd);
    add_out(spectrum_cmd);

    auto* gen_cmd = app.add_subcommand("generators", "Fuchsian generators and their residuals");
    add_state(gen_cmd);
    add_out(gen_cmd);

    auto* self_cmd = app.add_subcommand("selftest", "Quick randomized invariant checks");
    self_cmd->add_option("--seed", cfg.seed, "Random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*flip_cmd)
            return cmd_flip(cfg);
        if (*twist_cmd)
            return cmd_twist(cfg);
        if (*orbit_cmd)
            return cmd_orbit(cfg);
        if (*markoff_cmd)
            return cmd_markoff(cfg);
        if (*identity_cmd)
            return cmd_identity(cfg);
        if (*spectrum_cmd)
            return cmd_spectrum(cfg);
        if (*gen_cmd)
            return cmd_generators(cfg);
        if (*self_cmd)
            return cmd_selftest(cfg);
    } catch (const std::exception& e) {
        json err = {{"status", "error"}, {"error", e.what()}};
        std::cout << err.dump(2) << "\n";
        log(LogLevel::error, e.what());
        return 2;
    }
    return 2;
}
