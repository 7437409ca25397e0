#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "grassmann.hpp"
#include "state.hpp"
#include "torus.hpp"

namespace superflip {

// Slope p/q of the simple closed curve dual to a region, up to sign; stored with q > 0, or
// (p, q) = (1, 0).
struct Slope {
    std::int64_t p = 1, q = 0;

    friend bool operator==(const Slope&, const Slope&) = default;
};

inline Slope make_slope(std::int64_t p, std::int64_t q)
{
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    return {p, q};
}

// The region replacing z next to x and y: z = +-(x + y) or +-(x - y), the new one is the other.
inline Slope flip_slope(const Slope& x, const Slope& y, const Slope& z)
{
    Slope sum = make_slope(x.p + y.p, x.q + y.q);
    Slope dif = make_slope(x.p - y.p, x.q - y.q);
    return (z == sum) ? dif : sum;
}

// "inf" for 1/0, "0" for 0/1, otherwise the sign followed by the Stern-Brocot word of |p|/q.
inline std::string slope_address(const Slope& s)
{
    if (s.q == 0)
        return "inf";
    if (s.p == 0)
        return "0";
    std::string w(1, s.p > 0 ? '+' : '-');
    std::int64_t p = s.p > 0 ? s.p : -s.p, q = s.q;
    while (p != q) {
        if (p < q) {
            w += 'L';
            q -= p;
        } else {
            w += 'R';
            p -= q;
        }
    }
    return w;
}

struct RegionNode {
    std::string address;
    Slope slope;
    Grassmann lam, W;
    Grassmann nb1, nb2; // lambda-lengths flanking the edge through which the region was reached
    Slope nb1_slope, nb2_slope;
    int depth = 0;
};

// Region order used for every listing and sum: ascending body, ties by address.
inline bool region_less(const RegionNode& x, const RegionNode& y)
{
    double bx = x.lam.body(), by = y.lam.body();
    if (bx != by)
        return bx < by;
    return x.address < y.address;
}

// A vertex of the dual tree: a torus state and the slopes of its three regions, slot-aligned.
struct TreeVertex {
    TorusState st;
    std::array<Slope, 3> slopes{Slope{1, 0}, Slope{0, 1}, Slope{1, 1}};
};

inline TreeVertex root_vertex(const TorusState& st) { return TreeVertex{normalized(st), {Slope{1, 0}, Slope{0, 1}, Slope{1, 1}}}; }

// Cross the tree edge opposite to the region in `slot`; the new region lands in the same slot.
inline TreeVertex move(const TreeVertex& v, int slot)
{
    auto fr = flip_tracked(v.st, static_cast<Edge>(slot));
    TreeVertex w;
    w.st = fr.state;
    Slope fresh = flip_slope(v.slopes[static_cast<std::size_t>((slot + 1) % 3)],
                             v.slopes[static_cast<std::size_t>((slot + 2) % 3)], v.slopes[static_cast<std::size_t>(slot)]);
    for (int k = 0; k < 3; ++k) {
        int o = fr.origin[static_cast<std::size_t>(k)];
        w.slopes[static_cast<std::size_t>(k)] = (o < 0) ? fresh : v.slopes[static_cast<std::size_t>(o)];
    }
    return w;
}

inline Grassmann vertex_residual(const TorusState& s)
{
    auto w = w_invariants(s);
    Grassmann h = semi_perimeter(s);
    return s.a * s.a + s.b * s.b + s.c * s.c + s.a * s.b * w[2] + s.a * s.c * w[1] + s.b * s.c * w[0] -
           h * s.a * s.b * s.c;
}

// a and d are the regions at the two ends of the edge, b and c the regions along it.
inline Grassmann edge_residual(const Grassmann& a, const Grassmann& b, const Grassmann& c, const Grassmann& d,
                               const Grassmann& W_b, const Grassmann& W_c, const Grassmann& h)
{
    return a + d + (b * W_c + c * W_b) - h * b * c;
}

// psi of the edge between regions a and b, oriented toward the vertex whose third region is c.
inline Grassmann psi(const Grassmann& a, const Grassmann& b, const Grassmann& c, const Grassmann& W_a,
                     const Grassmann& W_b, const Grassmann& h)
{
    return (c / (a * b) + W_a / (2.0 * a) + W_b / (2.0 * b)) / h;
}

// psi of the edge of vertex v opposite `slot`, oriented into v.
inline Grassmann psi_into(const TreeVertex& v, int slot, const Grassmann& h)
{
    int i = (slot + 1) % 3, j = (slot + 2) % 3;
    auto w = w_invariants(v.st);
    return psi(v.st.lam(i), v.st.lam(j), v.st.lam(slot), w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)], h);
}

enum class Orientation { toward_d, toward_a, flexible };

inline constexpr double kFlexTol = 1e-12;

// The edge between the region a (at one end) and d (at the other) points from a to d when
// eps(a) < eps(d).
inline Orientation orient_edge(const Grassmann& a_val, const Grassmann& d_val)
{
    double x = a_val.body(), y = d_val.body();
    if (std::fabs(x - y) <= kFlexTol * std::max(std::fabs(x), std::fabs(y)))
        return Orientation::flexible;
    return x < y ? Orientation::toward_d : Orientation::toward_a;
}

struct SinkResult {
    TreeVertex vertex;
    long steps = 0;
    bool flexible = false;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Walk against the orientation until every edge points inward. A flexible edge is taken to
// point toward the end whose region has the smaller address.
inline SinkResult find_sink(const TorusState& start, long budget = 1000000)
{
    SinkResult res;
    res.vertex = root_vertex(start);
    for (; res.steps <= budget; ++res.steps) {
        int best = -1;
        double best_drop = 0.0;
        for (int k = 0; k < 3; ++k) {
            TreeVertex w = move(res.vertex, k);
            const Grassmann& old_r = res.vertex.st.lam(k);
            const Grassmann& new_r = w.st.lam(k);
            Orientation o = orient_edge(old_r, new_r);
            double drop = old_r.body() - new_r.body();
            bool go = false;
            if (o == Orientation::toward_a) {
                go = true;
            } else if (o == Orientation::flexible) {
                res.flexible = true;
                go = slope_address(w.slopes[static_cast<std::size_t>(k)]) <
                     slope_address(res.vertex.slopes[static_cast<std::size_t>(k)]);
                drop = 0.0;
            }
            if (go && (best < 0 || drop > best_drop)) {
                best = k;
                best_drop = drop;
            }
        }
        if (best < 0)
            return res;
        res.vertex = move(res.vertex, best);
    }
    throw NonConvergence("find_sink: step budget exceeded");
}

// Generic bounded walk over the tree: visit(parent, child, slot) for every edge crossed within
// `depth` moves from the root.
inline void walk_tree(const TreeVertex& root, int depth,
                      const std::function<void(const TreeVertex&, const TreeVertex&, int)>& visit)
{
    std::function<void(const TreeVertex&, int, int)> rec = [&](const TreeVertex& v, int came, int left) {
        if (left == 0)
            return;
        for (int k = 0; k < 3; ++k) {
            if (k == came)
                continue;
            TreeVertex w = move(v, k);
            visit(v, w, k);
            rec(w, k, left - 1);
        }
    };
    rec(root, -1, depth);
}

struct Enumeration {
    SinkResult sink;
    Grassmann h;
    double cutoff = 0.0;
    std::vector<RegionNode> regions;  // eps(lam h) <= cutoff, sorted by region_less
    std::vector<RegionNode> frontier; // first pruned region of each branch
    std::size_t vertices = 0;
};

namespace detail {

struct Task {
    TreeVertex v;
    int fresh_slot;
    int depth;
};

struct Partial {
    std::vector<RegionNode> regions, frontier;
    std::size_t vertices = 0;
};

inline RegionNode region_at(const TreeVertex& v, int slot, int depth)
{
    auto w = w_invariants(v.st);
    RegionNode r;
    r.slope = v.slopes[static_cast<std::size_t>(slot)];
    r.address = slope_address(r.slope);
    r.lam = v.st.lam(slot);
    r.W = w[static_cast<std::size_t>(slot)];
    r.nb1 = v.st.lam((slot + 1) % 3);
    r.nb2 = v.st.lam((slot + 2) % 3);
    r.nb1_slope = v.slopes[static_cast<std::size_t>((slot + 1) % 3)];
    r.nb2_slope = v.slopes[static_cast<std::size_t>((slot + 2) % 3)];
    r.depth = depth;
    return r;
}

// Expand every child of `v` except back across the edge it was reached through.
inline void expand(const Task& t, double cutoff, double hb, Partial& out)
{
    std::vector<Task> stack{t};
    while (!stack.empty()) {
        Task cur = std::move(stack.back());
        stack.pop_back();
        ++out.vertices;
        for (int k = 0; k < 3; ++k) {
            if (k == cur.fresh_slot)
                continue;
            TreeVertex w = move(cur.v, k);
            RegionNode r = region_at(w, k, cur.depth + 1);
            if (r.lam.body() * hb > cutoff) {
                out.frontier.push_back(std::move(r));
                continue;
            }
            out.regions.push_back(std::move(r));
            stack.push_back({std::move(w), k, cur.depth + 1});
        }
    }
}

} // namespace detail

// Regions with eps(lam h) <= cutoff, grown outward from the sink; bodies increase away from the
// sink so a branch stops at its first region above the cutoff.
inline Enumeration enumerate_regions(const TorusState& state, double cutoff, int workers = 1)
{
    if (workers < 1)
        throw std::invalid_argument("worker count must be at least 1");
    Enumeration en;
    en.cutoff = cutoff;
    en.sink = find_sink(state);
    const TreeVertex& v0 = en.sink.vertex;
    en.h = semi_perimeter(v0.st);
    double hb = en.h.body();

    detail::Partial head;
    for (int k = 0; k < 3; ++k) {
        RegionNode r = detail::region_at(v0, k, 0);
        if (r.lam.body() * hb <= cutoff)
            head.regions.push_back(r);
        else
            head.frontier.push_back(r);
    }
    // Breadth-first split into independent subtrees; the split depends only on the tree, never on
    // the worker count.
    std::vector<detail::Task> tasks{{v0, -1, 0}};
    for (int level = 0; level < 4 && !tasks.empty(); ++level) {
        std::vector<detail::Task> next;
        for (auto& t : tasks) {
            ++head.vertices;
            for (int k = 0; k < 3; ++k) {
                if (k == t.fresh_slot)
                    continue;
                TreeVertex w = move(t.v, k);
                RegionNode r = detail::region_at(w, k, t.depth + 1);
                if (r.lam.body() * hb > cutoff) {
                    head.frontier.push_back(std::move(r));
                    continue;
                }
                head.regions.push_back(std::move(r));
                next.push_back({std::move(w), k, t.depth + 1});
            }
        }
        tasks = std::move(next);
    }

    std::vector<detail::Partial> parts(tasks.size());
    auto run = [&](std::size_t w) {
        for (std::size_t i = w; i < tasks.size(); i += static_cast<std::size_t>(workers))
            detail::expand(tasks[i], cutoff, hb, parts[i]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(run, static_cast<std::size_t>(w));
        for (auto& th : pool)
            th.join();
    }
    en.regions = std::move(head.regions);
    en.frontier = std::move(head.frontier);
    en.vertices = head.vertices;
    for (auto& p : parts) {
        en.regions.insert(en.regions.end(), p.regions.begin(), p.regions.end());
        en.frontier.insert(en.frontier.end(), p.frontier.begin(), p.frontier.end());
        en.vertices += p.vertices;
    }
    std::sort(en.regions.begin(), en.regions.end(), region_less);
    std::sort(en.frontier.begin(), en.frontier.end(), region_less);
    return en;
}

// Vertices of a finite subtree are words of slots (no slot repeated twice in a row) from the root.
using SubtreeShape = std::vector<std::vector<int>>;

// Sum of psi over the oriented edges entering the subtree from outside.
inline Grassmann subtree_sum(const TorusState& root_state, const SubtreeShape& shape)
{
    std::set<std::vector<int>> words(shape.begin(), shape.end());
    if (!words.count({}))
        throw std::invalid_argument("subtree must contain the root vertex");
    for (auto& w : words) {
        for (std::size_t i = 1; i < w.size(); ++i)
            if (w[i] == w[i - 1])
                throw std::invalid_argument("subtree word backtracks");
        if (!w.empty()) {
            std::vector<int> parent(w.begin(), w.end() - 1);
            if (!words.count(parent))
                throw std::invalid_argument("subtree is not connected");
        }
    }
    std::map<std::vector<int>, TreeVertex> vert;
    TreeVertex root = root_vertex(root_state);
    Grassmann h = semi_perimeter(root.st);
    vert.emplace(std::vector<int>{}, root);
    for (auto& w : words) { // std::set order visits parents before children
        if (w.empty())
            continue;
        std::vector<int> parent(w.begin(), w.end() - 1);
        vert.emplace(w, move(vert.at(parent), w.back()));
    }
    CompensatedSum sum;
    for (auto& [w, v] : vert) {
        for (int k = 0; k < 3; ++k) {
            std::vector<int> nb;
            if (!w.empty() && w.back() == k)
                nb.assign(w.begin(), w.end() - 1);
            else {
                nb = w;
                nb.push_back(k);
            }
            if (!words.count(nb))
                sum.add(psi_into(v, k, h));
        }
    }
    return sum.value();
}

struct MarkoffRow {
    int depth;
    double a, b, c, residual;
};

// Breadth-first Markoff triples from (1,1,1) through classical flips, depth = tree distance.
inline std::vector<MarkoffRow> markoff_bfs(const TorusState& classical, int depth)
{
    std::vector<MarkoffRow> rows;
    struct Item {
        TreeVertex v;
        int came, d;
    };
    std::vector<Item> level{{root_vertex(classical), -1, 0}};
    while (!level.empty()) {
        std::vector<Item> next;
        for (auto& it : level) {
            const auto& s = it.v.st;
            double a = s.a.body(), b = s.b.body(), c = s.c.body();
            double h = semi_perimeter(s).body();
            double res = std::fabs(a * a + b * b + c * c - h * a * b * c) / (h * a * b * c);
            rows.push_back({it.d, a, b, c, res});
            if (it.d == depth)
                continue;
            for (int k = 0; k < 3; ++k)
                if (k != it.came)
                    next.push_back({move(it.v, k), k, it.d + 1});
        }
        level = std::move(next);
    }
    return rows;
}

struct AsymptoticsRow {
    int i;
    std::vector<double> b_ratio, c_ratio; // index k-1 for the degree-2k soul
};

struct AsymptoticsReport {
    double R = 0.0;
    std::vector<AsymptoticsRow> rows;
};

// ||s_2k(b_i)|| / (|i|^k R^|i|) and ||s_2k(c_i)|| / (|i|^2k R^2|i|) around the region `axis`, with
// |i| replaced by 1 at i = 0.
inline AsymptoticsReport neighbor_asymptotics_report(const TorusState& state, Edge axis, int depth)
{
    TorusState s = normalized(detail::rotate_state(state, static_cast<int>(axis)));
    AsymptoticsReport rep;
    Grassmann h = semi_perimeter(s);
    rep.R = eigen_r(s.a, h, w_invariants(s)[0]).body();
    int kmax = std::max(1, s.n() / 2);
    for (const auto& nr : neighbor_sequences(s, Edge::a, depth)) {
        AsymptoticsRow row;
        row.i = nr.i;
        double m = std::max(1, std::abs(nr.i));
        double ai = std::abs(nr.i);
        for (int k = 1; k <= kmax; ++k) {
            row.b_ratio.push_back(nr.b.degree_soul(2 * k).norm() / (std::pow(m, k) * std::pow(rep.R, ai)));
            row.c_ratio.push_back(nr.c.degree_soul(2 * k).norm() / (std::pow(m, 2 * k) * std::pow(rep.R, 2 * ai)));
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace superflip
