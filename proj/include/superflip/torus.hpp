#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "grassmann.hpp"
#include "osp12.hpp"
#include "state.hpp"

namespace superflip {

// Slot bookkeeping for a move: origin[k] is the old slot now stored in slot k, or -1 for the
// freshly created lambda-length.
using SlotMap = std::array<int, 3>;

struct FlipResult {
    TorusState state;
    SlotMap origin;
};

namespace detail {

// (a,b,c) -> (b,c,a) with orientations carried along; mu-invariants are unchanged.
inline void rotate(TorusState& s, SlotMap& tag)
{
    std::swap(s.a, s.b);
    std::swap(s.b, s.c);
    s.spin = {s.spin[1], s.spin[2], s.spin[0]};
    tag = {tag[1], tag[2], tag[0]};
}

// Flip of the diagonal c in a state with spin_c = +1:
// (a,b,c | sigma,theta) -> (b,a,f | sigma',theta'), cf = a^2 + b^2 + ab sigma theta. In the odd
// layout frame the second of a flip pair undoes the quarter turn (sigma,theta) -> (-theta,sigma)
// that two raw flips produce.
inline void flip_c_normalized(TorusState& s, SlotMap& tag)
{
    Grassmann a2b2 = s.a * s.a + s.b * s.b;
    Grassmann nrm = a2b2.sqrt_positive();
    Grassmann f = (a2b2 + s.a * s.b * s.sigma * s.theta) / s.c;
    if (!std::isfinite(f.norm()) || !std::isfinite(nrm.norm()))
        throw RangeError("flip: lambda-length overflows double");
    Grassmann sig = (s.b * s.sigma - s.a * s.theta) / nrm;
    Grassmann th = (s.b * s.theta + s.a * s.sigma) / nrm;
    if (s.frame == 1) {
        Grassmann t = th;
        th = -sig;
        sig = t;
    }
    TorusState r;
    r.a = s.b;
    r.b = s.a;
    r.c = f;
    r.sigma = sig;
    r.theta = th;
    r.spin = {s.spin[1], s.spin[0], 1};
    r.frame = 1 - s.frame;
    s = r;
    tag = {tag[1], tag[0], -1};
}

inline int rotations_to_c(Edge e)
{
    switch (e) {
    case Edge::c: return 0;
    case Edge::a: return 1;
    case Edge::b: return 2;
    }
    return 0;
}

} // namespace detail

inline FlipResult flip_tracked(const TorusState& state, Edge e)
{
    validate(state);
    TorusState s = normalized(state);
    SlotMap tag{0, 1, 2};
    int k = detail::rotations_to_c(e);
    for (int i = 0; i < k; ++i)
        detail::rotate(s, tag);
    s = normalized(s);
    detail::flip_c_normalized(s, tag);
    for (int i = 0; i < (3 - k) % 3; ++i)
        detail::rotate(s, tag);
    return {normalized(s), tag};
}

inline TorusState flip(const TorusState& state, Edge e) { return flip_tracked(state, e).state; }

struct PtolemyResult {
    Grassmann f, sigma, theta;
};

// Quadrilateral with sides a,b,c,d in order and diagonal e; chi = ac/(bd).
inline PtolemyResult general_ptolemy(const Grassmann& a, const Grassmann& b, const Grassmann& c, const Grassmann& d,
                                     const Grassmann& e, const Grassmann& sigma, const Grassmann& theta)
{
    for (const Grassmann* x : {&a, &b, &c, &d, &e})
        if (!(x->body() > 0.0))
            throw DomainError("Ptolemy relation needs positive bodies");
    Grassmann chi = a * c / (b * d);
    Grassmann rchi = chi.sqrt_positive();
    Grassmann one_chi = 1.0 + chi;
    PtolemyResult r;
    r.f = (a * c + b * d) * (1.0 + sigma * theta * rchi / one_chi) / e;
    Grassmann k = one_chi.sqrt_positive().inverse();
    r.sigma = (sigma - rchi * theta) * k;
    r.theta = (theta + rchi * sigma) * k;
    return r;
}

// Dehn twist along the curve dual to `axis`: (a,b,c) -> (a, f, b) for axis a, where f is the
// flip of c; other axes by cyclic relabelling.
namespace detail {

inline TorusState rotate_state(TorusState s, int times)
{
    SlotMap tag{0, 1, 2};
    for (int i = 0; i < ((times % 3) + 3) % 3; ++i)
        rotate(s, tag);
    return s;
}

} // namespace detail

inline TorusState dehn_twist(const TorusState& state, Edge axis)
{
    int k = static_cast<int>(axis);
    TorusState s = detail::rotate_state(state, k); // axis now in slot a
    s = flip(s, Edge::c);
    s = detail::rotate_state(s, 1);
    return normalized(detail::rotate_state(s, -k));
}

inline TorusState inverse_dehn_twist(const TorusState& state, Edge axis)
{
    int k = static_cast<int>(axis);
    TorusState s = detail::rotate_state(state, k);
    s = normalized(detail::rotate_state(s, -1));
    s = flip(s, Edge::c);
    return normalized(detail::rotate_state(s, -k));
}

struct TwistTerm {
    int k;
    Grassmann lam, W;
};

// Diagonals b_k, k = -n..n, around the region `axis`: b_0 and b_-1 are the two lambda-lengths
// following the axis cyclically, b_1 the flip of b_-1.
inline std::vector<TwistTerm> twist_sequence(const TorusState& state, Edge axis, int n)
{
    int k = static_cast<int>(axis);
    TorusState s0 = normalized(detail::rotate_state(state, k));
    auto term_b = [](const TorusState& s, int idx) { return TwistTerm{idx, s.b, w_invariants(s)[1]}; };
    std::vector<TwistTerm> fwd, back;
    TorusState s = s0;
    fwd.push_back(term_b(s, 0));
    for (int i = 1; i <= n; ++i) {
        s = dehn_twist(s, Edge::a);
        fwd.push_back(term_b(s, i));
    }
    s = s0;
    for (int i = -1; i >= -n; --i) {
        back.push_back({i, s.c, w_invariants(s)[2]});
        s = inverse_dehn_twist(s, Edge::a);
    }
    std::vector<TwistTerm> out(back.rbegin(), back.rend());
    out.insert(out.end(), fwd.begin(), fwd.end());
    return out;
}

struct RecursionSolution {
    Grassmann r, x, y, W_even, W_odd, aa, h, W_a;
    bool oscillating = false;

    Grassmann particular(int n) const
    {
        Grassmann Wn = (std::abs(n) % 2 == 0) ? W_even : W_odd;
        return aa * Wn / (aa * h + (oscillating ? 2.0 : -2.0));
    }
    Grassmann value(int n) const
    {
        Grassmann rn = Grassmann(1.0), rin = Grassmann(1.0);
        Grassmann ri = r.inverse();
        for (int i = 0; i < std::abs(n); ++i) {
            rn = rn * (n > 0 ? r : ri);
            rin = rin * (n > 0 ? ri : r);
        }
        return x * rn + y * rin + particular(n);
    }
};

// b_{n+1} - (ah - W_a) b_n + b_{n-1} = -a W_{b_n}, solved as x r^n + y r^-n + a W_{b_n}/(ah -+ 2).
inline RecursionSolution solve_recursion(const TorusState& state, Edge axis)
{
    int k = static_cast<int>(axis);
    TorusState s = normalized(detail::rotate_state(state, k));
    RecursionSolution sol;
    sol.aa = s.a;
    sol.h = semi_perimeter(s);
    auto w = w_invariants(s);
    sol.W_a = w[0];
    sol.W_even = w[1];
    sol.W_odd = w[2]; // b_1 replaces b_-1 and inherits its W
    sol.oscillating = (w[1] - w[2]).norm() > (w[1] + w[2]).norm();
    sol.r = eigen_r(s.a, sol.h, sol.W_a);
    Grassmann ri = sol.r.inverse();
    if (sol.r.body() == 1.0)
        throw DomainError("recursion: r has unit body");
    TorusState s1 = dehn_twist(s, Edge::a);
    Grassmann u0 = s.b - sol.particular(0);
    Grassmann u1 = s1.b - sol.particular(1);
    sol.x = (u1 - u0 * ri) / (sol.r - ri);
    sol.y = u0 - sol.x;
    return sol;
}

inline Grassmann recursion_closed_form(const TorusState& state, Edge axis, int n)
{
    return solve_recursion(state, axis).value(n);
}

struct NeighborRow {
    int i;
    Grassmann b, c;
};

// b_i around the axis region together with c_i, the region one edge further out between b_i
// and b_{i+1}.
inline std::vector<NeighborRow> neighbor_sequences(const TorusState& state, Edge axis, int depth)
{
    int k = static_cast<int>(axis);
    TorusState s0 = normalized(detail::rotate_state(state, k));
    std::vector<NeighborRow> rows;
    auto c_at = [](const TorusState& s) { return flip(s, Edge::a).a; }; // vertex (a, b_i, b_{i-1})
    TorusState s = s0;
    std::vector<NeighborRow> fwd;
    for (int i = 0; i <= depth; ++i) {
        TorusState nxt = dehn_twist(s, Edge::a);
        fwd.push_back({i, s.b, c_at(nxt)});
        s = nxt;
    }
    s = s0;
    std::vector<NeighborRow> back;
    for (int i = -1; i >= -depth; --i) {
        back.push_back({i, s.c, c_at(s)});
        s = inverse_dehn_twist(s, Edge::a);
    }
    rows.assign(back.rbegin(), back.rend());
    rows.insert(rows.end(), fwd.begin(), fwd.end());
    return rows;
}

} // namespace superflip
