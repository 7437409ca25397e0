#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "grassmann.hpp"

namespace superflip {

enum class Edge { a = 0, b = 1, c = 2 };

inline char edge_name(Edge e) { return "abc"[static_cast<int>(e)]; }

inline Edge parse_edge(const std::string& s)
{
    if (s == "a")
        return Edge::a;
    if (s == "b")
        return Edge::b;
    if (s == "c")
        return Edge::c;
    throw std::invalid_argument("edge must be one of a, b, c");
}

// Fundamental domain of the once-punctured torus: quadrilateral ABCD with diagonal AC = c,
// top triangle ABC carrying theta and bottom triangle ACD carrying sigma. spin[e] = +1 when
// edge e is oriented counterclockwise around the top triangle. frame records the parity of the
// triangle layout after flips, so that flipping the same edge twice restores the labels exactly.
struct TorusState {
    Grassmann a, b, c;
    Grassmann sigma, theta;
    std::array<int, 3> spin{1, 1, 1};
    int frame = 0;

    int n() const
    {
        for (const Grassmann* g : {&a, &b, &c, &sigma, &theta})
            if (g->n() != 0)
                return g->n();
        return 0;
    }

    const Grassmann& lam(int slot) const { return slot == 0 ? a : (slot == 1 ? b : c); }
    Grassmann& lam(int slot) { return slot == 0 ? a : (slot == 1 ? b : c); }
    const Grassmann& lam(Edge e) const { return lam(static_cast<int>(e)); }
};

inline TorusState make_state(const Grassmann& a, const Grassmann& b, const Grassmann& c, const Grassmann& sigma,
                             const Grassmann& theta, std::array<int, 3> spin = {1, 1, 1})
{
    TorusState s{a, b, c, sigma, theta, spin, 0};
    return s;
}

inline void validate(const TorusState& s)
{
    for (int i = 0; i < 3; ++i) {
        if (!(s.lam(i).body() > 0.0))
            throw DomainError(std::string("lambda-length ") + "abc"[i] + " must have positive body");
        if (!s.lam(i).is_even())
            throw ParityError(std::string("lambda-length ") + "abc"[i] + " must be even");
        if (s.spin[static_cast<std::size_t>(i)] != 1 && s.spin[static_cast<std::size_t>(i)] != -1)
            throw std::invalid_argument("spin bits must be +1 or -1");
    }
    if (!s.sigma.is_odd() || !s.theta.is_odd())
        throw ParityError("mu-invariants must be odd");
    if (s.frame != 0 && s.frame != 1)
        throw std::invalid_argument("frame must be 0 or 1");
}

// Reversal of the bottom triangle: all three orientations flip and its mu-invariant changes sign.
inline TorusState reverse_bottom(TorusState s)
{
    for (int& e : s.spin)
        e = -e;
    s.sigma = -s.sigma;
    return s;
}

// Orbit representative with spin_c = +1.
inline TorusState normalized(TorusState s) { return s.spin[2] < 0 ? reverse_bottom(std::move(s)) : s; }

// 0..3 from the normalized (spin_a, spin_b); class 0 is the all-counterclockwise structure.
inline int spin_class(const TorusState& s)
{
    auto n = normalized(s);
    return (n.spin[0] < 0 ? 1 : 0) | (n.spin[1] < 0 ? 2 : 0);
}

inline std::array<int, 3> spin_of_class(int cls)
{
    if (cls < 0 || cls > 3)
        throw std::invalid_argument("spin class must be 0..3");
    return {(cls & 1) ? -1 : 1, (cls & 2) ? -1 : 1, 1};
}

// W_e = spin_e * sigma*theta; invariant under bottom reversal.
inline std::array<Grassmann, 3> w_invariants(const TorusState& s)
{
    Grassmann st = s.sigma * s.theta;
    return {st * static_cast<double>(s.spin[0]), st * static_cast<double>(s.spin[1]),
            st * static_cast<double>(s.spin[2])};
}

inline std::array<Grassmann, 3> h_lengths(const Grassmann& a, const Grassmann& b, const Grassmann& c)
{
    return {a / (b * c), b / (a * c), c / (a * b)};
}

inline Grassmann semi_perimeter(const TorusState& s)
{
    auto hl = h_lengths(s.a, s.b, s.c);
    auto w = w_invariants(s);
    return hl[0] + hl[1] + hl[2] + w[0] / s.a + w[1] / s.b + w[2] / s.c;
}

} // namespace superflip
