#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "grassmann.hpp"
#include "state.hpp"

namespace superflip {

// 3x3 graded matrix; rows/columns 0,1 are even, 2 is odd.
struct SuperMatrix {
    std::array<std::array<Grassmann, 3>, 3> e{};

    Grassmann& operator()(int i, int j) { return e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const Grassmann& operator()(int i, int j) const
    {
        return e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    static SuperMatrix from_reals(std::array<std::array<double, 3>, 3> v)
    {
        SuperMatrix m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m(i, j) = Grassmann(v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        return m;
    }
    static SuperMatrix identity() { return from_reals({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}); }
    static SuperMatrix J() { return from_reals({{{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}}}); }
    static SuperMatrix J_inverse() { return from_reals({{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}}); }
    static SuperMatrix J2() { return from_reals({{{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}}}); }
};

inline bool is_odd_slot(int i, int j) { return (i == 2) != (j == 2); }

inline bool parity_ok(const SuperMatrix& g)
{
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (is_odd_slot(i, j) ? !g(i, j).is_odd() : !g(i, j).is_even())
                return false;
    return true;
}

inline void check_parity(const SuperMatrix& g)
{
    if (!parity_ok(g))
        throw ParityError("super matrix violates the OSp(1|2) parity pattern");
}

inline SuperMatrix smul(const SuperMatrix& g, const SuperMatrix& h)
{
    check_parity(g);
    check_parity(h);
    SuperMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = g(i, 0) * h(0, j) + g(i, 1) * h(1, j) + g(i, 2) * h(2, j);
    return r;
}

inline SuperMatrix operator*(const SuperMatrix& g, const SuperMatrix& h) { return smul(g, h); }

inline SuperMatrix operator-(const SuperMatrix& g, const SuperMatrix& h)
{
    SuperMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = g(i, j) - h(i, j);
    return r;
}

inline double norm(const SuperMatrix& g)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += g(i, j).norm();
    return s;
}

inline double distance(const SuperMatrix& g, const SuperMatrix& h) { return norm(g - h); }

// (a b al; c d be; ga de f)^st = (a c ga; b d de; -al -be f)
inline SuperMatrix supertranspose(const SuperMatrix& g)
{
    SuperMatrix r;
    r(0, 0) = g(0, 0);
    r(0, 1) = g(1, 0);
    r(0, 2) = g(2, 0);
    r(1, 0) = g(0, 1);
    r(1, 1) = g(1, 1);
    r(1, 2) = g(2, 1);
    r(2, 0) = -g(0, 2);
    r(2, 1) = -g(1, 2);
    r(2, 2) = g(2, 2);
    return r;
}

inline double osp_residual(const SuperMatrix& g)
{
    return distance(supertranspose(g) * SuperMatrix::J() * g, SuperMatrix::J());
}

inline bool is_osp(const SuperMatrix& g, double tol) { return osp_residual(g) <= tol; }

// Exact inverse of an OSp element from g^st J g = J.
inline SuperMatrix osp_inverse(const SuperMatrix& g)
{
    return SuperMatrix::J_inverse() * supertranspose(g) * SuperMatrix::J();
}

namespace detail {

struct Blocks {
    std::array<std::array<Grassmann, 2>, 2> schur; // P - al f^-1 ga
    Grassmann f_inv;
};

inline Blocks schur(const SuperMatrix& g)
{
    if (g(2, 2).body() == 0.0)
        throw DomainError("super matrix: f entry has zero body");
    Blocks b;
    b.f_inv = g(2, 2).inverse();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            b.schur[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g(i, j) - g(i, 2) * b.f_inv * g(2, j);
    return b;
}

} // namespace detail

// Block (Schur complement) inverse of any invertible parity-pure matrix.
inline SuperMatrix general_inverse(const SuperMatrix& g)
{
    check_parity(g);
    auto [S, fi] = detail::schur(g);
    Grassmann det = S[0][0] * S[1][1] - S[0][1] * S[1][0];
    Grassmann di = det.inverse();
    std::array<std::array<Grassmann, 2>, 2> Si{{{S[1][1] * di, -S[0][1] * di}, {-S[1][0] * di, S[0][0] * di}}};
    SuperMatrix r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = Si[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (int i = 0; i < 2; ++i)
        r(i, 2) = -(Si[static_cast<std::size_t>(i)][0] * g(0, 2) + Si[static_cast<std::size_t>(i)][1] * g(1, 2)) * fi;
    for (int j = 0; j < 2; ++j)
        r(2, j) = -fi * (g(2, 0) * Si[0][static_cast<std::size_t>(j)] + g(2, 1) * Si[1][static_cast<std::size_t>(j)]);
    Grassmann inner = g(2, 0) * (Si[0][0] * g(0, 2) + Si[0][1] * g(1, 2)) + g(2, 1) * (Si[1][0] * g(0, 2) + Si[1][1] * g(1, 2));
    r(2, 2) = fi + fi * inner * fi;
    return r;
}

// sdet g = det(P - al f^-1 ga) / f.
inline Grassmann berezinian(const SuperMatrix& g)
{
    check_parity(g);
    auto [S, fi] = detail::schur(g);
    return (S[0][0] * S[1][1] - S[0][1] * S[1][0]) * fi;
}

inline Grassmann supertrace(const SuperMatrix& g) { return g(0, 0) + g(1, 1) - g(2, 2); }

// The displayed convention (matrix product, Berezinian, stabilizer, closed-form generators) has
// row-3 odd entries of opposite sign to the plain graded product used here. This map converts
// between the two and is its own inverse.
inline SuperMatrix to_displayed(SuperMatrix g)
{
    g(2, 0) = -g(2, 0);
    g(2, 1) = -g(2, 1);
    return g;
}
inline SuperMatrix from_displayed(const SuperMatrix& g) { return to_displayed(g); }

// f^-1 det[(a b; c d) + f^-1 (al ga, al de; be ga, be de)] evaluated on a displayed-convention matrix.
inline Grassmann berezinian_displayed(const SuperMatrix& g)
{
    Grassmann fi = g(2, 2).inverse();
    Grassmann m00 = g(0, 0) + fi * g(0, 2) * g(2, 0);
    Grassmann m01 = g(0, 1) + fi * g(0, 2) * g(2, 1);
    Grassmann m10 = g(1, 0) + fi * g(1, 2) * g(2, 0);
    Grassmann m11 = g(1, 1) + fi * g(1, 2) * g(2, 1);
    return fi * (m00 * m11 - m01 * m10);
}

// u = (x1, x2, y | phi, theta)
struct SuperVector {
    Grassmann x1, x2, y, phi, theta;

    friend SuperVector operator+(const SuperVector& u, const SuperVector& v)
    {
        return {u.x1 + v.x1, u.x2 + v.x2, u.y + v.y, u.phi + v.phi, u.theta + v.theta};
    }
    friend SuperVector operator-(const SuperVector& u, const SuperVector& v)
    {
        return {u.x1 - v.x1, u.x2 - v.x2, u.y - v.y, u.phi - v.phi, u.theta - v.theta};
    }
    friend SuperVector operator*(const Grassmann& s, const SuperVector& u)
    {
        return {s * u.x1, s * u.x2, s * u.y, s * u.phi, s * u.theta};
    }
};

inline double norm(const SuperVector& u)
{
    return u.x1.norm() + u.x2.norm() + u.y.norm() + u.phi.norm() + u.theta.norm();
}
inline double distance(const SuperVector& u, const SuperVector& v) { return norm(u - v); }

inline Grassmann inner(const SuperVector& u, const SuperVector& v)
{
    return 0.5 * (u.x1 * v.x2 + v.x1 * u.x2) - u.y * v.y + u.phi * v.theta + v.phi * u.theta;
}

inline Grassmann lambda_length(const SuperVector& u, const SuperVector& v)
{
    Grassmann p = inner(u, v);
    if (!(p.body() > 0.0))
        throw DomainError("lambda-length needs a pairing with positive body");
    return p.sqrt_positive();
}

inline SuperMatrix matrix_form(const SuperVector& u)
{
    SuperMatrix m;
    m(0, 0) = u.x1;
    m(0, 1) = u.y;
    m(0, 2) = u.phi;
    m(1, 0) = u.y;
    m(1, 1) = u.x2;
    m(1, 2) = u.theta;
    m(2, 0) = -u.phi;
    m(2, 1) = -u.theta;
    m(2, 2) = Grassmann(0.0);
    return m;
}

struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// A -> g^st A g, read back as a vector.
inline SuperVector adjoint(const SuperMatrix& g, const SuperVector& u)
{
    SuperMatrix m = supertranspose(g) * matrix_form(u) * g;
    SuperVector r{m(0, 0), m(1, 1), m(0, 1), m(0, 2), m(1, 2)};
    if (!r.x1.is_even() || !r.x2.is_even() || !r.y.is_even() || !r.phi.is_odd() || !r.theta.is_odd())
        throw InternalError("adjoint action produced a vector of mixed parity");
    return r;
}

// Row spinor r = (v1, v2 | eta). Its light-cone vector is (v1^2, v2^2, v1 v2 | v1 eta, v2 eta),
// the group acts by r -> r g, and <u(r), u(s)> = omega(r, s)^2 / 2.
struct Spinor {
    Grassmann v1, v2, eta;

    Spinor operator-() const { return {-v1, -v2, -eta}; }
};

inline Grassmann omega(const Spinor& r, const Spinor& s) { return r.v1 * s.v2 - r.v2 * s.v1 + r.eta * s.eta; }

inline SuperVector spinor_vector(const Spinor& r) { return {r.v1 * r.v1, r.v2 * r.v2, r.v1 * r.v2, r.v1 * r.eta, r.v2 * r.eta}; }

inline Spinor act(const Spinor& r, const SuperMatrix& g)
{
    return {r.v1 * g(0, 0) + r.v2 * g(1, 0) + r.eta * g(2, 0), r.v1 * g(0, 1) + r.v2 * g(1, 1) + r.eta * g(2, 1),
            r.v1 * g(0, 2) + r.v2 * g(1, 2) + r.eta * g(2, 2)};
}

inline double distance(const Spinor& r, const Spinor& s)
{
    return (r.v1 - s.v1).norm() + (r.v2 - s.v2).norm() + (r.eta - s.eta).norm();
}

// The OSp element whose first two rows are P and Q / omega(P, Q); the third row is forced by
// g^st J g = J.
inline SuperMatrix osp_frame(const Spinor& P, const Spinor& Q)
{
    Grassmann w = omega(P, Q);
    if (w.body() == 0.0)
        throw DomainError("frame spinors are degenerate");
    Grassmann lam = w.inverse();
    Grassmann q1 = Q.v1 * lam, q2 = Q.v2 * lam, kappa = Q.eta * lam;
    Grassmann e = (1.0 + 2.0 * P.eta * kappa).sqrt_positive();
    Grassmann ei = e.inverse();
    SuperMatrix m;
    m(0, 0) = P.v1;
    m(0, 1) = P.v2;
    m(0, 2) = P.eta;
    m(1, 0) = q1;
    m(1, 1) = q2;
    m(1, 2) = kappa;
    m(2, 0) = (q1 * P.eta - P.v1 * kappa) * ei;
    m(2, 1) = (q2 * P.eta - P.v2 * kappa) * ei;
    m(2, 2) = e;
    return m;
}

// The unique OSp element with P g = P2 and Q g = Q2; needs omega(P, Q) = omega(P2, Q2).
inline SuperMatrix frame_map(const Spinor& P, const Spinor& Q, const Spinor& P2, const Spinor& Q2)
{
    Grassmann w1 = omega(P, Q), w2 = omega(P2, Q2);
    if ((w1 - w2).norm() > 1e-9 * (w1.norm() + w2.norm()))
        throw DomainError("frame map: spinor pairings differ");
    return osp_inverse(osp_frame(P, Q)) * osp_frame(P2, Q2);
}

struct Lifts {
    SuperVector A, B, C, D;
    Spinor rA, rB, rC, rD;
};

inline Lifts lift_fundamental_domain(const TorusState& st)
{
    validate(st);
    const Grassmann &a = st.a, &b = st.b, &c = st.c;
    const double r2 = std::sqrt(2.0);
    Grassmann u = r2 * c * a / b, s = r2 * b * c / a, t = r2 * a * b / c;
    Grassmann x1 = r2 * b * b * b / (c * a), x2 = r2 * a * a * a / (c * b), y = r2 * a * b / c;
    Grassmann lambda = -r2 * (a * a / c) * st.sigma, rho = r2 * (b * b / c) * st.sigma;
    Grassmann zero(0.0);
    Lifts L;
    L.A = {zero, u, zero, zero, zero};
    L.B = {t, t, t, t * st.theta, t * st.theta};
    L.C = {s, zero, zero, zero, zero};
    L.D = {x1, x2, -y, rho, lambda};
    Grassmann su = u.sqrt_positive(), ss = s.sqrt_positive(), stt = t.sqrt_positive(), sx1 = x1.sqrt_positive();
    L.rA = {zero, su, zero};
    L.rB = {stt, stt, stt * st.theta};
    L.rC = {ss, zero, zero};
    L.rD = {sx1, -x2.sqrt_positive(), rho / sx1};
    return L;
}

inline Grassmann eigen_r(const Grassmann& aa, const Grassmann& h, const Grassmann& W)
{
    Grassmann x = aa * h - W;
    if (!(x.body() > 2.0))
        throw DomainError("eigen_r: body of a*h - W must exceed 2 (hyperbolic element)");
    return 0.5 * (x + (x * x - 4.0).sqrt_positive());
}

struct StabilizerSolution {
    int k = 0;
    Grassmann q, beta;
    SuperMatrix U, V, g;
};

// g_a for the all-counterclockwise structure: U carries C to D, then an element V of the
// stabilizer of C (diag(-1,-1,1)^k (1 0 0; q 1 beta; -beta 0 1)) is fixed by B -> A.
inline StabilizerSolution stabilizer_route_g_a(const TorusState& st)
{
    Lifts L = lift_fundamental_domain(st);
    const double r2 = std::sqrt(2.0);
    const Grassmann &a = st.a, &b = st.b, &c = st.c;
    Grassmann s = r2 * b * c / a, t = r2 * a * b / c;
    Grassmann x1 = r2 * b * b * b / (c * a), x2 = r2 * a * a * a / (c * b);
    Grassmann rho = L.D.phi;
    StabilizerSolution out;
    SuperMatrix& U = out.U;
    U(0, 0) = (x1 / s).sqrt_positive();
    U(0, 1) = -(x2 / s).sqrt_positive();
    U(0, 2) = rho / (x1 * s).sqrt_positive();
    U(1, 0) = (s / x2).sqrt_positive();
    U(1, 1) = Grassmann(0.0);
    U(1, 2) = Grassmann(0.0);
    U(2, 0) = rho / (x1 * x2).sqrt_positive();
    U(2, 1) = Grassmann(0.0);
    U(2, 2) = Grassmann(1.0);
    // r_B V = +-(r_A U^-1)
    Spinor w = act(L.rA, osp_inverse(U));
    Grassmann sqt = t.sqrt_positive();
    double sign = (w.v2.body() / sqt.body() > 0.0) ? 1.0 : -1.0;
    out.k = sign > 0.0 ? 0 : 1;
    w = {sign * w.v1, sign * w.v2, sign * w.eta};
    out.beta = w.eta / sqt - st.theta;
    out.q = w.v1 / sqt - 1.0 + st.theta * out.beta;
    SuperMatrix V = SuperMatrix::identity();
    V(1, 0) = out.q;
    V(1, 2) = out.beta;
    V(2, 0) = -out.beta;
    if (out.k == 1)
        V = SuperMatrix::J2() * V;
    out.V = V;
    out.g = V * U;
    return out;
}

struct GeneratorPair {
    SuperMatrix g_a, g_b;
    Grassmann r_a, r_b;
    bool covered = false; // all-counterclockwise structure on the curves of a and b
};

// g_a: B -> A, C -> D. g_b: A -> D, B -> C, both for the representative with spin_c = +1.
// The sign of g_a is set by spin_b and that of g_b by spin_a; a reversed edge composes the
// generator with J^2 taken in the target frame.
inline GeneratorPair build_generators(const TorusState& state)
{
    TorusState st = normalized(state);
    Lifts L = lift_fundamental_domain(st);
    GeneratorPair gp;
    int sa = st.spin[0];
    int sb = st.spin[1];
    gp.g_a = stabilizer_route_g_a(st).g;
    if (sb < 0)
        gp.g_a = gp.g_a * osp_inverse(osp_frame(L.rA, L.rD)) * SuperMatrix::J2() * osp_frame(L.rA, L.rD);
    gp.g_b = sa > 0 ? frame_map(L.rA, L.rB, -L.rD, L.rC) : frame_map(L.rA, L.rB, L.rD, -L.rC);
    Grassmann h = semi_perimeter(st);
    auto w = w_invariants(st);
    gp.r_a = eigen_r(st.a, h, w[0]);
    gp.r_b = eigen_r(st.b, h, w[1]);
    gp.covered = sa > 0 && sb > 0;
    return gp;
}

// Closed form of g_a in the displayed convention, with the (1,1) entry +b/c. The sign -b/c
// (literal_sign = true) gives a body block of determinant -(1 + 2a^2/c^2).
inline SuperMatrix closed_form_g_a(const TorusState& st, bool literal_sign = false)
{
    const Grassmann &a = st.a, &b = st.b, &c = st.c, &s = st.sigma, &t = st.theta;
    SuperMatrix m;
    m(0, 0) = literal_sign ? -b / c : b / c;
    m(0, 1) = -a * a / (b * c);
    m(0, 2) = a / c * s;
    m(1, 0) = -b / c;
    m(1, 1) = a * a / (b * c) + c / b + a / b * s * t;
    m(1, 2) = -a / c * s - t;
    m(2, 0) = -b / c * t;
    m(2, 1) = -a / b * s + a * a / (b * c) * t;
    m(2, 2) = 1.0 + a / c * t * s;
    return m;
}

using ColumnVector = std::array<Grassmann, 3>;

inline ColumnVector apply(const SuperMatrix& g, const ColumnVector& v)
{
    ColumnVector r;
    for (int i = 0; i < 3; ++i)
        r[static_cast<std::size_t>(i)] = g(i, 0) * v[0] + g(i, 1) * v[1] + g(i, 2) * v[2];
    return r;
}

inline double eigen_residual(const SuperMatrix& g, const ColumnVector& v, const Grassmann& lam)
{
    ColumnVector gv = apply(g, v);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        s += (gv[i] - lam * v[i]).norm();
    return s;
}

struct Eigenvectors {
    ColumnVector v_plus, v_minus, v_zero;
    Grassmann r;
    double res_plus = 0, res_minus = 0, res_zero = 0;
};

// Column eigenvectors of g_a in the plain convention for the structure with W_b = W_c = sigma*theta.
// The odd entry of v_+- carries a minus sign relative to the literal formula; without it the
// residual is O(1).
inline Eigenvectors eigenvectors(const SuperMatrix& g_a, const TorusState& st)
{
    const Grassmann &a = st.a, &b = st.b, &c = st.c, &s = st.sigma, &t = st.theta;
    Grassmann W = s * t;
    Grassmann h = semi_perimeter(st);
    Eigenvectors ev;
    ev.r = eigen_r(a, h, w_invariants(st)[0]);
    auto vec = [&](const Grassmann& r) {
        return ColumnVector{(a * a + c * c + a * c * W - b * c * r) * (1.0 - r) - a * b * r * W, b * b * (1.0 - r),
                            -(a * b * s + b * (c - b * r) * t)};
    };
    Grassmann rinv = ev.r.inverse();
    ev.v_plus = vec(ev.r);
    ev.v_minus = vec(rinv);
    ev.v_zero = {a * (c - b) * s - a * a * t, a * b * s + b * (c - b) * t, a * a + (b - c) * (b - c)};
    ev.res_plus = eigen_residual(g_a, ev.v_plus, ev.r);
    ev.res_minus = eigen_residual(g_a, ev.v_minus, rinv);
    ev.res_zero = eigen_residual(g_a, ev.v_zero, Grassmann(1.0));
    return ev;
}

inline Grassmann length_from_r(const Grassmann& r)
{
    if (!(r.body() > 1.0))
        throw DomainError("length_from_r: body of r must exceed 1");
    return 2.0 * log(r);
}

inline SuperVector geodesic_point(const SuperVector& e, const SuperVector& f, double t)
{
    Grassmann p = inner(e, f);
    if (!(p.body() > 0.0))
        throw DomainError("geodesic_point: pairing of the endpoints must have positive body");
    if (inner(e, e).norm() > 1e-10 * norm(e) * norm(e) || inner(f, f).norm() > 1e-10 * norm(f) * norm(f))
        throw DomainError("geodesic_point: endpoints must be isotropic");
    Grassmann k = (2.0 / p).sqrt_positive();
    SuperVector e2 = k * e, f2 = k * f;
    SuperVector u = Grassmann(0.5) * (e2 + f2), v = Grassmann(0.5) * (e2 - f2);
    return Grassmann(std::cosh(t)) * u + Grassmann(std::sinh(t)) * v;
}

} // namespace superflip
