#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace superflip {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A result left the range of double.
struct RangeError : std::range_error {
    using std::range_error::range_error;
};

struct ParityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxGenerators = 16;

// Basis element beta_[lambda] encoded as a bitmask: bit i-1 set <=> generator i present.
using Mask = std::uint32_t;

inline Mask mask_of(std::initializer_list<int> idx)
{
    Mask m = 0;
    for (int i : idx) {
        if (i < 1 || i > kMaxGenerators)
            throw DimensionError("generator label out of range: " + std::to_string(i));
        Mask bit = Mask{1} << (i - 1);
        if (m & bit)
            throw DimensionError("repeated generator label");
        m |= bit;
    }
    return m;
}

inline std::vector<int> indices_of(Mask m)
{
    std::vector<int> out;
    for (int i = 0; m; ++i, m >>= 1)
        if (m & 1u)
            out.push_back(i + 1);
    return out;
}

inline int degree_of(Mask m) { return std::popcount(m); }

// Sign of beta_a * beta_b for disjoint a, b: parity of the pairs (i in a, j in b) with i > j.
inline int basis_sign(Mask a, Mask b)
{
    int swaps = 0;
    while (b) {
        int j = std::countr_zero(b);
        b &= b - 1;
        swaps += std::popcount(a >> (j + 1));
    }
    return (swaps & 1) ? -1 : 1;
}

// Element of the real Grassmann algebra on n generators. Terms are kept sorted by mask with
// exact zeros removed, so equality is structural. n == 0 marks a generator-free scalar that
// adopts the dimension of whatever it is combined with.
class Grassmann {
public:
    using Term = std::pair<Mask, double>;

    Grassmann() = default;
    Grassmann(double c) : n_(0)
    {
        if (c != 0.0)
            terms_.emplace_back(0u, c);
    }

    static Grassmann scalar(int n, double c)
    {
        Grassmann g(c);
        g.n_ = check_n(n);
        return g;
    }
    static Grassmann generator(int n, int i, double c = 1.0)
    {
        Grassmann g;
        g.n_ = check_n(n);
        if (i < 1 || i > n)
            throw DimensionError("generator label exceeds N");
        if (c != 0.0)
            g.terms_.emplace_back(Mask{1} << (i - 1), c);
        return g;
    }
    static Grassmann from_terms(int n, std::vector<Term> terms)
    {
        Grassmann g;
        g.n_ = check_n(n);
        for (auto& [m, c] : terms)
            if (n < 32 && (m >> n) != 0)
                throw DimensionError("multi-index label exceeds N");
        g.terms_ = std::move(terms);
        g.canonicalize();
        return g;
    }
    static Grassmann term(int n, std::initializer_list<int> idx, double c)
    {
        Mask m = mask_of(idx);
        return from_terms(n, {{m, c}});
    }

    int n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double coeff(Mask m) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, Mask k) { return t.first < k; });
        return (it != terms_.end() && it->first == m) ? it->second : 0.0;
    }

    double body() const { return (!terms_.empty() && terms_.front().first == 0u) ? terms_.front().second : 0.0; }

    Grassmann soul() const { return filtered([](Mask m) { return m != 0u; }); }

    // s_k(x); s_0 is the body times the unit.
    Grassmann degree_soul(int k) const
    {
        return filtered([k](Mask m) { return degree_of(m) == k; });
    }
    Grassmann even_part() const { return filtered([](Mask m) { return degree_of(m) % 2 == 0; }); }
    Grassmann odd_part() const { return filtered([](Mask m) { return degree_of(m) % 2 == 1; }); }

    bool is_even() const { return odd_part().is_zero(); }
    bool is_odd() const { return even_part().is_zero(); }

    double norm() const
    {
        double s = 0.0;
        for (auto& t : terms_)
            s += std::fabs(t.second);
        return s;
    }

    Grassmann operator-() const
    {
        Grassmann r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }

    Grassmann& operator+=(const Grassmann& o) { return *this = add(*this, o, 1.0); }
    Grassmann& operator-=(const Grassmann& o) { return *this = add(*this, o, -1.0); }
    Grassmann& operator*=(const Grassmann& o) { return *this = mul(*this, o); }
    Grassmann& operator*=(double c)
    {
        if (c == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& t : terms_)
            t.second *= c;
        canonicalize();
        return *this;
    }

    friend Grassmann operator+(const Grassmann& x, const Grassmann& y) { return add(x, y, 1.0); }
    friend Grassmann operator-(const Grassmann& x, const Grassmann& y) { return add(x, y, -1.0); }
    friend Grassmann operator*(const Grassmann& x, const Grassmann& y) { return mul(x, y); }
    friend Grassmann operator*(Grassmann x, double c) { return x *= c; }
    friend Grassmann operator*(double c, Grassmann x) { return x *= c; }
    friend Grassmann operator/(Grassmann x, double c) { return x *= 1.0 / c; }
    friend Grassmann operator/(const Grassmann& x, const Grassmann& y) { return mul(x, y.inverse()); }
    friend Grassmann operator/(double c, const Grassmann& y) { return y.inverse() * c; }

    friend bool operator==(const Grassmann& x, const Grassmann& y) { return x.terms_ == y.terms_; }

    // (1/e) * sum_j (-s/e)^j, finite because the soul is nilpotent.
    Grassmann inverse() const
    {
        double e = body();
        if (e == 0.0)
            throw DomainError("Grassmann inverse: zero body");
        Grassmann t = soul() * (-1.0 / e);
        return series(t, [e](int) { return 1.0 / e; });
    }

    Grassmann sqrt_positive() const
    {
        double e = body();
        if (!(e > 0.0))
            throw DomainError("Grassmann sqrt: body must be positive");
        Grassmann t = soul() * (1.0 / e);
        double root = std::sqrt(e);
        // binom(1/2, j)
        std::vector<double> c{1.0};
        for (int j = 1; j <= kMaxGenerators + 1; ++j)
            c.push_back(c.back() * (0.5 - (j - 1)) / j);
        return series(t, [&](int j) { return root * c[static_cast<std::size_t>(j)]; });
    }

    // s^0, s^1, ... up to the last nonzero power of the soul (s^j = 0 for j > N).
    std::vector<Grassmann> soul_powers() const
    {
        std::vector<Grassmann> p;
        Grassmann s = soul();
        Grassmann cur = unit_like(*this);
        p.push_back(cur);
        while (true) {
            cur = cur * s;
            if (cur.is_zero())
                break;
            p.push_back(cur);
        }
        return p;
    }

private:
    int n_ = 0;
    std::vector<Term> terms_;

    static int check_n(int n)
    {
        if (n < 1 || n > kMaxGenerators)
            throw DimensionError("generator count must lie in 1..16");
        return n;
    }

    static Grassmann unit_like(const Grassmann& x)
    {
        Grassmann u(1.0);
        u.n_ = x.n_;
        return u;
    }

    static int join_n(const Grassmann& x, const Grassmann& y)
    {
        if (x.n_ == 0)
            return y.n_;
        if (y.n_ == 0 || y.n_ == x.n_)
            return x.n_;
        throw DimensionError("Grassmann operands have different generator counts");
    }

    template <class Pred>
    Grassmann filtered(Pred keep) const
    {
        Grassmann r;
        r.n_ = n_;
        for (auto& t : terms_)
            if (keep(t.first))
                r.terms_.push_back(t);
        return r;
    }

    void canonicalize()
    {
        std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!out.empty() && out.back().first == t.first)
                out.back().second += t.second;
            else
                out.push_back(t);
        }
        out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.second == 0.0; }), out.end());
        terms_ = std::move(out);
    }

    static Grassmann add(const Grassmann& x, const Grassmann& y, double sy)
    {
        Grassmann r;
        r.n_ = join_n(x, y);
        r.terms_.reserve(x.terms_.size() + y.terms_.size());
        auto i = x.terms_.begin();
        auto j = y.terms_.begin();
        while (i != x.terms_.end() || j != y.terms_.end()) {
            if (j == y.terms_.end() || (i != x.terms_.end() && i->first < j->first)) {
                r.terms_.push_back(*i++);
            } else if (i == x.terms_.end() || j->first < i->first) {
                r.terms_.emplace_back(j->first, sy * j->second);
                ++j;
            } else {
                double c = i->second + sy * j->second;
                if (c != 0.0)
                    r.terms_.emplace_back(i->first, c);
                ++i;
                ++j;
            }
        }
        return r;
    }

    static Grassmann mul(const Grassmann& x, const Grassmann& y)
    {
        Grassmann r;
        r.n_ = join_n(x, y);
        if (x.terms_.empty() || y.terms_.empty())
            return r;
        r.terms_.reserve(x.terms_.size() * y.terms_.size());
        for (auto& [a, ca] : x.terms_)
            for (auto& [b, cb] : y.terms_) {
                if (a & b)
                    continue;
                r.terms_.emplace_back(a | b, basis_sign(a, b) * ca * cb);
            }
        r.canonicalize();
        return r;
    }

    // sum_j coef(j) * t^j, stopping at the first vanishing power of the nilpotent t.
    template <class Coef>
    Grassmann series(const Grassmann& t, Coef coef) const
    {
        Grassmann result = unit_like(*this) * coef(0);
        Grassmann p = unit_like(*this);
        for (int j = 1;; ++j) {
            p = p * t;
            if (p.is_zero())
                break;
            result += p * coef(j);
        }
        return result;
    }
};

inline double body(const Grassmann& x) { return x.body(); }
inline double norm(const Grassmann& x) { return x.norm(); }
inline Grassmann inverse(const Grassmann& x) { return x.inverse(); }
inline Grassmann sqrt_positive(const Grassmann& x) { return x.sqrt_positive(); }

enum class Analytic { exp, log, cosh, sinh, arcosh };

namespace detail {

// Taylor coefficients f^(j)(e)/j! for j = 0..count-1.
inline std::vector<double> taylor_coefficients(Analytic f, double e, int count)
{
    std::vector<double> c(static_cast<std::size_t>(count), 0.0);
    double fact = 1.0;
    for (int j = 0; j < count; ++j) {
        if (j > 0)
            fact *= j;
        double d = 0.0;
        switch (f) {
        case Analytic::exp: d = std::exp(e); break;
        case Analytic::cosh: d = (j % 2 == 0) ? std::cosh(e) : std::sinh(e); break;
        case Analytic::sinh: d = (j % 2 == 0) ? std::sinh(e) : std::cosh(e); break;
        case Analytic::log:
            d = (j == 0) ? std::log(e) : ((j % 2 == 1) ? 1.0 : -1.0) * (fact / j) / std::pow(e, j);
            break;
        case Analytic::arcosh: break;
        }
        c[static_cast<std::size_t>(j)] = d / fact;
    }
    return c;
}

} // namespace detail

inline Grassmann analytic_apply(Analytic f, const Grassmann& x)
{
    double e = x.body();
    if (f == Analytic::log && !(e > 0.0))
        throw DomainError("log: body must be positive");
    if (f == Analytic::arcosh) {
        if (!(e > 1.0))
            throw DomainError("arcosh: body must exceed 1");
        return analytic_apply(Analytic::log, x + (x * x - 1.0).sqrt_positive());
    }
    auto powers = x.soul_powers();
    auto c = detail::taylor_coefficients(f, e, static_cast<int>(powers.size()));
    Grassmann r = powers[0] * c[0];
    for (std::size_t j = 1; j < powers.size(); ++j)
        r += powers[j] * c[j];
    return r;
}

inline Grassmann exp(const Grassmann& x) { return analytic_apply(Analytic::exp, x); }
inline Grassmann log(const Grassmann& x) { return analytic_apply(Analytic::log, x); }
inline Grassmann cosh(const Grassmann& x) { return analytic_apply(Analytic::cosh, x); }
inline Grassmann sinh(const Grassmann& x) { return analytic_apply(Analytic::sinh, x); }
inline Grassmann arcosh(const Grassmann& x) { return analytic_apply(Analytic::arcosh, x); }

// Per-component error-free accumulation (Neumaier) for deterministic, accurate sums.
class CompensatedSum {
public:
    void add(const Grassmann& x)
    {
        if (n_ == 0)
            n_ = x.n();
        for (auto& [m, c] : x.terms()) {
            auto& slot = find(m);
            double t = slot.sum + c;
            if (std::fabs(slot.sum) >= std::fabs(c))
                slot.comp += (slot.sum - t) + c;
            else
                slot.comp += (c - t) + slot.sum;
            slot.sum = t;
        }
    }
    Grassmann value() const
    {
        std::vector<Grassmann::Term> t;
        for (auto& s : slots_)
            t.emplace_back(s.mask, s.sum + s.comp);
        if (n_ == 0) {
            double b = t.empty() ? 0.0 : t.front().second;
            return Grassmann(b);
        }
        return Grassmann::from_terms(n_, std::move(t));
    }

private:
    struct Slot {
        Mask mask;
        double sum = 0.0;
        double comp = 0.0;
    };
    int n_ = 0;
    std::vector<Slot> slots_;

    Slot& find(Mask m)
    {
        auto it = std::lower_bound(slots_.begin(), slots_.end(), m, [](const Slot& s, Mask k) { return s.mask < k; });
        if (it == slots_.end() || it->mask != m)
            it = slots_.insert(it, Slot{m});
        return *it;
    }
};

} // namespace superflip
