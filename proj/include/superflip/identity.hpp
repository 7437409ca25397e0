#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "grassmann.hpp"
#include "markoff.hpp"
#include "osp12.hpp"
#include "state.hpp"

namespace superflip {

// 1/(a h r) + W/(2 a h) with r + 1/r = a h - W.
inline Grassmann summand_region(const Grassmann& lam, const Grassmann& h, const Grassmann& W)
{
    Grassmann ah = lam * h;
    Grassmann r = eigen_r(lam, h, W);
    return (ah * r).inverse() + W / (2.0 * ah);
}

// 1/(e^l + 1) + (W/4) sinh(l/2)/cosh^2(l/2).
inline Grassmann summand_geodesic(const Grassmann& ell, const Grassmann& W)
{
    if (!(ell.body() > 0.0))
        throw DomainError("summand_geodesic: length must have positive body");
    Grassmann half = ell * 0.5;
    Grassmann ch = cosh(half);
    return (exp(ell) + 1.0).inverse() + W * 0.25 * sinh(half) / (ch * ch);
}

// Region cutoff eps(a h) <= 2 cosh(L/2) for geodesics of body length at most L.
inline double cutoff_from_length(double L) { return 2.0 * std::cosh(0.5 * L); }

struct IdentityRow {
    RegionNode region;
    Grassmann summand;
    double body_length = 0.0;
};

struct IdentityReport {
    double cutoff = 0.0;
    double tol = 0.0;
    std::size_t region_count = 0;
    std::size_t vertex_count = 0;
    Grassmann h;
    Grassmann partial_sum;
    double deviation = 0.0;
    double body_deviation = 0.0;
    double tail_constant = 0.0;
    double tail_bound = 0.0;
    bool converged = false; // deviation <= tol + tail_bound
    bool within_tol = false; // deviation <= tol
    bool flexible = false;
    long sink_steps = 0;
    std::vector<IdentityRow> rows;
    std::vector<RegionNode> frontier;
};

inline IdentityReport verify_identity(const TorusState& state, double cutoff, double tol, int workers = 1)
{
    if (!(cutoff > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("cutoff and tolerance must be positive");
    Enumeration en = enumerate_regions(state, cutoff, workers);
    IdentityReport rep;
    rep.cutoff = cutoff;
    rep.tol = tol;
    rep.h = en.h;
    rep.region_count = en.regions.size();
    rep.vertex_count = en.vertices;
    rep.flexible = en.sink.flexible;
    rep.sink_steps = en.sink.steps;
    CompensatedSum sum;
    for (const auto& reg : en.regions) {
        IdentityRow row{reg, summand_region(reg.lam, en.h, reg.W), 0.0};
        row.body_length = length_from_r(eigen_r(reg.lam, en.h, reg.W)).body();
        sum.add(row.summand);
        rep.tail_constant = std::max(rep.tail_constant, row.summand.norm() * std::sqrt(reg.lam.body()));
        rep.rows.push_back(std::move(row));
    }
    rep.partial_sum = sum.value();
    Grassmann diff = rep.partial_sum - 0.5;
    rep.deviation = diff.norm();
    rep.body_deviation = std::fabs(diff.body());
    CompensatedSum tail;
    for (const auto& f : en.frontier)
        tail.add(Grassmann(rep.tail_constant / std::sqrt(f.lam.body())));
    rep.tail_bound = tail.value().body();
    rep.frontier = std::move(en.frontier);
    rep.within_tol = rep.deviation <= tol;
    rep.converged = rep.deviation <= tol + rep.tail_bound;
    return rep;
}

struct BodySoulReport {
    double delta = 0.0;
    double M = 0.0;
    double prefix_max = 0.0;
    std::vector<std::string> violations; // addresses
};

// M = max ||s(lam)|| / eps(lam)^(1+delta); regions past the first 100 must stay within 10x the
// maximum over those 100.
inline BodySoulReport body_soul_report(const std::vector<RegionNode>& regions, double delta)
{
    if (regions.empty())
        throw std::invalid_argument("body_soul_report: empty region list");
    constexpr std::size_t kPrefix = 100;
    BodySoulReport rep;
    rep.delta = delta;
    std::vector<double> ratio;
    ratio.reserve(regions.size());
    for (const auto& r : regions) {
        double e = r.lam.body();
        ratio.push_back(r.lam.soul().norm() / std::pow(e, 1.0 + delta));
        rep.M = std::max(rep.M, ratio.back());
    }
    for (std::size_t i = 0; i < std::min(kPrefix, ratio.size()); ++i)
        rep.prefix_max = std::max(rep.prefix_max, ratio[i]);
    for (std::size_t i = kPrefix; i < ratio.size(); ++i)
        if (ratio[i] > 10.0 * rep.prefix_max)
            rep.violations.push_back(regions[i].address);
    return rep;
}

struct InsufficientCutoff : std::invalid_argument {
    double required;
    InsufficientCutoff(const std::string& m, double req) : std::invalid_argument(m), required(req) {}
};

struct GrowthRow {
    double L = 0.0;
    std::size_t n_rho = 0; // log ||a|| < L
    std::size_t n_body = 0; // log eps(a) < L
    double ratio = 0.0; // n_rho / L^2
};

// Counts need every region with eps(a) < e^L, which the enumeration holds iff
// cutoff >= e^Lmax * eps(h).
inline double required_cutoff(double Lmax, double h_body) { return std::exp(Lmax) * h_body; }

inline std::vector<GrowthRow> growth_count(const std::vector<RegionNode>& regions, const std::vector<double>& grid,
                                           double cutoff_used, double h_body)
{
    std::vector<GrowthRow> table;
    if (grid.empty())
        return table;
    double Lmax = *std::max_element(grid.begin(), grid.end());
    double need = required_cutoff(Lmax, h_body);
    if (cutoff_used < need)
        throw InsufficientCutoff("growth_count: enumeration cutoff " + std::to_string(cutoff_used) +
                                     " below required " + std::to_string(need),
                                 need);
    std::vector<double> log_norm, log_body;
    for (const auto& r : regions) {
        log_norm.push_back(std::log(r.lam.norm()));
        log_body.push_back(std::log(r.lam.body()));
    }
    for (double L : grid) {
        GrowthRow g;
        g.L = L;
        for (std::size_t i = 0; i < regions.size(); ++i) {
            g.n_rho += log_norm[i] < L ? 1u : 0u;
            g.n_body += log_body[i] < L ? 1u : 0u;
        }
        g.ratio = L != 0.0 ? static_cast<double>(g.n_rho) / (L * L) : 0.0;
        table.push_back(g);
    }
    return table;
}

} // namespace superflip
