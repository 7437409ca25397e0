#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "grassmann.hpp"
#include "identity.hpp"
#include "markoff.hpp"
#include "osp12.hpp"
#include "state.hpp"

namespace superflip {

using nlohmann::json;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grassmann text form {"N":2,"terms":[{"idx":[],"c":2.0},{"idx":[1,2],"c":1.0}]}, 1-based sorted idx.
inline json to_json(const Grassmann& g, int n_default = 0)
{
    json terms = json::array();
    for (const auto& [m, c] : g.terms())
        terms.push_back({{"idx", indices_of(m)}, {"c", c}});
    return {{"N", g.n() != 0 ? g.n() : n_default}, {"terms", terms}};
}

// Accepts a bare number as a scalar.
inline Grassmann grassmann_from_json(const json& j, int n_default = 0)
{
    if (j.is_number())
        return n_default > 0 ? Grassmann::scalar(n_default, j.get<double>()) : Grassmann(j.get<double>());
    if (!j.is_object() || !j.contains("terms"))
        throw FormatError("Grassmann value must be a number or an object with \"terms\"");
    int n = j.value("N", n_default);
    if (n <= 0) {
        double c = 0.0;
        for (const auto& t : j.at("terms")) {
            if (!t.at("idx").empty())
                throw FormatError("Grassmann value with generators needs \"N\"");
            c += t.at("c").get<double>();
        }
        return Grassmann(c);
    }
    std::vector<std::pair<std::vector<int>, double>> terms;
    for (const auto& t : j.at("terms")) {
        auto idx = t.at("idx").get<std::vector<int>>();
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (idx[i] <= idx[i - 1])
                throw FormatError("Grassmann idx arrays must be strictly increasing");
        terms.emplace_back(std::move(idx), t.at("c").get<double>());
    }
    Grassmann g = Grassmann::scalar(n, 0.0);
    for (const auto& [idx, c] : terms) {
        Mask m = 0;
        for (int i : idx) {
            if (i < 1 || i > n)
                throw FormatError("Grassmann index out of range 1..N");
            m |= Mask{1} << (i - 1);
        }
        g += Grassmann::from_terms(n, {{m, c}});
    }
    return g;
}

inline json to_json(const TorusState& s)
{
    int n = s.n();
    json j = {{"N", n},
              {"a", to_json(s.a, n)},
              {"b", to_json(s.b, n)},
              {"c", to_json(s.c, n)},
              {"sigma", to_json(s.sigma, n)},
              {"theta", to_json(s.theta, n)},
              {"spin", s.spin}};
    if (s.frame != 0)
        j["frame"] = s.frame;
    return j;
}

inline TorusState state_from_json(const json& j)
{
    if (!j.is_object())
        throw FormatError("state must be a JSON object");
    int n = j.value("N", 0);
    TorusState s;
    s.a = grassmann_from_json(j.at("a"), n);
    s.b = grassmann_from_json(j.at("b"), n);
    s.c = grassmann_from_json(j.at("c"), n);
    s.sigma = j.contains("sigma") ? grassmann_from_json(j.at("sigma"), n) : Grassmann();
    s.theta = j.contains("theta") ? grassmann_from_json(j.at("theta"), n) : Grassmann();
    if (n > 0) {
        if (s.sigma.is_zero())
            s.sigma = Grassmann::scalar(n, 0.0);
        if (s.theta.is_zero())
            s.theta = Grassmann::scalar(n, 0.0);
    }
    if (j.contains("spin"))
        s.spin = j.at("spin").get<std::array<int, 3>>();
    s.frame = j.value("frame", 0);
    validate(s);
    return s;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline TorusState read_state(const std::string& path) { return state_from_json(read_json_file(path)); }

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write " + path);
    out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json to_json(const SuperMatrix& g)
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int k = 0; k < 3; ++k)
            row.push_back(to_json(g(i, k)));
        rows.push_back(row);
    }
    return rows;
}

inline std::string fmt_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json to_json(const RegionNode& r)
{
    return {{"address", r.address}, {"slope", {r.slope.p, r.slope.q}}, {"lam", to_json(r.lam)},
            {"W", to_json(r.W)},     {"neighbors", {to_json(r.nb1), to_json(r.nb2)}}, {"depth", r.depth}};
}

inline std::string region_csv_header(bool with_norm)
{
    return std::string("address,slope_p,slope_q,body_lambda,norm_soul,body_length,summand_body") +
           (with_norm ? ",summand_norm" : "") + "\n";
}

inline std::string region_csv_row(const RegionNode& r, double body_length, const Grassmann& summand, bool with_norm)
{
    std::string s = r.address + "," + std::to_string(r.slope.p) + "," + std::to_string(r.slope.q) + "," +
                    fmt_real(r.lam.body()) + "," + fmt_real(r.lam.soul().norm()) + "," + fmt_real(body_length) + "," +
                    fmt_real(summand.body());
    if (with_norm)
        s += "," + fmt_real(summand.norm());
    return s + "\n";
}

inline std::string identity_csv(const IdentityReport& rep)
{
    std::string out = region_csv_header(true);
    for (const auto& row : rep.rows)
        out += region_csv_row(row.region, row.body_length, row.summand, true);
    return out;
}

inline json identity_sidecar(const IdentityReport& rep)
{
    json regions = json::array();
    for (const auto& row : rep.rows) {
        json r = to_json(row.region);
        r["summand"] = to_json(row.summand);
        regions.push_back(r);
    }
    return {{"h", to_json(rep.h)}, {"regions", regions}};
}

inline json to_json(const IdentityReport& rep)
{
    return {{"cutoff", rep.cutoff},
            {"tol", rep.tol},
            {"region_count", rep.region_count},
            {"vertex_count", rep.vertex_count},
            {"h", to_json(rep.h)},
            {"partial_sum", to_json(rep.partial_sum)},
            {"deviation", rep.deviation},
            {"body_deviation", rep.body_deviation},
            {"tail_constant", rep.tail_constant},
            {"tail_bound", rep.tail_bound},
            {"frontier_count", rep.frontier.size()},
            {"converged", rep.converged},
            {"within_tol", rep.within_tol},
            {"flexible", rep.flexible},
            {"sink_steps", rep.sink_steps}};
}

inline json to_json(const BodySoulReport& b)
{
    return {{"delta", b.delta}, {"M", b.M}, {"prefix_max", b.prefix_max}, {"violations", b.violations}};
}

inline json to_json(const std::vector<GrowthRow>& table)
{
    json a = json::array();
    for (const auto& g : table)
        a.push_back({{"L", g.L}, {"N_rho", g.n_rho}, {"N_body", g.n_body}, {"N_rho_over_L2", g.ratio}});
    return a;
}

enum class LogLevel { quiet = 0, error = 1, info = 2, debug = 3 };

// SUPERFLIP_LOG: quiet|error|info|debug or 0..3; default error.
inline LogLevel log_level()
{
    const char* v = std::getenv("SUPERFLIP_LOG");
    if (!v)
        return LogLevel::error;
    std::string s(v);
    if (s == "quiet" || s == "0")
        return LogLevel::quiet;
    if (s == "info" || s == "2")
        return LogLevel::info;
    if (s == "debug" || s == "3")
        return LogLevel::debug;
    return LogLevel::error;
}

inline void log(LogLevel lvl, const std::string& msg)
{
    static const LogLevel current = log_level();
    if (static_cast<int>(lvl) <= static_cast<int>(current) && lvl != LogLevel::quiet)
        std::cerr << "[superflip] " << msg << "\n";
}

} // namespace superflip
