#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newtres/errors.hpp"
#include "newtres/hull2d.hpp"
#include "newtres/optimize.hpp"
#include "newtres/profile1d.hpp"
#include "newtres/radial.hpp"
#include "newtres/verify.hpp"

// File formats: CSV profiles and traces (header row, comma separator, LF),
// JSON records with stable key order, OBJ meshes with 1-based faces.
// CSV/JSON numbers are written with enough digits to round-trip exactly;
// human-facing rounding is the CLI's concern.

namespace newtres {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string full_digits(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF on every platform
    if (!out) throw DomainError("cannot open for writing: " + path);
    return out;
}

}  // namespace detail

// Two-column CSV (header "x,u" for interval profiles, "r,u" for radial ones).
inline void write_profile_csv(const std::string& path, const std::string& abscissa,
                              const std::vector<double>& xs, const std::vector<double>& us) {
    if (xs.size() != us.size()) throw DomainError("write_profile_csv: column length mismatch");
    auto out = detail::open_out(path);
    out << abscissa << ",u\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << detail::full_digits(xs[i]) << ',' << detail::full_digits(us[i]) << '\n';
}

struct LoadedProfile {
    bool radial = false;  // header "r,u" (disk) vs "x,u" (interval)
    std::vector<double> xs;
    std::vector<double> us;
};

// Strict parser for the CSV written above; any deviation is a DomainError
// (the CLI maps that to a usage-error exit).
inline LoadedProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open profile: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("profile is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LoadedProfile prof;
    if (line == "x,u")
        prof.radial = false;
    else if (line == "r,u")
        prof.radial = true;
    else
        throw DomainError("profile header must be 'x,u' or 'r,u', got '" + line + "'");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* s = line.c_str();
        char* end = nullptr;
        const double a = std::strtod(s, &end);
        if (end == s || *end != ',') throw DomainError("malformed profile row: " + line);
        const char* s2 = end + 1;
        const double b = std::strtod(s2, &end);
        if (end == s2 || *end != '\0') throw DomainError("malformed profile row: " + line);
        prof.xs.push_back(a);
        prof.us.push_back(b);
    }
    if (prof.xs.size() < 2) throw DomainError("profile needs at least 2 rows: " + path);
    return prof;
}

inline ordered_json summary_json(const Profile1D& p) {
    return ordered_json{
        {"M", p.M}, {"q", p.q}, {"gamma_star", p.gamma_star}, {"resistance", p.resistance()}};
}

inline ordered_json summary_json(const RadialSolution& s) {
    return ordered_json{{"R", s.R},           {"M", s.M},
                        {"q", s.q},           {"a_star", s.a_star},
                        {"eta_star", s.eta_star}, {"resistance", s.resistance()}};
}

inline ordered_json mesh_json(const SurfaceMesh& mesh, double cost_value, double M, double q,
                              int m, int n) {
    ordered_json j;
    j["vertices"] = mesh.vertices;
    j["faces"] = mesh.faces;
    j["cost"] = cost_value;
    j["parameters"] = ordered_json{{"M", M}, {"q", q}, {"m", m}, {"n", n}};
    return j;
}

inline ordered_json shock_json(const ShockReport& rep) {
    ordered_json viols = ordered_json::array();
    for (const auto& v : rep.violations)
        viols.push_back(ordered_json{{"x", v.x}, {"tau", v.tau}, {"deficit", v.deficit}});
    return ordered_json{
        {"tested_points", rep.tested_points}, {"pass", rep.pass}, {"violations", viols}};
}

inline void write_json(const std::string& path, const ordered_json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

// Wavefront OBJ of the physical graph: vertex heights are u = v + q(|x|^2-1)/2,
// not the stored concave part; faces are 1-based.
inline void write_obj(const std::string& path, const SurfaceMesh& mesh, double q) {
    auto out = detail::open_out(path);
    for (const auto& v : mesh.vertices) {
        const double u = v[2] + q * (v[0] * v[0] + v[1] * v[1] - 1.0) / 2.0;
        out << "v " << detail::full_digits(v[0]) << ' ' << detail::full_digits(v[1]) << ' '
            << detail::full_digits(u) << '\n';
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_trace_csv(const std::string& path, const OptimizationTrace& trace) {
    auto out = detail::open_out(path);
    out << "evaluation_count,best_cost\n";
    for (const auto& [evals, cost] : trace.best_cost_history)
        out << evals << ',' << detail::full_digits(cost) << '\n';
}

}  // namespace newtres
