#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "newtres/errors.hpp"
#include "newtres/export.hpp"
#include "newtres/hull2d.hpp"
#include "newtres/optimize.hpp"
#include "newtres/profile1d.hpp"
#include "newtres/radial.hpp"

using namespace newtres;

namespace {

std::filesystem::path tmp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("newtres_io_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("profile CSV round trip", "[io]") {
    const auto path = tmp_path("roundtrip.csv");
    const std::vector<double> xs = {-1.0, -0.25, 1.0 / 3.0, 0.7071067811865476, 1.0};
    const std::vector<double> us = {0.0, 0.6, 0.55, 0.3, 1e-17};
    write_profile_csv(path.string(), "x", xs, us);

    const auto prof = read_profile_csv(path.string());
    CHECK_FALSE(prof.radial);
    REQUIRE(prof.xs.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(prof.xs[i] == xs[i]);  // full-precision text keeps doubles exact
        CHECK(prof.us[i] == us[i]);
    }

    const std::string raw = slurp(path);
    CHECK(raw.rfind("x,u\n", 0) == 0);
    CHECK(raw.find('\r') == std::string::npos);
    CHECK(raw.back() == '\n');

    const auto rpath = tmp_path("radial.csv");
    write_profile_csv(rpath.string(), "r", {0.0, 0.5, 1.0}, {0.5, 0.4, 0.0});
    const auto rprof = read_profile_csv(rpath.string());
    CHECK(rprof.radial);
    CHECK(rprof.xs.size() == 3);

    CHECK_THROWS_AS(write_profile_csv(path.string(), "x", xs, {0.0}), DomainError);
}

TEST_CASE("malformed profile CSV is rejected", "[io]") {
    const auto path = tmp_path("bad.csv");

    spit(path, "");
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    spit(path, "a,b\n0,1\n1,2\n");
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    spit(path, "x,u\n0.0\n");
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    spit(path, "x,u\n0.0,zebra\n");
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    spit(path, "x,u\n0.0,1.0,2.0\n");
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    spit(path, "x,u\n0.0,1.0\n");  // below the 2-row minimum
    CHECK_THROWS_AS(read_profile_csv(path.string()), DomainError);

    CHECK_THROWS_AS(read_profile_csv(tmp_path("missing_file.csv").string()), DomainError);

    // Windows line endings are tolerated.
    spit(path, "x,u\r\n0.0,1.0\r\n0.5,0.75\r\n");
    const auto prof = read_profile_csv(path.string());
    CHECK(prof.us[1] == 0.75);
}

TEST_CASE("summary JSON records keep stable key order", "[io]") {
    const auto prof = solve_1d(0.5, 1.0);
    const auto j1 = summary_json(prof);
    std::vector<std::string> keys;
    for (auto it = j1.begin(); it != j1.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"M", "q", "gamma_star", "resistance"});
    CHECK(j1["M"].get<double>() == 0.5);
    CHECK(j1["q"].get<double>() == 1.0);
    CHECK(j1["gamma_star"].get<double>() == prof.gamma_star);
    CHECK(j1["resistance"].get<double>() == prof.resistance());

    const auto sol = solve_radial(RadialProblem{1.0, 0.5, 1.0});
    const auto j2 = summary_json(sol);
    keys.clear();
    for (auto it = j2.begin(); it != j2.end(); ++it) keys.push_back(it.key());
    CHECK(keys ==
          std::vector<std::string>{"R", "M", "q", "a_star", "eta_star", "resistance"});
    CHECK(j2["a_star"].get<double>() == sol.a_star);

    const auto path = tmp_path("summary.json");
    write_json(path.string(), j1);
    const std::string raw = slurp(path);
    CHECK(raw.back() == '\n');
    const auto parsed = nlohmann::ordered_json::parse(raw);
    CHECK(parsed["gamma_star"].get<double>() == prof.gamma_star);
    // Serialized digits round-trip the exact double.
    CHECK(parsed["resistance"].get<double>() == prof.resistance());
}

TEST_CASE("mesh JSON and OBJ export", "[io]") {
    const double M = 1.0, q = 0.4;
    ParamVector params;
    params.points.push_back({0.0, 0.0, 1.0});
    const int n = 8;
    const auto mesh = build_hull(params, n, M, q);
    const double c = cost(mesh, q, duffy_rule(10));

    const auto j = mesh_json(mesh, c, M, q, 1, n);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"vertices", "faces", "cost", "parameters"});
    CHECK(j["vertices"].size() == mesh.vertices.size());
    CHECK(j["faces"].size() == mesh.faces.size());
    CHECK(j["cost"].get<double>() == c);
    CHECK(j["parameters"]["M"].get<double>() == M);
    CHECK(j["parameters"]["n"].get<int>() == n);

    const auto path = tmp_path("mesh.obj");
    write_obj(path.string(), mesh, q);
    std::ifstream in(path);
    std::string line;
    std::size_t n_v = 0, n_f = 0;
    double first_z = 0.0;
    int min_idx = 1 << 30, max_idx = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            double x, y, z;
            ss >> x >> y >> z;
            if (n_v == 0) first_z = z;
            ++n_v;
        } else if (tag == "f") {
            int a, b, c2;
            ss >> a >> b >> c2;
            min_idx = std::min({min_idx, a, b, c2});
            max_idx = std::max({max_idx, a, b, c2});
            ++n_f;
        }
    }
    CHECK(n_v == mesh.vertices.size());
    CHECK(n_f == mesh.faces.size());
    CHECK(min_idx >= 1);  // OBJ faces are 1-based
    CHECK(max_idx <= static_cast<int>(n_v));

    // Vertex heights are the physical u, not the concave part v.
    const auto& v0 = mesh.vertices[0];
    const double u0 = v0[2] + q * (v0[0] * v0[0] + v0[1] * v0[1] - 1.0) / 2.0;
    CHECK(first_z == Catch::Approx(u0).margin(1e-15));
}

TEST_CASE("trace CSV export", "[io]") {
    DEConfig config;
    config.population_size = 10;
    config.max_evaluations = 500;
    config.seed = 21;
    const std::vector<std::array<double, 2>> box = {{-1.0, 1.0}, {-1.0, 1.0}};
    auto bowl = [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; };
    const auto trace = optimize(bowl, box, config);

    const auto path = tmp_path("trace.csv");
    write_trace_csv(path.string(), trace);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "evaluation_count,best_cost");
    std::size_t rows = 0;
    long long prev_count = 0;
    double prev_cost = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        const long long count = std::stoll(line.substr(0, comma));
        const double cost_v = std::stod(line.substr(comma + 1));
        CHECK(count > prev_count);
        CHECK(cost_v < prev_cost);
        prev_count = count;
        prev_cost = cost_v;
        ++rows;
    }
    CHECK(rows == trace.best_cost_history.size());
    CHECK(prev_cost == trace.final_cost);
}

TEST_CASE("shock report JSON", "[io]") {
    ShockReport rep;
    rep.tested_points = 123;
    rep.violations.push_back({{0.25, -0.5}, 1.5, 3e-7});
    rep.pass = false;

    const auto j = shock_json(rep);
    CHECK(j["tested_points"].get<long long>() == 123);
    CHECK_FALSE(j["pass"].get<bool>());
    REQUIRE(j["violations"].size() == 1);
    CHECK(j["violations"][0]["x"][0].get<double>() == 0.25);
    CHECK(j["violations"][0]["tau"].get<double>() == 1.5);
    CHECK(j["violations"][0]["deficit"].get<double>() == 3e-7);

    const ShockReport clean;
    const auto j2 = shock_json(clean);
    CHECK(j2["pass"].get<bool>());
    CHECK(j2["violations"].empty());
}
