#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "newtres/errors.hpp"
#include "newtres/hull2d.hpp"

using namespace newtres;

namespace {

double polygon_area(int n) { return 0.5 * n * std::sin(2.0 * M_PI / n); }

double face_area(const SurfaceMesh& mesh, std::size_t f) {
    const auto& t = mesh.faces[f];
    const auto& A = mesh.vertices[static_cast<std::size_t>(t[0])];
    const auto& B = mesh.vertices[static_cast<std::size_t>(t[1])];
    const auto& C = mesh.vertices[static_cast<std::size_t>(t[2])];
    return 0.5 * ((B[0] - A[0]) * (C[1] - A[1]) - (B[1] - A[1]) * (C[0] - A[0]));
}

double tiling_area(const SurfaceMesh& mesh) {
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) total += face_area(mesh, f);
    return total;
}

// Concave part of the height recovered from the mesh.
double recover_v(const SurfaceMesh& mesh, const std::array<double, 2>& x, double q) {
    return recover_u(mesh, x, q) - q * (x[0] * x[0] + x[1] * x[1] - 1.0) / 2.0;
}

}  // namespace

TEST_CASE("boundary polygon corners", "[hull2d]") {
    const auto c4 = sample_boundary(4);
    REQUIRE(c4.size() == 4);
    CHECK(c4[0][0] == Catch::Approx(1.0).margin(1e-15));
    CHECK(c4[0][1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(c4[1][0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(c4[1][1] == Catch::Approx(1.0).margin(1e-15));
    CHECK(c4[2][0] == Catch::Approx(-1.0).margin(1e-15));
    CHECK(c4[3][1] == Catch::Approx(-1.0).margin(1e-15));

    for (int n : {3, 5, 12, 100}) {
        const auto c = sample_boundary(n);
        double area = 0.0;
        for (int k = 0; k < n; ++k) {
            const auto& a = c[static_cast<std::size_t>(k)];
            const auto& b = c[static_cast<std::size_t>((k + 1) % n)];
            area += 0.5 * (a[0] * b[1] - a[1] * b[0]);
        }
        CHECK(area == Catch::Approx(polygon_area(n)).margin(1e-12));
    }

    CHECK_THROWS_AS(sample_boundary(2), DomainError);
}

TEST_CASE("cylindrical lift", "[hull2d]") {
    const double M = 1.0, q = 0.4;
    // Rim at reference height: the parabolic offset vanishes at r = 1.
    const auto rim = phi_map({1.0, 0.3, 0.0}, M, q);
    CHECK(rim[0] == Catch::Approx(std::cos(0.3)).margin(1e-15));
    CHECK(rim[1] == Catch::Approx(std::sin(0.3)).margin(1e-15));
    CHECK(rim[2] == Catch::Approx(0.0).margin(1e-15));
    // Center at full height picks up the q/2 offset.
    const auto top = phi_map({0.0, 1.7, 1.0}, M, q);
    CHECK(top[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(top[2] == Catch::Approx(M + q / 2.0).margin(1e-15));
    // Generic point: v = zM - q(r^2-1)/2.
    const auto p = phi_map({0.5, 0.0, 0.5}, M, q);
    CHECK(p[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(p[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(p[2] == Catch::Approx(0.65).margin(1e-15));
}

TEST_CASE("hull of a single apex is a cone fan", "[hull2d]") {
    ParamVector params;
    params.points.push_back({0.0, 0.0, 1.0});
    const int n = 6;
    const auto mesh = build_hull(params, n, 1.0, 0.0);

    REQUIRE(mesh.faces.size() == static_cast<std::size_t>(n));
    REQUIRE(mesh.vertices.size() == static_cast<std::size_t>(n + 1));

    // Every face touches the apex, and its gradient points down the cone flank
    // with magnitude M / apothem.
    int apex = -1;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        if (mesh.vertices[i][2] > 0.5) apex = static_cast<int>(i);
    REQUIRE(apex >= 0);
    CHECK(mesh.vertices[static_cast<std::size_t>(apex)][2] == Catch::Approx(1.0).margin(1e-12));

    const double flank = 1.0 / std::cos(M_PI / n);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& t = mesh.faces[f];
        CHECK((t[0] == apex || t[1] == apex || t[2] == apex));
        const auto& g = mesh.face_gradients[f];
        CHECK(std::hypot(g[0], g[1]) == Catch::Approx(flank).margin(1e-12));
        CHECK(face_area(mesh, f) > 0.0);
    }
    CHECK(tiling_area(mesh) == Catch::Approx(polygon_area(n)).margin(1e-12));
}

TEST_CASE("empty and flat inputs give the flat polygon mesh", "[hull2d]") {
    const int n = 8;

    const auto empty = build_hull(ParamVector{}, n, 1.0, 0.0);
    REQUIRE(empty.faces.size() == static_cast<std::size_t>(n - 2));
    for (const auto& v : empty.vertices) CHECK(v[2] == 0.0);
    for (const auto& g : empty.face_gradients) {
        CHECK(g[0] == 0.0);
        CHECK(g[1] == 0.0);
    }
    CHECK(tiling_area(empty) == Catch::Approx(polygon_area(n)).margin(1e-12));

    // All candidate heights at the base plane: same flat result.
    ParamVector flat;
    flat.points.push_back({0.5, 1.0, 0.0});
    flat.points.push_back({0.2, 4.0, 0.0});
    const auto mesh = build_hull(flat, n, 1.0, 0.0);
    CHECK(mesh.faces.size() == static_cast<std::size_t>(n - 2));
    CHECK(tiling_area(mesh) == Catch::Approx(polygon_area(n)).margin(1e-12));
}

TEST_CASE("projected faces tile the polygon for random inputs", "[hull2d]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(unit(rng) * 97);
        const int m = 1 + static_cast<int>(unit(rng) * 30);
        ParamVector params;
        for (int i = 0; i < m; ++i)
            params.points.push_back({unit(rng), 2.0 * M_PI * unit(rng), unit(rng)});
        const auto mesh = build_hull(params, n, 0.8, 0.4);
        CHECK(tiling_area(mesh) == Catch::Approx(polygon_area(n)).margin(1e-9));
        for (std::size_t f = 0; f < mesh.faces.size(); ++f)
            CHECK(face_area(mesh, f) > -1e-12);  // counterclockwise in projection
    }
}

TEST_CASE("points beyond the inscribed polygon are clamped to its edge", "[hull2d]") {
    // r = 1 at 45 degrees lies outside the square; the lifted vertex must land
    // on the edge x + y = 1 so the projection stays inside the polygon.
    ParamVector params;
    params.points.push_back({1.0, M_PI / 4.0, 1.0});
    const auto mesh = build_hull(params, 4, 1.0, 0.0);

    bool found = false;
    for (const auto& v : mesh.vertices) {
        if (v[2] > 0.5) {
            found = true;
            CHECK(v[0] + v[1] == Catch::Approx(1.0).margin(1e-12));
            CHECK(v[0] == Catch::Approx(0.5).margin(1e-12));
        }
    }
    CHECK(found);
    CHECK(tiling_area(mesh) == Catch::Approx(polygon_area(4)).margin(1e-12));
}

TEST_CASE("parameter box is enforced", "[hull2d]") {
    auto one = [](std::array<double, 3> p) {
        ParamVector params;
        params.points.push_back(p);
        return params;
    };
    CHECK_THROWS_AS(build_hull(one({1.2, 0.0, 0.5}), 8, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_hull(one({0.5, -0.1, 0.5}), 8, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_hull(one({0.5, 7.0, 0.5}), 8, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_hull(one({0.5, 0.0, 1.1}), 8, 1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(build_hull(one({-0.2, 0.0, 0.5}), 8, 1.0, 0.0), PreconditionError);
}

TEST_CASE("height recovery on the cone", "[hull2d]") {
    ParamVector params;
    params.points.push_back({0.0, 0.0, 1.0});
    const auto mesh = build_hull(params, 4, 1.0, 0.0);

    CHECK(recover_u(mesh, {0.0, 0.0}, 0.0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(recover_u(mesh, {1.0, 0.0}, 0.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(recover_u(mesh, {0.5, 0.0}, 0.0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(recover_u(mesh, {0.0, -0.25}, 0.0) == Catch::Approx(0.75).margin(1e-12));

    // Inside the disk but outside the square.
    CHECK_THROWS_AS(recover_u(mesh, {0.8, 0.8}, 0.0), OutsideDomain);
    CHECK_THROWS_AS(recover_u(mesh, {1.2, 0.0}, 0.0), OutsideDomain);
}

TEST_CASE("recovered height is q-concave and within range", "[hull2d]") {
    const double M = 1.0, q = 0.4;
    const int n = 100;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ParamVector params;
    for (int i = 0; i < 20; ++i)
        params.points.push_back({unit(rng), 2.0 * M_PI * unit(rng), unit(rng)});
    const auto mesh = build_hull(params, n, M, q);

    const double safe_r = 0.98 * std::cos(M_PI / n);
    auto sample_inside = [&]() -> std::array<double, 2> {
        const double r = safe_r * std::sqrt(unit(rng));
        const double th = 2.0 * M_PI * unit(rng);
        return {r * std::cos(th), r * std::sin(th)};
    };

    // v = u - q(|x|^2 - 1)/2 must be concave: midpoint above the chord.
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = sample_inside();
        const auto b = sample_inside();
        const std::array<double, 2> mid = {(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0};
        const double chord = (recover_v(mesh, a, q) + recover_v(mesh, b, q)) / 2.0;
        CHECK(recover_v(mesh, mid, q) >= chord - 1e-9);
    }

    // Range: v >= 0 on the hull gives u >= q(|x|^2-1)/2, which on the rim
    // edges dips to -(q/2) sin^2(pi/n); u <= M because u is convex on each
    // face and every vertex satisfies u = zM <= M.
    const double rim_dip = -(q / 2.0) * std::sin(M_PI / n) * std::sin(M_PI / n);
    for (int trial = 0; trial < 500; ++trial) {
        const auto x = sample_inside();
        const double u = recover_u(mesh, x, q);
        CHECK(u >= rim_dip - 1e-9);
        CHECK(u <= M + 1e-9);
    }
    for (const auto& v : mesh.vertices) {
        const double u = v[2] + q * (v[0] * v[0] + v[1] * v[1] - 1.0) / 2.0;
        CHECK(u >= rim_dip - 1e-9);
        CHECK(u <= M + 1e-9);
    }
}

TEST_CASE("triangle rule basics", "[hull2d]") {
    CHECK_THROWS_AS(duffy_rule(0), DomainError);

    for (int d : {1, 2, 3, 5, 10}) {
        const auto rule = duffy_rule(d);
        CHECK(rule.count == d * d);
        CHECK(rule.degree == 2 * d - 2);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(d * d));
        double wsum = 0.0;
        for (std::size_t k = 0; k < rule.weights.size(); ++k) {
            CHECK(rule.weights[k] > 0.0);
            wsum += rule.weights[k];
            // Nodes are valid barycentric coordinates of the reference triangle.
            CHECK(rule.nodes[k][0] >= -1e-15);
            CHECK(rule.nodes[k][1] >= -1e-15);
            CHECK(rule.nodes[k][2] >= -1e-15);
            CHECK(rule.nodes[k][0] + rule.nodes[k][1] + rule.nodes[k][2] ==
                  Catch::Approx(1.0).margin(1e-14));
        }
        CHECK(wsum == Catch::Approx(0.5).margin(1e-14));
    }
}

TEST_CASE("triangle rule integrates monomials exactly", "[hull2d]") {
    // On the reference triangle, int x^i y^j = i! j! / (i+j+2)!.
    auto exact = [](int i, int j) {
        double v = 1.0;
        for (int k = 1; k <= i; ++k) v *= k;
        for (int k = 1; k <= j; ++k) v *= k;
        for (int k = 1; k <= i + j + 2; ++k) v /= k;
        return v;
    };
    const std::array<std::array<double, 2>, 3> ref = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    const auto rule = duffy_rule(5);  // exact through total degree 8
    for (int i = 0; i + 0 <= 8; ++i) {
        for (int j = 0; i + j <= 8; ++j) {
            const double got = triangle_quadrature(
                [&](const std::array<double, 2>& p) {
                    return std::pow(p[0], i) * std::pow(p[1], j);
                },
                ref, rule);
            CHECK(got == Catch::Approx(exact(i, j)).margin(1e-13));
        }
    }
}

TEST_CASE("triangle quadrature on general triangles", "[hull2d]") {
    const auto rule = duffy_rule(4);
    const std::array<std::array<double, 2>, 3> tri = {{{1.0, 2.0}, {4.0, 2.5}, {2.0, 5.0}}};
    const double area =
        0.5 * std::abs((4.0 - 1.0) * (5.0 - 2.0) - (2.5 - 2.0) * (2.0 - 1.0));

    CHECK(triangle_quadrature([](const std::array<double, 2>&) { return 1.0; }, tri, rule) ==
          Catch::Approx(area).margin(1e-13));

    // Affine functions integrate to area times the centroid value.
    auto lin = [](const std::array<double, 2>& p) { return 3.0 * p[0] - 2.0 * p[1] + 0.7; };
    const std::array<double, 2> centroid = {(1.0 + 4.0 + 2.0) / 3.0, (2.0 + 2.5 + 5.0) / 3.0};
    CHECK(triangle_quadrature(lin, tri, rule) ==
          Catch::Approx(area * lin(centroid)).margin(1e-12));

    const std::array<std::array<double, 2>, 3> ref = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    CHECK(triangle_quadrature(
              [](const std::array<double, 2>& p) { return p[0] * p[0] + p[1] * p[1]; }, ref,
              rule) == Catch::Approx(1.0 / 6.0).margin(1e-14));

    const std::array<std::array<double, 2>, 3> degenerate = {
        {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}};
    CHECK_THROWS_AS(
        triangle_quadrature([](const std::array<double, 2>&) { return 1.0; }, degenerate, rule),
        DegenerateTriangle);
}

TEST_CASE("cost of the flat mesh is the polygon area", "[hull2d]") {
    const auto rule = duffy_rule(10);
    for (int n : {3, 8, 100}) {
        const auto mesh = build_hull(ParamVector{}, n, 1.0, 0.0);
        CHECK(cost(mesh, 0.0, rule) == Catch::Approx(polygon_area(n)).margin(1e-12));
    }
}

TEST_CASE("cone cost matches the per-face closed form", "[hull2d]") {
    // With q = 0 the integrand is constant on each face, so quadrature must
    // reproduce sum area / (1 + |grad|^2) to machine precision.
    ParamVector params;
    params.points.push_back({0.0, 0.0, 1.0});
    const int n = 100;
    const auto mesh = build_hull(params, n, 1.0, 0.0);
    const auto rule = duffy_rule(10);

    double analytic = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& g = mesh.face_gradients[f];
        analytic += face_area(mesh, f) / (1.0 + g[0] * g[0] + g[1] * g[1]);
    }
    CHECK(cost(mesh, 0.0, rule) == Catch::Approx(analytic).margin(1e-12));

    // Refining the quadrature does not move the smooth-mesh cost.
    const double c1 = cost(mesh, 0.4, duffy_rule(10));
    const double c2 = cost(mesh, 0.4, duffy_rule(20));
    CHECK(std::abs(c1 - c2) < 1e-10);
}
