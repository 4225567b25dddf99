#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "newtres/errors.hpp"
#include "newtres/numerics.hpp"

// Nonradial solver geometry: sample the regular n-gon inscribed in the unit
// circle, lift candidate points to 3D through the cylindrical map, take the
// upper convex hull, and integrate the flow cost face by face.  The mesh
// stores the concave part v; the physical profile is u = v + q(|x|^2 - 1)/2.

namespace newtres {

// Candidate interior points in cylindrical coordinates (r, theta, z), with
// r in [0,1], theta in [0,2pi], z in [0,1].
struct ParamVector {
    std::vector<std::array<double, 3>> points;
};

// Triangulated upper envelope over the polygon.  Faces are vertex-index
// triples, counterclockwise in projection; face_gradients holds the constant
// gradient of the linear height v on each projected face.
struct SurfaceMesh {
    std::vector<std::array<double, 3>> vertices;        // (x, y, v)
    std::vector<std::array<int, 3>> faces;
    std::vector<std::array<double, 2>> face_gradients;  // grad v per face
    std::vector<std::array<double, 2>> boundary;        // polygon corners
};

// Quadrature rule on the reference triangle (0,0),(1,0),(0,1), stored in
// barycentric coordinates; weights sum to the reference area 1/2.
struct TriangleRule {
    std::vector<std::array<double, 3>> nodes;  // barycentric (l0, l1, l2)
    std::vector<double> weights;
    int count = 0;
    int degree = 0;  // exact for total polynomial degree up to this
};

// Corners of the regular n-gon inscribed in the unit circle.
inline std::vector<std::array<double, 2>> sample_boundary(int n) {
    if (n < 3) throw DomainError("sample_boundary: need at least 3 corners");
    std::vector<std::array<double, 2>> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        c[static_cast<std::size_t>(k)] = {std::cos(th), std::sin(th)};
    }
    return c;
}

// Cylindrical lift: (r, theta, z) -> (r cos theta, r sin theta, zM - q(r^2-1)/2).
// The vertical part is the concave-part height of a profile whose physical
// height at the same point would be zM.
inline std::array<double, 3> phi_map(const std::array<double, 3>& p, double M, double q) {
    const double r = p[0];
    return {r * std::cos(p[1]), r * std::sin(p[1]), p[2] * M - q * (r * r - 1.0) / 2.0};
}

namespace detail {

struct Vec3 {
    double x, y, z;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct HullFace {
    int v[3];                    // vertex indices, counterclockwise from outside
    Vec3 n;                      // unit outward normal
    double off;                  // plane equation: dot(n, p) = off
    std::vector<int> conflicts;  // input points strictly outside this face
    bool alive = true;
};

inline double face_dist(const HullFace& f, const Vec3& p) { return dot(f.n, p) - f.off; }

// Build a face on (a,b,c) oriented away from an interior point.
inline HullFace make_face(int a, int b, int c, const std::vector<Vec3>& pts, const Vec3& interior) {
    HullFace f;
    f.v[0] = a;
    f.v[1] = b;
    f.v[2] = c;
    Vec3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
    const double ln = norm(nn);
    if (ln < 1e-14) throw DegenerateHull("make_face: collinear vertices");
    nn = {nn.x / ln, nn.y / ln, nn.z / ln};
    if (dot(nn, interior) > dot(nn, pts[a])) {
        std::swap(f.v[1], f.v[2]);
        nn = {-nn.x, -nn.y, -nn.z};
    }
    f.n = nn;
    f.off = dot(nn, pts[f.v[0]]);
    return f;
}

inline std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

// Incremental quickhull with conflict lists.  Each pending point is charged
// to one face it lies outside of; inserting the furthest such point deletes
// the faces it sees and fans new faces around the horizon.  Expected
// O(N log N) for the desk-scale inputs used here.  Throws DegenerateHull when
// the input has no 3D volume.
inline std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Vec3>& pts, double tol) {
    const int N = static_cast<int>(pts.size());
    if (N < 4) throw DegenerateHull("convex_hull_3d: fewer than 4 points");

    // Initial simplex: spread pair among the axis extremes, then the point
    // furthest from their line, then the point furthest from that plane.
    int i0 = 0, i1 = 0;
    {
        int ext[6] = {0, 0, 0, 0, 0, 0};
        for (int i = 1; i < N; ++i) {
            if (pts[i].x < pts[ext[0]].x) ext[0] = i;
            if (pts[i].x > pts[ext[1]].x) ext[1] = i;
            if (pts[i].y < pts[ext[2]].y) ext[2] = i;
            if (pts[i].y > pts[ext[3]].y) ext[3] = i;
            if (pts[i].z < pts[ext[4]].z) ext[4] = i;
            if (pts[i].z > pts[ext[5]].z) ext[5] = i;
        }
        double best = tol;
        for (int a = 0; a < 6; ++a)
            for (int b = a + 1; b < 6; ++b) {
                const double d = norm(pts[ext[a]] - pts[ext[b]]);
                if (d > best) {
                    best = d;
                    i0 = ext[a];
                    i1 = ext[b];
                }
            }
        if (best <= tol) throw DegenerateHull("convex_hull_3d: all points coincide");
    }
    const Vec3 d01 = pts[i1] - pts[i0];
    const double len01 = norm(d01);
    int i2 = -1;
    double best2 = tol;
    for (int i = 0; i < N; ++i) {
        const double d = norm(cross(d01, pts[i] - pts[i0])) / len01;
        if (d > best2) {
            best2 = d;
            i2 = i;
        }
    }
    if (i2 < 0) throw DegenerateHull("convex_hull_3d: all points collinear");
    Vec3 pn = cross(d01, pts[i2] - pts[i0]);
    const double pl = norm(pn);
    pn = {pn.x / pl, pn.y / pl, pn.z / pl};
    const double poff = dot(pn, pts[i0]);
    int i3 = -1;
    double best3 = tol;
    for (int i = 0; i < N; ++i) {
        const double d = std::abs(dot(pn, pts[i]) - poff);
        if (d > best3) {
            best3 = d;
            i3 = i;
        }
    }
    if (i3 < 0) throw DegenerateHull("convex_hull_3d: all points coplanar");

    const Vec3 interior = {(pts[i0].x + pts[i1].x + pts[i2].x + pts[i3].x) / 4.0,
                           (pts[i0].y + pts[i1].y + pts[i2].y + pts[i3].y) / 4.0,
                           (pts[i0].z + pts[i1].z + pts[i2].z + pts[i3].z) / 4.0};

    std::vector<HullFace> faces;
    faces.reserve(static_cast<std::size_t>(4 * N));
    std::unordered_map<std::uint64_t, int> edge2face;  // directed edge -> face
    auto add_face = [&](int a, int b, int c) {
        faces.push_back(make_face(a, b, c, pts, interior));
        const int fi = static_cast<int>(faces.size()) - 1;
        const HullFace& f = faces.back();
        edge2face[edge_key(f.v[0], f.v[1])] = fi;
        edge2face[edge_key(f.v[1], f.v[2])] = fi;
        edge2face[edge_key(f.v[2], f.v[0])] = fi;
        return fi;
    };
    auto drop_face = [&](int fi) {
        HullFace& f = faces[static_cast<std::size_t>(fi)];
        f.alive = false;
        edge2face.erase(edge_key(f.v[0], f.v[1]));
        edge2face.erase(edge_key(f.v[1], f.v[2]));
        edge2face.erase(edge_key(f.v[2], f.v[0]));
    };

    add_face(i0, i1, i2);
    add_face(i0, i1, i3);
    add_face(i0, i2, i3);
    add_face(i1, i2, i3);

    // Charge every remaining point to the face it is furthest outside of.
    auto assign_point = [&](int p, const std::vector<int>& candidates) {
        int bestf = -1;
        double bd = tol;
        for (int fi : candidates) {
            if (!faces[static_cast<std::size_t>(fi)].alive) continue;
            const double d = face_dist(faces[static_cast<std::size_t>(fi)], pts[p]);
            if (d > bd) {
                bd = d;
                bestf = fi;
            }
        }
        if (bestf >= 0) faces[static_cast<std::size_t>(bestf)].conflicts.push_back(p);
    };
    {
        const std::vector<int> all{0, 1, 2, 3};
        for (int i = 0; i < N; ++i) {
            if (i == i0 || i == i1 || i == i2 || i == i3) continue;
            assign_point(i, all);
        }
    }

    std::vector<int> pending;
    for (int f = 0; f < 4; ++f)
        if (!faces[static_cast<std::size_t>(f)].conflicts.empty()) pending.push_back(f);

    std::vector<int> stamp(static_cast<std::size_t>(4 * N), 0);
    int epoch = 0;

    while (!pending.empty()) {
        const int fi = pending.back();
        pending.pop_back();
        HullFace& start = faces[static_cast<std::size_t>(fi)];
        if (!start.alive || start.conflicts.empty()) continue;

        int p = -1;
        double bd = -1.0;
        for (int i : start.conflicts) {
            const double d = face_dist(start, pts[i]);
            if (d > bd) {
                bd = d;
                p = i;
            }
        }

        // Faces visible from p, found by flood fill over shared edges; edges
        // crossing from a visible face to a hidden one form the horizon loop.
        ++epoch;
        if (stamp.size() < faces.size() + 8) stamp.resize(faces.size() + 4 * 8, 0);
        std::vector<int> visible{fi};
        std::vector<std::array<int, 2>> horizon;
        stamp[static_cast<std::size_t>(fi)] = epoch;
        for (std::size_t k = 0; k < visible.size(); ++k) {
            const HullFace f = faces[static_cast<std::size_t>(visible[k])];  // copy: faces may grow
            for (int e = 0; e < 3; ++e) {
                const int a = f.v[e];
                const int b = f.v[(e + 1) % 3];
                const auto it = edge2face.find(edge_key(b, a));
                if (it == edge2face.end()) continue;  // should not happen on a closed hull
                const int g = it->second;
                if (stamp[static_cast<std::size_t>(g)] == epoch) continue;
                if (face_dist(faces[static_cast<std::size_t>(g)], pts[p]) > tol) {
                    stamp[static_cast<std::size_t>(g)] = epoch;
                    visible.push_back(g);
                } else {
                    horizon.push_back({a, b});
                }
            }
        }

        // Collect orphans, retire the visible cone, fan new faces from p.
        std::vector<int> orphans;
        for (int vf : visible) {
            for (int q : faces[static_cast<std::size_t>(vf)].conflicts)
                if (q != p) orphans.push_back(q);
            faces[static_cast<std::size_t>(vf)].conflicts.clear();
            drop_face(vf);
        }
        std::vector<int> fresh;
        fresh.reserve(horizon.size());
        for (const auto& e : horizon) fresh.push_back(add_face(e[0], e[1], p));
        if (stamp.size() < faces.size()) stamp.resize(faces.size() + 64, 0);
        for (int q : orphans) assign_point(q, fresh);
        for (int nf : fresh)
            if (!faces[static_cast<std::size_t>(nf)].conflicts.empty()) pending.push_back(nf);
    }

    std::vector<std::array<int, 3>> out;
    for (const HullFace& f : faces)
        if (f.alive) out.push_back({f.v[0], f.v[1], f.v[2]});
    return out;
}

inline double cross2d(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Flat fallback mesh: the polygon fanned from its first corner at v = 0.
inline SurfaceMesh flat_mesh(std::vector<std::array<double, 2>> boundary) {
    SurfaceMesh mesh;
    const int n = static_cast<int>(boundary.size());
    mesh.vertices.reserve(boundary.size());
    for (const auto& c : boundary) mesh.vertices.push_back({c[0], c[1], 0.0});
    for (int k = 1; k + 1 < n; ++k) {
        mesh.faces.push_back({0, k, k + 1});
        mesh.face_gradients.push_back({0.0, 0.0});
    }
    mesh.boundary = std::move(boundary);
    return mesh;
}

}  // namespace detail

// Upper convex hull of the polygon corners at height 0 together with the
// lifted candidate points.  Interior points that fall below the hull drop out;
// the projected faces tile the polygon exactly.
inline SurfaceMesh build_hull(const ParamVector& params, int n, double M, double q) {
    constexpr double kBoxTol = 1e-9;
    for (const auto& p : params.points) {
        if (!(p[0] >= -kBoxTol && p[0] <= 1.0 + kBoxTol) ||
            !(p[1] >= -kBoxTol && p[1] <= 2.0 * M_PI + kBoxTol) ||
            !(p[2] >= -kBoxTol && p[2] <= 1.0 + kBoxTol))
            throw PreconditionError("build_hull: point outside the parameter box");
    }

    auto boundary = sample_boundary(n);
    const double sector = 2.0 * M_PI / n;
    const double apothem = std::cos(M_PI / n);

    std::vector<detail::Vec3> pts;
    pts.reserve(boundary.size() + params.points.size() + 1);
    for (const auto& c : boundary) pts.push_back({c[0], c[1], 0.0});

    for (const auto& p : params.points) {
        const double r = std::clamp(p[0], 0.0, 1.0);
        const double th = p[1];
        const double z = std::clamp(p[2], 0.0, 1.0);
        // The disk ring r in (apothem, 1] sticks out of the inscribed polygon;
        // pull such points radially onto the polygon edge so the projected
        // hull is exactly the polygon and the face tiling can close up.
        double a = std::fmod(th, sector);
        if (a < 0.0) a += sector;
        const double rho = apothem / std::cos(a - sector / 2.0);
        const auto lifted = phi_map({std::min(r, rho), th, z}, M, q);
        pts.push_back({lifted[0], lifted[1], lifted[2]});
    }

    // Drop near-coincident lifted points (the optimizer generates them); a
    // lifted point can also collide with a polygon corner it clamped onto.
    {
        std::vector<detail::Vec3> kept(pts.begin(), pts.begin() + n);
        for (std::size_t i = static_cast<std::size_t>(n); i < pts.size(); ++i) {
            bool dup = false;
            // nearest polygon corner by angle
            const double th = std::atan2(pts[i].y, pts[i].x);
            const int k = static_cast<int>(std::llround(th / sector));
            const int kc = ((k % n) + n) % n;
            if (detail::norm(pts[i] - kept[static_cast<std::size_t>(kc)]) < 1e-12) dup = true;
            for (std::size_t j = static_cast<std::size_t>(n); !dup && j < kept.size(); ++j)
                if (detail::norm(pts[i] - kept[j]) < 1e-12) dup = true;
            if (!dup) kept.push_back(pts[i]);
        }
        pts = std::move(kept);
    }

    SurfaceMesh mesh;
    try {
        double zmax = 0.0;
        for (const auto& p : pts) zmax = std::max(zmax, p.z);
        if (zmax <= 1e-12) throw DegenerateHull("build_hull: all points at the base plane");

        // A sentinel far below the base plane turns the upper envelope into a
        // plain 3D hull problem and keeps the polygon corners off any coplanar
        // bottom face, so they all survive as hull vertices.
        pts.push_back({0.0, 0.0, -1000.0});
        const int deep = static_cast<int>(pts.size()) - 1;

        const auto tris = detail::convex_hull_3d(pts, 1e-10);

        std::vector<int> remap(pts.size(), -1);
        for (const auto& t : tris) {
            if (t[0] == deep || t[1] == deep || t[2] == deep) continue;
            const detail::Vec3& A = pts[static_cast<std::size_t>(t[0])];
            const detail::Vec3& B = pts[static_cast<std::size_t>(t[1])];
            const detail::Vec3& C = pts[static_cast<std::size_t>(t[2])];
            const detail::Vec3 nrm = detail::cross(B - A, C - A);
            if (nrm.z <= 1e-12 * detail::norm(nrm)) continue;  // not an upper face
            if (nrm.z / 2.0 < 1e-14) continue;                 // zero projected area
            std::array<int, 3> face{};
            for (int e = 0; e < 3; ++e) {
                int& idx = remap[static_cast<std::size_t>(t[e])];
                if (idx < 0) {
                    idx = static_cast<int>(mesh.vertices.size());
                    const detail::Vec3& v = pts[static_cast<std::size_t>(t[e])];
                    mesh.vertices.push_back({v.x, v.y, v.z});
                }
                face[static_cast<std::size_t>(e)] = idx;
            }
            mesh.faces.push_back(face);
            mesh.face_gradients.push_back({-nrm.x / nrm.z, -nrm.y / nrm.z});
        }
        mesh.boundary = std::move(boundary);
    } catch (const DegenerateHull&) {
        mesh = detail::flat_mesh(std::move(boundary));
    }
    return mesh;
}

// Physical profile height u(x) = v(x) + q(|x|^2 - 1)/2 at a point of the
// polygon, located by scanning the projected faces.
inline double recover_u(const SurfaceMesh& mesh, const std::array<double, 2>& x, double q) {
    const int n = static_cast<int>(mesh.boundary.size());
    const double sector = 2.0 * M_PI / n;
    const double apothem = std::cos(M_PI / n);
    // Membership in the regular polygon: the support constraint of the edge
    // whose angular sector contains x is the binding one.
    const double rad = std::hypot(x[0], x[1]);
    if (rad > 0.0) {
        double a = std::fmod(std::atan2(x[1], x[0]) + 2.0 * M_PI, sector);
        if (rad * std::cos(a - sector / 2.0) > apothem + 1e-12)
            throw OutsideDomain("recover_u: point outside the polygon");
    }

    // Linear scan with barycentric test; meshes here have a few hundred faces.
    double best = -1e300;
    double best_v = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& tri = mesh.faces[f];
        const auto& A = mesh.vertices[static_cast<std::size_t>(tri[0])];
        const auto& B = mesh.vertices[static_cast<std::size_t>(tri[1])];
        const auto& C = mesh.vertices[static_cast<std::size_t>(tri[2])];
        const double det = detail::cross2d(B[0] - A[0], B[1] - A[1], C[0] - A[0], C[1] - A[1]);
        if (det < 1e-14) continue;
        const double la = detail::cross2d(B[0] - x[0], B[1] - x[1], C[0] - x[0], C[1] - x[1]) / det;
        const double lb = detail::cross2d(C[0] - x[0], C[1] - x[1], A[0] - x[0], A[1] - x[1]) / det;
        const double lc = 1.0 - la - lb;
        const double lmin = std::min({la, lb, lc});
        if (lmin > best) {
            best = lmin;
            best_v = la * A[2] + lb * B[2] + lc * C[2];
        }
        if (lmin >= 1e-12) break;  // strictly inside this face
    }
    return best_v + q * (x[0] * x[0] + x[1] * x[1] - 1.0) / 2.0;
}

// Tensor Gauss-Legendre d x d collapsed onto the reference triangle
// (Duffy map x = s, y = t(1-s), Jacobian 1-s).  Exact for total degree
// 2d-2; d = 10 gives the 100-node rule used throughout.
inline TriangleRule duffy_rule(int d) {
    if (d < 1) throw DomainError("duffy_rule: order must be at least 1");
    const QuadratureRule1D& gl = gauss_legendre(d);
    TriangleRule rule;
    rule.count = d * d;
    rule.degree = 2 * d - 2;
    rule.nodes.reserve(static_cast<std::size_t>(d * d));
    rule.weights.reserve(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i) {
        const double s = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
        const double ws = 0.5 * gl.weights[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
            const double t = 0.5 * (gl.nodes[static_cast<std::size_t>(j)] + 1.0);
            const double wt = 0.5 * gl.weights[static_cast<std::size_t>(j)];
            const double xx = s;
            const double yy = t * (1.0 - s);
            rule.nodes.push_back({1.0 - xx - yy, xx, yy});
            rule.weights.push_back(ws * wt * (1.0 - s));
        }
    }
    return rule;
}

// Integrate f over an arbitrary triangle by mapping the rule's barycentric
// nodes and scaling by the area ratio against the reference triangle.
template <class F>
double triangle_quadrature(F&& f, const std::array<std::array<double, 2>, 3>& tri,
                           const TriangleRule& rule) {
    const double det = detail::cross2d(tri[1][0] - tri[0][0], tri[1][1] - tri[0][1],
                                       tri[2][0] - tri[0][0], tri[2][1] - tri[0][1]);
    const double area = 0.5 * std::abs(det);
    if (area < 1e-14) throw DegenerateTriangle("triangle_quadrature: area below 1e-14");
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const auto& l = rule.nodes[k];
        const std::array<double, 2> p = {
            l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
            l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1]};
        sum += rule.weights[k] * f(p);
    }
    return sum * (area / 0.5);
}

// Flow cost of the meshed profile: sum over faces of the integral of
// 1/(1 + |grad u|^2), with grad u(x) = grad v on the face plus q x.
inline double cost(const SurfaceMesh& mesh, double q, const TriangleRule& rule) {
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& tri = mesh.faces[f];
        const auto& A = mesh.vertices[static_cast<std::size_t>(tri[0])];
        const auto& B = mesh.vertices[static_cast<std::size_t>(tri[1])];
        const auto& C = mesh.vertices[static_cast<std::size_t>(tri[2])];
        const std::array<std::array<double, 2>, 3> proj = {
            {{A[0], A[1]}, {B[0], B[1]}, {C[0], C[1]}}};
        const double det = detail::cross2d(proj[1][0] - proj[0][0], proj[1][1] - proj[0][1],
                                           proj[2][0] - proj[0][0], proj[2][1] - proj[0][1]);
        if (0.5 * std::abs(det) < 1e-14) continue;  // zero-area face contributes nothing
        const auto& g = mesh.face_gradients[f];
        total += triangle_quadrature(
            [&](const std::array<double, 2>& p) {
                const double gx = g[0] + q * p[0];
                const double gy = g[1] + q * p[1];
                return 1.0 / (1.0 + gx * gx + gy * gy);
            },
            proj, rule);
    }
    return total;
}

}  // namespace newtres
