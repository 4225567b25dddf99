#pragma once

// Closed-form solver for the 1-D minimal-resistance problem over profiles
// u: [-1,1] -> [0,M] whose defect x -> u(x) - (q/2)x^2 is concave.  The
// optimal profile is a central parabola of curvature q glued at +-gamma* to
// straight tent sides; gamma* is the root of an explicit quartic-like
// polynomial phi whose sign equals the sign of dR/dgamma.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "newtres/errors.hpp"
#include "newtres/numerics.hpp"

namespace newtres {

// Resistance of the parabola-plus-tent profile with kink at gamma:
//   R(gamma) = (2/q) arctan(q gamma) + 2 (1-gamma)^3 / (M^2 + (1-gamma)^2),
// with the first term degenerating to 2 gamma when q = 0.
inline double eval_R(double gamma, double M, double q) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw DomainError("eval_R: gamma must lie in [0,1]");
    if (!(M > 0.0) || !(q >= 0.0))
        throw DomainError("eval_R: need M > 0 and q >= 0");
    const double s = 1.0 - gamma;
    const double first = (q > 0.0) ? (2.0 / q) * std::atan(q * gamma) : 2.0 * gamma;
    return first + 2.0 * s * s * s / (M * M + s * s);
}

// Sign surrogate for dR/dgamma:
//   phi(gamma) = M^4 - M^2 (1-gamma)^2 - q^2 gamma^2 (1-gamma)^4
//                - 3 M^2 q^2 gamma^2 (1-gamma)^2,
// strictly increasing on [0,1] with phi(0) = M^2 (M^2 - 1), phi(1) = M^4.
inline double eval_phi(double gamma, double M, double q) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw DomainError("eval_phi: gamma must lie in [0,1]");
    if (!(M > 0.0 && q >= 0.0 && q <= 1.0 && 2.0 * M >= q))
        throw DomainError("eval_phi: need M > 0, 0 <= q <= 1, 2M >= q");
    const double s = 1.0 - gamma;
    const double M2 = M * M, s2 = s * s, g2 = gamma * gamma, q2 = q * q;
    return M2 * M2 - M2 * s2 - q2 * g2 * s2 * s2 - 3.0 * M2 * q2 * g2 * s2;
}

struct Profile1D {
    double M = 0.0;
    double q = 0.0;
    double gamma_star = 0.0;  // kink abscissa, in [max(0,1-M), 1)

    // u(x): central parabola for |x| <= gamma*, tent side beyond.
    double eval(double x) const {
        const double ax = std::abs(x);
        if (ax > 1.0 + 1e-12)
            throw DomainError("Profile1D::eval: |x| > 1");
        if (ax <= gamma_star)
            return 0.5 * q * (x * x - gamma_star * gamma_star) + M;
        return M * (1.0 - std::min(ax, 1.0)) / (1.0 - gamma_star);
    }

    // u'(x), taking the one-sided (side) value at the kink and at x = 0- / 0+
    // the parabola value q*x.  Well-defined a.e., which is all the resistance
    // integrand needs.
    double derivative(double x) const {
        const double ax = std::abs(x);
        if (ax > 1.0 + 1e-12)
            throw DomainError("Profile1D::derivative: |x| > 1");
        if (ax < gamma_star)
            return q * x;
        const double side = -M / (1.0 - gamma_star);
        return (x >= 0.0) ? side : -side;
    }

    double resistance() const { return eval_R(gamma_star, M, q); }
};

// Optimal 1-D profile.  For M >= 1 the tent u = M(1-|x|) wins (gamma* = 0);
// for M in (0,1) gamma* is the unique root of eval_phi in (0,1).
inline Profile1D solve_1d(double M, double q) {
    if (!(M > 0.0))
        throw PreconditionError("solve_1d: M must be positive");
    if (!(q >= 0.0 && q <= 1.0))
        throw PreconditionError("solve_1d: single-shock condition requires 0 <= q <= 1");
    if (!(2.0 * M >= q))
        throw PreconditionError("solve_1d: high-profile condition requires 2M >= q");
    Profile1D p;
    p.M = M;
    p.q = q;
    if (M >= 1.0) {
        p.gamma_star = 0.0;
        return p;
    }
    p.gamma_star = find_root([&](double g) { return eval_phi(g, M, q); }, 0.0, 1.0, 1e-12);
    return p;
}

inline double eval_profile(const Profile1D& p, double x) { return p.eval(x); }

// Piecewise-linear resistance of a sampled profile: per-interval chord slope,
// integrand 1/(1+slope^2) constant on each interval.
inline double resistance_1d(const std::vector<double>& xs, const std::vector<double>& us) {
    if (xs.size() < 2 || xs.size() != us.size())
        throw DomainError("resistance_1d: need matching grids with >= 2 nodes");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double dx = xs[i + 1] - xs[i];
        if (!(dx > 0.0))
            throw DomainError("resistance_1d: grid must be strictly increasing");
        const double slope = (us[i + 1] - us[i]) / dx;
        total += dx / (1.0 + slope * slope);
    }
    return total;
}

// Analytic-derivative route: adaptive quadrature of 1/(1+u'^2) over [a,b].
template <class Deriv>
double resistance_1d(Deriv&& dudx, double a, double b, double tol = 1e-10) {
    return integrate([&](double x) {
        const double d = dudx(x);
        return 1.0 / (1.0 + d * d);
    }, a, b, tol);
}

// Sample grid over [-1,1] with n roughly-uniform nodes plus the kink
// abscissae +-gamma* inserted exactly, so piecewise-linear quadrature does
// not smear the slope discontinuity.
inline std::vector<double> sample_grid_1d(const Profile1D& p, std::size_t n) {
    std::vector<double> xs;
    xs.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1));
    if (p.gamma_star > 0.0 && p.gamma_star < 1.0) {
        xs.push_back(p.gamma_star);
        xs.push_back(-p.gamma_star);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-13; }),
             xs.end());
    return xs;
}

// One candidate of the segment-parabola-segment family the 1-D reduction
// scans: a left segment rising m-alpha over the run a+1, a curvature-q
// parabola across [a,b], and a right segment falling m-beta over the run 1-b.
// Its resistance is
//   Gamma = (a+1)^3/((a+1)^2+(m-alpha)^2) + (2/q) arctan((q/2)(b-a))
//         + (1-b)^3/((1-b)^2+(beta-m)^2),
// with the arctan term degenerating to b-a when q = 0.  The minimum over the
// admissible set is attained at alpha=beta=0, m=M, -a=b, where Gamma equals
// eval_R.
struct GammaPoint {
    double a = 0.0, b = 0.0, m = 0.0, alpha = 0.0, beta = 0.0;
};

inline bool in_gamma_domain(const GammaPoint& p, double M, double tol = 1e-12) {
    return p.a >= -1.0 - tol && p.a <= std::min(1.0, -1.0 + p.m) + tol &&
           p.b >= std::max(-1.0, 1.0 - p.m) - tol && p.b <= 1.0 + tol &&
           p.a <= p.b + tol && p.m >= -tol && p.m <= M + tol &&
           p.alpha >= -tol && p.alpha <= p.m + tol &&
           p.beta >= -tol && p.beta <= p.m + tol;
}

inline double oracle_Gamma(const GammaPoint& p, double M, double q) {
    if (!in_gamma_domain(p, M))
        throw DomainError("oracle_Gamma: point outside the admissible set");
    const double la = p.a + 1.0, lb = 1.0 - p.b;
    const double da = la * la + (p.m - p.alpha) * (p.m - p.alpha);
    const double db = lb * lb + (p.beta - p.m) * (p.beta - p.m);
    const double first = (da > 0.0) ? la * la * la / da : 0.0;   // -> 0 as a -> -1
    const double third = (db > 0.0) ? lb * lb * lb / db : 0.0;   // -> 0 as b -> 1
    const double mid = (q > 0.0) ? (2.0 / q) * std::atan(0.5 * q * (p.b - p.a))
                                 : (p.b - p.a);
    return first + mid + third;
}

} // namespace newtres
