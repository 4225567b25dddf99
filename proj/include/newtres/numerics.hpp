#pragma once

// Scalar numeric kernels: bracketed root finding (Brent), bracketed 1-D
// minimization (Brent), adaptive Gauss-Kronrod integration, and Gauss-Legendre
// node generation.  Everything downstream (profile solves, radial chain,
// surface quadrature) is built on these four routines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "newtres/errors.hpp"

namespace newtres {

// Root of f on [lo,hi] by Brent's method: inverse quadratic interpolation /
// secant with a guaranteed bisection fallback.  Returns x with the live
// bracket narrowed to <= tol (plus floating-point slack proportional to |x|).
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
    if (!(lo < hi))
        throw DomainError("find_root: bracket must satisfy lo < hi");
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NoSignChange("find_root: f(lo) and f(hi) have the same sign");

    double c = a, fc = fa;     // c: previous iterate, keeps the bracket
    double d = b - a, e = d;   // d: last step, e: step before that
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {  // re-arm bracket from a
            c = a; fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {  // keep b the best iterate
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double eps_tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= eps_tol || fb == 0.0)
            return b;
        if (std::abs(e) < eps_tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double p, q_, s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * m * s;
                q_ = 1.0 - s;
            } else {       // inverse quadratic interpolation
                const double q0 = fa / fc, r = fb / fc;
                p = s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q_ = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q_ = -q_; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q_ - std::abs(eps_tol * q_), std::abs(e * q_))) {
                e = d; d = p / q_;   // interpolation accepted
            } else {
                d = e = m;           // fall back to bisection
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > eps_tol) ? d : (m > 0.0 ? eps_tol : -eps_tol);
        fb = f(b);
    }
    throw NoConvergence("find_root: iteration cap reached");
}

// Argmin of a unimodal f on [lo,hi] by Brent's minimizer (golden section with
// parabolic interpolation steps when trustworthy).  tol is the x-resolution.
template <class F>
double minimize_scalar(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    if (!(lo < hi))
        throw DomainError("minimize_scalar: bracket must satisfy lo < hi");
    constexpr double golden = 0.3819660112501051;  // 2 - phi
    double a = lo, b = hi;
    double x = a + golden * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-25;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a))
            return x;
        bool take_golden = true;
        if (std::abs(e) > tol1) {
            // trial parabola through x, v, w
            double r = (x - w) * (fx - fv);
            double q_ = (x - v) * (fx - fw);
            double p = (x - v) * q_ - (x - w) * r;
            q_ = 2.0 * (q_ - r);
            if (q_ > 0.0) p = -p; else q_ = -q_;
            const double e_prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q_ * e_prev) && p > q_ * (a - x) && p < q_ * (b - x)) {
                d = p / q_;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = (m > x) ? tol1 : -tol1;
                take_golden = false;
            }
        }
        if (take_golden) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    throw NoConvergence("minimize_scalar: iteration cap reached");
}

namespace detail {

// 15-point Kronrod nodes on [0,1] of |x| (symmetric) with the embedded
// 7-point Gauss weights.  Standard published constants.
inline constexpr double gk15_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk15_wg[4] = {  // weights for nodes 1,3,5 and the centre
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gauss_kronrod_15(F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk15_nodes[i]);
        fv[14 - i] = f(c + h * gk15_nodes[i]);
    }
    fv[7] = f(c);
    double kron = 0.0;
    for (int i = 0; i < 7; ++i)
        kron += gk15_wk[i] * (fv[i] + fv[14 - i]);
    kron += gk15_wk[7] * fv[7];
    double gauss = gk15_wg[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        gauss += gk15_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    value = kron * h;
    err = std::abs((kron - gauss) * h);
}

template <class F>
inline double integrate_rec(F& f, double a, double b, double tol, int depth, int max_depth) {
    double v, err;
    gauss_kronrod_15(f, a, b, v, err);
    if (err <= tol || b - a <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
        return v;
    if (depth >= max_depth)
        throw NoConvergence("integrate: subdivision limit reached");
    const double c = 0.5 * (a + b);
    return integrate_rec(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           integrate_rec(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace detail

// Adaptive Gauss-Kronrod (15-point base) quadrature of f over [a,b] with
// absolute-error target tol.  Bisects until the local G7/K15 discrepancy is
// below the local budget; throws NoConvergence past max_depth levels.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 50) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) { std::swap(a, b); sign = -1.0; }
    return sign * detail::integrate_rec(f, a, b, tol, 0, max_depth);
}

struct QuadratureRule1D {
    std::vector<double> nodes;    // in (-1,1), ascending
    std::vector<double> weights;  // positive, sum to 2
};

// Gauss-Legendre rule with n nodes on [-1,1].  Nodes are the roots of the
// Legendre polynomial P_n found by Newton iteration from the Chebyshev-like
// initial guess; weights w = 2/((1-x^2) P_n'(x)^2).  Results are cached per n.
inline const QuadratureRule1D& gauss_legendre(int n) {
    if (n < 1)
        throw DomainError("gauss_legendre: n must be >= 1");
    static std::map<int, QuadratureRule1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            // evaluate P_n and P_n' by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            dp = n * (x * pn - p0) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;  // descending cosine guess gives the negative half first
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    auto [pos, inserted] = cache.emplace(n, std::move(rule));
    return pos->second;
}

} // namespace newtres
