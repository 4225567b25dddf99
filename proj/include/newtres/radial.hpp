#pragma once

// Radial minimal-resistance solver on the disk of radius R: profiles
// u: [0,R] -> [0,M] with r -> u(r) - (q/2) r^2 nonincreasing and concave,
// under the single-shock condition qR <= 1 and high-profile condition
// 2M >= qR^2.  The optimum is a curvature-q parabolic cap on [0,a*] glued to
// a tail whose slope field solves the Euler-Lagrange relation
// -r u' / (1+u'^2)^2 = eta*, i.e. u'(r) = h^{-1}(eta*/r) with
// h(t) = -t/(1+t^2)^2 on (-inf,-1].  The gluing radius a* is the root of a
// scalar equation built from h, and eta* = a* h(-gamma_q(a*)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "newtres/errors.hpp"
#include "newtres/numerics.hpp"

namespace newtres {

struct RadialProblem {
    double R = 1.0;  // disk radius
    double M = 1.0;  // height bound
    double q = 0.0;  // concavity parameter

    void validate() const {
        if (!(R > 0.0) || !(M > 0.0))
            throw PreconditionError("RadialProblem: need R > 0 and M > 0");
        if (!(q >= 0.0 && q * R <= 1.0))
            throw PreconditionError("RadialProblem: single-shock condition requires 0 <= qR <= 1");
        if (!(2.0 * M >= q * R * R))
            throw PreconditionError("RadialProblem: high-profile condition requires 2M >= qR^2");
    }
};

// h(t) = -t/(1+t^2)^2, strictly increasing from 0 to 1/4 on (-inf,-1].
inline double h_fun(double t) {
    if (t > -1.0)
        throw DomainError("h_fun: defined on t <= -1");
    const double d = 1.0 + t * t;
    return -t / (d * d);
}

// Inverse of h on (0, 1/4]: Newton iteration from the asymptotic seed
// -max(1, s^{-1/3}) (h(t) ~ -1/t^3 for t -> -inf), with a bisection
// safeguard on the bracket [-2 s^{-1/3} - 2, -1].
inline double h_inv(double s) {
    if (!(s > 0.0 && s <= 0.25))
        throw DomainError("h_inv: defined on (0, 1/4]");
    if (s == 0.25)
        return -1.0;
    const double cbrt = std::cbrt(1.0 / s);
    double lo = -2.0 * cbrt - 2.0;  // h(lo) < s
    double hi = -1.0;               // h(hi) = 1/4 > s
    double t = -std::max(1.0, cbrt);
    const auto h_raw = [](double u) { const double d = 1.0 + u * u; return -u / (d * d); };
    for (int iter = 0; iter < 80; ++iter) {
        const double ht = h_raw(t);
        const double res = ht - s;
        if (std::abs(res) <= 1e-13 * s)
            return t;
        if (res > 0.0) hi = t; else lo = t;  // h increasing in t
        const double d = 1.0 + t * t;
        const double hp = (3.0 * t * t - 1.0) / (d * d * d);  // h'(t) > 0 for t < -1
        double next = t - res / hp;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);  // Newton left the bracket: bisect
        t = next;
    }
    throw NoConvergence("h_inv: did not reach relative tolerance");
}

namespace detail {

// psi_a(eta) = -int_a^R h^{-1}(eta/r) dr; the tail height when the
// Euler-Lagrange multiplier is eta.  Requires 0 < eta <= a/4 so that the
// argument stays in (0, 1/4].
inline double radial_tail_height(double a, double eta, double R, double tol = 1e-11) {
    return -integrate([&](double r) { return h_inv(eta / r); }, a, R, tol);
}

} // namespace detail

// phi(a) = -int_a^R h^{-1}(a/(4r)) dr, strictly decreasing from +inf to 0 on
// (0,R); a_M is its unique root phi(a_M) = M.
inline double compute_aM(double R, double M) {
    if (!(R > 0.0 && M > 0.0))
        throw DomainError("compute_aM: need R > 0 and M > 0");
    const auto phi = [&](double a) { return detail::radial_tail_height(a, 0.25 * a, R) - M; };
    double lo = 0.5 * R;
    for (int k = 0; phi(lo) <= 0.0; ++k) {
        lo *= 0.5;
        if (k > 200) throw NoConvergence("compute_aM: no lower bracket");
    }
    double hi = R * (1.0 - 1e-7);
    for (int k = 0; phi(hi) >= 0.0; ++k) {
        hi = R - 0.25 * (R - hi);
        if (k > 200) throw NoConvergence("compute_aM: no upper bracket");
    }
    return find_root(phi, lo, hi, 1e-12);
}

// eta(a): unique eta in (0, a/4] with -int_a^R h^{-1}(eta/r) dr = M,
// defined for a in [a_M, R).  Equivalent domain test: phi(a) <= M.
inline double eta_of_a(double a, const RadialProblem& prob) {
    if (!(a > 0.0 && a < prob.R))
        throw DomainError("eta_of_a: need 0 < a < R");
    const double at_quarter = detail::radial_tail_height(a, 0.25 * a, prob.R);  // = phi(a)
    if (at_quarter > prob.M + 1e-8 * std::max(1.0, prob.M))
        throw DomainError("eta_of_a: a < a_M (phi(a) > M)");
    if (at_quarter >= prob.M)
        return 0.25 * a;  // a = a_M within tolerance: eta(a_M) = a_M/4
    const auto f = [&](double eta) { return detail::radial_tail_height(a, eta, prob.R) - prob.M; };
    double lo = 0.125 * a;
    for (int k = 0; f(lo) <= 0.0; ++k) {
        lo *= 0.5;
        if (k > 200) throw NoConvergence("eta_of_a: no lower bracket");
    }
    return find_root(f, lo, 0.25 * a, 1e-13);
}

// gamma_q(a) = sqrt((3a^2q^2 + 1 + sqrt(9a^4q^4 + 10a^2q^2 + 1))/2) >= 1;
// the magnitude of the optimal tail slope at the gluing radius.
inline double gamma_q(double a, double q) {
    if (!(a > 0.0 && q >= 0.0))
        throw DomainError("gamma_q: need a > 0 and q >= 0");
    const double s = a * a * q * q;
    return std::sqrt(0.5 * (3.0 * s + 1.0 + std::sqrt(9.0 * s * s + 10.0 * s + 1.0)));
}

// zeta_q(a) = -int_a^R h^{-1}(a h(-gamma_q(a)) / r) dr, strictly decreasing,
// with zeta_0 = phi.  The gluing radius a* solves zeta_q(a*) = M.
inline double zeta_q(double a, const RadialProblem& prob) {
    if (!(a > 0.0 && a < prob.R))
        throw DomainError("zeta_q: need 0 < a < R");
    return detail::radial_tail_height(a, a * h_fun(-gamma_q(a, prob.q)), prob.R);
}

// Root of zeta_q(a) = M on [a_M, R); equivalently eta(a*) = a* h(-gamma_q(a*)).
// For q = 0 this degenerates to a* = a_M.
inline double compute_a_star(const RadialProblem& prob, double a_M_hint = -1.0) {
    prob.validate();
    const double aM = (a_M_hint > 0.0) ? a_M_hint : compute_aM(prob.R, prob.M);
    if (prob.q == 0.0)
        return aM;
    const auto f = [&](double a) { return zeta_q(a, prob) - prob.M; };
    const double f_lo = f(aM);  // zeta_q(a_M) > M for q > 0
    if (f_lo <= 0.0)
        return aM;
    double hi = 0.5 * (aM + prob.R);
    for (int k = 0; f(hi) >= 0.0; ++k) {
        hi = prob.R - 0.25 * (prob.R - hi);
        if (k > 200) throw NoConvergence("compute_a_star: no upper bracket");
    }
    return find_root(f, aM, hi, 1e-12);
}

struct RadialSolution {
    double R = 0.0, M = 0.0, q = 0.0;
    double a_M = 0.0;       // classical gluing radius (q = 0 reference)
    double a_star = 0.0;    // gluing radius, in [a_M, R)
    double eta_star = 0.0;  // Euler-Lagrange multiplier, in (0, a_star/4]
    std::vector<double> r;  // sample abscissae, r.front()=0, r.back()=R, a_star included
    std::vector<double> u;  // sample heights

    // u(r): parabolic cap (q/2)(r^2 - a*^2) + M on [0,a*], integrated tail on
    // (a*,R].  The tail integral is evaluated adaptively on demand.
    double eval(double rr) const {
        if (rr < -1e-12 || rr > R + 1e-12)
            throw DomainError("RadialSolution::eval: r outside [0,R]");
        rr = std::clamp(rr, 0.0, R);
        if (rr <= a_star)
            return 0.5 * q * (rr * rr - a_star * a_star) + M;
        return -integrate([&](double s) { return h_inv(eta_star / s); }, rr, R, 1e-11);
    }

    // u'(r): q r on the cap, h^{-1}(eta*/r) on the tail (<= -1 there).  At the
    // gluing radius the tail side equals -gamma_q(a*).
    double derivative(double rr) const {
        if (rr < -1e-12 || rr > R + 1e-12)
            throw DomainError("RadialSolution::derivative: r outside [0,R]");
        rr = std::clamp(rr, 0.0, R);
        if (rr <= a_star)
            return q * rr;
        return h_inv(eta_star / rr);
    }

    double resistance() const;  // defined after energy_E
};

// Dissipation-energy functional evaluated through the eta(a) multiplier:
//   E(a) = int_0^a r/(1+q^2 r^2) dr + int_a^R r/(1+h^{-1}(eta(a)/r)^2) dr,
// whose unique interior minimum on [a_M, R) sits at a*.  First term in
// closed form: ln(1+q^2 a^2)/(2 q^2) for q > 0, a^2/2 for q = 0.
inline double energy_E(double a, const RadialProblem& prob) {
    const double eta = eta_of_a(a, prob);  // DomainError if a < a_M
    const double cap = (prob.q > 0.0)
        ? std::log1p(prob.q * prob.q * a * a) / (2.0 * prob.q * prob.q)
        : 0.5 * a * a;
    const double tail = integrate([&](double r) {
        const double t = h_inv(eta / r);
        return r / (1.0 + t * t);
    }, a, prob.R, 1e-10);
    return cap + tail;
}

// Composite resistance of a sampled radial profile: per-interval chord slope,
// exact integral of r/(1+slope^2) on each interval.
inline double resistance_radial(const std::vector<double>& rs, const std::vector<double>& us) {
    if (rs.size() < 2 || rs.size() != us.size())
        throw DomainError("resistance_radial: need matching grids with >= 2 nodes");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
        const double dr = rs[i + 1] - rs[i];
        if (!(dr > 0.0))
            throw DomainError("resistance_radial: grid must be strictly increasing");
        const double slope = (us[i + 1] - us[i]) / dr;
        total += 0.5 * (rs[i + 1] * rs[i + 1] - rs[i] * rs[i]) / (1.0 + slope * slope);
    }
    return total;
}

// Full radial solve: a_M, a*, eta*, and a sampled profile with the gluing
// radius as an exact grid node and tail nodes graded toward a* (where the
// curvature of u is largest).
inline RadialSolution solve_radial(const RadialProblem& prob, std::size_t n_samples = 512) {
    prob.validate();
    if (n_samples < 8)
        throw DomainError("solve_radial: need at least 8 samples");
    RadialSolution sol;
    sol.R = prob.R;
    sol.M = prob.M;
    sol.q = prob.q;
    sol.a_M = compute_aM(prob.R, prob.M);
    sol.a_star = compute_a_star(prob, sol.a_M);
    sol.eta_star = sol.a_star * h_fun(-gamma_q(sol.a_star, prob.q));

    const std::size_t n_cap = n_samples / 2, n_tail = n_samples - n_cap;
    sol.r.reserve(n_samples + 1);
    for (std::size_t i = 0; i < n_cap; ++i)
        sol.r.push_back(sol.a_star * static_cast<double>(i) / static_cast<double>(n_cap));
    for (std::size_t j = 0; j <= n_tail; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n_tail);
        sol.r.push_back(sol.a_star + (prob.R - sol.a_star) * std::pow(t, 1.5));
    }
    sol.u.resize(sol.r.size());
    const std::size_t kink = n_cap;             // index of the a_star node
    const std::size_t last = sol.r.size() - 1;  // index of the R node
    for (std::size_t i = 0; i < kink; ++i)
        sol.u[i] = 0.5 * prob.q * (sol.r[i] * sol.r[i] - sol.a_star * sol.a_star) + prob.M;
    // tail values accumulated backwards from u(R) = 0 segment by segment
    sol.u[last] = 0.0;
    double acc = 0.0;
    for (std::size_t j = last; j > kink; --j) {
        acc += -integrate([&](double s) { return h_inv(sol.eta_star / s); },
                          sol.r[j - 1], sol.r[j], 2e-12);
        sol.u[j - 1] = acc;  // = -int_{r_{j-1}}^R h_inv(eta*/s) ds
    }
    // the gluing node carries the exact cap value; the accumulated tail
    // integral lands there too, within the a* root residual
    sol.u[kink] = prob.M;
    return sol;
}

inline double RadialSolution::resistance() const {
    RadialProblem prob{R, M, q};
    return energy_E(a_star, prob);
}

} // namespace newtres
