#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "newtres/errors.hpp"
#include "newtres/hull2d.hpp"
#include "newtres/radial.hpp"

// Self-adaptive differential evolution (DE/rand/1/bin with jDE parameter
// adaptation) and the nonradial solver built on top of it: decision vectors
// are flattened (r_i, theta_i, z_i) triples scored by the hull cost.

namespace newtres {

struct DEConfig {
    int population_size = 50;
    long long max_evaluations = 100000;
    std::uint64_t seed = 0;
    double init_F = 0.5;   // per-member mutation weight, self-adapted in [0.1, 1]
    double init_CR = 0.9;  // per-member crossover rate, self-adapted in [0, 1]
    std::vector<std::array<double, 2>> bounds;  // per-coordinate [lo, hi]
    bool parallel = false;      // concurrent cost evaluation within a generation
    bool radial_seed = false;   // start one member from the radial optimum (solve_2d)
};

struct OptimizationTrace {
    std::vector<std::pair<long long, double>> best_cost_history;  // (evaluation count, cost)
    std::vector<double> best_params;
    double final_cost = 0.0;
    bool parallel = false;  // evaluation mode the run actually used
};

namespace detail {

inline double reflect_into(double v, double lo, double hi) {
    if (!(hi > lo)) return lo;
    while (v < lo || v > hi) {
        if (v < lo) v = lo + (lo - v);
        if (v > hi) v = hi - (v - hi);
    }
    return v;
}

}  // namespace detail

// Global minimization over a box.  DE/rand/1/bin: every member carries its
// own F and CR, refreshed with probability 0.1 per generation (jDE); trial
// coordinates falling outside the box are reflected back in.  Randomness is
// drawn generation-synchronously before any cost evaluation, so a fixed seed
// fixes the search path; `seeds` rows overwrite the first population members.
template <class F>
OptimizationTrace optimize(F&& cost_fn, const std::vector<std::array<double, 2>>& bounds,
                           const DEConfig& config,
                           const std::vector<std::vector<double>>& seeds = {}) {
    const int P = config.population_size;
    const int D = static_cast<int>(bounds.size());
    if (P < 4) throw ConfigError("optimize: population_size must be at least 4");
    if (config.max_evaluations < P)
        throw ConfigError("optimize: max_evaluations must cover one population sweep");
    if (D == 0) throw ConfigError("optimize: bounds must not be empty");
    for (const auto& b : bounds)
        if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || !(b[0] <= b[1]))
            throw ConfigError("optimize: bounds must be finite with lo <= hi");
    if (static_cast<int>(seeds.size()) > P)
        throw ConfigError("optimize: more seed members than population slots");
    for (const auto& s : seeds)
        if (static_cast<int>(s.size()) != D)
            throw ConfigError("optimize: seed member dimension mismatch");

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> pick_member(0, P - 1);
    std::uniform_int_distribution<int> pick_coord(0, D - 1);

    std::vector<std::vector<double>> pop(static_cast<std::size_t>(P),
                                         std::vector<double>(static_cast<std::size_t>(D)));
    std::vector<double> popF(static_cast<std::size_t>(P), config.init_F);
    std::vector<double> popCR(static_cast<std::size_t>(P), config.init_CR);
    std::vector<double> cost_of(static_cast<std::size_t>(P), 0.0);

    for (int i = 0; i < P; ++i)
        for (int d = 0; d < D; ++d) {
            const auto& b = bounds[static_cast<std::size_t>(d)];
            pop[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] =
                b[0] + (b[1] - b[0]) * u01(rng);
        }
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        pop[s] = seeds[s];
        for (int d = 0; d < D; ++d) {
            const auto& b = bounds[static_cast<std::size_t>(d)];
            pop[s][static_cast<std::size_t>(d)] =
                std::clamp(pop[s][static_cast<std::size_t>(d)], b[0], b[1]);
        }
    }

    auto evaluate_batch = [&](const std::vector<std::vector<double>>& xs, int count,
                              std::vector<double>& out) {
        out.resize(static_cast<std::size_t>(count));
        if (config.parallel && count > 1) {
            const int workers =
                std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()),
                                          count));
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w)
                threads.emplace_back([&, w]() {
                    for (int i = w; i < count; i += workers)
                        out[static_cast<std::size_t>(i)] = cost_fn(xs[static_cast<std::size_t>(i)]);
                });
            for (auto& t : threads) t.join();
        } else {
            for (int i = 0; i < count; ++i)
                out[static_cast<std::size_t>(i)] = cost_fn(xs[static_cast<std::size_t>(i)]);
        }
    };

    OptimizationTrace trace;
    trace.parallel = config.parallel;
    long long evals = 0;
    int best = 0;

    evaluate_batch(pop, P, cost_of);
    evals = P;
    for (int i = 0; i < P; ++i)
        if (cost_of[static_cast<std::size_t>(i)] < cost_of[static_cast<std::size_t>(best)]) best = i;
    double best_cost = cost_of[static_cast<std::size_t>(best)];
    trace.best_cost_history.emplace_back(evals, best_cost);

    std::vector<std::vector<double>> trials(static_cast<std::size_t>(P),
                                            std::vector<double>(static_cast<std::size_t>(D)));
    std::vector<double> trialF(static_cast<std::size_t>(P));
    std::vector<double> trialCR(static_cast<std::size_t>(P));
    std::vector<double> trial_cost;

    while (evals < config.max_evaluations) {
        // Draw every random number for the generation up front; evaluation
        // order then cannot influence the stream.
        for (int i = 0; i < P; ++i) {
            trialF[static_cast<std::size_t>(i)] =
                (u01(rng) < 0.1) ? 0.1 + 0.9 * u01(rng) : popF[static_cast<std::size_t>(i)];
            trialCR[static_cast<std::size_t>(i)] =
                (u01(rng) < 0.1) ? u01(rng) : popCR[static_cast<std::size_t>(i)];
            int r1, r2, r3;
            do r1 = pick_member(rng); while (r1 == i);
            do r2 = pick_member(rng); while (r2 == i || r2 == r1);
            do r3 = pick_member(rng); while (r3 == i || r3 == r1 || r3 == r2);
            const int jrand = pick_coord(rng);
            for (int d = 0; d < D; ++d) {
                const bool crossed = u01(rng) < trialCR[static_cast<std::size_t>(i)] || d == jrand;
                double v = pop[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
                if (crossed) {
                    v = pop[static_cast<std::size_t>(r1)][static_cast<std::size_t>(d)] +
                        trialF[static_cast<std::size_t>(i)] *
                            (pop[static_cast<std::size_t>(r2)][static_cast<std::size_t>(d)] -
                             pop[static_cast<std::size_t>(r3)][static_cast<std::size_t>(d)]);
                    const auto& b = bounds[static_cast<std::size_t>(d)];
                    v = detail::reflect_into(v, b[0], b[1]);
                }
                trials[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = v;
            }
        }

        const int k = static_cast<int>(std::min<long long>(P, config.max_evaluations - evals));
        evaluate_batch(trials, k, trial_cost);
        for (int i = 0; i < k; ++i) {
            if (trial_cost[static_cast<std::size_t>(i)] <= cost_of[static_cast<std::size_t>(i)]) {
                pop[static_cast<std::size_t>(i)] = trials[static_cast<std::size_t>(i)];
                cost_of[static_cast<std::size_t>(i)] = trial_cost[static_cast<std::size_t>(i)];
                popF[static_cast<std::size_t>(i)] = trialF[static_cast<std::size_t>(i)];
                popCR[static_cast<std::size_t>(i)] = trialCR[static_cast<std::size_t>(i)];
                if (cost_of[static_cast<std::size_t>(i)] < best_cost) {
                    best = i;
                    best_cost = cost_of[static_cast<std::size_t>(i)];
                    trace.best_cost_history.emplace_back(evals + i + 1, best_cost);
                }
            }
        }
        evals += k;
    }

    trace.best_params = pop[static_cast<std::size_t>(best)];
    trace.final_cost = best_cost;
    return trace;
}

// Decision vector <-> candidate points: x is m consecutive (r, theta, z) triples.
inline ParamVector decode_params(const std::vector<double>& x) {
    if (x.size() % 3 != 0) throw ConfigError("decode_params: length must be a multiple of 3");
    ParamVector p;
    p.points.reserve(x.size() / 3);
    for (std::size_t i = 0; i + 2 < x.size(); i += 3)
        p.points.push_back({x[i], x[i + 1], x[i + 2]});
    return p;
}

// Encode the radial optimum on the unit disk as m lifted points: concentric
// rings starting at the cap edge a* (where the concave part v is constant, so
// the flat top of the hull reproduces the parabolic cap exactly), staggered
// ring to ring, with heights z = u(r)/M.  Ring count grows like sqrt(m/12):
// the hull's dominant interpolation error is the angular chord sag of each
// ring polygon, which scales like (2pi/count)^2 times the tail slope, while
// the radial spacing error over the short tail [a*, R] is comparatively tiny,
// so points are spent ~12:1 on angular resolution.
inline std::vector<double> radial_seed_params(const RadialSolution& sol, int m) {
    if (m < 1) throw PreconditionError("radial_seed_params: need at least one point");
    if (std::abs(sol.R - 1.0) > 1e-12)
        throw PreconditionError("radial_seed_params: the nonradial problem lives on the unit disk");
    int rings = std::max(1, static_cast<int>(std::llround(std::sqrt(m / 12.0))));
    rings = std::min(rings, m);
    const int per_ring = m / rings;
    const int leftover = m - rings * per_ring;
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(3 * m));
    for (int j = 0; j < rings; ++j) {
        const double r = sol.a_star + (sol.R - sol.a_star) * j / rings;
        const int count = per_ring + (j == rings - 1 ? leftover : 0);
        const double offset = (j % 2 == 1) ? 0.5 : 0.0;
        const double z = std::clamp(sol.eval(r) / sol.M, 0.0, 1.0);
        for (int k = 0; k < count; ++k) {
            x.push_back(r);
            x.push_back(2.0 * M_PI * (k + offset) / count);
            x.push_back(z);
        }
    }
    return x;
}

// Stochastic nonradial solver on the unit disk: minimize the hull cost over
// m lifted points against the inscribed n-gon.  Returns the best mesh found
// and the optimization trace.
inline std::pair<SurfaceMesh, OptimizationTrace> solve_2d(double M, double q, int m, int n,
                                                          const DEConfig& config) {
    if (!(M > 0.0)) throw PreconditionError("solve_2d: M must be positive");
    if (!(q >= 0.0)) throw PreconditionError("solve_2d: q must be nonnegative");
    if (m < 1) throw PreconditionError("solve_2d: need at least one candidate point");
    if (n < 3) throw PreconditionError("solve_2d: polygon needs at least 3 corners");
    if (q > 1.0)
        std::cerr << "solve_2d: warning: q = " << q
                  << " breaks the single-shock bound q*diam <= 2 on the unit disk\n";

    std::vector<std::array<double, 2>> bounds;
    bounds.reserve(static_cast<std::size_t>(3 * m));
    for (int i = 0; i < m; ++i) {
        bounds.push_back({0.0, 1.0});
        bounds.push_back({0.0, 2.0 * M_PI});
        bounds.push_back({0.0, 1.0});
    }

    const TriangleRule rule = duffy_rule(10);
    auto cost_fn = [&, M, q, n](const std::vector<double>& x) {
        return cost(build_hull(decode_params(x), n, M, q), q, rule);
    };

    std::vector<std::vector<double>> seeds;
    if (config.radial_seed && q <= 1.0 && 2.0 * M >= q) {
        const RadialSolution sol = solve_radial(RadialProblem{1.0, M, q});
        seeds.push_back(radial_seed_params(sol, m));
    }

    OptimizationTrace trace = optimize(cost_fn, bounds, config, seeds);
    SurfaceMesh mesh = build_hull(decode_params(trace.best_params), n, M, q);
    return {std::move(mesh), std::move(trace)};
}

}  // namespace newtres
