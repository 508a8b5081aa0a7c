#ifndef ACGEO_SWEEPOUT_HPP
#define ACGEO_SWEEPOUT_HPP

// The mountain-pass machinery: hyperplane reflection I, the tent sweepout
// joining L_xi to L_{I(xi)} through the broken generatrix p -> o -> q, origin
// passage verification, and the min-max driver over the (xi, s) grid with the
// truncated gradient flow as deformation map.

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "acgeo/ac_metric.hpp"
#include "acgeo/cone_geometry.hpp"
#include "acgeo/core.hpp"
#include "acgeo/curve.hpp"
#include "acgeo/discrete_curve.hpp"

namespace acgeo {

// Reflection through the hyperplane {x_n = 0}.
inline Vec reflection_I(const Vec& x) {
    Vec y = x;
    y[x.n - 1] = -y[x.n - 1];
    return y;
}

// ---------------------------------------------------------------------------
// Sweepout
// ---------------------------------------------------------------------------

struct Sweepout {
    Vec p, q;                  // shared endpoints, q = -p
    OpeningAngle alpha;
    std::vector<Vec> xi_grid;  // unit vectors orthogonal to p (n=2: the two signs)
    std::vector<double> s_grid;
    std::vector<std::vector<DiscreteCurve>> curves;  // [xi][s]

    // Validates the boundary condition (s = 0 row equals L_xi, s = 1 row
    // equals L_{I(xi)} vertexwise within 1e-12) and shared endpoints.
    static Sweepout create(Vec p, Vec q, OpeningAngle alpha, std::vector<Vec> xi_grid,
                           std::vector<double> s_grid,
                           std::vector<std::vector<DiscreteCurve>> curves) {
        Sweepout sw;
        sw.p = p;
        sw.q = q;
        sw.alpha = alpha;
        sw.xi_grid = std::move(xi_grid);
        sw.s_grid = std::move(s_grid);
        sw.curves = std::move(curves);
        const double rho = norm(sw.p);
        const double tol = 1e-12 * std::max(1.0, rho);
        if (sw.curves.size() != sw.xi_grid.size())
            throw ConfigError("Sweepout: xi grid / curve row mismatch");
        const int N = sw.curves.empty() || sw.curves.front().empty()
                          ? 0
                          : sw.curves.front().front().segments();
        for (std::size_t xi = 0; xi < sw.xi_grid.size(); ++xi) {
            if (sw.curves[xi].size() != sw.s_grid.size())
                throw ConfigError("Sweepout: s grid / curve column mismatch");
            const DiscreteCurve l0 = minimizing_family(sw.p, sw.q, sw.xi_grid[xi], alpha, N);
            const DiscreteCurve l1 =
                minimizing_family(sw.p, sw.q, reflection_I(sw.xi_grid[xi]), alpha, N);
            if (sup_distance(sw.curves[xi].front(), l0) > tol)
                throw ConfigError("Sweepout: s = 0 boundary curve differs from L_xi");
            if (sup_distance(sw.curves[xi].back(), l1) > tol)
                throw ConfigError("Sweepout: s = 1 boundary curve differs from L_I(xi)");
            for (const DiscreteCurve& c : sw.curves[xi]) {
                c.validate();
                if (norm(c.pts.front() - sw.p) > tol || norm(c.pts.back() - sw.q) > tol)
                    throw ConfigError("Sweepout: curve endpoints differ from p, q");
            }
        }
        return sw;
    }
};

namespace detail {

// One tent curve: the two-chord path p -> corner -> q inside the half-plane
// span{e_a} + R+ b_axis, where the corner sits at height * |m_xi| along
// b_axis; sampled at N+1 uniform cone-arclength nodes (each leg is a straight
// chord in the unfolded wedge, so wedge-Euclidean arclength is cone
// arclength).
inline DiscreteCurve tent_curve(const Vec& p, const Vec& b_axis, double height_frac,
                                const OpeningAngle& alpha, int N) {
    const double rho = norm(p);
    const double s = alpha.sin_alpha;
    const double Phi = kPi * s;  // unfolded angle between p and q
    const double hc = height_frac * rho * std::cos(0.5 * Phi);
    // Wedge Cartesian endpoints.
    const double ax = rho, ay = 0.0;
    const double cx = hc * std::cos(0.5 * Phi), cy = hc * std::sin(0.5 * Phi);
    const double bx = rho * std::cos(Phi), by = rho * std::sin(Phi);
    const double l1 = std::hypot(cx - ax, cy - ay);
    const double l2 = std::hypot(bx - cx, by - cy);
    const Vec e_a = p / rho;
    DiscreteCurve out;
    out.pts.reserve(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        if (i == 0) {
            out.pts.push_back(p);
            continue;
        }
        if (i == N) {
            out.pts.push_back(-1.0 * p);
            continue;
        }
        const double sigma = (static_cast<double>(i) / N) * (l1 + l2);
        double wx, wy;
        if (sigma <= l1) {
            const double t = sigma / l1;
            wx = ax + t * (cx - ax);
            wy = ay + t * (cy - ay);
        } else {
            const double t = (sigma - l1) / l2;
            wx = cx + t * (bx - cx);
            wy = cy + t * (by - cy);
        }
        const double r = std::hypot(wx, wy);
        if (r == 0.0) {
            out.pts.push_back(Vec::zero(p.n));  // exact vertex passage
            continue;
        }
        const double theta = std::atan2(wy, wx) / s;
        out.pts.push_back(r * std::cos(theta) * e_a + r * std::sin(theta) * b_axis);
    }
    return out;
}

}  // namespace detail

// The tent family: H(xi, s) for s in [0, 1/2] is p -> (1-2s) m_xi -> q in the
// xi half-plane; for s in [1/2, 1] the mirrored family through (2s-1) m_I(xi);
// both give the broken generatrix p -> o -> q at s = 1/2. Requires |p| = rho
// above the radius where the perturbation stops being small (the smallness
// regime guard).
inline Sweepout build_initial_sweepout(const Vec& p, const Vec& q, const MetricSpec& spec,
                                       int xi_count, int s_count, int N) {
    spec.validate();
    const double rho = norm(p);
    if (!(rho > 0.0)) throw ConfigError("build_initial_sweepout: p at the apex");
    if (norm(p + q) > 1e-9 * rho)
        throw ConfigError("build_initial_sweepout: p, q not antipodal");
    for (int j = 1; j < p.n; ++j)
        if (std::abs(p[j]) > 1e-9 * rho)
            throw ConfigError("build_initial_sweepout: p must lie on the e1 axis");
    if (s_count < 3 || s_count % 2 == 0)
        throw ConfigError("build_initial_sweepout: s_count must be odd and >= 3");
    if (N < 4 || N % 2 != 0)
        throw ConfigError("build_initial_sweepout: N must be even and >= 4");
    const double r_guard = R_epsilon(spec, 0.49);
    if (!(rho > r_guard))
        throw ConfigError("build_initial_sweepout: rho inside the perturbed core (rho <= " +
                          std::to_string(r_guard) + ")");

    std::vector<Vec> xi_grid;
    if (p.n == 2) {
        if (xi_count != 2)
            throw ConfigError("build_initial_sweepout: xi_count must be 2 when n = 2");
        xi_grid = {Vec::unit(2, 1), -1.0 * Vec::unit(2, 1)};
    } else {
        if (xi_count < 2) throw ConfigError("build_initial_sweepout: xi_count must be >= 2");
        for (int j = 0; j < xi_count; ++j) {
            const double a = 2.0 * kPi * j / xi_count;
            xi_grid.push_back(std::cos(a) * Vec::unit(3, 1) + std::sin(a) * Vec::unit(3, 2));
        }
    }
    std::vector<double> s_grid;
    for (int j = 0; j < s_count; ++j)
        s_grid.push_back(static_cast<double>(j) / (s_count - 1));

    std::vector<std::vector<DiscreteCurve>> curves;
    for (const Vec& xi : xi_grid) {
        std::vector<DiscreteCurve> row;
        for (double s : s_grid) {
            if (s <= 0.5) {
                row.push_back(detail::tent_curve(p, xi, 1.0 - 2.0 * s, spec.alpha, N));
            } else {
                row.push_back(
                    detail::tent_curve(p, reflection_I(xi), 2.0 * s - 1.0, spec.alpha, N));
            }
        }
        curves.push_back(std::move(row));
    }
    return Sweepout::create(p, q, spec.alpha, std::move(xi_grid), std::move(s_grid),
                            std::move(curves));
}

// ---------------------------------------------------------------------------
// Origin passage
// ---------------------------------------------------------------------------

struct OriginPassage {
    double min_dist = 0.0;
    int xi_index = 0;
    int s_index = 0;
};

inline OriginPassage verify_origin_passage(const Sweepout& sw) {
    OriginPassage best;
    best.min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t xi = 0; xi < sw.curves.size(); ++xi) {
        for (std::size_t s = 0; s < sw.curves[xi].size(); ++s) {
            const double d = closest_approach(sw.curves[xi][s]);
            if (d < best.min_dist) {
                best.min_dist = d;
                best.xi_index = static_cast<int>(xi);
                best.s_index = static_cast<int>(s);
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Min-max driver
// ---------------------------------------------------------------------------

struct FlowParams {
    double tau_round = -1.0;  // flow time per round; <= 0 selects the default
    StepControl step;
};

struct StopRule {
    double tol = 1e-8;  // relative stall threshold on the max level
    int window = 20;
    int max_rounds = 5000;
};

struct MinMaxReport {
    double lambda = 0.0;  // energy of the refined critical curve
    int argmax_xi = 0;
    int argmax_s = 0;
    DiscreteCurve critical_curve;
    double residual = 0.0;
    int morse_index = -1;  // -1 when undefined (saddle-escape failure)
    int iterations = 0;
    std::vector<double> history;  // family max of E* per round, nonincreasing
    double closest_approach_value = 0.0;
    double c_star_eps = 0.0;  // empirical smallness used for the cutoff
    bool saddle_escape_failure = false;
};

namespace detail {

// Deterministic parallel-for: results are written per index, so the outcome
// is byte-identical regardless of thread count. ACGEO_THREADS caps the fanout.
inline int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ACGEO_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
    }
    return static_cast<int>(hw);
}

template <typename F>
void parallel_for(int count, F&& body) {
    const int threads = std::min(thread_budget(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) body(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace detail

inline MinMaxReport minmax_run(Sweepout& sw, const MetricSpec& spec,
                               const CutoffProfile& cutoff, FlowParams fp = {},
                               StopRule stop = {}) {
    const std::size_t rows = sw.curves.size();
    const std::size_t cols = rows ? sw.curves.front().size() : 0;
    const int total = static_cast<int>(rows * cols);
    if (total == 0) throw ConfigError("minmax_run: empty sweepout");

    std::vector<double> estar(static_cast<std::size_t>(total), 0.0);
    auto curve_at = [&](int idx) -> DiscreteCurve& {
        return sw.curves[static_cast<std::size_t>(idx) / cols]
                        [static_cast<std::size_t>(idx) % cols];
    };
    detail::parallel_for(total, [&](int i) {
        estar[static_cast<std::size_t>(i)] = truncated_energy(curve_at(i), spec, cutoff);
    });
    auto family_max = [&]() {
        int arg = 0;
        double m = -1.0;
        for (int i = 0; i < total; ++i) {
            // Strict comparison: lexicographic (xi, s) tie-breaking.
            if (estar[static_cast<std::size_t>(i)] > m) {
                m = estar[static_cast<std::size_t>(i)];
                arg = i;
            }
        }
        return std::pair<double, int>(m, arg);
    };

    MinMaxReport rep;
    auto [mx, arg] = family_max();
    rep.history.push_back(mx);

    double tau_round = fp.tau_round;
    if (tau_round <= 0.0)
        tau_round = 20.0 * detail::default_flow_step(curve_at(arg), spec);

    // The grid family can "tear" at the separatrix: every curve individually
    // escapes the saddle eventually (the escape is seeded by rounding noise),
    // after which the grid max undershoots the pass level. Two safeguards:
    //  - a refinement probe once the level plateaus: Newton is attempted from
    //    the argmax and accepted when it converges at the same level;
    //  - collapse detection with rollback to the pre-collapse argmax snapshot.
    const double probe_tol = std::max(stop.tol, 1e-4);
    const double collapse_tol = 0.02;
    std::vector<std::pair<DiscreteCurve, int>> snapshots;  // last window+1 argmaxes
    snapshots.emplace_back(curve_at(arg), arg);

    DiscreteCurve candidate = curve_at(arg);
    bool refined_early = false;
    RefineReport rr;

    for (int round = 0; round < stop.max_rounds; ++round) {
        detail::parallel_for(total, [&](int i) {
            if (estar[static_cast<std::size_t>(i)] == 0.0) return;  // frozen fixed point
            FlowStats st;
            curve_at(i) = flow(curve_at(i), spec, cutoff, tau_round, fp.step, &st);
            estar[static_cast<std::size_t>(i)] = st.estar_final;
        });
        std::tie(mx, arg) = family_max();
        rep.history.push_back(mx);
        rep.iterations = round + 1;
        snapshots.emplace_back(curve_at(arg), arg);
        if (snapshots.size() > static_cast<std::size_t>(stop.window) + 1)
            snapshots.erase(snapshots.begin());
        const std::size_t len = rep.history.size();
        if (len <= static_cast<std::size_t>(stop.window)) continue;
        const double prev = rep.history[len - 1 - static_cast<std::size_t>(stop.window)];
        if (prev > 0.0 && prev - mx > collapse_tol * prev) {
            // Family collapse through a tear: the pass candidate is the argmax
            // recorded before the drop.
            std::tie(candidate, arg) = snapshots.front();
            refined_early = false;
            break;
        }
        const double rel = (prev - mx) / std::max(std::abs(mx), 1e-300);
        if (rel < stop.tol) {
            candidate = curve_at(arg);
            break;
        }
        if (rel < probe_tol && (round + 1) % stop.window == 0) {
            // Plateau probe: try to pin the nearby critical point directly.
            RefineReport probe;
            DiscreteCurve refined = refine_to_geodesic(curve_at(arg), spec, 1e-9, 60, &probe);
            const double e_arg = energy(curve_at(arg), spec);
            const double e_ref = energy(refined, spec);
            if (probe.converged && std::abs(e_ref - e_arg) <= 0.05 * std::max(e_arg, 1.0)) {
                candidate = std::move(refined);
                rr = probe;
                refined_early = true;
                break;
            }
        }
        candidate = curve_at(arg);
    }

    rep.argmax_xi = arg / static_cast<int>(cols);
    rep.argmax_s = arg % static_cast<int>(cols);
    if (!refined_early) candidate = refine_to_geodesic(candidate, spec, 1e-9, 60, &rr);
    rep.critical_curve = std::move(candidate);
    rep.residual = rr.residual;
    rep.lambda = energy(rep.critical_curve, spec);
    rep.closest_approach_value = closest_approach(rep.critical_curve);
    if (rep.residual <= 1e-3) {
        rep.morse_index = morse_index(rep.critical_curve, spec);
    } else {
        rep.saddle_escape_failure = true;  // grid too coarse to pin the saddle
    }
    return rep;
}

}  // namespace acgeo

#endif  // ACGEO_SWEEPOUT_HPP
