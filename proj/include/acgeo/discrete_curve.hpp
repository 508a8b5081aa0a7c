#ifndef ACGEO_DISCRETE_CURVE_HPP
#define ACGEO_DISCRETE_CURVE_HPP

// Discrete stand-in for W^{1,2} curves with fixed endpoints: midpoint-rule
// energy E, truncated energy E* = eta(E), their gradients, the monotone
// gradient-flow deformation, geodesic residual, damped-Newton refinement, and
// the discrete Morse index.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "acgeo/ac_metric.hpp"
#include "acgeo/core.hpp"
#include "acgeo/curve.hpp"

namespace acgeo {

// ---------------------------------------------------------------------------
// Energy and gradient
// ---------------------------------------------------------------------------

// E_disc = N * sum_i g(m_i)(Delta_i, Delta_i), m_i the segment midpoint.
inline double energy(const DiscreteCurve& c, const MetricSpec& spec) {
    const int N = c.segments();
    double e = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec& a = c.pts[static_cast<std::size_t>(i)];
        const Vec& b = c.pts[static_cast<std::size_t>(i + 1)];
        const Vec d = b - a;
        const Vec m = 0.5 * (a + b);
        e += metric_at(spec, m).quad(d);
    }
    return N * e;
}

// Discrete length: sum of segment g-lengths at midpoint quadrature.
inline double discrete_length(const DiscreteCurve& c, const MetricSpec& spec) {
    const int N = c.segments();
    double l = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec& a = c.pts[static_cast<std::size_t>(i)];
        const Vec& b = c.pts[static_cast<std::size_t>(i + 1)];
        const Vec d = b - a;
        const Vec m = 0.5 * (a + b);
        l += std::sqrt(metric_at(spec, m).quad(d));
    }
    return l;
}

namespace detail {

// Gradient of E_disc at a single interior vertex k. Only the two adjacent
// segments contribute:
//   d/dx_k^c [N g_ab(m) D^a D^b] = N [ 1/2 d_c g_ab(m) D^a D^b +- 2 g_cb(m) D^b ]
// with the minus sign for the outgoing segment (D = x_{k+1} - x_k) and plus
// for the incoming one.
inline Vec energy_gradient_vertex(const DiscreteCurve& c, const MetricSpec& spec, int k,
                                  double h = kMetricFdStep) {
    const int N = c.segments();
    Vec g = Vec::zero(c.dim());
    for (int i : {k - 1, k}) {
        if (i < 0 || i >= N) continue;
        const Vec& a = c.pts[static_cast<std::size_t>(i)];
        const Vec& b = c.pts[static_cast<std::size_t>(i + 1)];
        const Vec d = b - a;
        const Vec m = 0.5 * (a + b);
        const Mat gm = metric_at(spec, m);
        const double sgn = (i == k) ? -1.0 : +1.0;
        // Metric term 2 g(m) D, signed by segment orientation.
        g += (sgn * 2.0 * N) * gm.apply(d);
        // Midpoint-derivative term; the factor 1/2 is dm/dx_k.
        for (int cc = 0; cc < c.dim(); ++cc)
            g[cc] += N * 0.5 * metric_partial(spec, m, cc, h).quad(d);
    }
    return g;
}

}  // namespace detail

// Per-vertex gradient of E_disc; identically zero entries at the endpoints.
inline std::vector<Vec> energy_gradient(const DiscreteCurve& c, const MetricSpec& spec,
                                        double h = kMetricFdStep) {
    const int N = c.segments();
    std::vector<Vec> grad(static_cast<std::size_t>(N) + 1, Vec::zero(c.dim()));
    for (int k = 1; k < N; ++k)
        grad[static_cast<std::size_t>(k)] = detail::energy_gradient_vertex(c, spec, k, h);
    return grad;
}

// ---------------------------------------------------------------------------
// Cutoff profile eta
// ---------------------------------------------------------------------------

// C^2 profile with eta = 0 on [0, low], eta(x) = x on [high, inf), and
// 0 < eta' <= slope_cap on the open transition band. The derivative in the
// normalized band coordinate u = (x - low)/(high - low) is
//   psi(u) = S(u) + c * 64 u^3 (1-u)^3,   S the quintic smoothstep,
// with c chosen so that the integral matches (eta(high) = high); psi vanishes
// to first order at both band edges, giving a C^2 eta.
struct CutoffProfile {
    double low = 0.0;
    double high = 0.0;
    double slope_cap = 0.0;
    double bump_coeff = 0.0;  // the constant c above

    double eta(double x) const {
        if (x <= low) return 0.0;
        if (x >= high) return x;
        const double u = (x - low) / (high - low);
        const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u, u6 = u5 * u,
                     u7 = u6 * u;
        const double int_s = u6 - 3.0 * u5 + 2.5 * u4;                       // integral of S
        const double int_b = 64.0 * (u4 / 4.0 - 3.0 * u5 / 5.0 + u6 / 2.0 - u7 / 7.0);
        return (high - low) * (int_s + bump_coeff * int_b);
    }

    double eta_prime(double x) const {
        if (x <= low || x >= high) return x >= high ? 1.0 : 0.0;
        const double u = (x - low) / (high - low);
        const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        const double omu = 1.0 - u;
        const double b = 64.0 * u * u * u * omu * omu * omu;
        return s + bump_coeff * b;
    }
};

// Band endpoints per the standing smallness assumption: low is the boundary
// curve energy ceiling (1+5 C* eps)^2 4 rho^2 sin^2(pi sin(alpha)/2), high is
// the min-max floor (1-5 C* eps)^2 4 rho^2. slope_cap is the dimensionless
// slope bound 3/[(1-5 C* eps)^2 - (1+5 C* eps)^2 sin^2(pi sin(alpha)/2)] in
// the normalized band coordinate.
inline CutoffProfile make_cutoff(double rho, double c_star_eps, const OpeningAngle& alpha) {
    if (!(rho > 0.0)) throw ConfigError("make_cutoff: rho must be > 0");
    if (c_star_eps < 0.0) throw ConfigError("make_cutoff: c_star_eps must be >= 0");
    const double sn = std::sin(0.5 * kPi * alpha.sin_alpha);
    const double lowf = (1.0 + 5.0 * c_star_eps) * (1.0 + 5.0 * c_star_eps) * sn * sn;
    const double highf = (1.0 - 5.0 * c_star_eps) * (1.0 - 5.0 * c_star_eps);
    if (!(lowf < highf))
        throw ConfigError("make_cutoff: smallness condition violated (bands overlap)");
    CutoffProfile p;
    p.low = 4.0 * rho * rho * lowf;
    p.high = 4.0 * rho * rho * highf;
    p.slope_cap = 3.0 / (highf - lowf);
    // Match the integral: eta(high) = high requires
    //   integral of psi over [0,1] = high / (high - low) =: mass,
    // and integral S = 1/2, integral of the bump = 16/35.
    const double mass = p.high / (p.high - p.low);
    p.bump_coeff = (mass - 0.5) * 35.0 / 16.0;
    // The construction keeps max psi = 1/2 + c below the cap for all valid
    // parameters; assert it anyway.
    double mx = 0.0;
    for (int i = 0; i <= 1000; ++i)
        mx = std::max(mx, p.eta_prime(p.low + (p.high - p.low) * i / 1000.0));
    if (mx > p.slope_cap + 1e-12)
        throw NumericalError("make_cutoff: slope bound violated by construction");
    return p;
}

// ---------------------------------------------------------------------------
// Truncated energy and flow
// ---------------------------------------------------------------------------

inline double truncated_energy(const DiscreteCurve& c, const MetricSpec& spec,
                               const CutoffProfile& cutoff) {
    return cutoff.eta(energy(c, spec));
}

// Chain rule: grad E* = eta'(E) * grad E.
inline std::vector<Vec> truncated_energy_gradient(const DiscreteCurve& c,
                                                  const MetricSpec& spec,
                                                  const CutoffProfile& cutoff) {
    const double e = energy(c, spec);
    const double ep = cutoff.eta_prime(e);
    std::vector<Vec> g(c.pts.size(), Vec::zero(c.dim()));
    if (ep == 0.0) return g;
    g = energy_gradient(c, spec);
    for (Vec& v : g) v *= ep;
    return g;
}

struct StepControl {
    double tau0 = -1.0;              // initial step; <= 0 selects the default
    double min_step_factor = 1e-12;  // stall when step < factor * tau0
};

struct FlowStats {
    int accepted = 0;
    int rejected = 0;
    bool stalled = false;
    double tau_done = 0.0;
    double estar_initial = 0.0;
    double estar_final = 0.0;
};

namespace detail {

// Default step 0.1 / (N * max metric eigenvalue along the curve).
inline double default_flow_step(const DiscreteCurve& c, const MetricSpec& spec) {
    const int N = c.segments();
    double lmax = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec m = 0.5 * (c.pts[static_cast<std::size_t>(i)] +
                             c.pts[static_cast<std::size_t>(i + 1)]);
        const auto ev = sym_eigenvalues(metric_at(spec, m));
        lmax = std::max(lmax, ev[static_cast<std::size_t>(spec.n - 1)]);
    }
    return 0.1 / (N * std::max(lmax, 1e-30));
}

}  // namespace detail

// Explicit Euler on -grad E* with backtracking: a step is accepted only if
// E* does not increase, so E* is nonincreasing across accepted steps. Curves
// with E* = 0 are fixed points and are returned unchanged (same object).
inline DiscreteCurve flow(const DiscreteCurve& c, const MetricSpec& spec,
                          const CutoffProfile& cutoff, double tau_total,
                          StepControl sc = {}, FlowStats* stats = nullptr) {
    FlowStats local;
    FlowStats& st = stats ? *stats : local;
    double e = energy(c, spec);
    double estar = cutoff.eta(e);
    st.estar_initial = st.estar_final = estar;
    if (estar == 0.0) return c;

    DiscreteCurve cur = c;
    const double tau0 = sc.tau0 > 0.0 ? sc.tau0 : detail::default_flow_step(cur, spec);
    double tau = tau0;
    const int N = cur.segments();
    while (st.tau_done < tau_total) {
        const double ep = cutoff.eta_prime(e);
        if (ep == 0.0 || estar == 0.0) break;  // entered the flat region: fixed point
        std::vector<Vec> g = energy_gradient(cur, spec);
        double gmax = 0.0;
        for (const Vec& v : g) gmax = std::max(gmax, norm(v));
        if (gmax == 0.0) break;  // critical point
        bool advanced = false;
        while (tau >= sc.min_step_factor * tau0) {
            const double step = std::min(tau, tau_total - st.tau_done);
            DiscreteCurve cand = cur;
            for (int k = 1; k < N; ++k)
                cand.pts[static_cast<std::size_t>(k)] -=
                    (step * ep) * g[static_cast<std::size_t>(k)];
            const double e_cand = energy(cand, spec);
            const double estar_cand = cutoff.eta(e_cand);
            if (estar_cand <= estar) {
                cur = std::move(cand);
                e = e_cand;
                estar = estar_cand;
                st.tau_done += step;
                ++st.accepted;
                tau = std::min(tau * 1.2, 10.0 * tau0);
                advanced = true;
                break;
            }
            tau *= 0.5;
            ++st.rejected;
        }
        if (!advanced) {
            st.stalled = true;
            break;
        }
    }
    st.estar_final = estar;
    return cur;
}

// ---------------------------------------------------------------------------
// Residual, refinement, Morse index
// ---------------------------------------------------------------------------

// Max vertex gradient norm normalized by N and the curve's speed scale;
// zero exactly at discrete geodesics.
inline double geodesic_residual(const DiscreteCurve& c, const MetricSpec& spec) {
    const std::vector<Vec> g = energy_gradient(c, spec);
    double gmax = 0.0;
    for (const Vec& v : g) gmax = std::max(gmax, norm(v));
    const double speed = std::sqrt(std::max(energy(c, spec), 1e-300));
    return gmax / (c.segments() * speed);
}

namespace detail {

// Dense Hessian of E_disc in the interior vertex variables, by central
// differences of the vertex gradients. Perturbing vertex k only changes the
// gradients at k-1, k, k+1, so each column costs O(1) segment evaluations.
inline Eigen::MatrixXd interior_hessian(const DiscreteCurve& c, const MetricSpec& spec) {
    const int N = c.segments();
    const int n = c.dim();
    const int M = (N - 1) * n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M, M);
    DiscreteCurve work = c;
    double scale = 0.0;
    for (const Vec& x : c.pts) scale = std::max(scale, norm(x));
    const double h = 1e-6 * std::max(1.0, scale);
    for (int k = 1; k < N; ++k) {
        for (int cc = 0; cc < n; ++cc) {
            const int col = (k - 1) * n + cc;
            const double saved = work.pts[static_cast<std::size_t>(k)][cc];
            for (int j = std::max(1, k - 1); j <= std::min(N - 1, k + 1); ++j) {
                work.pts[static_cast<std::size_t>(k)][cc] = saved + h;
                const Vec gp = energy_gradient_vertex(work, spec, j);
                work.pts[static_cast<std::size_t>(k)][cc] = saved - h;
                const Vec gm = energy_gradient_vertex(work, spec, j);
                work.pts[static_cast<std::size_t>(k)][cc] = saved;
                for (int d = 0; d < n; ++d)
                    H((j - 1) * n + d, col) = (gp[d] - gm[d]) / (2.0 * h);
            }
        }
    }
    // Symmetrize (finite-difference noise breaks exact symmetry).
    H = 0.5 * (H + H.transpose()).eval();
    return H;
}

}  // namespace detail

struct RefineReport {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Damped (Levenberg-regularized) Newton iteration on E_disc over the interior
// vertices, endpoints fixed. Appropriate for saddle points: it drives the
// gradient to zero rather than descending the energy.
inline DiscreteCurve refine_to_geodesic(const DiscreteCurve& c, const MetricSpec& spec,
                                        double tol, int max_iter = 60,
                                        RefineReport* report = nullptr) {
    RefineReport local;
    RefineReport& rep = report ? *report : local;
    const int N = c.segments();
    const int n = c.dim();
    const int M = (N - 1) * n;
    DiscreteCurve cur = c;
    DiscreteCurve best = c;
    double best_res = geodesic_residual(cur, spec);
    double lambda = 0.0;
    for (rep.iterations = 0; rep.iterations < max_iter; ++rep.iterations) {
        const double res = geodesic_residual(cur, spec);
        if (res < best_res) {
            best_res = res;
            best = cur;
        }
        if (res <= tol) break;
        const std::vector<Vec> g = energy_gradient(cur, spec);
        Eigen::VectorXd G(M);
        for (int k = 1; k < N; ++k)
            for (int d = 0; d < n; ++d)
                G((k - 1) * n + d) = g[static_cast<std::size_t>(k)][d];
        const Eigen::MatrixXd H = detail::interior_hessian(cur, spec);
        const double hnorm = std::max(H.cwiseAbs().maxCoeff(), 1e-30);
        bool stepped = false;
        for (int attempt = 0; attempt < 24; ++attempt) {
            Eigen::MatrixXd Hreg = H;
            if (lambda > 0.0)
                Hreg += lambda * hnorm * Eigen::MatrixXd::Identity(M, M);
            const Eigen::VectorXd delta = Hreg.ldlt().solve(-G);
            if (!delta.allFinite()) {
                lambda = std::max(1e-10, lambda * 10.0);
                continue;
            }
            DiscreteCurve cand = cur;
            for (int k = 1; k < N; ++k)
                for (int d = 0; d < n; ++d)
                    cand.pts[static_cast<std::size_t>(k)][d] += delta((k - 1) * n + d);
            const double res_cand = geodesic_residual(cand, spec);
            if (res_cand < res) {
                cur = std::move(cand);
                lambda *= 0.25;
                if (lambda < 1e-14) lambda = 0.0;
                stepped = true;
                break;
            }
            lambda = std::max(1e-10, lambda * 10.0);
        }
        if (!stepped) break;  // no productive step found; report best iterate
    }
    rep.residual = geodesic_residual(cur, spec);
    if (rep.residual > best_res) {
        cur = best;
        rep.residual = best_res;
    }
    rep.converged = rep.residual <= tol;
    return cur;
}

// Count of Hessian eigenvalues below -eps_idx * ||H||; requires the input to
// be near-critical (residual below the threshold), since the index is only
// defined on the critical set.
inline int morse_index(const DiscreteCurve& c, const MetricSpec& spec,
                       double residual_threshold = 1e-3, double eps_idx = 1e-8) {
    const double res = geodesic_residual(c, spec);
    if (res > residual_threshold)
        throw ConfigError("morse_index: curve not critical (residual " +
                          std::to_string(res) + ")");
    const Eigen::MatrixXd H = detail::interior_hessian(c, spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double hnorm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    int count = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) < -eps_idx * hnorm) ++count;
    return count;
}

}  // namespace acgeo

#endif  // ACGEO_DISCRETE_CURVE_HPP
