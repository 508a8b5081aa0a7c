#ifndef ACGEO_AC_METRIC_HPP
#define ACGEO_AC_METRIC_HPP

// Asymptotically conical metrics g = g_cone + A: evaluation, rescaling,
// decay-radius measurement, Christoffel symbols by finite differences, and
// the two built-in perturbation families.
//
// Built-in families (closed forms, also documented in the README):
//   rotational_cap : g_ij = s^2 delta_ij + c^2 x_i x_j / (|x|^2 + sm(|x|)^2)
//                    with sm(r) = R_t (1 - (r/R_t)^2)^p for r < R_t, else 0.
//                    Exactly the cone outside |x| = R_t, smooth and positive
//                    definite at the origin, C^2 across the transition for
//                    p >= 3, invariant under rotations and reflections.
//   power_bump     : a_ij = A0 (c0^2 / (c0^2 + |x|^2))^(mu/2) delta_ij,
//                    polynomially decaying at rate mu; positive definite
//                    requires A0 > -s^2 (and |A0| < s^2 keeps the comparison
//                    constants uniform).

#include <array>
#include <cmath>
#include <string>

#include "acgeo/cone_geometry.hpp"
#include "acgeo/core.hpp"

namespace acgeo {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class PerturbationKind { none, rotational_cap, power_bump };

struct Perturbation {
    PerturbationKind kind = PerturbationKind::none;
    // rotational_cap
    double transition_radius = 1.0;
    double profile_exponent = 3.0;
    // power_bump
    double amplitude = 0.0;
    double mu = 1.0;
    double center_scale = 1.0;
};

struct MetricSpec {
    int n = 2;
    OpeningAngle alpha;
    Perturbation perturbation;
    double mu = 1.0;                   // nominal decay rate of the perturbation
    double regularization_delta = 0.0; // smoothing length of the cone part at o

    void validate() const {
        if (n < 2 || n > 3) throw ConfigError("MetricSpec: n must be 2 or 3");
        if (perturbation.kind == PerturbationKind::rotational_cap) {
            if (!(perturbation.transition_radius > 0.0))
                throw ConfigError("MetricSpec: transition_radius must be > 0");
            if (!(perturbation.profile_exponent >= 3.0))
                throw ConfigError("MetricSpec: profile_exponent must be >= 3 (C^2)");
        }
        if (perturbation.kind == PerturbationKind::power_bump) {
            const double s2 = alpha.sin_alpha * alpha.sin_alpha;
            if (!(std::abs(perturbation.amplitude) < s2))
                throw ConfigError("MetricSpec: |amplitude| must be < sin^2(alpha)");
            if (!(perturbation.mu > 0.0))
                throw ConfigError("MetricSpec: mu must be > 0");
            if (!(perturbation.center_scale > 0.0))
                throw ConfigError("MetricSpec: center_scale must be > 0");
        }
        if (regularization_delta < 0.0)
            throw ConfigError("MetricSpec: regularization_delta must be >= 0");
    }
};

using MetricValue = Mat;

// ---------------------------------------------------------------------------
// Metric evaluation
// ---------------------------------------------------------------------------

inline MetricValue cone_metric_at(const Vec& x, const OpeningAngle& alpha,
                                  double regularization_delta) {
    const double r2 = dot(x, x);
    const double q = r2 + regularization_delta * regularization_delta;
    if (!(q > 0.0))
        throw SingularPointError("cone_metric_at: apex with zero regularization");
    const double s2 = alpha.sin_alpha * alpha.sin_alpha;
    const double c2 = 1.0 - s2;
    Mat g = s2 * Mat::identity(x.n);
    g += (c2 / q) * outer(x);
    return g;
}

namespace detail {

// The cap's effective radial projector denominator |x|^2 + sm(|x|)^2.
inline double cap_denominator(const Vec& x, const Perturbation& pert) {
    const double r2 = dot(x, x);
    const double R = pert.transition_radius;
    if (r2 >= R * R) return r2;
    const double u2 = r2 / (R * R);
    const double sm = R * std::pow(1.0 - u2, pert.profile_exponent);
    return r2 + sm * sm;
}

}  // namespace detail

// Perturbation part A(x) alone (zero matrix for kind none).
inline Mat perturbation_at(const MetricSpec& spec, const Vec& x) {
    switch (spec.perturbation.kind) {
        case PerturbationKind::none:
            return Mat::zero(spec.n);
        case PerturbationKind::rotational_cap: {
            const double r2 = dot(x, x);
            const double R = spec.perturbation.transition_radius;
            if (r2 >= R * R) return Mat::zero(spec.n);
            const double c2 = 1.0 - spec.alpha.sin_alpha * spec.alpha.sin_alpha;
            const double q_cap = detail::cap_denominator(x, spec.perturbation);
            const double d2 = spec.regularization_delta * spec.regularization_delta;
            const double q_cone = r2 + d2;
            Mat a = Mat::zero(spec.n);
            if (q_cone > 0.0) {
                a = (c2 / q_cap - c2 / q_cone) * outer(x);
            } else {
                a = (c2 / q_cap) * outer(x);  // cone part singular; cap is smooth
            }
            return a;
        }
        case PerturbationKind::power_bump: {
            const double c0 = spec.perturbation.center_scale;
            const double w = c0 * c0 / (c0 * c0 + dot(x, x));
            const double amp =
                spec.perturbation.amplitude * std::pow(w, 0.5 * spec.perturbation.mu);
            return amp * Mat::identity(spec.n);
        }
    }
    throw ConfigError("perturbation_at: unknown kind");
}

inline MetricValue metric_at(const MetricSpec& spec, const Vec& x) {
    if (spec.perturbation.kind == PerturbationKind::rotational_cap) {
        // Assemble directly so the cap regularizes the apex even at delta = 0.
        const double s2 = spec.alpha.sin_alpha * spec.alpha.sin_alpha;
        const double c2 = 1.0 - s2;
        const double r2 = dot(x, x);
        const double R = spec.perturbation.transition_radius;
        const double d2 = spec.regularization_delta * spec.regularization_delta;
        const double q = (r2 >= R * R) ? r2 + d2
                                       : detail::cap_denominator(x, spec.perturbation) + d2;
        Mat g = s2 * Mat::identity(spec.n);
        g += (c2 / q) * outer(x);
        return g;
    }
    Mat g = cone_metric_at(x, spec.alpha, spec.regularization_delta);
    g += perturbation_at(spec, x);
    return g;
}

// ---------------------------------------------------------------------------
// Rescaling g -> g^(lambda)
// ---------------------------------------------------------------------------

// Returns spec' with metric_at(spec', x) = metric_at(spec, lambda x): every
// length-scale parameter shrinks by lambda. The exact cone is a fixed point.
inline MetricSpec rescale(const MetricSpec& spec, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("rescale: lambda must be > 0");
    MetricSpec out = spec;
    out.regularization_delta /= lambda;
    out.perturbation.transition_radius /= lambda;
    out.perturbation.center_scale /= lambda;
    return out;
}

// ---------------------------------------------------------------------------
// Decay radius R_epsilon
// ---------------------------------------------------------------------------

namespace detail {

// Max |a_ij| over 64 deterministic directions at radius r.
inline double perturbation_sup_at_radius(const MetricSpec& spec, double r) {
    double m = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double u = (k + 0.5) / 64.0;
        Vec dir;
        if (spec.n == 2) {
            dir = Vec(std::cos(2.0 * kPi * u), std::sin(2.0 * kPi * u));
        } else {
            const double z = 1.0 - 2.0 * u;  // uniform in z, golden-angle azimuth
            const double az = 2.0 * kPi * u * 38.0;
            const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
            dir = Vec(rr * std::cos(az), rr * std::sin(az), z);
        }
        const Mat a = perturbation_at(spec, r * dir);
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j) m = std::max(m, std::abs(a(i, j)));
    }
    return m;
}

}  // namespace detail

// Smallest radius R (log-grid bisection, 64 angular samples) such that
// max |a_ij| <= eps outside B(o, R). Throws NumericalError when the
// perturbation never falls below eps within the probed range.
inline double R_epsilon(const MetricSpec& spec, double eps) {
    if (!(eps > 0.0) || !(eps < 0.5)) throw ConfigError("R_epsilon: eps must be in (0, 1/2)");
    if (spec.perturbation.kind == PerturbationKind::none) return 0.0;
    const double lo = 1e-3, hi = 1e6;
    if (detail::perturbation_sup_at_radius(spec, hi) > eps)
        throw NumericalError("R_epsilon: perturbation never below eps (unbounded)");
    if (detail::perturbation_sup_at_radius(spec, lo) <= eps) {
        // Both families decay monotonically outward; already small everywhere.
        return 0.0;
    }
    // Bisect on the log grid for the threshold radius.
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (detail::perturbation_sup_at_radius(spec, std::exp(m)) <= eps)
            b = m;
        else
            a = m;
        if (b - a < 1e-12) break;
    }
    return std::exp(b);
}

// ---------------------------------------------------------------------------
// Metric derivatives and Christoffel symbols (finite differences)
// ---------------------------------------------------------------------------

inline constexpr double kMetricFdStep = 1e-5;  // relative step default

// Central difference of the metric in direction l, step h * max(1, |x|).
inline Mat metric_partial(const MetricSpec& spec, const Vec& x, int l, double h) {
    const double step = h * std::max(1.0, norm(x));
    Vec xp = x, xm = x;
    xp[l] += step;
    xm[l] -= step;
    Mat d = metric_at(spec, xp);
    d -= metric_at(spec, xm);
    d *= 1.0 / (2.0 * step);
    return d;
}

// Gamma[k](i,j), symmetric in (i, j) by construction.
inline std::array<Mat, 3> christoffel_at(const MetricSpec& spec, const Vec& x,
                                         double h = kMetricFdStep) {
    const int n = spec.n;
    const Mat g = metric_at(spec, x);
    std::array<Mat, 3> dg;  // dg[l] = d_l g
    for (int l = 0; l < n; ++l) dg[static_cast<std::size_t>(l)] = metric_partial(spec, x, l, h);
    std::array<Mat, 3> gamma;
    for (auto& m : gamma) m = Mat::zero(n);
    // First solve for the lowered symbols, then raise the first index.
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vec rhs = Vec::zero(n);
            for (int l = 0; l < n; ++l)
                rhs[l] = 0.5 * (dg[static_cast<std::size_t>(i)](l, j) +
                                dg[static_cast<std::size_t>(j)](l, i) -
                                dg[static_cast<std::size_t>(l)](i, j));
            Vec gk;
            try {
                gk = solve_spd(g, rhs);
            } catch (const NumericalError&) {
                throw SingularPointError("christoffel_at: metric not invertible");
            }
            for (int k = 0; k < n; ++k) {
                gamma[static_cast<std::size_t>(k)](i, j) = gk[k];
                gamma[static_cast<std::size_t>(k)](j, i) = gk[k];
            }
        }
    }
    return gamma;
}

// ---------------------------------------------------------------------------
// Empirical smallness measurement
// ---------------------------------------------------------------------------

// Measured stand-in for the product C* eps at scale rho: the max of the
// radial distance defect |d_g(o, rho a)/rho - 1| along generatrices and the
// worst metric-vs-cone norm-ratio deviation on the annulus [rho/2, rho].
inline double empirical_c_star_eps(const MetricSpec& spec, double rho) {
    if (!(rho > 0.0)) throw ConfigError("empirical_c_star_eps: rho must be > 0");
    double worst = 0.0;
    const int dirs = spec.n == 2 ? 8 : 16;
    for (int k = 0; k < dirs; ++k) {
        const double u = (k + 0.5) / dirs;
        Vec dir;
        if (spec.n == 2) {
            dir = Vec(std::cos(2.0 * kPi * u), std::sin(2.0 * kPi * u));
        } else {
            const double z = 1.0 - 2.0 * u;
            const double az = 2.0 * kPi * u * 38.0;
            const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
            dir = Vec(rr * std::cos(az), rr * std::sin(az), z);
        }
        // Radial defect: integrate sqrt(g(dir, dir)) from 0 to rho (composite
        // Gauss-Legendre over 64 panels to resolve the perturbed core).
        double len = 0.0;
        const int panels = 64;
        for (int pnl = 0; pnl < panels; ++pnl) {
            const double t0 = rho * pnl / panels, t1 = rho * (pnl + 1) / panels;
            for (int j = 0; j < 16; ++j) {
                const double t =
                    t0 + (t1 - t0) * detail::gl16_nodes()[static_cast<std::size_t>(j)];
                const double w =
                    (t1 - t0) * detail::gl16_weights()[static_cast<std::size_t>(j)];
                if (t == 0.0) continue;
                len += w * std::sqrt(metric_at(spec, t * dir).quad(dir));
            }
        }
        worst = std::max(worst, std::abs(len / rho - 1.0));
        // Norm-ratio deviation against the exact cone on the annulus.
        for (double frac : {0.5, 0.75, 1.0}) {
            const Vec x = (frac * rho) * dir;
            const Mat g = metric_at(spec, x);
            const Mat gc = cone_metric_at(x, spec.alpha, 0.0);
            for (int axis = 0; axis < spec.n; ++axis) {
                const Vec v = Vec::unit(spec.n, axis);
                const double ratio = std::sqrt(g.quad(v) / gc.quad(v));
                worst = std::max(worst, std::abs(ratio - 1.0));
            }
        }
    }
    return worst;
}

}  // namespace acgeo

#endif  // ACGEO_AC_METRIC_HPP
