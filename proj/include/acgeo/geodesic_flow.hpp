#ifndef ACGEO_GEODESIC_FLOW_HPP
#define ACGEO_GEODESIC_FLOW_HPP

// Geodesic ODE integration (embedded Dormand-Prince 4(5) pair with PI step
// control), the exponential map, and the properness probe.

#include <cmath>
#include <string>
#include <vector>

#include "acgeo/ac_metric.hpp"
#include "acgeo/core.hpp"

namespace acgeo {

struct GeodesicState {
    Vec x;          // position
    Vec v;          // velocity
    double t = 0.0; // affine parameter
};

struct Trajectory {
    std::vector<GeodesicState> samples;
    double tol = 0.0;          // requested tolerance
    double speed_drift = 0.0;  // max | |v|_g - |v0|_g | over accepted samples
};

// Step collapse near a metric singularity; carries the last good state.
struct SingularityEncounter : NumericalError {
    GeodesicState last;
    explicit SingularityEncounter(const GeodesicState& s)
        : NumericalError("geodesic integration: step collapse near singularity at t = " +
                         std::to_string(s.t)),
          last(s) {}
};

namespace detail {

// Right-hand side of the first-order system: (x, v) -> (v, -Gamma(v, v)).
inline void geodesic_rhs(const MetricSpec& spec, const Vec& x, const Vec& v, Vec& dx,
                         Vec& dv) {
    const auto gamma = christoffel_at(spec, x);
    dx = v;
    dv = Vec::zero(spec.n);
    for (int k = 0; k < spec.n; ++k)
        dv[k] = -gamma[static_cast<std::size_t>(k)].quad(v);
}

}  // namespace detail

// Adaptive integration of the geodesic equation from (x0, v0) over [0, T].
inline Trajectory integrate_geodesic(const MetricSpec& spec, const Vec& x0, const Vec& v0,
                                     double T, double tol = 1e-8) {
    spec.validate();
    if (!(T > 0.0)) throw ConfigError("integrate_geodesic: T must be > 0");
    if (!(tol > 0.0)) throw ConfigError("integrate_geodesic: tol must be > 0");

    // Dormand-Prince 5(4) coefficients.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double speed0 = std::sqrt(metric_at(spec, x0).quad(v0));
    Trajectory traj;
    traj.tol = tol;
    GeodesicState st{x0, v0, 0.0};
    traj.samples.push_back(st);

    double h = std::min(T, 1e-2 * T);
    const double hmin = 1e-13 * T;
    double err_prev = 1.0;

    auto scale = [&](const Vec& x, const Vec& v) {
        // Tolerance split equally between position and velocity components.
        return 0.5 * tol * (1.0 + norm(x)) + 0.5 * tol * (1.0 + norm(v));
    };

    // Metrics that are genuinely singular at the apex (no regularization and
    // no smoothing cap) need the step bounded by the distance to o: the
    // Christoffel symbols grow like 1/|x| there, and an unconstrained step
    // can jump clean across the singular region without the embedded error
    // estimate noticing.
    const bool apex_singular = spec.regularization_delta == 0.0 &&
                               spec.perturbation.kind != PerturbationKind::rotational_cap;

    int guard = 0;
    while (st.t < T) {
        if (++guard > 2'000'000)
            throw NumericalError("integrate_geodesic: step budget exhausted");
        h = std::min(h, T - st.t);
        if (apex_singular) {
            const double sp = norm(st.v);
            if (sp > 0.0) h = std::min(h, 0.5 * norm(st.x) / sp);
        }
        Vec k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v, k5x, k5v, k6x, k6v, k7x, k7v;
        bool ok = true;
        try {
            detail::geodesic_rhs(spec, st.x, st.v, k1x, k1v);
            detail::geodesic_rhs(spec, st.x + h * a21 * k1x, st.v + h * a21 * k1v, k2x, k2v);
            detail::geodesic_rhs(spec, st.x + h * (a31 * k1x + a32 * k2x),
                                 st.v + h * (a31 * k1v + a32 * k2v), k3x, k3v);
            detail::geodesic_rhs(spec, st.x + h * (a41 * k1x + a42 * k2x + a43 * k3x),
                                 st.v + h * (a41 * k1v + a42 * k2v + a43 * k3v), k4x, k4v);
            detail::geodesic_rhs(
                spec, st.x + h * (a51 * k1x + a52 * k2x + a53 * k3x + a54 * k4x),
                st.v + h * (a51 * k1v + a52 * k2v + a53 * k3v + a54 * k4v), k5x, k5v);
            detail::geodesic_rhs(
                spec, st.x + h * (a61 * k1x + a62 * k2x + a63 * k3x + a64 * k4x + a65 * k5x),
                st.v + h * (a61 * k1v + a62 * k2v + a63 * k3v + a64 * k4v + a65 * k5v), k6x,
                k6v);
        } catch (const SingularPointError&) {
            ok = false;
        }
        Vec x5, v5;
        double err = 1e30;
        if (ok) {
            x5 = st.x + h * (b1 * k1x + b3 * k3x + b4 * k4x + b5 * k5x + b6 * k6x);
            v5 = st.v + h * (b1 * k1v + b3 * k3v + b4 * k4v + b5 * k5v + b6 * k6v);
            try {
                detail::geodesic_rhs(spec, x5, v5, k7x, k7v);  // FSAL stage, error only
                err = 0.0;
                for (int i = 0; i < spec.n; ++i) {
                    const double ex =
                        h * (e1 * k1x[i] + e3 * k3x[i] + e4 * k4x[i] + e5 * k5x[i] +
                             e6 * k6x[i] + e7 * k7x[i]);
                    const double ev =
                        h * (e1 * k1v[i] + e3 * k3v[i] + e4 * k4v[i] + e5 * k5v[i] +
                             e6 * k6v[i] + e7 * k7v[i]);
                    err = std::max(err, std::max(std::abs(ex), std::abs(ev)));
                }
                err /= scale(st.x, st.v);
            } catch (const SingularPointError&) {
                ok = false;
                err = 1e30;
            }
        }
        if (ok && err <= 1.0) {
            st.x = x5;
            st.v = v5;
            st.t += h;
            traj.samples.push_back(st);
            const double sp = std::sqrt(metric_at(spec, st.x).quad(st.v));
            traj.speed_drift = std::max(traj.speed_drift, std::abs(sp - speed0));
            // PI controller (order 5/4).
            const double fac = 0.9 * std::pow(err + 1e-16, -0.7 / 5.0) *
                               std::pow(err_prev + 1e-16, 0.4 / 5.0);
            err_prev = err;
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            h *= ok ? std::max(0.2, 0.9 * std::pow(err, -0.25)) : 0.25;
        }
        if (h < hmin) throw SingularityEncounter(st);
    }
    return traj;
}

inline Vec exp_map(const MetricSpec& spec, const Vec& x, const Vec& v, double tol = 1e-8) {
    if (norm(v) == 0.0) return x;
    return integrate_geodesic(spec, x, v, 1.0, tol).samples.back().x;
}

// ---------------------------------------------------------------------------
// Properness probe
// ---------------------------------------------------------------------------

struct ProbeResult {
    bool nonproper_suspect = false;
    int offending_direction = -1;
    double T_estimate = 0.0;                 // max last-exit time over directions
    std::vector<double> per_direction_exit;  // last-exit time per direction
    std::vector<std::string> failures;       // per-direction integrator failures
};

// Integrates unit-speed rays in quasi-uniform directions from x; a ray counts
// as escaped from B(o, r) if after its last recorded exit (|x| > r with
// positive radial speed) it stays outside through the end of the horizon.
// Directions that never permanently exit before T_max flag nonproper_suspect.
inline ProbeResult properness_probe(const MetricSpec& spec, const Vec& x, double r,
                                    int direction_count, double T_max, double tol = 1e-8) {
    spec.validate();
    if (direction_count < 1) throw ConfigError("properness_probe: need >= 1 direction");
    ProbeResult res;
    res.per_direction_exit.assign(static_cast<std::size_t>(direction_count), -1.0);
    for (int d = 0; d < direction_count; ++d) {
        Vec dir;
        if (spec.n == 2) {
            const double ang = 2.0 * kPi * d / direction_count;
            dir = Vec(std::cos(ang), std::sin(ang));
        } else {
            // Fibonacci sphere.
            const double z = 1.0 - (2.0 * d + 1.0) / direction_count;
            const double az = kPi * (1.0 + std::sqrt(5.0)) * d;
            const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
            dir = Vec(rr * std::cos(az), rr * std::sin(az), z);
        }
        // Normalize to unit g-speed at x.
        const double sp = std::sqrt(metric_at(spec, x).quad(dir));
        Trajectory traj;
        try {
            traj = integrate_geodesic(spec, x, dir / sp, T_max, tol);
        } catch (const SingularityEncounter& e) {
            res.failures.push_back("direction " + std::to_string(d) + ": " + e.what());
            res.nonproper_suspect = true;
            if (res.offending_direction < 0) res.offending_direction = d;
            continue;
        }
        // Last-exit detection: scan every accepted sample, remember the most
        // recent transition to "outside with positive radial speed".
        double last_exit = -1.0;
        bool outside = false;
        for (std::size_t i = 1; i < traj.samples.size(); ++i) {
            const auto& s = traj.samples[i];
            const double rad = norm(s.x);
            const double radial_speed = rad > 0.0 ? dot(s.x, s.v) / rad : 0.0;
            if (rad > r && radial_speed > 0.0) {
                if (!outside) {
                    last_exit = s.t;
                    outside = true;
                }
            } else {
                outside = false;
            }
        }
        const bool escaped = outside && norm(traj.samples.back().x) > r;
        if (escaped) {
            res.per_direction_exit[static_cast<std::size_t>(d)] = last_exit;
            res.T_estimate = std::max(res.T_estimate, last_exit);
        } else {
            res.nonproper_suspect = true;
            if (res.offending_direction < 0) res.offending_direction = d;
        }
    }
    return res;
}

}  // namespace acgeo

#endif  // ACGEO_GEODESIC_FLOW_HPP
