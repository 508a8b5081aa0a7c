#ifndef ACGEO_WEDGE_ORACLE_HPP
#define ACGEO_WEDGE_ORACLE_HPP

// Brute-force cross-validation oracle for cone geodesics, independent of the
// closed-form enumeration: polyline length minimization in the unfolded
// covering, constrained to a fixed fan of rays.
//
// A geodesic class between radii rho0, rho1 whose unfolded chord subtends the
// angle Phi is modeled by a polyline with one vertex per ray phi_j = j Phi/m,
// the endpoint radii pinned. Minimizing total Euclidean length over the free
// radii r_j >= 0 is a convex problem; cyclic coordinate descent with the
// exact single-ray minimizer (reflection trick) converges to the global
// minimum. A class "collapses" -- the minimizer runs through the apex and its
// length degenerates to rho0 + rho1 -- exactly when no interior chord exists.

#include <cmath>
#include <vector>

#include "acgeo/core.hpp"

namespace acgeo {

struct OracleResult {
    double length = 0.0;
    double min_radius = 0.0;  // min over interior vertices
    int sweeps = 0;
    bool converged = false;
    bool admissible = false;  // interior minimizer strictly shorter than rho0+rho1
};

namespace detail {

// Exact minimizer over r >= 0 of |P - r u| + |Q - r u| for a ray direction u:
// reflect Q across the u-axis when both points sit on the same side, then
// intersect the segment with the axis.
inline double ray_point_minimizer(double pu, double pv, double qu, double qv) {
    if (pv == 0.0 && qv == 0.0) {
        // Degenerate: both neighbors on the axis; any r between them is
        // optimal, pick the midpoint of the bracket.
        const double lo = std::min(pu, qu), hi = std::max(pu, qu);
        return std::max(0.0, 0.5 * (lo + hi));
    }
    if (pv * qv > 0.0) qv = -qv;  // reflection trick
    const double denom = pv - qv;
    const double t = denom != 0.0 ? pv / denom : 0.5;
    const double r = pu + t * (qu - pu);
    return std::max(0.0, r);
}

}  // namespace detail

// Minimize polyline length over radii on rays spanning the angle Phi, with
// endpoint radii rho0, rho1 fixed.
inline OracleResult wedge_constrained_min_length(double rho0, double rho1, double Phi,
                                                 int rays = 400, int max_sweeps = 400000,
                                                 double tol = 1e-12) {
    if (!(rho0 > 0.0) || !(rho1 > 0.0))
        throw ConfigError("wedge_constrained_min_length: radii must be > 0");
    if (!(Phi > 0.0)) throw ConfigError("wedge_constrained_min_length: Phi must be > 0");
    if (rays < 8) throw ConfigError("wedge_constrained_min_length: need >= 8 rays");

    const int m = rays;
    std::vector<double> cs(static_cast<std::size_t>(m) + 1),
        sn(static_cast<std::size_t>(m) + 1), r(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) {
        const double phi = Phi * j / m;
        cs[static_cast<std::size_t>(j)] = std::cos(phi);
        sn[static_cast<std::size_t>(j)] = std::sin(phi);
        // Neutral initialization: linear radius interpolation.
        r[static_cast<std::size_t>(j)] = rho0 + (rho1 - rho0) * j / m;
    }
    r[0] = rho0;
    r[static_cast<std::size_t>(m)] = rho1;

    auto total_length = [&]() {
        double L = 0.0;
        for (int j = 0; j < m; ++j) {
            const double ax = r[static_cast<std::size_t>(j)] * cs[static_cast<std::size_t>(j)];
            const double ay = r[static_cast<std::size_t>(j)] * sn[static_cast<std::size_t>(j)];
            const double bx =
                r[static_cast<std::size_t>(j + 1)] * cs[static_cast<std::size_t>(j + 1)];
            const double by =
                r[static_cast<std::size_t>(j + 1)] * sn[static_cast<std::size_t>(j + 1)];
            L += std::hypot(bx - ax, by - ay);
        }
        return L;
    };

    OracleResult res;
    double prev = total_length();
    const double scale = rho0 + rho1;
    for (res.sweeps = 1; res.sweeps <= max_sweeps; ++res.sweeps) {
        for (int j = 1; j < m; ++j) {
            // Coordinates of the neighbors in the frame of ray j.
            const std::size_t js = static_cast<std::size_t>(j);
            const double u0 = cs[js], v0 = sn[js];
            auto in_frame = [&](int k, double& pu, double& pv) {
                const std::size_t ks = static_cast<std::size_t>(k);
                const double x = r[ks] * cs[ks], y = r[ks] * sn[ks];
                pu = x * u0 + y * v0;
                pv = -x * v0 + y * u0;
            };
            double pu, pv, qu, qv;
            in_frame(j - 1, pu, pv);
            in_frame(j + 1, qu, qv);
            const double rstar = detail::ray_point_minimizer(pu, pv, qu, qv);
            // Over-relaxation accelerates the chain's Gauss-Seidel rate; the
            // problem stays convex and the positivity constraint is re-applied.
            const double omega = 1.8;
            r[js] = std::max(0.0, r[js] + omega * (rstar - r[js]));
        }
        const double cur = total_length();
        if (prev - cur < tol * scale) {
            res.converged = true;
            prev = cur;
            break;
        }
        prev = cur;
    }
    res.length = prev;
    res.min_radius = *std::min_element(r.begin() + 1, r.end() - 1);
    res.admissible =
        res.min_radius > 1e-6 * scale && res.length < scale * (1.0 - 1e-4);
    return res;
}

// Enumerates admissible antipodal winding classes purely through the oracle:
// winding k corresponds to the subtended covering angle (2k+1) pi sin(alpha).
// Returns the minimized length per admissible k, in ascending k.
inline std::vector<double> oracle_antipodal_lengths(double rho, double sin_alpha,
                                                    int rays = 400) {
    std::vector<double> lengths;
    const int kmax = static_cast<int>(std::ceil(1.0 / sin_alpha)) + 1;
    for (int k = 0; k <= kmax; ++k) {
        const double Phi = (2 * k + 1) * kPi * sin_alpha;
        const OracleResult res = wedge_constrained_min_length(rho, rho, Phi, rays);
        if (!res.admissible) break;  // lengths increase in k; first collapse ends the list
        lengths.push_back(res.length);
    }
    return lengths;
}

}  // namespace acgeo

#endif  // ACGEO_WEDGE_ORACLE_HPP
