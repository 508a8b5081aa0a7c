#ifndef ACGEO_CONE_GEOMETRY_HPP
#define ACGEO_CONE_GEOMETRY_HPP

// Exact, closed-form geometry of the standard cone: the wedge unfolding
// isometry, enumeration of geodesic segments between antipodal points, the
// minimizing family L_xi, limit angles of geodesic lines, and the departure
// angle inequality check.
//
// Conventions. The cone metric in Cartesian chart coordinates is
//   g_ij = sin^2(alpha) delta_ij + cos^2(alpha) x_i x_j / |x|^2.
// A totally geodesic 2-plane through the apex unfolds isometrically onto the
// planar wedge of total angle 2 pi sin(alpha) via phi = sin(alpha) * theta,
// where theta is the chart plane angle. Geodesics avoiding the apex become
// straight chords across adjacent wedge copies. A chord joining antipodal
// points with winding index k >= 0 subtends the unfolded angle
//   Phi_k = (2k+1) pi sin(alpha),
// is admissible iff Phi_k < pi, and has length 2 rho sin(Phi_k / 2). All
// angles reported to callers are Euclidean chart angles, reconstructed from
// chart tangent vectors.

#include <cmath>
#include <numbers>
#include <vector>

#include "acgeo/core.hpp"
#include "acgeo/curve.hpp"

namespace acgeo {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct OpeningAngle {
    double alpha = 0.0;      // in (0, pi/2)
    double sin_alpha = 0.0;  // cached sine
    bool excluded = false;   // sin_alpha within 1e-12 of 1/(2k+1), k >= 1

    static OpeningAngle from_sin(double s) {
        if (!(s > 0.0) || !(s < 1.0))
            throw ConfigError("OpeningAngle: sin(alpha) must lie in (0, 1)");
        OpeningAngle a;
        a.sin_alpha = s;
        a.alpha = std::asin(s);
        // s = 1/(2k+1)  <=>  k = (1/s - 1)/2
        const double k = (1.0 / s - 1.0) / 2.0;
        const double kr = std::round(k);
        a.excluded = kr >= 1.0 && std::abs(s - 1.0 / (2.0 * kr + 1.0)) < 1e-12;
        return a;
    }

    static OpeningAngle from_alpha(double alpha) {
        if (!(alpha > 0.0) || !(alpha < kPi / 2.0))
            throw ConfigError("OpeningAngle: alpha must lie in (0, pi/2)");
        return from_sin(std::sin(alpha));
    }
};

struct PolarPoint {
    double rho = 0.0;  // radius >= 0
    Vec theta;         // unit vector on S^{n-1}
};

// Point of the unfolded wedge W_{2 pi sin(alpha)}; phi is stored with its
// representative in [-pi sin(alpha), pi sin(alpha)).
struct WedgePoint {
    double rho = 0.0;
    double phi = 0.0;
};

// One geodesic segment between the antipodal chart points p = rho e_a and
// q = -rho e_a, lying in the 2-plane span{e_a, xi}.
struct ConeGeodesicDescriptor {
    int n = 2;
    OpeningAngle alpha;
    double rho = 0.0;
    Vec p, q;                     // Cartesian endpoints, q = -p
    Vec xi;                       // unit vector orthogonal to p spanning the plane
    int winding = 0;              // k >= 0
    int sign = +1;                // orientation: initial velocity leans toward sign*xi
    double subtended = 0.0;       // unfolded chord angle Phi_k = (2k+1) pi sin(alpha)
    double length = 0.0;          // 2 rho sin(Phi_k / 2)
    double departure_angle = 0.0; // chart angle between -p and the initial velocity
};

// ---------------------------------------------------------------------------
// Unfolding isometry
// ---------------------------------------------------------------------------

// Reduce a wedge angle to its representative in [-pi s, pi s).
inline double normalize_wedge_angle(double phi, const OpeningAngle& alpha) {
    const double period = 2.0 * kPi * alpha.sin_alpha;
    double r = std::remainder(phi, period);  // (-period/2, period/2]
    if (r == period / 2.0) r = -period / 2.0;
    return r;
}

// p lives in a fixed totally geodesic 2-plane; theta is its unit direction in
// that plane's orthonormal basis, so the signed plane angle is atan2-based.
inline WedgePoint unfold(const PolarPoint& p, const OpeningAngle& alpha) {
    if (p.rho == 0.0) return WedgePoint{0.0, 0.0};  // apex maps to apex
    const double plane_angle = std::atan2(p.theta[1], p.theta[0]);
    return WedgePoint{p.rho, normalize_wedge_angle(alpha.sin_alpha * plane_angle, alpha)};
}

inline PolarPoint fold(const WedgePoint& w, const OpeningAngle& alpha) {
    PolarPoint p;
    p.rho = w.rho;
    const double plane_angle = w.phi / alpha.sin_alpha;
    p.theta = Vec(std::cos(plane_angle), std::sin(plane_angle));
    return p;
}

// ---------------------------------------------------------------------------
// Minimizing length between equal-radius points
// ---------------------------------------------------------------------------

inline double minimizing_length(const PolarPoint& p, const PolarPoint& q,
                                const OpeningAngle& alpha) {
    if (!(p.rho > 0.0) || !(q.rho > 0.0))
        throw ConfigError("minimizing_length: degenerate point at the apex");
    const double ang = angle_between(p.theta, q.theta);
    return 2.0 * p.rho * std::sin(0.5 * ang * alpha.sin_alpha);
}

// ---------------------------------------------------------------------------
// Geodesic chords between antipodal points
// ---------------------------------------------------------------------------

namespace detail {

// Chart tangent of the unfolded chord at parameter t. The chord runs from
// A = (rho, 0) to B = rho (cos Phi, sin Phi) in wedge Cartesian coordinates;
// the cone chart point is r (cos(phi/s) e_a + sin(phi/s) e_b).
struct WedgeChord {
    double rho, Phi, s;

    void wedge_at(double t, double& wx, double& wy, double& dwx, double& dwy) const {
        const double bx = rho * std::cos(Phi), by = rho * std::sin(Phi);
        dwx = bx - rho;
        dwy = by;
        wx = rho + t * dwx;
        wy = t * dwy;
    }

    // Chart position (u, v) in the plane basis (e_a, e_b) and its t-derivative.
    void chart_at(double t, double& u, double& v, double& du, double& dv) const {
        double wx, wy, dwx, dwy;
        wedge_at(t, wx, wy, dwx, dwy);
        const double r = std::hypot(wx, wy);
        const double phi = std::atan2(wy, wx);  // in [0, Phi], Phi < pi
        const double th = phi / s;
        const double ct = std::cos(th), st = std::sin(th);
        u = r * ct;
        v = r * st;
        const double dr = (wx * dwx + wy * dwy) / r;
        const double dphi = (wx * dwy - wy * dwx) / (r * r);
        const double dth = dphi / s;
        du = dr * ct - r * st * dth;
        dv = dr * st + r * ct * dth;
    }
};

}  // namespace detail

inline std::vector<ConeGeodesicDescriptor> enumerate_antipodal_geodesics(
    double rho, const OpeningAngle& alpha, int n) {
    if (!(rho > 0.0)) throw ConfigError("enumerate_antipodal_geodesics: rho must be > 0");
    if (n < 2) throw ConfigError("enumerate_antipodal_geodesics: n must be >= 2");
    const double s = alpha.sin_alpha;
    std::vector<ConeGeodesicDescriptor> out;
    for (int k = 0;; ++k) {
        const double Phi = (2 * k + 1) * kPi * s;
        if (!(Phi < kPi * (1.0 - 1e-12))) break;  // admissibility: Phi_k < pi
        for (int sign : {+1, -1}) {
            ConeGeodesicDescriptor d;
            d.n = n;
            d.alpha = alpha;
            d.rho = rho;
            d.p = rho * Vec::unit(n, 0);
            d.q = -1.0 * d.p;
            d.xi = Vec::unit(n, 1);
            d.winding = k;
            d.sign = sign;
            d.subtended = Phi;
            d.length = 2.0 * rho * std::sin(0.5 * Phi);
            // Chart velocity at t = 0 in the (e_a, sign*xi) basis is
            // (rho (cos Phi - 1), rho sin(Phi)/s); the departure angle is
            // measured against -p, i.e. against -e_a.
            d.departure_angle = std::atan2(std::sin(Phi) / s, 1.0 - std::cos(Phi));
            out.push_back(d);
        }
    }
    return out;
}

// Constant-speed evaluation of a descriptor's chord; endpoints exact.
inline Vec eval_cone_geodesic(const ConeGeodesicDescriptor& d, double t) {
    if (t == 0.0) return d.p;
    if (t == 1.0) return d.q;
    const detail::WedgeChord ch{d.rho, d.subtended, d.alpha.sin_alpha};
    double u, v, du, dv;
    ch.chart_at(t, u, v, du, dv);
    const Vec e_a = d.p / d.rho;
    const Vec e_b = static_cast<double>(d.sign) * d.xi;
    return u * e_a + v * e_b;
}

// Chart velocity (d/dt of eval_cone_geodesic), exposed for angle checks.
inline Vec eval_cone_geodesic_velocity(const ConeGeodesicDescriptor& d, double t) {
    const detail::WedgeChord ch{d.rho, d.subtended, d.alpha.sin_alpha};
    double u, v, du, dv;
    ch.chart_at(t, u, v, du, dv);
    const Vec e_a = d.p / d.rho;
    const Vec e_b = static_cast<double>(d.sign) * d.xi;
    return du * e_a + dv * e_b;
}

// The winding-0 minimizer L_xi joining antipodal p, q inside the plane
// span{p, xi}, meeting the ray R+ xi, sampled at N+1 constant-speed nodes.
inline DiscreteCurve minimizing_family(const Vec& p, const Vec& q, const Vec& xi,
                                       const OpeningAngle& alpha, int N) {
    const double rho = norm(p);
    if (!(rho > 0.0)) throw ConfigError("minimizing_family: p at the apex");
    if (norm(p + q) > 1e-9 * rho)
        throw ConfigError("minimizing_family: p, q not antipodal");
    if (std::abs(norm(xi) - 1.0) > 1e-9)
        throw ConfigError("minimizing_family: xi not a unit vector");
    if (std::abs(dot(p, xi)) > 1e-9 * rho)
        throw ConfigError("minimizing_family: xi not orthogonal to p");
    ConeGeodesicDescriptor d;
    d.n = p.n;
    d.alpha = alpha;
    d.rho = rho;
    d.p = p;
    d.q = q;
    d.xi = xi;
    d.winding = 0;
    d.sign = +1;  // chord bulges toward +xi, so it meets the ray R+ xi
    d.subtended = kPi * alpha.sin_alpha;
    d.length = 2.0 * rho * std::sin(0.5 * d.subtended);
    d.departure_angle =
        std::atan2(std::sin(d.subtended) / alpha.sin_alpha, 1.0 - std::cos(d.subtended));
    DiscreteCurve c;
    c.pts.reserve(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i)
        c.pts.push_back(eval_cone_geodesic(d, static_cast<double>(i) / N));
    return c;
}

// ---------------------------------------------------------------------------
// Limit angle of geodesic lines
// ---------------------------------------------------------------------------

struct LimitAngle {
    int K = 0;           // unique integer in (1/(2s) - 1/2, 1/(2s) + 1/2]
    double angle = 0.0;  // |2 pi K s - pi| / s in [0, pi]
};

inline LimitAngle limit_angle(const OpeningAngle& alpha) {
    const double s = alpha.sin_alpha;
    const double x = 1.0 / (2.0 * s);
    LimitAngle la;
    la.K = static_cast<int>(std::floor(x + 0.5));
    la.angle = std::abs(2.0 * kPi * la.K * s - kPi) / s;
    return la;
}

// Numerical cross-check: the chart angle between the two ends of a geodesic
// line at covering distance 1 from the apex, evaluated at parameter t. The
// line is r(u) = sqrt(1 + u^2), phi(u) = atan(u) in covering coordinates, so
// the chart end directions have angles theta(+-t) = atan(+-t)/s.
inline double measure_line_end_angle(const OpeningAngle& alpha, double t) {
    const double th = std::atan(t) / alpha.sin_alpha;
    const Vec plus(std::cos(th), std::sin(th));
    const Vec minus(std::cos(-th), std::sin(-th));
    return angle_between(plus, minus);
}

// ---------------------------------------------------------------------------
// Departure angle inequality (randomized property-test helper)
// ---------------------------------------------------------------------------

struct DepartureCheck {
    bool holds = false;          // metric angle(v(1), -b) >= unfolded angle(a, b) - 1e-9
    bool assumption_ok = false;  // the chord stays outside B(o, eta)
    double lhs = 0.0, rhs = 0.0;      // angles of the metric (wedge) reading
    double lhs_chart = 0.0, rhs_chart = 0.0;  // chart-Euclidean angles, reported only
};

// Checks the departure inequality for the cone geodesic joining a (|a| = 1)
// to eta*b realized as the straight chord into the wedge copy with index m.
// Inputs are unit chart 2-vectors.
//
// Angles are measured in the cone metric, which under the unfolding isometry
// makes both sides wedge-Euclidean: lhs is the angle at the inner endpoint
// between the incoming chord and the inward radial direction, rhs the
// unfolded angle subtended by a and b. (Reading both sides as chart-Euclidean
// angles instead is falsifiable: a chord tangent to the ball at its endpoint
// gives lhs_chart < rhs_chart. The chart values are reported for inspection.)
inline DepartureCheck departure_angle_inequality_check(const Vec& a, const Vec& b,
                                                       double eta,
                                                       const OpeningAngle& alpha,
                                                       int copy_index) {
    const double s = alpha.sin_alpha;
    // Chart angle from a to b, signed.
    const double cross = a[0] * b[1] - a[1] * b[0];
    const double theta_b = std::atan2(cross, dot(a, b));
    const double phi_b = s * (theta_b + 2.0 * kPi * copy_index);
    // Wedge chord A -> B with A = (1, 0) aligned to a.
    const double ax = 1.0, ay = 0.0;
    const double bx = eta * std::cos(phi_b), by = eta * std::sin(phi_b);
    const double dx = bx - ax, dy = by - ay;
    DepartureCheck res;
    // Assumption: the chord avoids the open ball B(o, eta).
    const double seg2 = dx * dx + dy * dy;
    double tfoot = seg2 > 0.0 ? -(ax * dx + ay * dy) / seg2 : 0.0;
    tfoot = std::clamp(tfoot, 0.0, 1.0);
    const double fx = ax + tfoot * dx, fy = ay + tfoot * dy;
    res.assumption_ok = std::hypot(fx, fy) >= eta * (1.0 - 1e-9);
    // Metric (wedge) angles: the incoming chord direction d against the
    // inward radial direction -B at the endpoint equals pi minus the angle
    // between -d and the outward radial B.
    const Vec bhat(std::cos(phi_b), std::sin(phi_b));
    res.lhs = angle_between(Vec(-dx, -dy), bhat);
    // Unfolded apex angle between the a and b copies, folded into [0, pi].
    res.rhs = std::acos(std::clamp(std::cos(phi_b), -1.0, 1.0));
    res.holds = res.lhs >= res.rhs - 1e-9;
    // Chart-Euclidean angles, for reporting only.
    const double r1 = eta;
    if (r1 > 0.0) {
        const double dr = (bx * dx + by * dy) / r1;
        const double dphi = (bx * dy - by * dx) / (r1 * r1);
        const double th1 = phi_b / s;  // chart angle of the endpoint
        const double ct = std::cos(th1), st = std::sin(th1);
        const Vec v(dr * ct - r1 * (dphi / s) * st, dr * st + r1 * (dphi / s) * ct);
        const Vec minus_b(-std::cos(theta_b), -std::sin(theta_b));
        res.lhs_chart = angle_between(v, minus_b);
    }
    res.rhs_chart = std::abs(theta_b);
    return res;
}

// ---------------------------------------------------------------------------
// Polyline length in chart vs unfolded coordinates (isometry check)
// ---------------------------------------------------------------------------

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [0, 1].
inline const std::array<double, 16>& gl16_nodes() {
    static const std::array<double, 16> x = {
        0.0052995325041750337, 0.0277124884633837046, 0.0671843988060841224,
        0.1222977958224984868, 0.1910618777986781147, 0.2709916111713863151,
        0.3591982246103705422, 0.4524937450811812866, 0.5475062549188187134,
        0.6408017753896294578, 0.7290083888286136849, 0.8089381222013218853,
        0.8777022041775015132, 0.9328156011939158776, 0.9722875115366162954,
        0.9947004674958249663};
    return x;
}
inline const std::array<double, 16>& gl16_weights() {
    static const std::array<double, 16> w = {
        0.0135762297058770482, 0.0311267619693239468, 0.0475792558412463928,
        0.0623144856277669384, 0.0747979944082883680, 0.0845782596975012679,
        0.0913017075224617918, 0.0947253052275342510, 0.0947253052275342510,
        0.0913017075224617918, 0.0845782596975012679, 0.0747979944082883680,
        0.0623144856277669384, 0.0475792558412463928, 0.0311267619693239468,
        0.0135762297058770482};
    return w;
}

}  // namespace detail

// Cone-metric length of a chart polyline (any dimension), by Gauss-Legendre
// quadrature of sqrt(s^2 |d|^2 + c^2 (x.d)^2 / |x|^2) per segment.
inline double polyline_cone_length(const std::vector<Vec>& pts, const OpeningAngle& alpha) {
    const double s2 = alpha.sin_alpha * alpha.sin_alpha;
    const double c2 = 1.0 - s2;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec d = pts[i + 1] - pts[i];
        double seg = 0.0;
        for (int j = 0; j < 16; ++j) {
            const Vec x = pts[i] + detail::gl16_nodes()[static_cast<std::size_t>(j)] * d;
            const double r2 = dot(x, x);
            if (r2 == 0.0) throw SingularPointError("polyline_cone_length: node at apex");
            const double xd = dot(x, d);
            seg += detail::gl16_weights()[static_cast<std::size_t>(j)] *
                   std::sqrt(s2 * dot(d, d) + c2 * xd * xd / r2);
        }
        total += seg;
    }
    return total;
}

// Length of the same planar (n = 2) polyline computed through the unfolding:
// the integrand sqrt(r'^2 + r^2 (s theta')^2) in polar coordinates of the
// wedge image, evaluated at the same quadrature nodes. Algebraically equal to
// the cone length; the code path is independent.
inline double polyline_unfolded_length(const std::vector<Vec>& pts, const OpeningAngle& alpha) {
    const double s = alpha.sin_alpha;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec d = pts[i + 1] - pts[i];
        double seg = 0.0;
        for (int j = 0; j < 16; ++j) {
            const Vec x = pts[i] + detail::gl16_nodes()[static_cast<std::size_t>(j)] * d;
            const double r = norm(x);
            if (r == 0.0) throw SingularPointError("polyline_unfolded_length: node at apex");
            const double dr = dot(x, d) / r;
            const double dtheta = (x[0] * d[1] - x[1] * d[0]) / (r * r);
            seg += detail::gl16_weights()[static_cast<std::size_t>(j)] *
                   std::hypot(dr, r * s * dtheta);
        }
        total += seg;
    }
    return total;
}

}  // namespace acgeo

#endif  // ACGEO_CONE_GEOMETRY_HPP
