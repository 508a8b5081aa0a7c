#ifndef ACGEO_ASYMPTOTICS_HPP
#define ACGEO_ASYMPTOTICS_HPP

// Blow-down diagnostics for families of critical curves: entry/exit times of
// annuli, crossing classification (types A-F, sets Delta-/Delta+/Delta0),
// non-twisting deviation tables, and ideal-boundary direction estimates.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "acgeo/core.hpp"
#include "acgeo/curve.hpp"

namespace acgeo {

struct NoCrossing : NumericalError {
    explicit NoCrossing(const std::string& msg) : NumericalError(msg) {}
};

// ---------------------------------------------------------------------------
// Blow-down
// ---------------------------------------------------------------------------

inline DiscreteCurve blow_down(const DiscreteCurve& c, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("blow_down: lambda must be > 0");
    DiscreteCurve out = c;
    for (Vec& x : out.pts) x *= 1.0 / lambda;
    return out;
}

// ---------------------------------------------------------------------------
// Crossings of the sphere |x| = r
// ---------------------------------------------------------------------------

namespace detail {

// Roots of |a + t d| = r on [0, 1], ascending.
inline int sphere_roots(const Vec& a, const Vec& d, double r, double out[2]) {
    const double A = dot(d, d);
    const double B = 2.0 * dot(a, d);
    const double C = dot(a, a) - r * r;
    int count = 0;
    if (A == 0.0) return 0;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    // Numerically stable quadratic roots.
    const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    double t1 = q / A;
    double t2 = (q != 0.0) ? C / q : t1;
    if (t1 > t2) std::swap(t1, t2);
    for (double t : {t1, t2}) {
        if (t >= 0.0 && t <= 1.0) out[count++] = t;
    }
    if (count == 2 && out[0] == out[1]) count = 1;
    return count;
}

// Point and tangent (segment direction) at global parameter t in [0, 1].
inline void curve_at(const DiscreteCurve& c, double t, Vec& x, Vec& dxdt) {
    const int N = c.segments();
    double u = t * N;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, N - 1);
    u -= i;
    const Vec& a = c.pts[static_cast<std::size_t>(i)];
    const Vec d = c.pts[static_cast<std::size_t>(i + 1)] - a;
    x = a + u * d;
    dxdt = static_cast<double>(N) * d;
}

}  // namespace detail

// First and last parameters with |curve(t)| = r, by per-segment root
// bracketing on the interpolated polyline. Throws NoCrossing when r is
// outside the curve's radial range.
inline std::pair<double, double> entry_exit_times(const DiscreteCurve& c, double r) {
    const int N = c.segments();
    double tmin = -1.0, tmax = -1.0;
    for (int i = 0; i < N; ++i) {
        const Vec& a = c.pts[static_cast<std::size_t>(i)];
        const Vec d = c.pts[static_cast<std::size_t>(i + 1)] - a;
        double roots[2];
        const int cnt = detail::sphere_roots(a, d, r, roots);
        for (int j = 0; j < cnt; ++j) {
            const double t = (i + roots[j]) / N;
            if (tmin < 0.0) tmin = t;
            tmax = t;
        }
    }
    if (tmin < 0.0) throw NoCrossing("entry_exit_times: curve does not meet radius r");
    return {tmin, tmax};
}

enum class CrossingSet { minus, plus, circ, ambiguous };

struct CrossingRecord {
    double t = 0.0;      // representative parameter (plateau midpoint for D/E/F)
    double radius = 0.0;
    double angle = 0.0;  // angle between position and tangent at the crossing
    CrossingSet set = CrossingSet::ambiguous;
    char subtype = '?';          // one of A..F
    double plateau_t0 = -1.0;    // plateau interval when subtype is D/E/F
    double plateau_t1 = -1.0;
};

struct Crossings {
    std::vector<CrossingRecord> minus, plus, circ, ambiguous;

    std::size_t total() const {
        return minus.size() + plus.size() + circ.size() + ambiguous.size();
    }
};

// Classification of every parameter with |curve(t)| = r. Isolated crossings
// with angle beyond pi/2 +- tol_band are transversal (types A/B); in-band
// isolated crossings are tangential touches (type C when the radius has a
// local extremum there, otherwise flagged ambiguous). Plateaus -- at least 3
// consecutive vertices whose radius sits within the band and whose vertex
// tangent is within tol_band of pi/2 -- are typed D/E/F by the radial
// monotonicity on both sides.
inline Crossings classify_crossings(const DiscreteCurve& c, double r,
                                    double tol_band = 1e-6) {
    const int N = c.segments();
    Crossings out;
    const double rad_band = std::max(tol_band * std::max(r, 1.0), 1e-14 * r);

    // Plateau scan over vertices.
    std::vector<bool> in_band(static_cast<std::size_t>(N) + 1, false);
    for (int i = 0; i <= N; ++i) {
        const Vec& x = c.pts[static_cast<std::size_t>(i)];
        if (std::abs(norm(x) - r) > rad_band) continue;
        const Vec tang = c.pts[static_cast<std::size_t>(std::min(i + 1, N))] -
                         c.pts[static_cast<std::size_t>(std::max(i - 1, 0))];
        if (norm(tang) == 0.0 || norm(x) == 0.0) continue;
        in_band[static_cast<std::size_t>(i)] =
            std::abs(angle_between(x, tang) - 0.5 * kPi) <= tol_band;
    }
    std::vector<std::pair<int, int>> plateaus;  // inclusive vertex ranges
    for (int i = 0; i <= N;) {
        if (!in_band[static_cast<std::size_t>(i)]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= N && in_band[static_cast<std::size_t>(j + 1)]) ++j;
        if (j - i + 1 >= 3) plateaus.emplace_back(i, j);
        i = j + 1;
    }
    auto inside_plateau = [&](double t) {
        for (const auto& [i, j] : plateaus) {
            if (t >= (static_cast<double>(i) - 0.5) / N && t <= (static_cast<double>(j) + 0.5) / N)
                return true;
        }
        return false;
    };

    for (const auto& [i, j] : plateaus) {
        CrossingRecord rec;
        rec.plateau_t0 = static_cast<double>(i) / N;
        rec.plateau_t1 = static_cast<double>(j) / N;
        rec.t = 0.5 * (rec.plateau_t0 + rec.plateau_t1);
        rec.radius = r;
        rec.angle = 0.5 * kPi;
        const double before = i > 0 ? norm(c.pts[static_cast<std::size_t>(i - 1)]) : r;
        const double after = j < N ? norm(c.pts[static_cast<std::size_t>(j + 1)]) : r;
        if (before > r && after < r) {
            rec.subtype = 'D';
            rec.set = CrossingSet::minus;
            out.minus.push_back(rec);
        } else if (before < r && after > r) {
            rec.subtype = 'E';
            rec.set = CrossingSet::plus;
            out.plus.push_back(rec);
        } else {
            rec.subtype = 'F';
            rec.set = CrossingSet::circ;
            out.circ.push_back(rec);
        }
    }

    // Isolated crossings.
    double prev_t = -1.0;
    for (int i = 0; i < N; ++i) {
        const Vec& a = c.pts[static_cast<std::size_t>(i)];
        const Vec d = c.pts[static_cast<std::size_t>(i + 1)] - a;
        double roots[2];
        const int cnt = detail::sphere_roots(a, d, r, roots);
        for (int k = 0; k < cnt; ++k) {
            // Half-open segments: skip the shared vertex with the previous one.
            if (roots[k] >= 1.0 - 1e-15 && i < N - 1) continue;
            const double t = (i + roots[k]) / N;
            if (prev_t >= 0.0 && t - prev_t < 1e-15) continue;  // duplicate vertex hit
            if (inside_plateau(t)) continue;
            prev_t = t;
            CrossingRecord rec;
            rec.t = t;
            rec.radius = r;
            const Vec x = a + roots[k] * d;
            rec.angle = angle_between(x, d);
            if (rec.angle > 0.5 * kPi + tol_band) {
                rec.subtype = 'A';
                rec.set = CrossingSet::minus;
                out.minus.push_back(rec);
            } else if (rec.angle < 0.5 * kPi - tol_band) {
                rec.subtype = 'B';
                rec.set = CrossingSet::plus;
                out.plus.push_back(rec);
            } else {
                // Tangential touch: compare radii on both sides.
                const double h = 0.5 / N;
                Vec xb, xa, dummy;
                detail::curve_at(c, std::max(0.0, t - h), xb, dummy);
                detail::curve_at(c, std::min(1.0, t + h), xa, dummy);
                const double rb = norm(xb), ra = norm(xa);
                if ((rb >= r && ra >= r) || (rb <= r && ra <= r)) {
                    rec.subtype = 'C';
                    rec.set = CrossingSet::circ;
                    out.circ.push_back(rec);
                } else {
                    rec.set = CrossingSet::ambiguous;
                    out.ambiguous.push_back(rec);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Non-twisting deviation tables
// ---------------------------------------------------------------------------

struct NonTwistEntry {
    double rho = 0.0;
    double r = 0.0;
    double dev_minus = 0.0;   // |curve(t-)/r - a|
    double dev_plus = 0.0;    // |curve(t+)/r - a_star|, a_star = -a
    double diam_minus = 0.0;  // diameter of the Delta- crossing points
    double diam_plus = 0.0;
};

struct NonTwistReport {
    std::vector<NonTwistEntry> entries;  // ordered by (rho, r) as requested
};

// Family of curves indexed by rho, each joining rho*a to -rho*a.
inline NonTwistReport nontwist_report(
    const std::vector<std::pair<double, DiscreteCurve>>& family,
    const std::vector<double>& radii, const Vec& a) {
    NonTwistReport rep;
    for (const auto& [rho, curve] : family) {
        for (double r : radii) {
            if (!(r < rho)) continue;  // entries only for rho > r
            const auto [tm, tp] = entry_exit_times(curve, r);
            Vec xm, xp, dummy;
            detail::curve_at(curve, tm, xm, dummy);
            detail::curve_at(curve, tp, xp, dummy);
            NonTwistEntry e;
            e.rho = rho;
            e.r = r;
            e.dev_minus = norm(xm / r - a);
            e.dev_plus = norm(xp / r + a);
            const Crossings cr = classify_crossings(curve, r);
            auto diam = [](const std::vector<CrossingRecord>& recs,
                           const DiscreteCurve& c) {
                double m = 0.0;
                for (std::size_t i = 0; i < recs.size(); ++i) {
                    for (std::size_t j = i + 1; j < recs.size(); ++j) {
                        Vec xi, xj, d;
                        detail::curve_at(c, recs[i].t, xi, d);
                        detail::curve_at(c, recs[j].t, xj, d);
                        m = std::max(m, norm(xi - xj));
                    }
                }
                return m;
            };
            e.diam_minus = diam(cr.minus, curve);
            e.diam_plus = diam(cr.plus, curve);
            rep.entries.push_back(e);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ideal boundary estimates
// ---------------------------------------------------------------------------

struct IdealBoundary {
    std::vector<Vec> minus_dirs, plus_dirs;       // one per reached radius
    std::vector<double> minus_deltas, plus_deltas;  // successive angular gaps
    std::vector<double> reached_radii;
    bool truncated = false;  // schedule cut short (radius not reached)
};

// Direction estimates curve(t)/|curve(t)| at the first (minus end) and last
// (plus end) crossing of each scheduled radius. Reports successive angular
// differences as convergence diagnostics, never a claimed limit.
inline IdealBoundary ideal_boundary(const DiscreteCurve& c,
                                    const std::vector<double>& radii) {
    IdealBoundary ib;
    for (double r : radii) {
        std::pair<double, double> tt;
        try {
            tt = entry_exit_times(c, r);
        } catch (const NoCrossing&) {
            ib.truncated = true;
            break;
        }
        Vec xm, xp, dummy;
        detail::curve_at(c, tt.first, xm, dummy);
        detail::curve_at(c, tt.second, xp, dummy);
        ib.minus_dirs.push_back(normalized(xm));
        ib.plus_dirs.push_back(normalized(xp));
        ib.reached_radii.push_back(r);
        const std::size_t k = ib.minus_dirs.size();
        if (k >= 2) {
            ib.minus_deltas.push_back(angle_between(ib.minus_dirs[k - 2], ib.minus_dirs[k - 1]));
            ib.plus_deltas.push_back(angle_between(ib.plus_dirs[k - 2], ib.plus_dirs[k - 1]));
        }
    }
    return ib;
}

}  // namespace acgeo

#endif  // ACGEO_ASYMPTOTICS_HPP
