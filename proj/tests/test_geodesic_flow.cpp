#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acgeo/ac_metric.hpp"
#include "acgeo/geodesic_flow.hpp"

using namespace acgeo;

namespace {

MetricSpec cone_spec(int n, double sin_alpha, double delta = 0.0) {
    MetricSpec spec;
    spec.n = n;
    spec.alpha = OpeningAngle::from_sin(sin_alpha);
    spec.regularization_delta = delta;
    return spec;
}

MetricSpec cap_spec(int n, double sin_alpha) {
    MetricSpec spec = cone_spec(n, sin_alpha);
    spec.perturbation.kind = PerturbationKind::rotational_cap;
    spec.perturbation.transition_radius = 1.0;
    spec.perturbation.profile_exponent = 3;
    return spec;
}

double g_speed(const MetricSpec& spec, const GeodesicState& s) {
    return std::sqrt(metric_at(spec, s.x).quad(s.v));
}

}  // namespace

TEST_CASE("radial rays stay on the generatrix with unit speed") {
    const MetricSpec spec = cone_spec(2, 0.5);
    const Vec x0(2.0, 0.0);
    const Vec v0(1.0, 0.0);  // radial direction has g-norm 1
    const Trajectory traj = integrate_geodesic(spec, x0, v0, 5.0, 1e-10);
    const GeodesicState& end = traj.samples.back();
    CHECK(end.t == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(end.x[0] - 7.0) <= 1e-8);
    CHECK(std::abs(end.x[1]) <= 1e-10);
    for (const auto& s : traj.samples) CHECK(std::abs(s.x[1]) <= 1e-10);
}

TEST_CASE("generic cone trajectory unfolds to a straight line") {
    const MetricSpec spec = cone_spec(2, 0.5);
    const double s = 0.5;
    const Vec x0(2.0, 0.0);
    Vec v0(0.1, 1.0);
    v0 = v0 / std::sqrt(metric_at(spec, x0).quad(v0));  // unit g-speed
    const Trajectory traj = integrate_geodesic(spec, x0, v0, 10.0, 1e-10);

    // Map each sample into the wedge: (r cos(phi), r sin(phi)) with
    // phi = s * theta, theta unwrapped along the trajectory.
    std::vector<double> wx, wy;
    double theta_prev = std::atan2(x0[1], x0[0]);
    double theta_acc = theta_prev;
    for (const auto& st : traj.samples) {
        const double th = std::atan2(st.x[1], st.x[0]);
        double dth = th - theta_prev;
        while (dth > kPi) dth -= 2.0 * kPi;
        while (dth < -kPi) dth += 2.0 * kPi;
        theta_acc += dth;
        theta_prev = th;
        const double r = norm(st.x);
        wx.push_back(r * std::cos(s * theta_acc));
        wy.push_back(r * std::sin(s * theta_acc));
    }
    // Straightness: distance to the line through the endpoints.
    const double ax = wx.front(), ay = wy.front();
    const double bx = wx.back(), by = wy.back();
    const double len = std::hypot(bx - ax, by - ay);
    REQUIRE(len > 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < wx.size(); ++i) {
        const double cross =
            (bx - ax) * (wy[i] - ay) - (by - ay) * (wx[i] - ax);
        worst = std::max(worst, std::abs(cross) / len);
    }
    CHECK(worst <= 1e-6);
    // Unit-speed straight line covers g-length ~ T.
    CHECK(len == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("first integral: g-speed is conserved") {
    const MetricSpec spec = cap_spec(2, 0.5);
    const Vec x0(2.0, 0.0);
    const Vec v0(-0.8, 0.6);
    const double tol = 1e-9;
    const Trajectory traj = integrate_geodesic(spec, x0, v0, 8.0, tol);
    const double sp0 = g_speed(spec, traj.samples.front());
    for (const auto& st : traj.samples)
        CHECK(std::abs(g_speed(spec, st) - sp0) <= 10.0 * tol * std::max(1.0, sp0) * 8.0);
}

TEST_CASE("time reversal returns to the start") {
    const MetricSpec spec = cap_spec(2, 0.5);
    const Vec x0(2.0, 0.5);
    const Vec v0(-0.9, 0.1);
    const double tol = 1e-10, T = 4.0;
    const Trajectory fwd = integrate_geodesic(spec, x0, v0, T, tol);
    const GeodesicState& end = fwd.samples.back();
    const Trajectory bwd = integrate_geodesic(spec, end.x, -1.0 * end.v, T, tol);
    CHECK(norm(bwd.samples.back().x - x0) <= 1e-6);
}

TEST_CASE("cap metric integrates smoothly through the apex region") {
    const MetricSpec spec = cap_spec(2, 0.5);
    // Aim straight at the origin: the smooth cap carries the geodesic across.
    CHECK_NOTHROW(integrate_geodesic(spec, Vec(2.0, 0.0), Vec(-1.0, 0.0), 5.0, 1e-9));
    const MetricSpec spec3 = cap_spec(3, 0.5);
    CHECK_NOTHROW(
        integrate_geodesic(spec3, Vec(2.0, 0.0, 0.0), Vec(-1.0, 0.05, 0.02), 5.0, 1e-9));
}

TEST_CASE("unregularized cone rejects trajectories through the apex") {
    const MetricSpec spec = cone_spec(2, 0.5);
    try {
        integrate_geodesic(spec, Vec(2.0, 0.0), Vec(-1.0, 0.0), 5.0, 1e-9);
        FAIL("expected a singularity encounter");
    } catch (const SingularityEncounter& e) {
        // The carried state is the last good one, near the apex.
        CHECK(norm(e.last.x) <= 0.5);
        CHECK(e.last.t > 1.0);
    }
}

TEST_CASE("exp_map basics and continuity") {
    const MetricSpec spec = cap_spec(2, 0.5);
    const Vec x(2.0, 1.0);
    CHECK(norm(exp_map(spec, x, Vec(0.0, 0.0)) - x) == 0.0);

    // Radial vectors translate along the generatrix (exact cone part).
    const Vec y = exp_map(spec, Vec(2.0, 0.0), Vec(3.0, 0.0));
    CHECK(std::abs(y[0] - 5.0) <= 1e-8);
    CHECK(std::abs(y[1]) <= 1e-9);

    // Continuity in the initial data over t in [0, 10].
    const Vec v(-0.35, 0.4);
    const double eps = 1e-6;
    const Trajectory a = integrate_geodesic(spec, x, v, 10.0, 1e-10);
    const Trajectory b = integrate_geodesic(spec, x + Vec(eps, 0.0), v, 10.0, 1e-10);
    CHECK(norm(a.samples.back().x - b.samples.back().x) <= 1e3 * eps);
}

TEST_CASE("properness probe on complete metrics") {
    const MetricSpec cap = cap_spec(2, 0.5);
    const ProbeResult res = properness_probe(cap, Vec(2.0, 0.0), 1.0, 64, 100.0);
    CHECK_FALSE(res.nonproper_suspect);
    CHECK(res.failures.empty());
    CHECK(res.T_estimate > 0.0);
    // Escape no later than crossing the ball diametrically at the slowest
    // speed: generous upper bound |x|/sin(a) + 2r/sin(a).
    CHECK(res.T_estimate <= (2.0 + 2.0) / 0.5);
    for (double t : res.per_direction_exit) CHECK(t >= 0.0);

    // Regularized cone, n = 3 exercises the Fibonacci directions.
    const MetricSpec cone3 = cone_spec(3, 0.5, 0.05);
    const ProbeResult r3 = properness_probe(cone3, Vec(2.0, 0.0, 0.0), 1.0, 32, 100.0);
    CHECK_FALSE(r3.nonproper_suspect);

    CHECK_THROWS_AS(properness_probe(cap, Vec(2.0, 0.0), 1.0, 0, 10.0), ConfigError);
}
