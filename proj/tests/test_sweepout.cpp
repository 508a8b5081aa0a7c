#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acgeo/ac_metric.hpp"
#include "acgeo/cone_geometry.hpp"
#include "acgeo/discrete_curve.hpp"
#include "acgeo/sweepout.hpp"

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

}  // namespace

TEST_CASE("reflection I is the hyperplane involution fixing e1..e(n-1)") {
    const Vec x(1.5, -2.0, 0.75);
    const Vec y = reflection_I(x);
    CHECK(y[0] == 1.5);
    CHECK(y[1] == -2.0);
    CHECK(y[2] == -0.75);
    const Vec z = reflection_I(y);
    for (int k = 0; k < 3; ++k) CHECK(z[k] == x[k]);
    CHECK(norm(y) == doctest::Approx(norm(x)).epsilon(1e-15));
}

TEST_CASE("tent sweepout: boundary rows, origin passage, energy profile") {
    const MetricSpec spec = cone_spec(3, 0.5);
    const double rho = 5.0;
    const Vec p = rho * Vec::unit(3, 0);
    const Vec q = -1.0 * p;
    const int s_count = 17, N = 200;
    Sweepout sw = build_initial_sweepout(p, q, spec, 8, s_count, N);

    REQUIRE(sw.xi_grid.size() == 8);
    REQUIRE(sw.s_grid.size() == s_count);

    // s = 0 and s = 1 rows are the minimizing family and its mirror.
    for (std::size_t xi = 0; xi < sw.xi_grid.size(); ++xi) {
        const DiscreteCurve l0 = minimizing_family(p, q, sw.xi_grid[xi], spec.alpha, N);
        const DiscreteCurve l1 =
            minimizing_family(p, q, reflection_I(sw.xi_grid[xi]), spec.alpha, N);
        CHECK(sup_distance(sw.curves[xi].front(), l0) <= 1e-12 * rho);
        CHECK(sup_distance(sw.curves[xi].back(), l1) <= 1e-12 * rho);
    }

    // The middle slice is the broken generatrix through the apex; every
    // sweepout is forced through the origin.
    const OriginPassage pass = verify_origin_passage(sw);
    CHECK(pass.min_dist == 0.0);
    CHECK(pass.s_index == (s_count - 1) / 2);

    // The energy maximum sits at the apex passage, near (2 rho)^2.
    double emax = -1.0;
    int arg_s = -1;
    for (std::size_t xi = 0; xi < sw.xi_grid.size(); ++xi)
        for (std::size_t s = 0; s < sw.s_grid.size(); ++s) {
            const double e = energy(sw.curves[xi][s], spec);
            if (e > emax) {
                emax = e;
                arg_s = static_cast<int>(s);
            }
        }
    CHECK(arg_s == (s_count - 1) / 2);
    CHECK(emax >= 0.98 * 4.0 * rho * rho);
    CHECK(emax <= 1.02 * 4.0 * rho * rho);

    // Boundary rows sit at the family level 4 rho^2 sin^2(Phi_0 / 2).
    const double l0 = 2.0 * rho * std::sin(0.5 * kPi * 0.5);
    CHECK(energy(sw.curves[0].front(), spec) ==
          doctest::Approx(l0 * l0).epsilon(1e-3));
}

TEST_CASE("sweepout construction rejects bad parameters") {
    const MetricSpec spec = cone_spec(3, 0.5);
    const Vec p = 5.0 * Vec::unit(3, 0);
    const Vec q = -1.0 * p;
    CHECK_THROWS_AS(build_initial_sweepout(p, q, spec, 8, 16, 200), ConfigError);  // even s_count
    CHECK_THROWS_AS(build_initial_sweepout(p, q, spec, 8, 17, 7), ConfigError);    // odd N
    CHECK_THROWS_AS(build_initial_sweepout(p, p, spec, 8, 17, 200), ConfigError);  // not antipodal
    CHECK_THROWS_AS(build_initial_sweepout(p, q, spec, 1, 17, 200), ConfigError);  // xi_count < 2
    CHECK_THROWS_AS(
        build_initial_sweepout(Vec(0.0, 5.0, 0.0), Vec(0.0, -5.0, 0.0), spec, 8, 17, 200),
        ConfigError);  // p off the e1 axis

    // Base radius inside the region where the perturbation is not small.
    MetricSpec strong = cone_spec(2, 0.8, 0.05);
    strong.perturbation.kind = PerturbationKind::power_bump;
    strong.perturbation.amplitude = 0.5;
    strong.perturbation.mu = 1.0;
    strong.mu = 1.0;
    CHECK_THROWS_AS(
        build_initial_sweepout(Vec(0.05, 0.0), Vec(-0.05, 0.0), strong, 2, 17, 200),
        ConfigError);
    CHECK_NOTHROW(build_initial_sweepout(Vec(50.0, 0.0), Vec(-50.0, 0.0), strong, 2, 9, 50));
}

TEST_CASE("rotating family is not a sweepout: its boundary dodges the origin") {
    // Rotate xi(s) from xi to -xi instead of tenting through the apex. The
    // s = 1 row then differs from L_I(xi), so construction is rejected; and
    // indeed the family never comes close to the origin, which is exactly
    // why it cannot enter the min-max class.
    const MetricSpec spec = cone_spec(3, 0.5);
    const double rho = 5.0;
    const Vec p = rho * Vec::unit(3, 0);
    const Vec q = -1.0 * p;
    const int s_count = 17, N = 100;
    const double inv = 1.0 / std::sqrt(2.0);
    const Vec xi(0.0, inv, inv);
    const Vec xi_perp(0.0, inv, -inv);

    std::vector<DiscreteCurve> row;
    double closest = 1e300;
    for (int j = 0; j < s_count; ++j) {
        const double s = static_cast<double>(j) / (s_count - 1);
        const Vec dir = std::cos(kPi * s) * xi + std::sin(kPi * s) * xi_perp;
        row.push_back(minimizing_family(p, q, dir, spec.alpha, N));
        closest = std::min(closest, closest_approach(row.back()));
    }
    // Every member stays a fixed distance from the apex (discretization
    // nibbles a hair off the continuum value rho cos(Phi_0 / 2)).
    CHECK(closest >= rho * std::cos(0.5 * kPi * 0.5) - 1e-3 * rho);
    CHECK(closest > 0.5 * rho);

    CHECK_THROWS_AS(Sweepout::create(p, q, spec.alpha, {xi},
                                     [&] {
                                         std::vector<double> sg;
                                         for (int j = 0; j < s_count; ++j)
                                             sg.push_back(double(j) / (s_count - 1));
                                         return sg;
                                     }(),
                                     {row}),
                    ConfigError);
}

TEST_CASE("minmax run on the capped cone: monotone history, fixed boundary") {
    const MetricSpec spec = cap_spec(2, 0.5);
    const double rho = 20.0;
    const Vec p(rho, 0.0), q(-rho, 0.0);
    Sweepout sw = build_initial_sweepout(p, q, spec, 2, 17, 100);
    const std::vector<DiscreteCurve> frozen = {sw.curves[0].front(), sw.curves[0].back(),
                                               sw.curves[1].front(), sw.curves[1].back()};

    const double eps = empirical_c_star_eps(spec, rho);
    const CutoffProfile cutoff = make_cutoff(rho, eps, spec.alpha);
    StopRule stop;
    stop.max_rounds = 400;
    const MinMaxReport rep = minmax_run(sw, spec, cutoff, {}, stop);

    REQUIRE(!rep.history.empty());
    for (std::size_t i = 1; i < rep.history.size(); ++i)
        CHECK(rep.history[i] <= rep.history[i - 1] + 1e-9 * rep.history[0]);
    CHECK(rep.lambda <= rep.history.front() + 1e-9 * rep.history.front());
    CHECK(rep.lambda >= 0.85 * 4.0 * rho * rho);
    CHECK(rep.lambda <= 1.15 * 4.0 * rho * rho);
    CHECK(!rep.saddle_escape_failure);
    CHECK(rep.residual <= 1e-6);
    CHECK(energy(rep.critical_curve, spec) ==
          doctest::Approx(rep.lambda).epsilon(1e-6));
    CHECK(rep.morse_index >= 0);
    CHECK(rep.morse_index <= 1);

    // Boundary rows are below the cutoff, hence bitwise frozen.
    const std::vector<DiscreteCurve> after = {sw.curves[0].front(), sw.curves[0].back(),
                                              sw.curves[1].front(), sw.curves[1].back()};
    for (int b = 0; b < 4; ++b) {
        REQUIRE(after[b].pts.size() == frozen[b].pts.size());
        for (std::size_t i = 0; i < frozen[b].pts.size(); ++i)
            for (int k = 0; k < 2; ++k)
                CHECK(after[b].pts[i][k] == frozen[b].pts[i][k]);
    }
}
