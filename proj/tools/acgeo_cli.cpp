// Command-line driver: metric configs in, deterministic JSON/CSV reports out.
//
// Subcommands: cone-geodesics, limit-angle, minmax, asymptotics,
// properness-probe. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure. ACGEO_THREADS caps parallelism; all file outputs land under --out.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acgeo/acgeo.hpp"

namespace fs = std::filesystem;
using namespace acgeo;

namespace {

void ensure_out_dir(const std::string& out) {
    if (out.empty()) return;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out);
}

void emit(const std::string& out, const std::string& name, const std::string& text) {
    if (out.empty()) return;
    write_text_file((fs::path(out) / name).string(), text);
}

json base_report(long seed) {
    json j;
    j["seed"] = seed;
    return j;
}

// --------------------------------------------------------------------------

int cmd_cone_geodesics(double sin_alpha, double rho, int n, bool oracle,
                       const std::string& out, long seed) {
    const OpeningAngle alpha = OpeningAngle::from_sin(sin_alpha);
    const auto classes = enumerate_antipodal_geodesics(rho, alpha, n);
    std::vector<double> oracle_lengths;
    if (oracle) oracle_lengths = oracle_antipodal_lengths(rho, sin_alpha);

    json rep = base_report(seed);
    rep["sin_alpha"] = sin_alpha;
    rep["rho"] = rho;
    rep["n"] = n;
    rep["excluded_angle"] = alpha.excluded;
    rep["classes"] = json::array();
    std::printf("winding  sign  length            departure_angle");
    if (oracle) std::printf("   oracle_rel_err");
    std::printf("\n");
    for (const auto& d : classes) {
        json c;
        c["winding"] = d.winding;
        c["sign"] = d.sign;
        c["length"] = d.length;
        c["departure_angle"] = d.departure_angle;
        c["subtended"] = d.subtended;
        std::printf("%7d  %+4d  %.12e  %.12e", d.winding, d.sign, d.length,
                    d.departure_angle);
        if (oracle) {
            if (d.winding >= static_cast<int>(oracle_lengths.size()))
                throw NumericalError("oracle found fewer classes than enumerated");
            const double rel =
                std::abs(d.length / oracle_lengths[static_cast<std::size_t>(d.winding)] - 1.0);
            c["oracle_rel_err"] = rel;
            std::printf("  %.3e", rel);
        }
        std::printf("\n");
        rep["classes"].push_back(c);
    }
    if (oracle && oracle_lengths.size() * 2 != classes.size())
        throw NumericalError("oracle class count disagrees with enumeration");
    ensure_out_dir(out);
    emit(out, "cone_geodesics.json", rep.dump(2) + "\n");
    return 0;
}

int cmd_limit_angle(double sin_alpha, double t, const std::string& out, long seed) {
    const OpeningAngle alpha = OpeningAngle::from_sin(sin_alpha);
    const LimitAngle la = limit_angle(alpha);
    const double measured = measure_line_end_angle(alpha, t);
    json rep = base_report(seed);
    rep["sin_alpha"] = sin_alpha;
    rep["excluded"] = alpha.excluded;
    rep["K"] = la.K;
    rep["K_angle"] = la.angle;
    rep["measured_end_angle"] = measured;
    rep["measurement_t"] = t;
    rep["measurement_error"] = std::abs(measured - la.angle);
    std::printf("K=%d  K_angle=%.10f  measured(t=%g)=%.10f  excluded=%s\n", la.K, la.angle,
                t, measured, alpha.excluded ? "true" : "false");
    ensure_out_dir(out);
    emit(out, "limit_angle.json", rep.dump(2) + "\n");
    return 0;
}

MinMaxReport run_minmax_at(const MetricSpec& spec, double rho, int xi_count, int s_count,
                           int N) {
    const double eps = empirical_c_star_eps(spec, rho);
    const CutoffProfile cutoff = make_cutoff(rho, eps, spec.alpha);
    Vec p = rho * Vec::unit(spec.n, 0);
    Sweepout sw = build_initial_sweepout(p, -1.0 * p, spec, xi_count, s_count, N);
    MinMaxReport rep = minmax_run(sw, spec, cutoff);
    rep.c_star_eps = eps;
    return rep;
}

int cmd_minmax(const std::string& config, double rho, int xi_count, int s_count, int N,
               bool emit_sweepout, const std::string& out, long seed) {
    const MetricSpec spec = load_metric_spec(config);
    if (xi_count <= 0) xi_count = spec.n == 2 ? 2 : 32;
    const double eps = empirical_c_star_eps(spec, rho);
    const CutoffProfile cutoff = make_cutoff(rho, eps, spec.alpha);
    Vec p = rho * Vec::unit(spec.n, 0);
    Sweepout sw = build_initial_sweepout(p, -1.0 * p, spec, xi_count, s_count, N);
    ensure_out_dir(out);
    if (emit_sweepout && !out.empty()) {
        for (std::size_t xi = 0; xi < sw.curves.size(); ++xi)
            for (std::size_t s = 0; s < sw.curves[xi].size(); ++s)
                emit(out,
                     "sweepout_xi" + std::to_string(xi) + "_s" + std::to_string(s) + ".csv",
                     curve_to_csv(sw.curves[xi][s]));
    }
    MinMaxReport rep = minmax_run(sw, spec, cutoff);
    rep.c_star_eps = eps;
    json j = base_report(seed);
    j.update(minmax_report_to_json(rep));
    j["rho"] = rho;
    j["lambda_over_4rho2"] = rep.lambda / (4.0 * rho * rho);
    std::printf("lambda=%.10e (lambda/4rho^2=%.6f) residual=%.3e morse_index=%d iters=%d\n",
                rep.lambda, rep.lambda / (4.0 * rho * rho), rep.residual, rep.morse_index,
                rep.iterations);
    emit(out, "minmax_report.json", j.dump(2) + "\n");
    emit(out, "critical_curve.csv", curve_to_csv(rep.critical_curve));
    return rep.saddle_escape_failure ? 3 : 0;
}

int cmd_asymptotics(const std::string& config, std::vector<double> rhos,
                    std::vector<double> radii, int xi_count, int s_count, int N,
                    const std::string& out, long seed) {
    const MetricSpec spec = load_metric_spec(config);
    if (xi_count <= 0) xi_count = spec.n == 2 ? 2 : 32;
    ensure_out_dir(out);
    std::vector<std::pair<double, DiscreteCurve>> family;
    json per_rho = json::array();
    bool any_failure = false;
    for (double rho : rhos) {
        try {
            MinMaxReport rep = run_minmax_at(spec, rho, xi_count, s_count, N);
            json j = minmax_report_to_json(rep);
            j["rho"] = rho;
            per_rho.push_back(j);
            if (rep.saddle_escape_failure) {
                any_failure = true;
                continue;
            }
            family.emplace_back(rho, rep.critical_curve);
            emit(out, "critical_curve_rho" + std::to_string(static_cast<int>(rho)) + ".csv",
                 curve_to_csv(rep.critical_curve));
        } catch (const NumericalError& e) {
            json j;
            j["rho"] = rho;
            j["error"] = e.what();
            per_rho.push_back(j);
            any_failure = true;
        }
    }
    const Vec a = Vec::unit(spec.n, 0);
    const NonTwistReport nt = nontwist_report(family, radii, a);
    json rep = base_report(seed);
    rep["per_rho"] = per_rho;
    json crossings = json::array();
    for (const auto& [rho, curve] : family) {
        for (double r : radii) {
            if (!(r < rho)) continue;
            const Crossings cr = classify_crossings(curve, r);
            json c;
            c["rho"] = rho;
            c["r"] = r;
            c["minus"] = cr.minus.size();
            c["plus"] = cr.plus.size();
            c["circ"] = cr.circ.size();
            c["ambiguous"] = cr.ambiguous.size();
            crossings.push_back(c);
        }
    }
    rep["crossings"] = crossings;
    if (!family.empty()) {
        const auto& [rho_max, curve] = family.back();
        const IdealBoundary ib = ideal_boundary(curve, radii);
        json j;
        j["truncated"] = ib.truncated;
        j["reached_radii"] = ib.reached_radii;
        json md = json::array(), pd = json::array();
        for (const Vec& v : ib.minus_dirs) {
            json dir = json::array();
            for (int i = 0; i < v.n; ++i) dir.push_back(v[i]);
            md.push_back(dir);
        }
        for (const Vec& v : ib.plus_dirs) {
            json dir = json::array();
            for (int i = 0; i < v.n; ++i) dir.push_back(v[i]);
            pd.push_back(dir);
        }
        j["minus_dirs"] = md;
        j["plus_dirs"] = pd;
        j["minus_deltas"] = ib.minus_deltas;
        j["plus_deltas"] = ib.plus_deltas;
        rep["ideal_boundary"] = j;
    }
    const std::string csv = nontwist_report_to_csv(nt);
    std::printf("%s", csv.c_str());
    emit(out, "nontwist.csv", csv);
    emit(out, "asymptotics_report.json", rep.dump(2) + "\n");
    return any_failure ? 3 : 0;
}

int cmd_properness_probe(const std::string& config, std::vector<double> x_coords, double r,
                         int directions, double t_max, const std::string& out, long seed) {
    const MetricSpec spec = load_metric_spec(config);
    Vec x = Vec::zero(spec.n);
    if (static_cast<int>(x_coords.size()) != spec.n)
        throw ConfigError("properness-probe: --x needs exactly n coordinates");
    for (int i = 0; i < spec.n; ++i) x[i] = x_coords[static_cast<std::size_t>(i)];
    const ProbeResult res = properness_probe(spec, x, r, directions, t_max);
    json rep = base_report(seed);
    rep["nonproper_suspect"] = res.nonproper_suspect;
    rep["offending_direction"] = res.offending_direction;
    rep["T_estimate"] = res.T_estimate;
    rep["per_direction_exit"] = res.per_direction_exit;
    rep["failures"] = res.failures;
    std::printf("nonproper_suspect=%s T_estimate=%.6f offending=%d\n",
                res.nonproper_suspect ? "true" : "false", res.T_estimate,
                res.offending_direction);
    ensure_out_dir(out);
    emit(out, "properness_probe.json", rep.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"min-max geodesic toolkit for asymptotically conical manifolds"};
    app.require_subcommand(1);
    long seed = 0;
    app.add_option("--seed", seed, "seed recorded in reports (all sampling deterministic)");

    // cone-geodesics
    auto* cg = app.add_subcommand("cone-geodesics", "enumerate antipodal cone geodesics");
    double cg_sin = 0.5, cg_rho = 1.0;
    int cg_n = 2;
    bool cg_oracle = false;
    std::string cg_out;
    cg->add_option("--sin-alpha", cg_sin, "sin of the opening angle")->required();
    cg->add_option("--rho", cg_rho, "endpoint radius");
    cg->add_option("--n", cg_n, "ambient dimension");
    cg->add_flag("--oracle", cg_oracle, "cross-validate against the brute-force oracle");
    cg->add_option("--out", cg_out, "output directory");

    // limit-angle
    auto* la = app.add_subcommand("limit-angle", "limit angle of geodesic lines");
    double la_sin = 0.5, la_t = 1e4;
    std::string la_out;
    la->add_option("--sin-alpha", la_sin, "sin of the opening angle")->required();
    la->add_option("--t", la_t, "parameter for the long-geodesic check");
    la->add_option("--out", la_out, "output directory");

    // minmax
    auto* mm = app.add_subcommand("minmax", "mountain-pass min-max run");
    std::string mm_config, mm_out;
    double mm_rho = 20.0;
    int mm_xi = 0, mm_s = 33, mm_N = 200;
    bool mm_emit = false;
    mm->add_option("--config", mm_config, "metric config JSON")->required();
    mm->add_option("--rho", mm_rho, "endpoint radius");
    mm->add_option("--xi-count", mm_xi, "xi grid size (default 2 for n=2, 32 for n=3)");
    mm->add_option("--s-count", mm_s, "s grid size (odd)");
    mm->add_option("--N", mm_N, "segments per curve");
    mm->add_flag("--emit-sweepout", mm_emit, "dump every grid curve");
    mm->add_option("--out", mm_out, "output directory");

    // asymptotics
    auto* as = app.add_subcommand("asymptotics", "blow-down diagnostics over a rho schedule");
    std::string as_config, as_out;
    std::vector<double> as_rhos{20, 40, 80}, as_radii{5, 10, 20};
    int as_xi = 0, as_s = 33, as_N = 200;
    as->add_option("--config", as_config, "metric config JSON")->required();
    as->add_option("--rhos", as_rhos, "rho schedule")->delimiter(',');
    as->add_option("--radii", as_radii, "annulus radii")->delimiter(',');
    as->add_option("--xi-count", as_xi, "xi grid size");
    as->add_option("--s-count", as_s, "s grid size (odd)");
    as->add_option("--N", as_N, "segments per curve");
    as->add_option("--out", as_out, "output directory");

    // properness-probe
    auto* pp = app.add_subcommand("properness-probe", "last-exit times of geodesic rays");
    std::string pp_config, pp_out;
    std::vector<double> pp_x{2.0, 0.0};
    double pp_r = 1.0, pp_tmax = 100.0;
    int pp_dirs = 64;
    pp->add_option("--config", pp_config, "metric config JSON")->required();
    pp->add_option("--x", pp_x, "base point coordinates")->delimiter(',');
    pp->add_option("--r", pp_r, "ball radius");
    pp->add_option("--directions", pp_dirs, "direction count");
    pp->add_option("--t-max", pp_tmax, "integration horizon");
    pp->add_option("--out", pp_out, "output directory");

    try {
        app.parse(argc, argv);
        if (cg->parsed())
            return cmd_cone_geodesics(cg_sin, cg_rho, cg_n, cg_oracle, cg_out, seed);
        if (la->parsed()) return cmd_limit_angle(la_sin, la_t, la_out, seed);
        if (mm->parsed())
            return cmd_minmax(mm_config, mm_rho, mm_xi, mm_s, mm_N, mm_emit, mm_out, seed);
        if (as->parsed())
            return cmd_asymptotics(as_config, as_rhos, as_radii, as_xi, as_s, as_N, as_out,
                                   seed);
        if (pp->parsed())
            return cmd_properness_probe(pp_config, pp_x, pp_r, pp_dirs, pp_tmax, pp_out,
                                        seed);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
