#ifndef ACGEO_IO_HPP
#define ACGEO_IO_HPP

// JSON/CSV serialization. The metric config schema is normative:
//   {"n":3, "alpha_sin":0.5,
//    "perturbation":{"kind":"power_bump","amplitude":0.1,"mu":1.0},
//    "regularization_delta":0.0}
// and the min-max report carries at least the fields lambda, argmax_xi,
// argmax_s, residual, morse_index, iterations, history.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "acgeo/ac_metric.hpp"
#include "acgeo/asymptotics.hpp"
#include "acgeo/core.hpp"
#include "acgeo/sweepout.hpp"

namespace acgeo {

using nlohmann::json;

inline json metric_spec_to_json(const MetricSpec& spec) {
    json j;
    j["n"] = spec.n;
    j["alpha_sin"] = spec.alpha.sin_alpha;
    j["regularization_delta"] = spec.regularization_delta;
    json p;
    switch (spec.perturbation.kind) {
        case PerturbationKind::none:
            p["kind"] = "none";
            break;
        case PerturbationKind::rotational_cap:
            p["kind"] = "rotational_cap";
            p["transition_radius"] = spec.perturbation.transition_radius;
            p["profile_exponent"] = spec.perturbation.profile_exponent;
            break;
        case PerturbationKind::power_bump:
            p["kind"] = "power_bump";
            p["amplitude"] = spec.perturbation.amplitude;
            p["mu"] = spec.perturbation.mu;
            p["center_scale"] = spec.perturbation.center_scale;
            break;
    }
    j["perturbation"] = p;
    return j;
}

inline MetricSpec metric_spec_from_json(const json& j) {
    MetricSpec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.alpha = OpeningAngle::from_sin(j.at("alpha_sin").get<double>());
        spec.regularization_delta = j.value("regularization_delta", 0.0);
        if (j.contains("perturbation")) {
            const json& p = j.at("perturbation");
            const std::string kind = p.value("kind", "none");
            if (kind == "none") {
                spec.perturbation.kind = PerturbationKind::none;
            } else if (kind == "rotational_cap") {
                spec.perturbation.kind = PerturbationKind::rotational_cap;
                spec.perturbation.transition_radius = p.value("transition_radius", 1.0);
                spec.perturbation.profile_exponent = p.value("profile_exponent", 3.0);
            } else if (kind == "power_bump") {
                spec.perturbation.kind = PerturbationKind::power_bump;
                spec.perturbation.amplitude = p.value("amplitude", 0.0);
                spec.perturbation.mu = p.value("mu", 1.0);
                spec.perturbation.center_scale = p.value("center_scale", 1.0);
                spec.mu = spec.perturbation.mu;
            } else {
                throw ConfigError("metric config: unknown perturbation kind '" + kind + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("metric config: ") + e.what());
    }
    spec.validate();
    return spec;
}

inline MetricSpec load_metric_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open metric config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("metric config parse: ") + e.what());
    }
    return metric_spec_from_json(j);
}

inline json minmax_report_to_json(const MinMaxReport& rep) {
    json j;
    j["lambda"] = rep.lambda;
    j["argmax_xi"] = rep.argmax_xi;
    j["argmax_s"] = rep.argmax_s;
    j["residual"] = rep.residual;
    j["morse_index"] = rep.morse_index;
    j["iterations"] = rep.iterations;
    j["history"] = rep.history;
    j["closest_approach"] = rep.closest_approach_value;
    j["c_star_eps"] = rep.c_star_eps;
    j["saddle_escape_failure"] = rep.saddle_escape_failure;
    return j;
}

// Columns are normative: rho,r,dev_minus,dev_plus,diam_minus,diam_plus.
inline std::string nontwist_report_to_csv(const NonTwistReport& rep) {
    std::ostringstream out;
    out << "rho,r,dev_minus,dev_plus,diam_minus,diam_plus\n";
    char buf[40];
    auto cell = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const NonTwistEntry& e : rep.entries) {
        out << cell(e.rho) << "," << cell(e.r) << "," << cell(e.dev_minus) << ","
            << cell(e.dev_plus) << "," << cell(e.diam_minus) << "," << cell(e.diam_plus)
            << "\n";
    }
    return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << text;
}

}  // namespace acgeo

#endif  // ACGEO_IO_HPP
