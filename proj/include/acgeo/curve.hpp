#ifndef ACGEO_CURVE_HPP
#define ACGEO_CURVE_HPP

// Polyline curves with fixed endpoints and their CSV serialization. The
// energy machinery lives in discrete_curve.hpp; this header only carries the
// value type so that exact-geometry code can construct sampled curves.

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "acgeo/core.hpp"

namespace acgeo {

struct DiscreteCurve {
    std::vector<Vec> pts;  // x_0 ... x_N; x_0 and x_N are fixed endpoints

    int segments() const { return static_cast<int>(pts.size()) - 1; }
    int dim() const { return pts.empty() ? 0 : pts.front().n; }

    void validate() const {
        if (segments() < 2) throw ConfigError("DiscreteCurve: needs N >= 2 segments");
        for (const Vec& x : pts)
            if (x.n != dim()) throw ConfigError("DiscreteCurve: mixed dimensions");
    }
};

// Minimum Euclidean distance from the polyline to the origin (point-to-segment
// distance per segment).
inline double closest_approach(const DiscreteCurve& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < c.pts.size(); ++i) {
        const Vec& a = c.pts[i];
        const Vec d = c.pts[i + 1] - a;
        const double dd = dot(d, d);
        double t = dd > 0.0 ? -dot(a, d) / dd : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, norm(a + t * d));
    }
    return best;
}

// Sup distance between two curves with the same vertex count.
inline double sup_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    if (a.pts.size() != b.pts.size())
        throw ConfigError("sup_distance: vertex counts differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.pts.size(); ++i)
        m = std::max(m, norm(a.pts[i] - b.pts[i]));
    return m;
}

// CSV format: header "t,x1,...,xn", one vertex per row with t = i/N, values at
// 17 significant digits so the round-trip is bit-exact.
inline std::string curve_to_csv(const DiscreteCurve& c) {
    std::ostringstream out;
    out << "t";
    for (int j = 0; j < c.dim(); ++j) out << ",x" << (j + 1);
    out << "\n";
    const int N = c.segments();
    char buf[40];
    for (int i = 0; i <= N; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(i) / N);
        out << buf;
        for (int j = 0; j < c.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", c.pts[static_cast<std::size_t>(i)][j]);
            out << "," << buf;
        }
        out << "\n";
    }
    return out.str();
}

inline DiscreteCurve curve_from_csv(std::istream& in) {
    DiscreteCurve c;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("curve_from_csv: empty input");
    int dim = 0;
    for (char ch : line)
        if (ch == ',') ++dim;
    if (dim < 2 || dim > 3) throw ConfigError("curve_from_csv: unsupported dimension");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');  // t column, recomputed on write
        Vec x = Vec::zero(dim);
        for (int j = 0; j < dim; ++j) {
            if (!std::getline(row, cell, ','))
                throw ConfigError("curve_from_csv: short row");
            x[j] = std::stod(cell);
        }
        c.pts.push_back(x);
    }
    c.validate();
    return c;
}

inline void write_curve_csv(const std::string& path, const DiscreteCurve& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_curve_csv: cannot open " + path);
    out << curve_to_csv(c);
}

inline DiscreteCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_curve_csv: cannot open " + path);
    return curve_from_csv(in);
}

}  // namespace acgeo

#endif  // ACGEO_CURVE_HPP
