#ifndef ACGEO_CORE_HPP
#define ACGEO_CORE_HPP

// Small fixed-capacity vector/matrix types for ambient dimension n in {2, 3},
// plus the error taxonomy shared by all modules.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace acgeo {

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Invalid configuration or precondition violation (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during an otherwise valid computation (CLI exit code 3).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric evaluation requested at (or too close to) the cone vertex with no
// regularization in effect.
struct SingularPointError : NumericalError {
    explicit SingularPointError(const std::string& msg) : NumericalError(msg) {}
};

// ---------------------------------------------------------------------------
// Vec: runtime-dimensional vector with capacity 3
// ---------------------------------------------------------------------------

struct Vec {
    std::array<double, 3> a{0.0, 0.0, 0.0};
    int n = 0;

    Vec() = default;
    Vec(double x, double y) : a{x, y, 0.0}, n(2) {}
    Vec(double x, double y, double z) : a{x, y, z}, n(3) {}

    static Vec zero(int dim) {
        Vec v;
        v.n = dim;
        return v;
    }
    static Vec unit(int dim, int axis) {
        Vec v = zero(dim);
        v.a[static_cast<std::size_t>(axis)] = 1.0;
        return v;
    }

    double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] += o[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] -= o[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] *= s;
        return *this;
    }

    friend Vec operator+(Vec u, const Vec& v) { return u += v; }
    friend Vec operator-(Vec u, const Vec& v) { return u -= v; }
    friend Vec operator*(double s, Vec u) { return u *= s; }
    friend Vec operator*(Vec u, double s) { return u *= s; }
    friend Vec operator/(Vec u, double s) { return u *= (1.0 / s); }
    friend Vec operator-(Vec u) { return u *= -1.0; }
};

inline double dot(const Vec& u, const Vec& v) {
    double s = 0.0;
    for (int i = 0; i < u.n; ++i) s += u[i] * v[i];
    return s;
}

inline double norm(const Vec& u) { return std::sqrt(dot(u, u)); }

inline Vec normalized(const Vec& u) {
    const double r = norm(u);
    if (r == 0.0) throw NumericalError("normalized: zero vector");
    return u / r;
}

// Euclidean angle between two nonzero vectors, in [0, pi].
inline double angle_between(const Vec& u, const Vec& v) {
    const double c = dot(u, v) / (norm(u) * norm(v));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Mat: runtime-dimensional symmetric-friendly matrix with capacity 3x3
// ---------------------------------------------------------------------------

struct Mat {
    std::array<double, 9> a{};
    int n = 0;

    static Mat zero(int dim) {
        Mat m;
        m.n = dim;
        return m;
    }
    static Mat identity(int dim) {
        Mat m = zero(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * 3 + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * 3 + j)]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) *= s;
        return *this;
    }

    friend Mat operator+(Mat u, const Mat& v) { return u += v; }
    friend Mat operator-(Mat u, const Mat& v) { return u -= v; }
    friend Mat operator*(double s, Mat u) { return u *= s; }

    Vec apply(const Vec& v) const {
        Vec r = Vec::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    // Quadratic form v^T M v.
    double quad(const Vec& v) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * v[i] * v[j];
        return s;
    }
};

// Rank-one outer product u u^T.
inline Mat outer(const Vec& u) {
    Mat m = Mat::zero(u.n);
    for (int i = 0; i < u.n; ++i)
        for (int j = 0; j < u.n; ++j) m(i, j) = u[i] * u[j];
    return m;
}

// Solve M x = b for a symmetric positive definite M via Cholesky.
// Throws NumericalError when M is not positive definite.
inline Vec solve_spd(const Mat& m, const Vec& b) {
    const int n = m.n;
    Mat l = Mat::zero(n);
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NumericalError("solve_spd: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    Vec y = Vec::zero(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vec x = Vec::zero(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

// Eigenvalues of a symmetric 2x2 or 3x3 matrix, ascending. Used for metric
// conditioning estimates (step sizing), so a cyclic Jacobi sweep suffices.
inline std::array<double, 3> sym_eigenvalues(Mat m) {
    const int n = m.n;
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * m(p, q), m(q, q) - m(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                Mat r = m;
                for (int k = 0; k < n; ++k) {
                    r(p, k) = c * m(p, k) - s * m(q, k);
                    r(q, k) = s * m(p, k) + c * m(q, k);
                }
                Mat r2 = r;
                for (int k = 0; k < n; ++k) {
                    r2(k, p) = c * r(k, p) - s * r(k, q);
                    r2(k, q) = s * r(k, p) + c * r(k, q);
                }
                m = r2;
            }
        }
    }
    std::array<double, 3> ev{m(0, 0), m(1, 1), n > 2 ? m(2, 2) : m(1, 1)};
    std::sort(ev.begin(), ev.begin() + n);
    if (n == 2) ev[2] = ev[1];
    return ev;
}

}  // namespace acgeo

#endif  // ACGEO_CORE_HPP
