#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace liouville {

// ---------------------------------------------------------------------------
// Errors. Every failure mode raised by the library derives from lab_error so
// callers (and the CLI) can separate input problems from certificate failures.
// ---------------------------------------------------------------------------

struct lab_error : std::runtime_error {
    explicit lab_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : lab_error {          // malformed input / bad parameters
    explicit config_error(const std::string& m) : lab_error(m) {}
};
struct degenerate_metric_error : lab_error {
    explicit degenerate_metric_error(const std::string& m) : lab_error(m) {}
};
struct signature_error : lab_error {
    explicit signature_error(const std::string& m) : lab_error(m) {}
};
struct collision_error : lab_error {       // X and Y ranges touch
    explicit collision_error(const std::string& m) : lab_error(m) {}
};
struct periodicity_error : lab_error {
    explicit periodicity_error(const std::string& m) : lab_error(m) {}
};
struct symmetry_error : lab_error {        // Klein gluing violated
    explicit symmetry_error(const std::string& m) : lab_error(m) {}
};
struct zero_crossing_error : lab_error {   // conformal factor loses a sign
    explicit zero_crossing_error(const std::string& m) : lab_error(m) {}
};
struct cr_violation_error : lab_error {
    explicit cr_violation_error(const std::string& m) : lab_error(m) {}
};
struct step_underflow_error : lab_error {
    explicit step_underflow_error(const std::string& m) : lab_error(m) {}
};
struct stationary_point_error : lab_error {
    explicit stationary_point_error(const std::string& m) : lab_error(m) {}
};
struct ordering_error : lab_error {        // x1 <= x0 and friends
    explicit ordering_error(const std::string& m) : lab_error(m) {}
};
struct singular_integral_error : lab_error {
    explicit singular_integral_error(const std::string& m) : lab_error(m) {}
};
struct non_integral_error : lab_error {    // candidate fails the bracket test
    explicit non_integral_error(const std::string& m) : lab_error(m) {}
};
struct certificate_error : lab_error {
    explicit certificate_error(const std::string& m) : lab_error(m) {}
};

// ---------------------------------------------------------------------------
// Tiny fixed-size linear algebra.  Everything on a surface is 2x2; using a
// full matrix library here would bury the formulas the code is about.
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }

    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Mat2 inverse() const {
        const double d = det();
        return Mat2{a22, -a12, -a21, a11} * (1.0 / d);
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a11), std::abs(a12)),
                        std::max(std::abs(a21), std::abs(a22)));
    }
};

// Symmetric 2x2, stored as the three independent entries.
struct Sym2 {
    double m11 = 0.0, m12 = 0.0, m22 = 0.0;

    double det() const { return m11 * m22 - m12 * m12; }
    double trace() const { return m11 + m22; }
    Mat2 full() const { return {m11, m12, m12, m22}; }

    // quadratic form on a vector / covector
    double quad(const Vec2& v) const {
        return m11 * v.x * v.x + 2.0 * m12 * v.x * v.y + m22 * v.y * v.y;
    }
    double bilin(const Vec2& u, const Vec2& v) const {
        return m11 * u.x * v.x + m12 * (u.x * v.y + u.y * v.x) + m22 * u.y * v.y;
    }
    Vec2 apply(const Vec2& v) const {
        return {m11 * v.x + m12 * v.y, m12 * v.x + m22 * v.y};
    }
    Sym2 inverse() const {
        const double d = det();
        return {m22 / d, -m12 / d, m11 / d};
    }
    Sym2 operator*(double s) const { return {m11 * s, m12 * s, m22 * s}; }
    Sym2 operator+(const Sym2& o) const {
        return {m11 + o.m11, m12 + o.m12, m22 + o.m22};
    }
    double max_abs() const {
        return std::max(std::abs(m11), std::max(std::abs(m12), std::abs(m22)));
    }

    // eigenvalues of the symmetric matrix, ascending
    std::array<double, 2> eigenvalues() const {
        const double h = 0.5 * trace();
        const double r = std::hypot(0.5 * (m11 - m22), m12);
        return {h - r, h + r};
    }
};

// Eigenvalues of a general real 2x2 matrix, possibly complex.
// Sorted by real part, ties broken by imaginary part.
struct Eigen2 {
    std::complex<double> lambda1, lambda2;
    double discriminant = 0.0;    // (tr/2)^2 - det; sign decides the regime
};

inline Eigen2 eigenvalues_2x2(const Mat2& m) {
    Eigen2 out;
    const double h = 0.5 * m.trace();
    const double d = m.det();
    out.discriminant = h * h - d;
    if (out.discriminant >= 0.0) {
        const double r = std::sqrt(out.discriminant);
        out.lambda1 = {h - r, 0.0};
        out.lambda2 = {h + r, 0.0};
    } else {
        const double r = std::sqrt(-out.discriminant);
        out.lambda1 = {h, -r};
        out.lambda2 = {h, +r};
    }
    return out;
}

// Axis-aligned sampling rectangle.
struct Rect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace liouville
