#pragma once

#include <optional>

#include "liouville/core.hpp"
#include "liouville/scalar.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Period lattice of a torus, spanned by xi and nu.
// ---------------------------------------------------------------------------

struct Lattice {
    Vec2 xi{1.0, 0.0};
    Vec2 nu{0.0, 1.0};

    Lattice() = default;
    Lattice(Vec2 a, Vec2 b) : xi(a), nu(b) { validate(); }

    void validate() const {
        if (std::abs(cross(xi, nu)) < 1e-12)
            throw config_error("Lattice: basis vectors are (numerically) collinear");
    }

    // coordinates of p in the lattice basis
    Vec2 basis_coords(const Vec2& p) const {
        const double d = cross(xi, nu);
        return {cross(p, nu) / d, cross(xi, p) / d};
    }

    // representative of p inside the fundamental domain [0,1)^2 in basis coords
    Vec2 reduce(const Vec2& p) const {
        Vec2 c = basis_coords(p);
        c.x -= std::floor(c.x);
        c.y -= std::floor(c.y);
        return xi * c.x + nu * c.y;
    }
};

struct VectorField2D {
    ScalarField2D vx, vy;

    Vec2 at(double x, double y) const { return {vx(x, y), vy(x, y)}; }
    Mat2 jacobian_at(double x, double y) const {
        return {vx.dx(x, y), vx.dy(x, y), vy.dx(x, y), vy.dy(x, y)};
    }
};

// ---------------------------------------------------------------------------
// Metric field g = g11 dx^2 + 2 g12 dx dy + g22 dy^2.
// The conformally null form f dx dy therefore has g12 = f/2.
// ---------------------------------------------------------------------------

enum class Signature { riemannian, lorentzian };

// values and partials of the metric coefficients at one point
struct MetricJet {
    Sym2 g, gx, gy;           // g and first partials
    Sym2 gxx, gxy, gyy;       // second partials
    double det = 0.0;
    Sym2 ginv;
};

struct MetricField {
    ScalarField2D g11, g12, g22;
    Signature signature = Signature::lorentzian;
    std::optional<Lattice> lattice;

    static constexpr double kDegenerateTol = 1e-12;

    Sym2 at(double x, double y) const {
        Sym2 g{g11(x, y), g12(x, y), g22(x, y)};
        if (std::abs(g.det()) < kDegenerateTol)
            throw degenerate_metric_error("metric degenerate at sample point");
        return g;
    }

    Sym2 inverse_at(double x, double y) const { return at(x, y).inverse(); }

    Sym2 d_at(double x, double y, int dir) const {
        if (dir == 0) return {g11.dx(x, y), g12.dx(x, y), g22.dx(x, y)};
        return {g11.dy(x, y), g12.dy(x, y), g22.dy(x, y)};
    }

    MetricJet jet(double x, double y) const {
        MetricJet j;
        j.g = at(x, y);
        j.gx = {g11.dx(x, y), g12.dx(x, y), g22.dx(x, y)};
        j.gy = {g11.dy(x, y), g12.dy(x, y), g22.dy(x, y)};
        j.gxx = {g11.dxx(x, y), g12.dxx(x, y), g22.dxx(x, y)};
        j.gxy = {g11.dxy(x, y), g12.dxy(x, y), g22.dxy(x, y)};
        j.gyy = {g11.dyy(x, y), g12.dyy(x, y), g22.dyy(x, y)};
        j.det = j.g.det();
        j.ginv = j.g.inverse();
        return j;
    }
};

namespace detail {

inline double sym_get(const Sym2& s, int i, int j) {
    if (i == 0 && j == 0) return s.m11;
    if (i == 1 && j == 1) return s.m22;
    return s.m12;
}

// gamma[i][j][k] = Gamma^i_{jk}
using Christoffel = std::array<std::array<std::array<double, 2>, 2>, 2>;
// dgamma[m][i][j][k] = d_m Gamma^i_{jk}
using DChristoffel = std::array<Christoffel, 2>;

inline Christoffel christoffel_from_jet(const MetricJet& jet) {
    double dg[2][2][2];   // dg[m][i][j] = d_m g_ij
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            dg[0][i][j] = sym_get(jet.gx, i, j);
            dg[1][i][j] = sym_get(jet.gy, i, j);
        }
    Christoffel gamma{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double s = 0.0;
                for (int l = 0; l < 2; ++l)
                    s += sym_get(jet.ginv, i, l) *
                         (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]);
                gamma[i][j][k] = 0.5 * s;
            }
    return gamma;
}

inline DChristoffel dchristoffel_from_jet(const MetricJet& jet) {
    double dg[2][2][2];
    double d2g[2][2][2][2];   // d2g[m][n][i][j] = d_m d_n g_ij
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            dg[0][i][j] = sym_get(jet.gx, i, j);
            dg[1][i][j] = sym_get(jet.gy, i, j);
            d2g[0][0][i][j] = sym_get(jet.gxx, i, j);
            d2g[0][1][i][j] = sym_get(jet.gxy, i, j);
            d2g[1][0][i][j] = sym_get(jet.gxy, i, j);
            d2g[1][1][i][j] = sym_get(jet.gyy, i, j);
        }
    // d_m g^{il} = -g^{ia} (d_m g_ab) g^{bl}
    double dginv[2][2][2];
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l) {
                double s = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        s += sym_get(jet.ginv, i, a) * dg[m][a][b] * sym_get(jet.ginv, b, l);
                dginv[m][i][l] = -s;
            }
    DChristoffel out{};
    for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < 2; ++l) {
                        s += dginv[m][i][l] * (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]);
                        s += sym_get(jet.ginv, i, l) *
                             (d2g[m][j][l][k] + d2g[m][k][j][l] - d2g[m][l][j][k]);
                    }
                    out[m][i][j][k] = 0.5 * s;
                }
    return out;
}

}  // namespace detail

// Christoffel symbols as a pair of symmetric matrices: chris[i](j,k) = Gamma^i_{jk}.
inline std::array<Sym2, 2> christoffel_at(const MetricField& M, double x, double y) {
    const auto g = detail::christoffel_from_jet(M.jet(x, y));
    return {Sym2{g[0][0][0], g[0][0][1], g[0][1][1]},
            Sym2{g[1][0][0], g[1][0][1], g[1][1][1]}};
}

// Gauss curvature K = g_{1l} R^l_{212} / det g, all derivatives analytic
// through the metric jet.
inline double gauss_curvature_at(const MetricField& M, double x, double y) {
    const MetricJet jet = M.jet(x, y);
    const auto gamma = detail::christoffel_from_jet(jet);
    const auto dgamma = detail::dchristoffel_from_jet(jet);
    // R^l_{212} in 1-based indices = R[l] below with k=1, i=0, j=1 (0-based)
    double R[2];
    for (int l = 0; l < 2; ++l) {
        double s = dgamma[0][l][1][1] - dgamma[1][l][0][1];
        for (int m = 0; m < 2; ++m)
            s += gamma[l][0][m] * gamma[m][1][1] - gamma[l][1][m] * gamma[m][0][1];
        R[l] = s;
    }
    const double r1212 = detail::sym_get(jet.g, 0, 0) * R[0] + detail::sym_get(jet.g, 0, 1) * R[1];
    return r1212 / jet.det;
}

// ---------------------------------------------------------------------------
// Deterministic null frame of a lorentzian metric.
//
// Returns (V1, V2) with g(V1,V1) = g(V2,V2) = 0, g(V1,V2) = 1, positively
// oriented; the branch is pinned by requiring V1 to have positive
// x-component (positive y-component when the x-component vanishes).
// ---------------------------------------------------------------------------

inline std::pair<Vec2, Vec2> null_frame_at(const MetricField& M, double x, double y) {
    const Sym2 g = M.at(x, y);
    if (g.det() >= 0.0)
        throw signature_error("null frame requested at a point where the metric is not lorentzian");

    const double scale = g.max_abs();
    Vec2 d1, d2;
    if (std::abs(g.m11) <= 1e-14 * scale && std::abs(g.m22) <= 1e-14 * scale) {
        d1 = {1.0, 0.0};
        d2 = {0.0, 1.0};
    } else {
        // roots of q2 m^2 + 2 q1 m + q0 = 0 via the stable pairing
        auto roots = [](double q2, double q1, double q0) {
            const double disc = q1 * q1 - q2 * q0;
            const double r = std::sqrt(disc);
            const double m1 = (q1 >= 0.0) ? (-q1 - r) / q2 : (-q1 + r) / q2;
            const double m2 = (m1 != 0.0) ? q0 / (q2 * m1) : -2.0 * q1 / q2 - m1;
            return std::pair<double, double>{m1, m2};
        };
        if (std::abs(g.m22) >= std::abs(g.m11)) {
            auto [m1, m2] = roots(g.m22, g.m12, g.m11);   // directions (1, m)
            d1 = {1.0, m1};
            d2 = {1.0, m2};
        } else {
            auto [m1, m2] = roots(g.m11, g.m12, g.m22);   // directions (m, 1)
            d1 = {m1, 1.0};
            d2 = {m2, 1.0};
        }
        d1 = d1 * (1.0 / d1.norm());
        d2 = d2 * (1.0 / d2.norm());
    }

    // match the sign of g(d1,d2) with the orientation by ordering the pair
    const double gamma = g.bilin(d1, d2);
    const double orient = cross(d1, d2);
    if ((gamma > 0.0) != (orient > 0.0)) std::swap(d1, d2);

    // branch: V1 keeps positive x-component (positive y if x ~ 0)
    double eps = 1.0;
    if (d1.x < -1e-12 || (std::abs(d1.x) <= 1e-12 && d1.y < 0.0)) eps = -1.0;
    const double prod = (g.bilin(d1, d2) > 0.0) ? 1.0 : -1.0;   // required eps*sig
    const double sig = prod * eps;

    Vec2 V1 = d1 * eps, V2 = d2 * sig;
    const double gam = g.bilin(V1, V2);   // positive by construction
    const double s = 1.0 / std::sqrt(gam);
    return {V1 * s, V2 * s};
}

// Lie derivative of the metric along v, returned as the symmetric matrix
// (L_v g)_{ij} = v^k d_k g_ij + g_kj d_i v^k + g_ik d_j v^k.
inline Sym2 lie_derivative_metric(const MetricField& M, const VectorField2D& v,
                                  double x, double y) {
    const Sym2 g = M.at(x, y);
    const Sym2 gx = M.d_at(x, y, 0), gy = M.d_at(x, y, 1);
    const Vec2 vv = v.at(x, y);
    const Mat2 J = v.jacobian_at(x, y);   // J(i,k) = d_i? no: rows are components
    // J = [[dvx/dx, dvx/dy], [dvy/dx, dvy/dy]], so d_i v^k = J(k, i)
    auto dv = [&J](int k, int i) {
        if (k == 0) return (i == 0) ? J.a11 : J.a12;
        return (i == 0) ? J.a21 : J.a22;
    };
    auto gg = [&g](int i, int j) { return detail::sym_get(g, i, j); };
    auto dg = [&](int m, int i, int j) {
        return detail::sym_get(m == 0 ? gx : gy, i, j);
    };
    double L[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = vv.x * dg(0, i, j) + vv.y * dg(1, i, j);
            for (int k = 0; k < 2; ++k) s += gg(k, j) * dv(k, i) + gg(i, k) * dv(k, j);
            L[i][j] = s;
        }
    return {L[0][0], L[0][1], L[1][1]};
}

}  // namespace liouville
