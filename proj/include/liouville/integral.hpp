#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "liouville/geometry.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Candidate first integral quadratic in momenta:
//     F = a p_x^2 + b p_x p_y + c p_y^2.
// The coefficient matrix form is Ft^{ij} = [[a, b/2], [b/2, c]].
// ---------------------------------------------------------------------------

struct QuadraticIntegral {
    ScalarField2D a, b, c;

    Sym2 coeff_at(double x, double y) const {
        return {a(x, y), 0.5 * b(x, y), c(x, y)};
    }
    Sym2 coeff_dx(double x, double y) const {
        return {a.dx(x, y), 0.5 * b.dx(x, y), c.dx(x, y)};
    }
    Sym2 coeff_dy(double x, double y) const {
        return {a.dy(x, y), 0.5 * b.dy(x, y), c.dy(x, y)};
    }

    // value on a covector p at the point
    double value(double x, double y, const Vec2& p) const { return coeff_at(x, y).quad(p); }
};

inline QuadraticIntegral lin_comb(double alpha, const QuadraticIntegral& F,
                                  double beta, const QuadraticIntegral& G) {
    using namespace fields;
    return {add(scale(F.a, alpha), scale(G.a, beta)),
            add(scale(F.b, alpha), scale(G.b, beta)),
            add(scale(F.c, alpha), scale(G.c, beta))};
}

// ---------------------------------------------------------------------------
// Symmetric matrices of scalar fields; the small amount of matrix algebra
// needed to move between metrics and integrals while keeping derivatives.
// ---------------------------------------------------------------------------

struct SymFields {
    ScalarField2D m11, m12, m22;

    Sym2 at(double x, double y) const { return {m11(x, y), m12(x, y), m22(x, y)}; }
};

inline SymFields metric_fields(const MetricField& M) { return {M.g11, M.g12, M.g22}; }

inline ScalarField2D sym_det(const SymFields& S) {
    using namespace fields;
    return sub(mul(S.m11, S.m22), mul(S.m12, S.m12));
}

inline SymFields sym_inverse(const SymFields& S) {
    using namespace fields;
    ScalarField2D d = sym_det(S);
    return {div(S.m22, d), neg(div(S.m12, d)), div(S.m11, d)};
}

// A * B * A for symmetric A, B (the result is symmetric again)
inline SymFields sym_sandwich(const SymFields& A, const SymFields& B) {
    using namespace fields;
    // C = A*B (general), then C*A; spell out the needed entries
    ScalarField2D c11 = add(mul(A.m11, B.m11), mul(A.m12, B.m12));
    ScalarField2D c12 = add(mul(A.m11, B.m12), mul(A.m12, B.m22));
    ScalarField2D c21 = add(mul(A.m12, B.m11), mul(A.m22, B.m12));
    ScalarField2D c22 = add(mul(A.m12, B.m12), mul(A.m22, B.m22));
    return {add(mul(c11, A.m11), mul(c12, A.m12)),
            add(mul(c11, A.m12), mul(c12, A.m22)),
            add(mul(c21, A.m12), mul(c22, A.m22))};
}

inline SymFields sym_scale(const SymFields& S, const ScalarField2D& w) {
    using namespace fields;
    return {mul(S.m11, w), mul(S.m12, w), mul(S.m22, w)};
}

// coefficients of the Hamiltonian H = (1/2) g^{ij} p_i p_j as a quadratic form
inline QuadraticIntegral hamiltonian_coefficients(const MetricField& M) {
    using namespace fields;
    SymFields gi = sym_inverse(metric_fields(M));
    return {scale(gi.m11, 0.5), gi.m12, scale(gi.m22, 0.5)};
}

// ---------------------------------------------------------------------------
// Point transforms under a change of chart with Jacobian J = d(old)/d(new).
// Covariant (metric) and contravariant (integral coefficients) laws.
// ---------------------------------------------------------------------------

inline Sym2 pull_metric(const Sym2& G, const Mat2& J) {
    const Mat2 r = J.transpose() * G.full() * J;
    return {r.a11, r.a12, r.a22};
}

inline Sym2 push_quadratic(const Sym2& Ft, const Mat2& J) {
    const Mat2 Ji = J.inverse();
    const Mat2 r = Ji * Ft.full() * Ji.transpose();
    return {r.a11, r.a12, r.a22};
}

// ---------------------------------------------------------------------------
// PDE system residuals in a conformally null chart g = f dx dy:
//     a_y = 0
//     f a_x + f b_y + 2 f_x a + f_y b = 0
//     f b_x + f c_y + f_x b + 2 f_y c = 0
//     c_x = 0
// ---------------------------------------------------------------------------

struct SysResiduals {
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
    double max_abs() const {
        return std::max(std::max(std::abs(r1), std::abs(r2)),
                        std::max(std::abs(r3), std::abs(r4)));
    }
};

inline SysResiduals sys_residuals(const QuadraticIntegral& F, const MetricField& M,
                                  double x, double y) {
    const Sym2 g = M.at(x, y);
    const double scale = g.max_abs();
    if (std::abs(g.m11) > 1e-9 * scale || std::abs(g.m22) > 1e-9 * scale)
        throw config_error("sys_residuals: metric is not in conformally null form f dx dy");
    const double f = 2.0 * g.m12;
    const double fx = 2.0 * M.g12.dx(x, y), fy = 2.0 * M.g12.dy(x, y);
    const double a = F.a(x, y), b = F.b(x, y), c = F.c(x, y);
    SysResiduals r;
    r.r1 = F.a.dy(x, y);
    r.r2 = f * F.a.dx(x, y) + f * F.b.dy(x, y) + 2.0 * fx * a + fy * b;
    r.r3 = f * F.b.dx(x, y) + f * F.c.dy(x, y) + fx * b + 2.0 * fy * c;
    r.r4 = F.c.dx(x, y);
    return r;
}

// ---------------------------------------------------------------------------
// Poisson bracket {H, F} evaluated at a phase point, and the residual
// max_k |{H,F}(p_k)| over 8 unit momentum covectors at equal angles.
// ---------------------------------------------------------------------------

inline double poisson_bracket_HF(const MetricField& M, const QuadraticIntegral& F,
                                 double x, double y, const Vec2& p) {
    const Sym2 g = M.at(x, y);
    const Sym2 gi = g.inverse();
    const Sym2 dg[2] = {M.d_at(x, y, 0), M.d_at(x, y, 1)};
    // d_i g^{-1} = -g^{-1} (d_i g) g^{-1}
    Sym2 dgi[2];
    for (int i = 0; i < 2; ++i) {
        const Mat2 m = gi.full() * dg[i].full() * gi.full();
        dgi[i] = Sym2{-m.a11, -m.a12, -m.a22};
    }
    const Sym2 Ft = F.coeff_at(x, y);
    const Sym2 dFt[2] = {F.coeff_dx(x, y), F.coeff_dy(x, y)};

    const Vec2 dHdp = gi.apply(p);               // dH/dp_i = g^{ik} p_k
    const Vec2 dFdp = Ft.apply(p) * 2.0;         // dF/dp_i = 2 Ft^{ik} p_k
    const double dHdx[2] = {0.5 * dgi[0].quad(p), 0.5 * dgi[1].quad(p)};
    const double dFdx[2] = {dFt[0].quad(p), dFt[1].quad(p)};

    return dHdp.x * dFdx[0] + dHdp.y * dFdx[1] - dHdx[0] * dFdp.x - dHdx[1] * dFdp.y;
}

inline double poisson_bracket_residual(const MetricField& M, const QuadraticIntegral& F,
                                       double x, double y, int n_angles = 8) {
    double worst = 0.0;
    for (int k = 0; k < n_angles; ++k) {
        const double th = kTwoPi * k / n_angles;
        worst = std::max(worst,
                         std::abs(poisson_bracket_HF(M, F, x, y, {std::cos(th), std::sin(th)})));
    }
    return worst;
}

inline double poisson_bracket_residual_grid(const MetricField& M, const QuadraticIntegral& F,
                                            const Rect& r, int nx, int ny, int n_angles = 8) {
    double worst = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double x = r.x0 + r.width() * (i + 0.5) / nx;
            const double y = r.y0 + r.height() * (j + 0.5) / ny;
            worst = std::max(worst, poisson_bracket_residual(M, F, x, y, n_angles));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Mixed (1,1) tensor Ft^i_j = Ft^{ik} g_kj, its trace L, and its eigenvalue
// data.  The sign of the characteristic discriminant separates the three
// local regimes; the trace is the coordinate-free scalar attached to F.
// ---------------------------------------------------------------------------

inline Mat2 mixed_tensor_at(const QuadraticIntegral& F, const MetricField& M,
                            double x, double y) {
    return F.coeff_at(x, y).full() * M.at(x, y).full();
}

inline double trace_L(const QuadraticIntegral& F, const MetricField& M, double x, double y) {
    return mixed_tensor_at(F, M, x, y).trace();
}

inline Eigen2 eigen_data(const QuadraticIntegral& F, const MetricField& M, double x, double y) {
    return eigenvalues_2x2(mixed_tensor_at(F, M, x, y));
}

// ---------------------------------------------------------------------------
// Local type of the pair (g, F) at a point.
//
// In an admissible null chart the type is the sign pattern of (a, c).  These
// signs are recovered chart-free by evaluating F on the g-flats of the null
// frame: with (V1, V2) the normalized frame and w_i = g(V_i, .),
// F(w2) is a positive multiple of a and F(w1) a positive multiple of c.
// ---------------------------------------------------------------------------

enum class TypeLabel { LIOUVILLE, COMPLEX_LIOUVILLE, JORDAN_A, JORDAN_B, DEGENERATE };

inline const char* to_string(TypeLabel t) {
    switch (t) {
        case TypeLabel::LIOUVILLE: return "LIOUVILLE";
        case TypeLabel::COMPLEX_LIOUVILLE: return "COMPLEX_LIOUVILLE";
        case TypeLabel::JORDAN_A: return "JORDAN_A";
        case TypeLabel::JORDAN_B: return "JORDAN_B";
        default: return "DEGENERATE";
    }
}

// the (a, c) surrogates used by the classifier
inline std::pair<double, double> null_frame_coefficients(const QuadraticIntegral& F,
                                                         const MetricField& M,
                                                         double x, double y) {
    const auto [V1, V2] = null_frame_at(M, x, y);
    const Sym2 g = M.at(x, y);
    const Vec2 w1 = g.apply(V1), w2 = g.apply(V2);
    const Sym2 Ft = F.coeff_at(x, y);
    return {Ft.quad(w2), Ft.quad(w1)};
}

inline TypeLabel classify_point(const QuadraticIntegral& F, const MetricField& M,
                                double x, double y, double zero_tol) {
    const auto [ae, ce] = null_frame_coefficients(F, M, x, y);
    const bool a0 = std::abs(ae) <= zero_tol;
    const bool c0 = std::abs(ce) <= zero_tol;
    if (a0 && c0) return TypeLabel::DEGENERATE;
    if (c0) return TypeLabel::JORDAN_A;
    if (a0) return TypeLabel::JORDAN_B;
    return (ae * ce > 0.0) ? TypeLabel::LIOUVILLE : TypeLabel::COMPLEX_LIOUVILLE;
}

struct ClassificationReport {
    int nx = 0, ny = 0;
    double zero_tol = 0.0;
    std::vector<TypeLabel> labels;          // row-major, ny rows of nx
    int counts[5] = {0, 0, 0, 0, 0};
    int boundary_cells = 0;                 // cells deciding within 10x of the tol

    double fraction(TypeLabel t) const {
        const int n = nx * ny;
        return n ? static_cast<double>(counts[static_cast<int>(t)]) / n : 0.0;
    }
    double jordan_fraction() const {
        return fraction(TypeLabel::JORDAN_A) + fraction(TypeLabel::JORDAN_B) +
               fraction(TypeLabel::DEGENERATE);
    }
};

// Two-pass grid classification: the zero threshold is relative to the grid
// scale of the frame coefficients, rel_tol * max(|a| + |c|).
inline ClassificationReport classify_grid(const QuadraticIntegral& F, const MetricField& M,
                                          const Rect& r, int nx, int ny,
                                          double rel_tol = 1e-7) {
    ClassificationReport rep;
    rep.nx = nx;
    rep.ny = ny;
    std::vector<std::pair<double, double>> vals(static_cast<size_t>(nx) * ny);
    double scale = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = r.x0 + r.width() * (i + 0.5) / nx;
            const double y = r.y0 + r.height() * (j + 0.5) / ny;
            auto ac = null_frame_coefficients(F, M, x, y);
            vals[static_cast<size_t>(j) * nx + i] = ac;
            scale = std::max(scale, std::abs(ac.first) + std::abs(ac.second));
        }
    rep.zero_tol = rel_tol * scale;
    rep.labels.reserve(vals.size());
    for (const auto& [ae, ce] : vals) {
        const bool a0 = std::abs(ae) <= rep.zero_tol;
        const bool c0 = std::abs(ce) <= rep.zero_tol;
        TypeLabel t;
        if (a0 && c0) t = TypeLabel::DEGENERATE;
        else if (c0) t = TypeLabel::JORDAN_A;
        else if (a0) t = TypeLabel::JORDAN_B;
        else t = (ae * ce > 0.0) ? TypeLabel::LIOUVILLE : TypeLabel::COMPLEX_LIOUVILLE;
        rep.labels.push_back(t);
        ++rep.counts[static_cast<int>(t)];
        const double m = std::min(std::abs(ae), std::abs(ce));
        if (m > rep.zero_tol && m <= 10.0 * rep.zero_tol) ++rep.boundary_cells;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// 1-forms B1 = dx/sqrt|a|, B2 = dy/sqrt|c| (values of the scalar factors),
// defined wherever the respective coefficient is nonzero.
// ---------------------------------------------------------------------------

struct BKFormValues {
    std::optional<double> B1, B2;
};

inline BKFormValues bk_form_values(const QuadraticIntegral& F, double x, double y,
                                   double zero_tol = 1e-12) {
    BKFormValues out;
    const double a = F.a(x, y), c = F.c(x, y);
    if (std::abs(a) > zero_tol) out.B1 = 1.0 / std::sqrt(std::abs(a));
    if (std::abs(c) > zero_tol) out.B2 = 1.0 / std::sqrt(std::abs(c));
    return out;
}

// max variation of a along y sweeps (Lemma-style "a depends only on x" check)
inline double coefficient_y_variation(const ScalarField2D& a, const Rect& r, int nx, int ny) {
    double worst = 0.0;
    for (int i = 0; i <= nx; ++i) {
        const double x = r.x0 + r.width() * i / nx;
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j <= ny; ++j) {
            const double v = a(x, r.y0 + r.height() * j / ny);
            if (j == 0) lo = hi = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

inline double coefficient_x_variation(const ScalarField2D& c, const Rect& r, int nx, int ny) {
    double worst = 0.0;
    for (int j = 0; j <= ny; ++j) {
        const double y = r.y0 + r.height() * j / ny;
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i <= nx; ++i) {
            const double v = c(r.x0 + r.width() * i / nx, y);
            if (i == 0) lo = hi = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Perfect coordinate: x_new(x) = int_{x0}^{x} dt / sqrt|a(t)| as a sampled
// monotone map (composite Simpson over n_steps panels).  Requires a to keep
// a fixed sign on the whole interval.
// ---------------------------------------------------------------------------

struct MonotoneMap {
    std::vector<double> x;       // nodes
    std::vector<double> value;   // x_new at the nodes
    std::vector<double> slope;   // dx_new/dx at the nodes

    double interpolate(double t) const {
        if (x.size() < 2) return value.empty() ? 0.0 : value.front();
        const double h = x[1] - x[0];
        int i = static_cast<int>((t - x.front()) / h);
        i = std::clamp(i, 0, static_cast<int>(x.size()) - 2);
        const double u = (t - x[i]) / h;
        return value[i] * (1.0 - u) + value[i + 1] * u;
    }
};

inline MonotoneMap perfect_coordinate(const QuadraticIntegral& F, double x0, double x1,
                                      int n_steps, double y_ref = 0.0) {
    if (!(x1 > x0)) throw ordering_error("perfect_coordinate: x1 must exceed x0");
    if (n_steps < 2) n_steps = 2;
    const double h = (x1 - x0) / n_steps;
    // sign check on a midpoint sampling (zero of a invalidates the chart)
    const double a_first = F.a(x0, y_ref);
    for (int i = 0; i <= 4 * n_steps; ++i) {
        const double a = F.a(x0 + (x1 - x0) * i / (4.0 * n_steps), y_ref);
        if (a == 0.0 || (a > 0.0) != (a_first > 0.0) || std::abs(a) < 1e-14)
            throw zero_crossing_error("perfect_coordinate: coefficient a vanishes on the interval");
    }
    auto w = [&](double t) { return 1.0 / std::sqrt(std::abs(F.a(t, y_ref))); };
    MonotoneMap m;
    m.x.resize(n_steps + 1);
    m.value.resize(n_steps + 1);
    m.slope.resize(n_steps + 1);
    m.x[0] = x0;
    m.value[0] = 0.0;
    m.slope[0] = w(x0);
    for (int i = 0; i < n_steps; ++i) {
        const double a = x0 + i * h, b = a + h;
        m.x[i + 1] = b;
        m.value[i + 1] = m.value[i] + (h / 6.0) * (w(a) + 4.0 * w(0.5 * (a + b)) + w(b));
        m.slope[i + 1] = w(b);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Rank-one test: F is (up to sign) the square of a linear-in-momenta
// function iff Ft has rank <= 1 with a definite sign.  Returns the vector
// field v with F = +-(v^1 p_x + v^2 p_y)^2 when the test passes.
// ---------------------------------------------------------------------------

inline std::optional<VectorField2D> is_square_of_linear(const QuadraticIntegral& F,
                                                        const Rect& r, int nx, int ny,
                                                        double rel_tol = 1e-9) {
    double scale = 0.0, worst_det = 0.0;
    double amin = 0.0, amax = 0.0, cmin = 0.0, cmax = 0.0;
    bool first = true;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double x = r.x0 + r.width() * i / nx;
            const double y = r.y0 + r.height() * j / ny;
            const Sym2 Ft = F.coeff_at(x, y);
            scale = std::max(scale, Ft.max_abs());
            worst_det = std::max(worst_det, std::abs(Ft.det()));
            if (first) { amin = amax = Ft.m11; cmin = cmax = Ft.m22; first = false; }
            amin = std::min(amin, Ft.m11); amax = std::max(amax, Ft.m11);
            cmin = std::min(cmin, Ft.m22); cmax = std::max(cmax, Ft.m22);
        }
    if (scale == 0.0) return std::nullopt;                   // F == 0
    const double tol = rel_tol * scale;
    if (worst_det > tol * scale) return std::nullopt;        // rank 2 somewhere
    // diagonal entries of a rank-1 form are +-squares; they must share a sign
    const bool nonneg = amin >= -tol && cmin >= -tol;
    const bool nonpos = amax <= tol && cmax <= tol;
    if (!nonneg && !nonpos) return std::nullopt;
    const double sgn = nonneg ? 1.0 : -1.0;

    auto factor = [sgn, F, tol](double x, double y) -> Vec2 {
        const Sym2 Ft = F.coeff_at(x, y) * sgn;              // PSD now
        const double w11 = std::max(Ft.m11, 0.0), w22 = std::max(Ft.m22, 0.0);
        if (w11 <= tol && w22 <= tol) return {0.0, 0.0};
        if (w11 >= w22) {
            const double alpha = std::sqrt(w11);
            return {alpha, Ft.m12 / alpha};
        }
        const double beta = std::sqrt(w22);
        return {Ft.m12 / beta, beta};
    };
    VectorField2D v;
    v.vx.f = [factor](double x, double y) { return factor(x, y).x; };
    v.vy.f = [factor](double x, double y) { return factor(x, y).y; };
    return v;
}

// max-norm Killing residual of v over a sampled grid
inline double killing_residual(const MetricField& M, const VectorField2D& v,
                               const Rect& r, int nx, int ny) {
    double worst = 0.0;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double x = r.x0 + r.width() * i / nx;
            const double y = r.y0 + r.height() * j / ny;
            worst = std::max(worst, lie_derivative_metric(M, v, x, y).max_abs());
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Least-squares fit of F ~ kappa * H over a grid; used to detect trivial
// integrals (F proportional to the Hamiltonian).
// ---------------------------------------------------------------------------

struct ProportionalFit {
    double kappa = 0.0;
    double rel_residual = 0.0;   // ||F - kappa H|| / ||F|| in the sampled norm
};

inline ProportionalFit fit_multiple_of_H(const QuadraticIntegral& F, const MetricField& M,
                                         const Rect& r, int nx, int ny) {
    double fh = 0.0, hh = 0.0, ff = 0.0;
    std::vector<std::pair<Sym2, Sym2>> rows;
    rows.reserve(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = r.x0 + r.width() * (i + 0.5) / nx;
            const double y = r.y0 + r.height() * (j + 0.5) / ny;
            const Sym2 Ft = F.coeff_at(x, y);
            const Sym2 Ht = M.inverse_at(x, y) * 0.5;
            rows.emplace_back(Ft, Ht);
            fh += Ft.m11 * Ht.m11 + 2.0 * Ft.m12 * Ht.m12 + Ft.m22 * Ht.m22;
            hh += Ht.m11 * Ht.m11 + 2.0 * Ht.m12 * Ht.m12 + Ht.m22 * Ht.m22;
            ff += Ft.m11 * Ft.m11 + 2.0 * Ft.m12 * Ft.m12 + Ft.m22 * Ft.m22;
        }
    ProportionalFit fit;
    fit.kappa = (hh > 0.0) ? fh / hh : 0.0;
    double res = 0.0;
    for (const auto& [Ft, Ht] : rows) {
        const double d11 = Ft.m11 - fit.kappa * Ht.m11;
        const double d12 = Ft.m12 - fit.kappa * Ht.m12;
        const double d22 = Ft.m22 - fit.kappa * Ht.m22;
        res += d11 * d11 + 2.0 * d12 * d12 + d22 * d22;
    }
    fit.rel_residual = (ff > 0.0) ? std::sqrt(res / ff) : 0.0;
    return fit;
}

}  // namespace liouville
