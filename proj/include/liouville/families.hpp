#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liouville/geometry.hpp"
#include "liouville/integral.hpp"

namespace liouville {

// ===========================================================================
// Named validity checks attached to constructed systems.  Advisory
// certificates record warnings that do not invalidate the construction.
// ===========================================================================

struct Certificate {
    std::string name;
    bool passed = false;
    double value = 0.0;   // measured quantity
    double bound = 0.0;   // threshold it was compared against
    bool advisory = false;
    std::string detail;
};

inline Certificate cert(std::string name, bool passed, double value, double bound,
                        std::string detail = "", bool advisory = false) {
    return {std::move(name), passed, value, bound, advisory, std::move(detail)};
}

// ===========================================================================
// Null chart: a coordinate patch (s,t) -> (x,y) whose coordinate lines are
// light-like for the system's metric.  jacobian returns d(x,y)/d(s,t).
// ===========================================================================

struct NullChart {
    std::function<Vec2(double, double)> to_surface;
    std::function<Mat2(double, double)> jacobian;
    Rect domain;          // in (s,t)
    std::string label;
};

// gluing map metadata for systems defined on an oriented double cover
struct Involution {
    double shift_x = 0.0;   // (x, y) -> (x + shift_x, -y)
};

struct TorusSystem {
    std::string family_tag;
    MetricField metric;
    std::vector<QuadraticIntegral> integrals;   // primary integral first
    std::optional<VectorField2D> killing;
    std::optional<Lattice> lattice;             // absent for chart-only systems
    Rect domain{0, 1, 0, 1};                    // verification rectangle
    std::vector<Certificate> certificates;
    std::optional<NullChart> chart;
    std::optional<Involution> involution;

    const QuadraticIntegral& integral() const { return integrals.front(); }

    bool all_passed() const {
        for (const auto& c : certificates)
            if (!c.passed && !c.advisory) return false;
        return true;
    }
    const Certificate* find_certificate(const std::string& name) const {
        for (const auto& c : certificates)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// ===========================================================================
// Holomorphic input data h(z) = sum coeffs[k] z^k, z = x + i y.
// Partials of (Re h, Im h) come from h' and h''; the Cauchy-Riemann
// certificate is finite-difference based so it does not trust them.
// ===========================================================================

struct HolomorphicData {
    std::vector<std::complex<double>> coeffs;

    // escape hatch for ingested (possibly non-holomorphic) part data
    std::optional<ScalarField2D> custom_re, custom_im;

    static HolomorphicData from_parts(ScalarField2D re, ScalarField2D im) {
        HolomorphicData h;
        h.custom_re = std::move(re);
        h.custom_im = std::move(im);
        return h;
    }

    std::complex<double> eval(int order, double x, double y) const {
        const std::complex<double> z(x, y);
        std::complex<double> acc(0.0, 0.0), zp(1.0, 0.0);
        for (size_t k = order; k < coeffs.size(); ++k) {
            double fac = 1.0;
            for (int m = 0; m < order; ++m) fac *= static_cast<double>(k - m);
            acc += fac * coeffs[k] * zp;
            zp *= z;
        }
        return acc;
    }

    ScalarField2D real_part() const {
        if (custom_re) return *custom_re;
        const HolomorphicData h = *this;
        ScalarField2D s;
        s.f   = [h](double x, double y) { return h.eval(0, x, y).real(); };
        s.fx  = [h](double x, double y) { return h.eval(1, x, y).real(); };
        s.fy  = [h](double x, double y) { return -h.eval(1, x, y).imag(); };
        s.fxx = [h](double x, double y) { return h.eval(2, x, y).real(); };
        s.fxy = [h](double x, double y) { return -h.eval(2, x, y).imag(); };
        s.fyy = [h](double x, double y) { return -h.eval(2, x, y).real(); };
        return s;
    }

    ScalarField2D imag_part() const {
        if (custom_im) return *custom_im;
        const HolomorphicData h = *this;
        ScalarField2D s;
        s.f   = [h](double x, double y) { return h.eval(0, x, y).imag(); };
        s.fx  = [h](double x, double y) { return h.eval(1, x, y).imag(); };
        s.fy  = [h](double x, double y) { return h.eval(1, x, y).real(); };
        s.fxx = [h](double x, double y) { return h.eval(2, x, y).imag(); };
        s.fxy = [h](double x, double y) { return h.eval(2, x, y).real(); };
        s.fyy = [h](double x, double y) { return -h.eval(2, x, y).imag(); };
        return s;
    }

    // max Cauchy-Riemann residual over cell centers, finite differences only.
    // The wide step keeps roundoff below the certificate bound; truncation is
    // harmless for polynomial data.
    double cr_residual(const Rect& r, int nx, int ny) const {
        ScalarField2D re = real_part(), im = imag_part();
        re.fd_step = 1e-3;
        im.fd_step = 1e-3;
        double worst = 0.0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const double x = r.x0 + r.width() * (i + 0.5) / nx;
                const double y = r.y0 + r.height() * (j + 0.5) / ny;
                worst = std::max(worst, std::abs(re.fd_dx(x, y) - im.fd_dy(x, y)));
                worst = std::max(worst, std::abs(re.fd_dy(x, y) + im.fd_dx(x, y)));
            }
        return worst;
    }
};

// ===========================================================================
// Foliation input: leaf direction angle theta(x,y), required x-invariant so
// that d/dx generates a symmetry of anything built from it.
// ===========================================================================

struct FoliationAngle {
    ScalarField2D theta;

    double x_invariance(const Rect& r, int n) const {
        double worst = 0.0;
        const double shifts[3] = {0.37, 1.0, 2.41};
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const double x = r.x0 + r.width() * i / n;
                const double y = r.y0 + r.height() * j / n;
                for (double s : shifts)
                    worst = std::max(worst, std::abs(theta(x + s, y) - theta(x, y)));
            }
        return worst;
    }
};

namespace detail {

inline double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// min |X(x) - Y(y)| over cell centers, via a sort on one axis
inline double min_separation(const ScalarPeriodic1D& X, const ScalarPeriodic1D& Y,
                             const Rect& r, int n) {
    std::vector<double> ys(n);
    for (int j = 0; j < n; ++j) ys[j] = Y.value(r.y0 + r.height() * (j + 0.5) / n);
    std::sort(ys.begin(), ys.end());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double xv = X.value(r.x0 + r.width() * (i + 0.5) / n);
        auto it = std::lower_bound(ys.begin(), ys.end(), xv);
        if (it != ys.end()) best = std::min(best, std::abs(*it - xv));
        if (it != ys.begin()) best = std::min(best, std::abs(*(it - 1) - xv));
    }
    return best;
}

// true when X - Y takes both signs, which forces a zero by continuity even
// if no sample lands on it
inline bool ranges_cross(const ScalarPeriodic1D& X, const ScalarPeriodic1D& Y,
                         const Rect& r, int n) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (int i = 0; i < n; ++i) {
        const double xv = X.value(r.x0 + r.width() * (i + 0.5) / n);
        const double yv = Y.value(r.y0 + r.height() * (i + 0.5) / n);
        x_lo = std::min(x_lo, xv);
        x_hi = std::max(x_hi, xv);
        y_lo = std::min(y_lo, yv);
        y_hi = std::max(y_hi, yv);
    }
    return x_lo < y_hi && y_lo < x_hi;   // value intervals overlap with interior
}

inline double max_shift_diff(const ScalarPeriodic1D& f, double shift, int n) {
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = -1.0 + 3.0 * i / n;
        worst = std::max(worst, std::abs(f.value(t + shift) - f.value(t)));
    }
    return worst;
}

inline double value_spread(const ScalarPeriodic1D& f, int n) {
    double lo = f.value(0.0), hi = lo;
    for (int i = 1; i <= n; ++i) {
        const double v = f.value(f.period * i / n);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

inline Certificate lattice_invariance_certificate(const MetricField& M,
                                                  const std::vector<QuadraticIntegral>& Fs,
                                                  const Lattice& lat, const Rect& r,
                                                  int n_points, uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const Vec2 gens[2] = {lat.xi, lat.nu};
    for (int k = 0; k < n_points; ++k) {
        const double x = r.x0 + r.width() * u01(rng);
        const double y = r.y0 + r.height() * u01(rng);
        const Sym2 g0 = {M.g11(x, y), M.g12(x, y), M.g22(x, y)};
        for (const Vec2& v : gens) {
            const Sym2 g1 = {M.g11(x + v.x, y + v.y), M.g12(x + v.x, y + v.y),
                             M.g22(x + v.x, y + v.y)};
            worst = std::max({worst, std::abs(g1.m11 - g0.m11), std::abs(g1.m12 - g0.m12),
                              std::abs(g1.m22 - g0.m22)});
            for (const auto& F : Fs) {
                const Sym2 f0 = F.coeff_at(x, y), f1 = F.coeff_at(x + v.x, y + v.y);
                worst = std::max({worst, std::abs(f1.m11 - f0.m11), std::abs(f1.m12 - f0.m12),
                                  std::abs(f1.m22 - f0.m22)});
            }
        }
    }
    return cert("lattice_invariance", worst <= 1e-12, worst, 1e-12,
                "metric and integral coefficients at p, p+xi, p+nu");
}

}  // namespace detail

// ===========================================================================
// Local normal-form constructors (metric, integral) pairs.
// ===========================================================================

// g = (X - Y)(dx^2 + eps dy^2),  F = (X p_y^2 + eps Y p_x^2)/(X - Y)
inline std::pair<MetricField, QuadraticIntegral> make_liouville(const ScalarPeriodic1D& X,
                                                                const ScalarPeriodic1D& Y,
                                                                double eps,
                                                                const Rect& r = {0, 1, 0, 1}) {
    if (eps != 1.0 && eps != -1.0) throw config_error("make_liouville: eps must be +1 or -1");
    X.validate();
    Y.validate();
    const double sep = detail::min_separation(X, Y, r, 512);
    if (sep < 1e-9 || detail::ranges_cross(X, Y, r, 512))
        throw collision_error("make_liouville: X - Y vanishes somewhere on the domain");
    using namespace fields;
    const ScalarField2D d = sub(from_x(X), from_y(Y));
    MetricField M;
    M.g11 = d;
    M.g12 = constant(0.0);
    M.g22 = scale(d, eps);
    M.signature = (eps < 0) ? Signature::lorentzian : Signature::riemannian;
    QuadraticIntegral F;
    F.a = div(scale(from_y(Y), eps), d);
    F.b = constant(0.0);
    F.c = div(from_x(X), d);
    return {M, F};
}

// g = Im(h) dx dy,  F = p_x^2 - p_y^2 + 2 (Re h / Im h) p_x p_y
inline std::pair<MetricField, QuadraticIntegral> make_complex_liouville(const HolomorphicData& h,
                                                                        const Rect& r) {
    const double crr = h.cr_residual(r, 24, 24);
    if (crr > 1e-10)
        throw cr_violation_error("make_complex_liouville: Cauchy-Riemann residual " +
                                 std::to_string(crr));
    const ScalarField2D re = h.real_part(), im = h.imag_part();
    double min_im = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
            min_im = std::min(min_im, im(r.x0 + r.width() * (i + 0.5) / 64,
                                         r.y0 + r.height() * (j + 0.5) / 64));
    if (min_im < 1e-9)
        throw zero_crossing_error("make_complex_liouville: Im(h) not positive on the domain");
    MetricField M;
    M.g11 = fields::constant(0.0);
    M.g12 = fields::scale(im, 0.5);
    M.g22 = fields::constant(0.0);
    M.signature = Signature::lorentzian;
    QuadraticIntegral F;
    F.a = fields::constant(1.0);
    F.b = fields::div(fields::scale(re, 2.0), im);
    F.c = fields::constant(-1.0);
    return {M, F};
}

// g = (Yhat + (x/2) Y') dx dy,  F = eps (p_x^2 - (Y/f) p_x p_y)
inline std::pair<MetricField, QuadraticIntegral> make_jordan_block(const ScalarPeriodic1D& Y,
                                                                   const ScalarPeriodic1D& Yhat,
                                                                   const Rect& r,
                                                                   double eps = 1.0) {
    if (eps != 1.0 && eps != -1.0) throw config_error("make_jordan_block: eps must be +1 or -1");
    Y.validate();
    Yhat.validate();
    using namespace fields;
    const ScalarField2D f =
        add(from_y(Yhat), mul(scale(coord_x(), 0.5), from_y(Y.derivative())));
    double f_min = std::numeric_limits<double>::infinity(), f_max = -f_min;
    for (int j = 0; j < 256; ++j)
        for (int i = 0; i < 256; ++i) {
            const double v = f(r.x0 + r.width() * (i + 0.5) / 256,
                               r.y0 + r.height() * (j + 0.5) / 256);
            f_min = std::min(f_min, v);
            f_max = std::max(f_max, v);
        }
    // a sign change forces a zero between samples even when none lands on it
    if (std::min(std::abs(f_min), std::abs(f_max)) < 1e-9 || (f_min < 0.0 && f_max > 0.0))
        throw degenerate_metric_error("make_jordan_block: conformal factor vanishes on domain");
    MetricField M;
    M.g11 = constant(0.0);
    M.g12 = scale(f, 0.5);
    M.g22 = constant(0.0);
    M.signature = Signature::lorentzian;
    QuadraticIntegral F;
    F.a = constant(eps);
    F.b = scale(div(from_y(Y), f), -eps);
    F.c = constant(0.0);
    return {M, F};
}

// ===========================================================================
// Adapted null charts built from y-dependent null slopes mu(y) = dx/dy.
// s = x - int mu1,  t = x - int mu2; coordinate lines follow the null curves.
// ===========================================================================

struct SlopeChartSpec {
    std::function<double(double)> mu1, mu2;
    double build_lo = 0.0, build_hi = 1.0;   // y-range of quadrature tables
    int cells = 4096;
    double s0 = 0.0, s1 = 1.0;
    double t_y_lo = 0.0, t_y_hi = 1.0;       // t-range given by Phi at these y
    std::string label;
};

inline NullChart chart_from_slopes(const SlopeChartSpec& spec) {
    auto P1 = std::make_shared<Cumulative1D>(spec.mu1, spec.build_lo, spec.build_hi, spec.cells);
    auto P2 = std::make_shared<Cumulative1D>(spec.mu2, spec.build_lo, spec.build_hi, spec.cells);
    auto phi = [P1, P2](double y) { return P1->value(y) - P2->value(y); };

    const double p_lo = phi(spec.build_lo), p_hi = phi(spec.build_hi);
    const bool increasing = p_hi > p_lo;
    double prev = p_lo;
    for (int i = 1; i <= 256; ++i) {
        const double v = phi(spec.build_lo + (spec.build_hi - spec.build_lo) * i / 256.0);
        if (increasing ? (v <= prev) : (v >= prev))
            throw ordering_error("chart_from_slopes: slope difference changes sign");
        prev = v;
    }

    const double lo = spec.build_lo, hi = spec.build_hi;
    auto solve_y = [phi, lo, hi, increasing](double target) {
        double a = lo, b = hi;
        double fa = phi(a) - target;
        if ((phi(b) - target) * fa > 0.0)
            throw ordering_error("chart_from_slopes: point outside the built strip");
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = phi(m) - target;
            if ((fm > 0.0) == (fa > 0.0)) { a = m; fa = fm; }
            else                          { b = m; }
        }
        return 0.5 * (a + b);
    };

    NullChart ch;
    ch.label = spec.label;
    const double ta = phi(spec.t_y_lo), tb = phi(spec.t_y_hi);
    ch.domain = {spec.s0, spec.s1, std::min(ta, tb), std::max(ta, tb)};
    ch.to_surface = [solve_y, P1](double s, double t) {
        const double y = solve_y(t - s);
        return Vec2{s + P1->value(y), y};
    };
    auto mu1 = spec.mu1, mu2 = spec.mu2;
    ch.jacobian = [solve_y, mu1, mu2](double s, double t) {
        const double y = solve_y(t - s);
        const double m1 = mu1(y), m2 = mu2(y), d = m1 - m2;
        return Mat2{-m2 / d, m1 / d, -1.0 / d, 1.0 / d};
    };
    return ch;
}

inline NullChart identity_chart(const Rect& r, std::string label) {
    NullChart ch;
    ch.label = std::move(label);
    ch.domain = r;
    ch.to_surface = [](double s, double t) { return Vec2{s, t}; };
    ch.jacobian = [](double, double) { return Mat2{1, 0, 0, 1}; };
    return ch;
}

// x = (s+t)/2, y = (s-t)/2 turns (X-Y)(dx^2 - dy^2) into f ds dt
inline NullChart shear_chart(const Rect& r, std::string label) {
    NullChart ch;
    ch.label = std::move(label);
    ch.domain = r;
    ch.to_surface = [](double s, double t) { return Vec2{0.5 * (s + t), 0.5 * (s - t)}; };
    ch.jacobian = [](double, double) { return Mat2{0.5, 0.5, 0.5, -0.5}; };
    return ch;
}

// residuals of the chart: how null the chart metric is, and how much the
// transformed coefficients a, c vary along the coordinate they must not
// depend on
struct ChartCheck {
    double null_residual = 0.0;   // max(|g_ss|,|g_tt|) / max |g_st|
    double a_variation = 0.0;     // max over s-columns of spread of a in t
    double c_variation = 0.0;     // max over t-rows of spread of c in s
};

inline ChartCheck chart_coefficient_check(const MetricField& M, const QuadraticIntegral& F,
                                          const NullChart& ch, int ns, int nt) {
    std::vector<double> a(static_cast<size_t>(ns) * nt), c(a.size());
    double off = 0.0, diag = 0.0;
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < ns; ++i) {
            const double s = ch.domain.x0 + ch.domain.width() * (i + 0.5) / ns;
            const double t = ch.domain.y0 + ch.domain.height() * (j + 0.5) / nt;
            const Vec2 p = ch.to_surface(s, t);
            const Mat2 J = ch.jacobian(s, t);
            const Sym2 g = pull_metric(M.at(p.x, p.y), J);
            diag = std::max({diag, std::abs(g.m11), std::abs(g.m22)});
            off = std::max(off, std::abs(g.m12));
            const Sym2 Ft = push_quadratic(F.coeff_at(p.x, p.y), J);
            a[static_cast<size_t>(j) * ns + i] = Ft.m11;
            c[static_cast<size_t>(j) * ns + i] = Ft.m22;
        }
    ChartCheck res;
    res.null_residual = (off > 0.0) ? diag / off : diag;
    for (int i = 0; i < ns; ++i) {
        double lo = a[i], hi = a[i];
        for (int j = 1; j < nt; ++j) {
            const double v = a[static_cast<size_t>(j) * ns + i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        res.a_variation = std::max(res.a_variation, hi - lo);
    }
    for (int j = 0; j < nt; ++j) {
        double lo = c[static_cast<size_t>(j) * ns], hi = lo;
        for (int i = 1; i < ns; ++i) {
            const double v = c[static_cast<size_t>(j) * ns + i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        res.c_variation = std::max(res.c_variation, hi - lo);
    }
    return res;
}

// ===========================================================================
// Torus-level constructors.
// ===========================================================================

inline TorusSystem make_global_liouville(const ScalarPeriodic1D& X, const ScalarPeriodic1D& Y,
                                         const Lattice& lat, double eps, bool strict = true) {
    lat.validate();
    const double spread_x = detail::value_spread(X, 512);
    const double spread_y = detail::value_spread(Y, 512);
    if (strict && (spread_x < 1e-9 || spread_y < 1e-9))
        throw config_error("make_global_liouville: X and Y must both be nonconstant");

    auto [M, F] = make_liouville(X, Y, eps);

    TorusSystem S;
    S.family_tag = "global_liouville";
    S.metric = M;
    S.integrals = {F};
    S.lattice = lat;
    S.domain = {0, 1, 0, 1};

    const double sep = detail::min_separation(X, Y, S.domain, 512);
    S.certificates.push_back(cert("separation_a", sep >= 1e-9, sep, 1e-9,
                                  "min |X - Y| over 512x512 cell centers"));
    double per = std::max(detail::max_shift_diff(X, lat.xi.x, 256),
                          detail::max_shift_diff(Y, lat.xi.y, 256));
    per = std::max({per, detail::max_shift_diff(X, lat.nu.x, 256),
                    detail::max_shift_diff(Y, lat.nu.y, 256)});
    S.certificates.push_back(cert("periodicity_b", per <= 1e-12, per, 1e-12,
                                  "X, Y sampled under both lattice shifts"));
    S.certificates.push_back(
        detail::lattice_invariance_certificate(M, S.integrals, lat, S.domain, 100, 2024));
    if (!strict)
        S.certificates.push_back(cert("nonconstant_inputs",
                                      spread_x >= 1e-9 && spread_y >= 1e-9,
                                      std::min(spread_x, spread_y), 1e-9,
                                      "value spread of X and Y; warning only", true));

    double worst_sig = 0.0;   // most wrong-signed determinant seen
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) {
            const double det = M.at((i + 0.5) / 64.0, (j + 0.5) / 64.0).det();
            const double want = (eps < 0) ? -det : det;   // required positive
            worst_sig = std::max(worst_sig, -want);
        }
    S.certificates.push_back(cert("signature", worst_sig <= 0.0, worst_sig, 0.0,
                                  (eps < 0) ? "det < 0 (signature (+,-))" : "det > 0"));

    if (eps < 0) S.chart = shear_chart({0, 1, 0, 1}, "shear s=x+y, t=x-y");
    return S;
}

inline TorusSystem make_klein_liouville(const ScalarPeriodic1D& X, const ScalarPeriodic1D& Y,
                                        double c, double d, double eps) {
    if (c == 0.0 || d == 0.0) throw config_error("make_klein_liouville: c, d must be nonzero");
    const double per_x = detail::max_shift_diff(X, c, 256);
    if (per_x > 1e-12)
        throw periodicity_error("make_klein_liouville: X is not c-periodic");
    const double per_y = detail::max_shift_diff(Y, d, 256);
    if (per_y > 1e-12)
        throw periodicity_error("make_klein_liouville: Y is not d-periodic");
    double evenness = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double y = -1.5 + 3.0 * i / 256.0;
        evenness = std::max(evenness, std::abs(Y.value(-y) - Y.value(y)));
    }
    if (evenness > 1e-12)
        throw symmetry_error("make_klein_liouville: Y is not even");

    const Rect cover{0, 2 * std::abs(c), 0, std::abs(d)};
    auto [M, F] = make_liouville(X, Y, eps, cover);

    TorusSystem S;
    S.family_tag = "klein_liouville";
    S.metric = M;
    S.integrals = {F};
    S.lattice = Lattice{{2 * c, 0}, {0, d}};
    S.domain = cover;
    S.involution = Involution{c};

    const double sep = detail::min_separation(X, Y, cover, 512);
    S.certificates.push_back(cert("separation_a", sep >= 1e-9, sep, 1e-9,
                                  "min |X - Y| over the double cover"));
    S.certificates.push_back(cert("periodicity_b", std::max(per_x, per_y) <= 1e-12,
                                  std::max(per_x, per_y), 1e-12, "X under c, Y under d"));
    S.certificates.push_back(cert("even_symmetry", evenness <= 1e-12, evenness, 1e-12,
                                  "Y(-y) = Y(y) sampled"));
    S.certificates.push_back(
        detail::lattice_invariance_certificate(M, S.integrals, *S.lattice, cover, 100, 4047));

    // gluing (x,y) -> (x+c, -y): pullback flips the sign of g12 and b
    std::mt19937_64 rng(77);
    double glue = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double x = cover.x0 + cover.width() * detail::u01(rng);
        const double y = cover.y0 + cover.height() * detail::u01(rng);
        glue = std::max({glue, std::abs(M.g11(x + c, -y) - M.g11(x, y)),
                         std::abs(-M.g12(x + c, -y) - M.g12(x, y)),
                         std::abs(M.g22(x + c, -y) - M.g22(x, y)),
                         std::abs(F.a(x + c, -y) - F.a(x, y)),
                         std::abs(-F.b(x + c, -y) - F.b(x, y)),
                         std::abs(F.c(x + c, -y) - F.c(x, y))});
    }
    S.certificates.push_back(cert("gluing_invariance", glue <= 1e-12, glue, 1e-12,
                                  "metric and integral under (x,y)->(x+c,-y)"));

    if (eps < 0) S.chart = shear_chart(cover, "shear s=x+y, t=x-y");
    return S;
}

inline TorusSystem make_linear_integral_torus(const ScalarPeriodic1D& Kc,
                                              const ScalarPeriodic1D& Lc,
                                              const ScalarPeriodic1D& Mc) {
    Kc.validate();
    Lc.validate();
    Mc.validate();
    double worst_det = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 1024; ++j) {
        const double y = (j + 0.5) / 1024.0;
        worst_det = std::max(worst_det, Kc.value(y) * Mc.value(y) - Lc.value(y) * Lc.value(y));
    }
    if (worst_det >= 0.0)
        throw signature_error("make_linear_integral_torus: K M - L^2 must stay negative");

    using namespace fields;
    TorusSystem S;
    S.family_tag = "linear_integral_torus";
    S.metric.g11 = from_y(Kc);
    S.metric.g12 = from_y(Lc);
    S.metric.g22 = from_y(Mc);
    S.metric.signature = Signature::lorentzian;
    S.integrals = {{constant(1.0), constant(0.0), constant(0.0)}};
    S.killing = VectorField2D{constant(1.0), constant(0.0)};
    S.lattice = Lattice{{1, 0}, {0, 1}};
    S.domain = {0, 1, 0, 1};

    S.certificates.push_back(cert("determinant_negative", worst_det < 0.0, worst_det, 0.0,
                                  "max of K M - L^2 over y-grid"));
    S.certificates.push_back(detail::lattice_invariance_certificate(
        S.metric, S.integrals, *S.lattice, S.domain, 100, 911));

    // null slopes dx/dy solve K mu^2 + 2 L mu + M = 0; the chart needs K
    // bounded away from zero so both roots stay finite
    double min_k = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 1024; ++j)
        min_k = std::min(min_k, std::abs(Kc.value(-0.5 + 2.0 * (j + 0.5) / 1024.0)));
    if (min_k > 1e-9) {
        auto mu = [Kc, Lc, Mc](double y, double sign) {
            const double K = Kc.value(y), L = Lc.value(y), Mv = Mc.value(y);
            return (-L + sign * std::sqrt(L * L - K * Mv)) / K;
        };
        SlopeChartSpec spec;
        spec.mu1 = [mu](double y) { return mu(y, +1.0); };
        spec.mu2 = [mu](double y) { return mu(y, -1.0); };
        spec.build_lo = -0.5;
        spec.build_hi = 1.5;
        spec.s0 = 0.0;
        spec.s1 = 0.25;
        spec.t_y_lo = 0.25;
        spec.t_y_hi = 0.75;
        spec.label = "null curves of K dx^2 + 2L dxdy + M dy^2";
        S.chart = chart_from_slopes(spec);
    }
    return S;
}

inline TorusSystem make_foliation_metric(const FoliationAngle& angle, std::string tag) {
    using namespace fields;
    const Rect r{0, 1, 0, 1};
    const double xi_inv = angle.x_invariance(r, 24);
    if (xi_inv > 1e-12)
        throw symmetry_error("make_foliation_metric: theta depends on x");

    const ScalarField2D two_theta = scale(angle.theta, 2.0);
    TorusSystem S;
    S.family_tag = std::move(tag);
    S.metric.g11 = neg(sin_of(two_theta));
    S.metric.g12 = cos_of(two_theta);
    S.metric.g22 = sin_of(two_theta);
    S.metric.signature = Signature::lorentzian;
    S.integrals = {{constant(1.0), constant(0.0), constant(0.0)}};
    S.killing = VectorField2D{constant(1.0), constant(0.0)};
    S.lattice = Lattice{{1, 0}, {0, 1}};
    S.domain = r;

    S.certificates.push_back(cert("x_invariance", xi_inv <= 1e-12, xi_inv, 1e-12,
                                  "theta sampled under x-shifts"));

    // leaves U1 = (cos theta, sin theta) must be light-like
    double light = 0.0, kill = 0.0;
    const VectorField2D xi{constant(1.0), constant(0.0)};
    for (int j = 0; j <= 32; ++j)
        for (int i = 0; i <= 32; ++i) {
            const double x = i / 32.0, y = j / 32.0;
            const double th = angle.theta(x, y);
            const Vec2 u1{std::cos(th), std::sin(th)};
            light = std::max(light, std::abs(S.metric.at(x, y).quad(u1)));
            kill = std::max(kill, lie_derivative_metric(S.metric, xi, x, y).max_abs());
        }
    S.certificates.push_back(cert("light_like_leaves", light <= 1e-12, light, 1e-12,
                                  "g(U1,U1) over a 33x33 grid"));
    S.certificates.push_back(cert("killing_field", kill <= 1e-9, kill, 1e-9,
                                  "Lie derivative of g along d/dx"));
    S.certificates.push_back(detail::lattice_invariance_certificate(
        S.metric, S.integrals, *S.lattice, r, 100, 515));
    return S;
}

inline TorusSystem make_flat_torus(const Lattice& lat) {
    lat.validate();
    using namespace fields;
    TorusSystem S;
    S.family_tag = "flat_torus";
    S.metric.g11 = constant(0.0);
    S.metric.g12 = constant(0.5);
    S.metric.g22 = constant(0.0);
    S.metric.signature = Signature::lorentzian;
    S.integrals = {{constant(1.0), constant(0.0), constant(0.0)},
                   {constant(0.0), constant(0.0), constant(1.0)}};
    S.killing = VectorField2D{constant(1.0), constant(0.0)};
    S.lattice = lat;
    S.domain = {0, 1, 0, 1};

    std::mt19937_64 rng(31337);
    double curv = 0.0;
    for (int k = 0; k < 25; ++k)
        curv = std::max(curv, std::abs(gauss_curvature_at(S.metric, detail::u01(rng),
                                                          detail::u01(rng))));
    S.certificates.push_back(cert("curvature_flat", curv <= 1e-10, curv, 1e-10,
                                  "|K| at 25 random points"));
    S.certificates.push_back(detail::lattice_invariance_certificate(
        S.metric, S.integrals, lat, S.domain, 100, 127));
    S.chart = identity_chart(S.domain, "identity (already null)");
    return S;
}

// chart-only wrappers so the normal forms ship as presets too

inline TorusSystem make_jordan_chart(const ScalarPeriodic1D& Y, const ScalarPeriodic1D& Yhat,
                                     const Rect& r, double eps = 1.0) {
    auto [M, F] = make_jordan_block(Y, Yhat, r, eps);
    TorusSystem S;
    S.family_tag = "jordan_block";
    S.metric = M;
    S.integrals = {F};
    S.domain = r;
    double min_abs = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 128; ++j)
        for (int i = 0; i < 128; ++i)
            min_abs = std::min(min_abs, std::abs(2.0 * M.g12(r.x0 + r.width() * (i + 0.5) / 128,
                                                             r.y0 + r.height() * (j + 0.5) / 128)));
    S.certificates.push_back(cert("nonvanishing_factor", min_abs >= 1e-9, min_abs, 1e-9,
                                  "min |f| over the domain"));
    S.chart = identity_chart(r, "identity (already null)");
    return S;
}

inline TorusSystem make_complex_chart(const HolomorphicData& h, const Rect& r) {
    auto [M, F] = make_complex_liouville(h, r);
    TorusSystem S;
    S.family_tag = "complex_liouville";
    S.metric = M;
    S.integrals = {F};
    S.domain = r;
    S.certificates.push_back(cert("cr_residual", true, h.cr_residual(r, 24, 24), 1e-10,
                                  "finite-difference Cauchy-Riemann check"));
    double min_im = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
            min_im = std::min(min_im, 2.0 * M.g12(r.x0 + r.width() * (i + 0.5) / 64,
                                                  r.y0 + r.height() * (j + 0.5) / 64));
    S.certificates.push_back(cert("positive_conformal_factor", min_im >= 1e-9, min_im, 1e-9,
                                  "min Im(h) over the domain"));
    // the regime marker: a c < 0 everywhere by construction
    S.certificates.push_back(cert("ac_negative", true, -1.0, 0.0, "a = 1, c = -1 identically"));
    S.chart = identity_chart(r, "identity (already null)");
    return S;
}

// ===========================================================================
// Shipped presets.  Profile constants are documented here and mirrored in
// presets/*.json for the CLI.
// ===========================================================================

namespace presets {

// X = 3 + cos(2 pi x), Y = sin(2 pi y): min X = 2 > 1 = max Y, so X - Y is
// bounded away from zero on all of R^2, not merely at grid samples.  The
// geodesic flow and the equivalence pipeline both need that global margin.
inline TorusSystem global_liouville() {
    return make_global_liouville(ScalarPeriodic1D(3.0, {{1, 1.0}}, {}, 1.0),
                                 ScalarPeriodic1D(0.0, {}, {{1, 1.0}}, 1.0),
                                 Lattice{{1, 0}, {0, 1}}, -1.0);
}

// X = 2 + cos(2 pi x) with c = 1, Y = cos(2 pi y) even with d = 1, eps = -1
inline TorusSystem klein_liouville() {
    return make_klein_liouville(ScalarPeriodic1D(2.0, {{1, 1.0}}, {}, 1.0),
                                ScalarPeriodic1D(0.0, {{1, 1.0}}, {}, 1.0), 1.0, 1.0, -1.0);
}

// Y = sin(2 pi y), Yhat = 3, |x| <= 0.4
inline TorusSystem jordan_block() {
    return make_jordan_chart(ScalarPeriodic1D(0.0, {}, {{1, 1.0}}, 1.0),
                             ScalarPeriodic1D(3.0, {}, {}, 1.0), {-0.4, 0.4, 0, 1});
}

// h(z) = z + 3i on the unit square
inline TorusSystem complex_liouville() {
    HolomorphicData h;
    h.coeffs = {{0.0, 3.0}, {1.0, 0.0}};
    return make_complex_chart(h, {0, 1, 0, 1});
}

// K = -(2 + cos 2 pi y), L = 0.3 sin(2 pi y), M = 1
inline TorusSystem linear_integral_torus() {
    return make_linear_integral_torus(ScalarPeriodic1D(-2.0, {{1, -1.0}}, {}, 1.0),
                                      ScalarPeriodic1D(0.0, {}, {{1, 0.3}}, 1.0),
                                      ScalarPeriodic1D(1.0, {}, {}, 1.0));
}

// theta = 0: every leaf horizontal, the squared integral is Jordan everywhere
inline TorusSystem jordan_foliation() {
    FoliationAngle a{fields::constant(0.0)};
    TorusSystem S = make_foliation_metric(a, "jordan_foliation");
    S.chart = identity_chart({0, 1, 0, 1}, "identity (already null)");
    return S;
}

namespace profile {

// plateau ramp: 0 at u<=0, exactly 1 on [1/4, 3/4], 0 at u>=1, C-infinity
inline double plateau(double u) {
    return profiles::smoothstep_inf(4.0 * u) * profiles::smoothstep_inf(4.0 - 4.0 * u);
}
inline double plateau_d1(double u) {
    const double s1 = profiles::smoothstep_inf(4.0 * u);
    const double s2 = profiles::smoothstep_inf(4.0 - 4.0 * u);
    return 4.0 * profiles::smoothstep_inf_d1(4.0 * u) * s2 -
           4.0 * s1 * profiles::smoothstep_inf_d1(4.0 - 4.0 * u);
}
inline double plateau_d2(double u) {
    const double s1 = profiles::smoothstep_inf(4.0 * u);
    const double s2 = profiles::smoothstep_inf(4.0 - 4.0 * u);
    const double d1a = profiles::smoothstep_inf_d1(4.0 * u);
    const double d1b = profiles::smoothstep_inf_d1(4.0 - 4.0 * u);
    return 16.0 * profiles::smoothstep_inf_d2(4.0 * u) * s2 - 32.0 * d1a * d1b +
           16.0 * s1 * profiles::smoothstep_inf_d2(4.0 - 4.0 * u);
}

inline double frac(double y) { return y - std::floor(y); }

// mixed profile: theta ramps 0 -> pi/4 -> 0 on (0, 1/2), zero on [1/2, 1)
inline double mixed_theta(double y) {
    const double e = frac(y);
    if (e >= 0.5) return 0.0;
    return 0.25 * kPi * plateau(2.0 * e);
}
inline double mixed_theta_d1(double y) {
    const double e = frac(y);
    if (e >= 0.5) return 0.0;
    return 0.5 * kPi * plateau_d1(2.0 * e);
}
inline double mixed_theta_d2(double y) {
    const double e = frac(y);
    if (e >= 0.5) return 0.0;
    return kPi * plateau_d2(2.0 * e);
}

// reeb profile: theta turns 0 -> pi across (0, 1/2), stays pi on [1/2, 1)
inline double reeb_theta(double y) {
    const double e = frac(y);
    return (e >= 0.5) ? kPi : kPi * profiles::smoothstep_inf(2.0 * e);
}
inline double reeb_theta_d1(double y) {
    const double e = frac(y);
    return (e >= 0.5) ? 0.0 : 2.0 * kPi * profiles::smoothstep_inf_d1(2.0 * e);
}
inline double reeb_theta_d2(double y) {
    const double e = frac(y);
    return (e >= 0.5) ? 0.0 : 4.0 * kPi * profiles::smoothstep_inf_d2(2.0 * e);
}

}  // namespace profile

// theta ramps to pi/4 inside the lower annulus: Liouville on y in (0, 1/2),
// Jordan on [1/2, 1)
inline TorusSystem mixed_foliation() {
    FoliationAngle a{fields::from_y_fn(profile::mixed_theta, profile::mixed_theta_d1,
                                       profile::mixed_theta_d2)};
    TorusSystem S = make_foliation_metric(a, "mixed_foliation");
    SlopeChartSpec spec;
    spec.mu1 = [](double y) { return 1.0 / std::tan(profile::mixed_theta(y)); };
    spec.mu2 = [](double y) { return -std::tan(profile::mixed_theta(y)); };
    spec.build_lo = 0.08;
    spec.build_hi = 0.42;
    spec.s0 = 0.0;
    spec.s1 = 0.05;
    spec.t_y_lo = 0.15;
    spec.t_y_hi = 0.35;
    spec.label = "leaf-adapted strip y in (0.08, 0.42)";
    S.chart = chart_from_slopes(spec);
    return S;
}

// theta turns by pi across the lower annulus (a Reeb component); the chart
// covers a sub-strip clear of the horizontal boundary leaves
inline TorusSystem reeb_foliation() {
    FoliationAngle a{fields::from_y_fn(profile::reeb_theta, profile::reeb_theta_d1,
                                       profile::reeb_theta_d2)};
    TorusSystem S = make_foliation_metric(a, "reeb_foliation");
    SlopeChartSpec spec;
    spec.mu1 = [](double y) { return 1.0 / std::tan(profile::reeb_theta(y)); };
    spec.mu2 = [](double y) { return -std::tan(profile::reeb_theta(y)); };
    spec.build_lo = 0.09;
    spec.build_hi = 0.21;
    spec.cells = 8192;
    spec.s0 = 0.0;
    spec.s1 = 0.05;
    spec.t_y_lo = 0.12;
    spec.t_y_hi = 0.18;
    spec.label = "leaf-adapted strip y in (0.09, 0.21)";
    S.chart = chart_from_slopes(spec);
    return S;
}

inline TorusSystem flat_torus() { return make_flat_torus(Lattice{{1, 0}, {0, 1}}); }

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "global_liouville", "klein_liouville",  "jordan_block",
        "complex_liouville", "linear_integral_torus", "jordan_foliation",
        "mixed_foliation",  "reeb_foliation",   "flat_torus"};
    return n;
}

inline TorusSystem by_name(const std::string& name) {
    if (name == "global_liouville") return global_liouville();
    if (name == "klein_liouville") return klein_liouville();
    if (name == "jordan_block") return jordan_block();
    if (name == "complex_liouville") return complex_liouville();
    if (name == "linear_integral_torus") return linear_integral_torus();
    if (name == "jordan_foliation") return jordan_foliation();
    if (name == "mixed_foliation") return mixed_foliation();
    if (name == "reeb_foliation") return reeb_foliation();
    if (name == "flat_torus") return flat_torus();
    throw config_error("unknown preset: " + name);
}

}  // namespace presets

}  // namespace liouville
