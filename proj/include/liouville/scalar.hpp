#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "liouville/core.hpp"

namespace liouville {

// ===========================================================================
// One-dimensional periodic trigonometric polynomials
//
//   X(t) = constant_term + sum_k amp_k cos(2 pi k t / period)
//                        + sum_k amp_k sin(2 pi k t / period)
//
// Derivatives of every order are exact (phase shift by n*pi/2).
// ===========================================================================

struct ScalarPeriodic1D {
    double constant_term = 0.0;
    std::vector<std::pair<int, double>> cosine_coeffs;  // (harmonic k, amplitude)
    std::vector<std::pair<int, double>> sine_coeffs;
    double period = 1.0;

    ScalarPeriodic1D() = default;
    ScalarPeriodic1D(double c,
                     std::vector<std::pair<int, double>> cs,
                     std::vector<std::pair<int, double>> sn,
                     double p)
        : constant_term(c), cosine_coeffs(std::move(cs)), sine_coeffs(std::move(sn)), period(p) {
        validate();
    }

    void validate() const {
        if (!(period > 0.0))
            throw config_error("ScalarPeriodic1D: period must be positive");
        for (const auto& [k, a] : cosine_coeffs)
            if (k <= 0) throw config_error("ScalarPeriodic1D: cosine harmonic must be >= 1");
        for (const auto& [k, a] : sine_coeffs)
            if (k <= 0) throw config_error("ScalarPeriodic1D: sine harmonic must be >= 1");
    }

    double value(double t) const { return deriv(0, t); }
    double operator()(double t) const { return deriv(0, t); }

    // n-th derivative; d^n/dt^n cos(w t) = w^n cos(w t + n pi/2), same for sin.
    double deriv(int n, double t) const {
        const double w0 = kTwoPi / period;
        double s = (n == 0) ? constant_term : 0.0;
        for (const auto& [k, a] : cosine_coeffs) {
            const double w = w0 * k;
            s += a * std::pow(w, n) * phased_cos(w * t, n);
        }
        for (const auto& [k, a] : sine_coeffs) {
            const double w = w0 * k;
            s += a * std::pow(w, n) * phased_sin(w * t, n);
        }
        return s;
    }

    // exact derivative as another trig polynomial
    ScalarPeriodic1D derivative() const {
        ScalarPeriodic1D d;
        d.period = period;
        d.constant_term = 0.0;
        const double w0 = kTwoPi / period;
        for (const auto& [k, a] : cosine_coeffs)
            d.sine_coeffs.emplace_back(k, -a * w0 * k);
        for (const auto& [k, a] : sine_coeffs)
            d.cosine_coeffs.emplace_back(k, a * w0 * k);
        return d;
    }

    bool is_constant() const { return cosine_coeffs.empty() && sine_coeffs.empty(); }

    double amplitude_bound() const {
        double s = 0.0;
        for (const auto& [k, a] : cosine_coeffs) s += std::abs(a);
        for (const auto& [k, a] : sine_coeffs) s += std::abs(a);
        return s;
    }

  private:
    static double phased_cos(double u, int n) {
        switch (n & 3) {
            case 0: return std::cos(u);
            case 1: return -std::sin(u);
            case 2: return -std::cos(u);
            default: return std::sin(u);
        }
    }
    static double phased_sin(double u, int n) {
        switch (n & 3) {
            case 0: return std::sin(u);
            case 1: return std::cos(u);
            case 2: return -std::sin(u);
            default: return -std::cos(u);
        }
    }
};

// Dense scan over [lo,hi] followed by golden-section refinement around the
// best sample.  Returns the extremal value (maximize=false gives the minimum).
inline double refine_extremum(const std::function<double(double)>& f,
                              double lo, double hi, int n_samples, bool maximize) {
    if (!(hi > lo)) throw ordering_error("refine_extremum: empty interval");
    if (n_samples < 8) n_samples = 8;
    const double sgn = maximize ? -1.0 : 1.0;   // minimize sgn*f
    double best_t = lo, best_v = sgn * f(lo);
    for (int i = 1; i <= n_samples; ++i) {
        const double t = lo + (hi - lo) * i / n_samples;
        const double v = sgn * f(t);
        if (v < best_v) { best_v = v; best_t = t; }
    }
    const double dt = (hi - lo) / n_samples;
    double a = std::max(lo, best_t - dt), b = std::min(hi, best_t + dt);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sgn * f(c), fd = sgn * f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * (1.0 + std::abs(best_t)); ++it) {
        if (fc < fd) { b = d; d = c; fd = fc; c = b - gr * (b - a); fc = sgn * f(c); }
        else         { a = c; c = d; fc = fd; d = a + gr * (b - a); fd = sgn * f(d); }
    }
    const double t_star = 0.5 * (a + b);
    return sgn * std::min({best_v, fc, fd, sgn * f(t_star)});
}

// ===========================================================================
// Scalar fields on the (x, y) plane.
//
// A field carries an evaluator plus optional analytic partials.  Accessors
// fall back to central finite differences (step fd_step, one Richardson
// extrapolation) when an analytic partial is absent.  Combinators below
// propagate derivatives by the usual calculus rules, so composites built
// from analytic leaves stay analytic to second order.
// ===========================================================================

struct ScalarField2D {
    using Fn = std::function<double(double, double)>;

    Fn f;                         // value, required
    Fn fx, fy, fxx, fxy, fyy;     // analytic partials, optional
    double fd_step = 1e-5;

    double operator()(double x, double y) const { return f(x, y); }

    bool has_analytic_first() const { return static_cast<bool>(fx) && static_cast<bool>(fy); }
    bool has_analytic_second() const {
        return static_cast<bool>(fxx) && static_cast<bool>(fxy) && static_cast<bool>(fyy);
    }

    double dx(double x, double y) const {
        if (fx) return fx(x, y);
        return fd_first([this, y](double t) { return f(t, y); }, x);
    }
    double dy(double x, double y) const {
        if (fy) return fy(x, y);
        return fd_first([this, x](double t) { return f(x, t); }, y);
    }
    double dxx(double x, double y) const {
        if (fxx) return fxx(x, y);
        return fd_second([this, y](double t) { return f(t, y); }, x);
    }
    double dyy(double x, double y) const {
        if (fyy) return fyy(x, y);
        return fd_second([this, x](double t) { return f(x, t); }, y);
    }
    double dxy(double x, double y) const {
        if (fxy) return fxy(x, y);
        const double h = second_step();
        auto cross = [&](double s) {
            return (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) /
                   (4.0 * s * s);
        };
        return (4.0 * cross(0.5 * h) - cross(h)) / 3.0;
    }

    // finite-difference versions regardless of analytic data (used by checks)
    double fd_dx(double x, double y) const {
        return fd_first([this, y](double t) { return f(t, y); }, x);
    }
    double fd_dy(double x, double y) const {
        return fd_first([this, x](double t) { return f(x, t); }, y);
    }

  private:
    double second_step() const { return std::max(fd_step, 2e-4); }

    double fd_first(const std::function<double(double)>& g, double t) const {
        const double h = fd_step;
        auto cd = [&](double s) { return (g(t + s) - g(t - s)) / (2.0 * s); };
        return (4.0 * cd(0.5 * h) - cd(h)) / 3.0;
    }
    double fd_second(const std::function<double(double)>& g, double t) const {
        const double h = second_step();
        auto cd2 = [&](double s) { return (g(t + s) - 2.0 * g(t) + g(t - s)) / (s * s); };
        return (4.0 * cd2(0.5 * h) - cd2(h)) / 3.0;
    }
};

namespace fields {

inline ScalarField2D constant(double c) {
    ScalarField2D s;
    s.f = [c](double, double) { return c; };
    auto zero = [](double, double) { return 0.0; };
    s.fx = s.fy = s.fxx = s.fxy = s.fyy = zero;
    return s;
}

inline ScalarField2D coord_x() {
    ScalarField2D s;
    s.f = [](double x, double) { return x; };
    s.fx = [](double, double) { return 1.0; };
    auto zero = [](double, double) { return 0.0; };
    s.fy = s.fxx = s.fxy = s.fyy = zero;
    return s;
}

inline ScalarField2D coord_y() {
    ScalarField2D s;
    s.f = [](double, double y) { return y; };
    s.fy = [](double, double) { return 1.0; };
    auto zero = [](double, double) { return 0.0; };
    s.fx = s.fxx = s.fxy = s.fyy = zero;
    return s;
}

inline ScalarField2D from_x(const ScalarPeriodic1D& p) {
    ScalarField2D s;
    s.f = [p](double x, double) { return p.deriv(0, x); };
    s.fx = [p](double x, double) { return p.deriv(1, x); };
    s.fxx = [p](double x, double) { return p.deriv(2, x); };
    auto zero = [](double, double) { return 0.0; };
    s.fy = s.fxy = s.fyy = zero;
    return s;
}

inline ScalarField2D from_y(const ScalarPeriodic1D& p) {
    ScalarField2D s;
    s.f = [p](double, double y) { return p.deriv(0, y); };
    s.fy = [p](double, double y) { return p.deriv(1, y); };
    s.fyy = [p](double, double y) { return p.deriv(2, y); };
    auto zero = [](double, double) { return 0.0; };
    s.fx = s.fxx = s.fxy = zero;
    return s;
}

// 1-D profile of y with caller-supplied derivatives
inline ScalarField2D from_y_fn(std::function<double(double)> v,
                               std::function<double(double)> d1,
                               std::function<double(double)> d2) {
    ScalarField2D s;
    s.f = [v](double, double y) { return v(y); };
    s.fy = [d1](double, double y) { return d1(y); };
    s.fyy = [d2](double, double y) { return d2(y); };
    auto zero = [](double, double) { return 0.0; };
    s.fx = s.fxx = s.fxy = zero;
    return s;
}

inline ScalarField2D from_x_fn(std::function<double(double)> v,
                               std::function<double(double)> d1,
                               std::function<double(double)> d2) {
    ScalarField2D s;
    s.f = [v](double x, double) { return v(x); };
    s.fx = [d1](double x, double) { return d1(x); };
    s.fxx = [d2](double x, double) { return d2(x); };
    auto zero = [](double, double) { return 0.0; };
    s.fy = s.fxy = s.fyy = zero;
    return s;
}

namespace impl {

// Combinator closures share one heap copy of each operand.  Capturing the
// operand by value in all six closures would duplicate the whole expression
// tree per node and blow up memory on deep composites.
using FieldPtr = std::shared_ptr<const ScalarField2D>;
inline FieldPtr hold(const ScalarField2D& u) { return std::make_shared<const ScalarField2D>(u); }

}  // namespace impl

inline ScalarField2D add(const ScalarField2D& uf, const ScalarField2D& vf) {
    const auto u = impl::hold(uf), v = impl::hold(vf);
    ScalarField2D s;
    s.f   = [u, v](double x, double y) { return (*u)(x, y) + (*v)(x, y); };
    s.fx  = [u, v](double x, double y) { return u->dx(x, y) + v->dx(x, y); };
    s.fy  = [u, v](double x, double y) { return u->dy(x, y) + v->dy(x, y); };
    s.fxx = [u, v](double x, double y) { return u->dxx(x, y) + v->dxx(x, y); };
    s.fxy = [u, v](double x, double y) { return u->dxy(x, y) + v->dxy(x, y); };
    s.fyy = [u, v](double x, double y) { return u->dyy(x, y) + v->dyy(x, y); };
    return s;
}

inline ScalarField2D sub(const ScalarField2D& uf, const ScalarField2D& vf) {
    const auto u = impl::hold(uf), v = impl::hold(vf);
    ScalarField2D s;
    s.f   = [u, v](double x, double y) { return (*u)(x, y) - (*v)(x, y); };
    s.fx  = [u, v](double x, double y) { return u->dx(x, y) - v->dx(x, y); };
    s.fy  = [u, v](double x, double y) { return u->dy(x, y) - v->dy(x, y); };
    s.fxx = [u, v](double x, double y) { return u->dxx(x, y) - v->dxx(x, y); };
    s.fxy = [u, v](double x, double y) { return u->dxy(x, y) - v->dxy(x, y); };
    s.fyy = [u, v](double x, double y) { return u->dyy(x, y) - v->dyy(x, y); };
    return s;
}

inline ScalarField2D scale(const ScalarField2D& uf, double c) {
    const auto u = impl::hold(uf);
    ScalarField2D s;
    s.f   = [u, c](double x, double y) { return c * (*u)(x, y); };
    s.fx  = [u, c](double x, double y) { return c * u->dx(x, y); };
    s.fy  = [u, c](double x, double y) { return c * u->dy(x, y); };
    s.fxx = [u, c](double x, double y) { return c * u->dxx(x, y); };
    s.fxy = [u, c](double x, double y) { return c * u->dxy(x, y); };
    s.fyy = [u, c](double x, double y) { return c * u->dyy(x, y); };
    return s;
}

inline ScalarField2D neg(const ScalarField2D& u) { return scale(u, -1.0); }

// Keep only the value closure.  Derivative accessors of a deep combinator
// tree re-expand their children, which turns a six-component jet into work
// exponential in the tree depth; a flattened field evaluates the tree once
// per point and takes its partials from the finite-difference fallback.
inline ScalarField2D flatten(const ScalarField2D& uf) {
    ScalarField2D s;
    s.f = uf.f;
    s.fd_step = uf.fd_step;
    return s;
}

inline ScalarField2D mul(const ScalarField2D& uf, const ScalarField2D& vf) {
    const auto u = impl::hold(uf), v = impl::hold(vf);
    ScalarField2D s;
    s.f  = [u, v](double x, double y) { return (*u)(x, y) * (*v)(x, y); };
    s.fx = [u, v](double x, double y) {
        return u->dx(x, y) * (*v)(x, y) + (*u)(x, y) * v->dx(x, y);
    };
    s.fy = [u, v](double x, double y) {
        return u->dy(x, y) * (*v)(x, y) + (*u)(x, y) * v->dy(x, y);
    };
    s.fxx = [u, v](double x, double y) {
        return u->dxx(x, y) * (*v)(x, y) + 2.0 * u->dx(x, y) * v->dx(x, y) +
               (*u)(x, y) * v->dxx(x, y);
    };
    s.fyy = [u, v](double x, double y) {
        return u->dyy(x, y) * (*v)(x, y) + 2.0 * u->dy(x, y) * v->dy(x, y) +
               (*u)(x, y) * v->dyy(x, y);
    };
    s.fxy = [u, v](double x, double y) {
        return u->dxy(x, y) * (*v)(x, y) + u->dx(x, y) * v->dy(x, y) +
               u->dy(x, y) * v->dx(x, y) + (*u)(x, y) * v->dxy(x, y);
    };
    return s;
}

// q = u / v with the quotient rule written against q itself:
//   q_x = (u_x - q v_x)/v,  q_xx = (u_xx - 2 q_x v_x - q v_xx)/v, ...
inline ScalarField2D div(const ScalarField2D& uf, const ScalarField2D& vf) {
    const auto u = impl::hold(uf), v = impl::hold(vf);
    ScalarField2D s;
    s.f = [u, v](double x, double y) { return (*u)(x, y) / (*v)(x, y); };
    s.fx = [u, v](double x, double y) {
        const double vv = (*v)(x, y), q = (*u)(x, y) / vv;
        return (u->dx(x, y) - q * v->dx(x, y)) / vv;
    };
    s.fy = [u, v](double x, double y) {
        const double vv = (*v)(x, y), q = (*u)(x, y) / vv;
        return (u->dy(x, y) - q * v->dy(x, y)) / vv;
    };
    s.fxx = [u, v](double x, double y) {
        const double vv = (*v)(x, y), q = (*u)(x, y) / vv;
        const double qx = (u->dx(x, y) - q * v->dx(x, y)) / vv;
        return (u->dxx(x, y) - 2.0 * qx * v->dx(x, y) - q * v->dxx(x, y)) / vv;
    };
    s.fyy = [u, v](double x, double y) {
        const double vv = (*v)(x, y), q = (*u)(x, y) / vv;
        const double qy = (u->dy(x, y) - q * v->dy(x, y)) / vv;
        return (u->dyy(x, y) - 2.0 * qy * v->dy(x, y) - q * v->dyy(x, y)) / vv;
    };
    s.fxy = [u, v](double x, double y) {
        const double vv = (*v)(x, y), q = (*u)(x, y) / vv;
        const double qx = (u->dx(x, y) - q * v->dx(x, y)) / vv;
        const double qy = (u->dy(x, y) - q * v->dy(x, y)) / vv;
        return (u->dxy(x, y) - qx * v->dy(x, y) - qy * v->dx(x, y) - q * v->dxy(x, y)) / vv;
    };
    return s;
}

// g(u(x,y)) for a scalar function g with two derivatives
inline ScalarField2D compose1(const ScalarField2D& uf,
                              std::function<double(double)> g,
                              std::function<double(double)> g1,
                              std::function<double(double)> g2) {
    const auto u = impl::hold(uf);
    ScalarField2D s;
    s.f  = [u, g](double x, double y) { return g((*u)(x, y)); };
    s.fx = [u, g1](double x, double y) { return g1((*u)(x, y)) * u->dx(x, y); };
    s.fy = [u, g1](double x, double y) { return g1((*u)(x, y)) * u->dy(x, y); };
    s.fxx = [u, g1, g2](double x, double y) {
        const double ux = u->dx(x, y), w = (*u)(x, y);
        return g2(w) * ux * ux + g1(w) * u->dxx(x, y);
    };
    s.fyy = [u, g1, g2](double x, double y) {
        const double uy = u->dy(x, y), w = (*u)(x, y);
        return g2(w) * uy * uy + g1(w) * u->dyy(x, y);
    };
    s.fxy = [u, g1, g2](double x, double y) {
        const double w = (*u)(x, y);
        return g2(w) * u->dx(x, y) * u->dy(x, y) + g1(w) * u->dxy(x, y);
    };
    return s;
}

inline ScalarField2D sqrt_of(const ScalarField2D& u) {
    return compose1(
        u, [](double t) { return std::sqrt(t); },
        [](double t) { return 0.5 / std::sqrt(t); },
        [](double t) { return -0.25 / (t * std::sqrt(t)); });
}

inline ScalarField2D sin_of(const ScalarField2D& u) {
    return compose1(
        u, [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
        [](double t) { return -std::sin(t); });
}

inline ScalarField2D cos_of(const ScalarField2D& u) {
    return compose1(
        u, [](double t) { return std::cos(t); }, [](double t) { return -std::sin(t); },
        [](double t) { return -std::cos(t); });
}

// |u|^p via real powers, valid away from u = 0.  p may be fractional and the
// sign of u is irrelevant (the metric determinant ratios fed through here
// change sign with the signature, the weight must stay positive).
inline ScalarField2D abs_pow(const ScalarField2D& u, double p) {
    return compose1(
        u, [p](double t) { return std::pow(std::abs(t), p); },
        [p](double t) {
            const double s = (t < 0.0) ? -1.0 : 1.0;
            return p * s * std::pow(std::abs(t), p - 1.0);
        },
        [p](double t) { return p * (p - 1.0) * std::pow(std::abs(t), p - 2.0); });
}

// signed cube root, smooth away from 0
inline ScalarField2D cbrt_of(const ScalarField2D& u) {
    return compose1(
        u, [](double t) { return std::cbrt(t); },
        [](double t) {
            const double c = std::cbrt(t);
            return 1.0 / (3.0 * c * c);
        },
        [](double t) {
            const double c = std::cbrt(t);
            return -2.0 / (9.0 * c * c * c * c * c);
        });
}

}  // namespace fields

// ===========================================================================
// Cumulative quadrature:  F(t) = int_{lo}^{t} w(s) ds  on [lo, hi],
// prefix sums over a uniform grid with 5-point Gauss-Legendre per cell.
// Used for null-chart construction and as a quadrature backend.
// ===========================================================================

class Cumulative1D {
  public:
    Cumulative1D() = default;

    Cumulative1D(std::function<double(double)> w, double lo, double hi, int n_cells)
        : w_(std::move(w)), lo_(lo), hi_(hi) {
        if (!(hi > lo)) throw ordering_error("Cumulative1D: hi must exceed lo");
        if (n_cells < 1) n_cells = 1;
        dt_ = (hi - lo) / n_cells;
        prefix_.resize(n_cells + 1, 0.0);
        for (int i = 0; i < n_cells; ++i)
            prefix_[i + 1] = prefix_[i] + gauss_cell(lo_ + i * dt_, lo_ + (i + 1) * dt_);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double total() const { return prefix_.back(); }

    double value(double t) const {
        if (t <= lo_) return -gauss_cell(t, lo_);
        if (t >= hi_) return prefix_.back() + gauss_cell(hi_, t);
        const double u = (t - lo_) / dt_;
        int cell = static_cast<int>(u);
        if (cell >= static_cast<int>(prefix_.size()) - 1) cell = static_cast<int>(prefix_.size()) - 2;
        const double a = lo_ + cell * dt_;
        return prefix_[cell] + gauss_cell(a, t);
    }

    double derivative(double t) const { return w_(t); }

    // solve value(y) = target for monotone integrand of fixed sign
    double invert(double target, double y_lo, double y_hi) const {
        double a = y_lo, b = y_hi;
        double fa = value(a) - target, fb = value(b) - target;
        if (fa == 0.0) return a;
        if (fb == 0.0) return b;
        if (fa * fb > 0.0)
            throw ordering_error("Cumulative1D::invert: target not bracketed");
        for (int it = 0; it < 200; ++it) {
            double m = 0.5 * (a + b);
            // Newton step from the midpoint when it stays inside the bracket
            const double dm = w_(m);
            if (dm != 0.0) {
                const double n = m - (value(m) - target) / dm;
                if (n > a && n < b) m = n;
            }
            const double fm = value(m) - target;
            if (std::abs(fm) < 1e-14 * (1.0 + std::abs(target)) || (b - a) < 1e-15 * (1.0 + std::abs(a)))
                return m;
            if (fa * fm <= 0.0) { b = m; fb = fm; }
            else                { a = m; fa = fm; }
        }
        return 0.5 * (a + b);
    }

  private:
    double gauss_cell(double a, double b) const {
        // 5-point Gauss-Legendre on [a,b]
        static const double xs[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                                     0.9061798459386640, -0.9061798459386640};
        static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                     0.2369268850561891, 0.2369268850561891};
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (int i = 0; i < 5; ++i) s += ws[i] * w_(c + h * xs[i]);
        return s * h;
    }

    std::function<double(double)> w_;
    double lo_ = 0.0, hi_ = 1.0, dt_ = 1.0;
    std::vector<double> prefix_;
};

// ===========================================================================
// C-infinity transition profiles built from exp(-1/u).  smoothstep_inf rises
// 0 -> 1 on [0,1] with all derivatives vanishing at both ends; bump_inf is
// the matching bump on [0,1].  Two derivatives are provided, which is what
// curvature needs.
// ===========================================================================

namespace profiles {

inline double sigma(double u) { return (u > 0.0) ? std::exp(-1.0 / u) : 0.0; }
inline double sigma_d1(double u) { return (u > 0.0) ? sigma(u) / (u * u) : 0.0; }
inline double sigma_d2(double u) {
    if (u <= 0.0) return 0.0;
    const double iu = 1.0 / u;
    return sigma(u) * (iu * iu * iu * iu - 2.0 * iu * iu * iu);
}

inline double smoothstep_inf(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double p = sigma(u), q = sigma(1.0 - u);
    return p / (p + q);
}

inline double smoothstep_inf_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double p = sigma(u), q = sigma(1.0 - u);
    const double p1 = sigma_d1(u), q1 = -sigma_d1(1.0 - u);
    const double r = p + q;
    return (p1 * q - p * q1) / (r * r);
}

inline double smoothstep_inf_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double p = sigma(u), q = sigma(1.0 - u);
    const double p1 = sigma_d1(u), q1 = -sigma_d1(1.0 - u);
    const double p2 = sigma_d2(u), q2 = sigma_d2(1.0 - u);
    const double r = p + q, r1 = p1 + q1;
    const double num = (p2 * q - p * q2) * r - 2.0 * r1 * (p1 * q - p * q1);
    return num / (r * r * r);
}

inline double bump_inf(double u) { return smoothstep_inf(2.0 * u) * smoothstep_inf(2.0 - 2.0 * u); }

inline double bump_inf_d1(double u) {
    const double s1 = smoothstep_inf(2.0 * u), s2 = smoothstep_inf(2.0 - 2.0 * u);
    return 2.0 * smoothstep_inf_d1(2.0 * u) * s2 - 2.0 * s1 * smoothstep_inf_d1(2.0 - 2.0 * u);
}

inline double bump_inf_d2(double u) {
    const double s1 = smoothstep_inf(2.0 * u), s2 = smoothstep_inf(2.0 - 2.0 * u);
    const double a1 = smoothstep_inf_d1(2.0 * u), b1 = smoothstep_inf_d1(2.0 - 2.0 * u);
    const double a2 = smoothstep_inf_d2(2.0 * u), b2 = smoothstep_inf_d2(2.0 - 2.0 * u);
    return 4.0 * a2 * s2 - 8.0 * a1 * b1 + 4.0 * s1 * b2;
}

}  // namespace profiles

}  // namespace liouville
