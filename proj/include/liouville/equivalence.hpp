#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liouville/families.hpp"
#include "liouville/flow.hpp"
#include "liouville/parallel.hpp"

// ---------------------------------------------------------------------------
// The dictionary between geodesically equivalent metric pairs and quadratic
// integrals.  A pair (g, gbar) sharing unparametrized geodesics corresponds
// to the integral whose coefficient matrix is gbar with both indices raised
// by g:
//
//     A = W g^{-1} gbar g^{-1},   W = (det g / det gbar)^{2/3} > 0.
//
// Lowering both slots again gives B := g A g = W gbar with
// det B = (det g)^2 det A, so the inversion is closed form and branch-free:
//
//     gbar = (det g * det A)^{-2} * B.
//
// The two maps are exact mutual inverses.  The index placement is pinned by
// the Dini pair (X-Y)(dx^2+dy^2) ~ (1/Y-1/X)(dx^2/X+dy^2/Y): only this
// raising convention sends the Dini partner to the separable torus integral
// (X p_y^2 + Y p_x^2)/(X-Y), and only then do partner metrics reproduce the
// source geodesics.  Both directions are additionally gated by round-trip
// and flow-based tests.
// ---------------------------------------------------------------------------

namespace liouville {

namespace equiv_detail {

// r^{2/3} as the square of the real cube root, >= 0 for either sign of r
inline double pow_two_thirds(double r) {
    const double c = std::cbrt(r);
    return c * c;
}

inline Sym2 pair_integral(const Sym2& G, const Sym2& Gb) {
    const double W = pow_two_thirds(G.det() / Gb.det());
    const Mat2 Ginv = G.inverse().full();
    const Mat2 C = Ginv * Gb.full() * Ginv;
    return {W * C.a11, 0.5 * W * (C.a12 + C.a21), W * C.a22};
}

inline Sym2 partner_metric(const Sym2& G, const Sym2& A) {
    const double dA = A.det();
    const double scale = A.max_abs();
    if (std::abs(dA) < 1e-12 * std::max(scale * scale, 1e-300))
        throw singular_integral_error(
            "partner metric: integral coefficient matrix is singular "
            "(squares of linear integrals have no metric partner)");
    const Mat2 Gm = G.full();
    const Mat2 B = Gm * A.full() * Gm;
    const double q = G.det() * dA;
    const double s = 1.0 / (q * q);
    return {s * B.a11, 0.5 * s * (B.a12 + B.a21), s * B.a22};
}

}  // namespace equiv_detail

inline Sym2 integral_from_pair_at(const MetricField& g, const MetricField& gbar,
                                  double x, double y) {
    return equiv_detail::pair_integral(g.at(x, y), gbar.at(x, y));
}

inline Sym2 metric_from_integral_at(const MetricField& g, const QuadraticIntegral& F,
                                    double x, double y) {
    return equiv_detail::partner_metric(g.at(x, y), F.coeff_at(x, y));
}

// Field-level version; carries analytic derivatives so the result can feed
// bracket residuals and Christoffel symbols.
inline QuadraticIntegral integral_from_pair(const MetricField& g, const MetricField& gbar) {
    using namespace fields;
    const ScalarField2D detg = sym_det(metric_fields(g));
    const ScalarField2D detgb = sym_det(metric_fields(gbar));
    // adj(g) gbar adj(g) / (det g)^2, scaled by W
    const ScalarField2D wn = div(abs_pow(div(detg, detgb), 2.0 / 3.0), mul(detg, detg));
    const ScalarField2D c11 =
        add(sub(mul(gbar.g11, mul(g.g22, g.g22)),
                scale(mul(gbar.g12, mul(g.g22, g.g12)), 2.0)),
            mul(gbar.g22, mul(g.g12, g.g12)));
    const ScalarField2D c12 =
        sub(mul(gbar.g12, add(mul(g.g12, g.g12), mul(g.g11, g.g22))),
            add(mul(gbar.g11, mul(g.g22, g.g12)), mul(gbar.g22, mul(g.g12, g.g11))));
    const ScalarField2D c22 =
        add(sub(mul(gbar.g11, mul(g.g12, g.g12)),
                scale(mul(gbar.g12, mul(g.g12, g.g11)), 2.0)),
            mul(gbar.g22, mul(g.g11, g.g11)));
    QuadraticIntegral F;
    F.a = mul(wn, c11);
    F.b = scale(mul(wn, c12), 2.0);
    F.c = mul(wn, c22);
    return F;
}

inline MetricField metric_from_integral(const MetricField& g, const QuadraticIntegral& F,
                                        const Rect& scan = {0.0, 1.0, 0.0, 1.0}) {
    // surface singular coefficient matrices (and sign changes of their
    // determinant, which force a zero between samples) before building fields
    double d_lo = std::numeric_limits<double>::infinity(), d_hi = -d_lo;
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) {
            const double x = scan.x0 + scan.width() * (i + 0.5) / 64;
            const double y = scan.y0 + scan.height() * (j + 0.5) / 64;
            metric_from_integral_at(g, F, x, y);
            const double d = F.coeff_at(x, y).det();
            d_lo = std::min(d_lo, d);
            d_hi = std::max(d_hi, d);
        }
    if (d_lo < 0.0 && d_hi > 0.0)
        throw singular_integral_error(
            "partner metric: integral coefficient determinant changes sign on the domain");

    using namespace fields;
    const ScalarField2D detg = sym_det(metric_fields(g));
    const ScalarField2D halfb = scale(F.b, 0.5);
    const ScalarField2D detF = sub(mul(F.a, F.c), mul(halfb, halfb));
    const ScalarField2D q = mul(detg, detF);
    const ScalarField2D s = div(constant(1.0), mul(q, q));
    // B = g A g with A the coefficient matrix of F
    const ScalarField2D b11 = add(add(mul(F.a, mul(g.g11, g.g11)), mul(F.b, mul(g.g11, g.g12))),
                                  mul(F.c, mul(g.g12, g.g12)));
    const ScalarField2D b12 =
        add(add(mul(F.a, mul(g.g11, g.g12)),
                mul(halfb, add(mul(g.g12, g.g12), mul(g.g11, g.g22)))),
            mul(F.c, mul(g.g12, g.g22)));
    const ScalarField2D b22 = add(add(mul(F.a, mul(g.g12, g.g12)), mul(F.b, mul(g.g12, g.g22))),
                                  mul(F.c, mul(g.g22, g.g22)));
    MetricField out;
    // flattened: the composite trees here are deep enough that analytic jets
    // cost more than the finite-difference fallback is worth
    out.g11 = flatten(mul(s, b11));
    out.g12 = flatten(mul(s, b12));
    out.g22 = flatten(mul(s, b22));
    out.signature = d_lo > 0.0 ? Signature::riemannian : Signature::lorentzian;
    out.lattice = g.lattice;
    return out;
}

// ---------------------------------------------------------------------------
// Riemannianization of a Lorentzian torus family: shift the integral by a
// multiple of the Hamiltonian until it is positive definite, then take the
// metric partner of the shifted integral.
// ---------------------------------------------------------------------------

struct MetricPair {
    MetricField g;
    MetricField gbar;
    double equivalence_residual = 0.0;
    std::vector<Certificate> certificates;
    Rect domain{0.0, 1.0, 0.0, 1.0};
    double x_min = 0.0;
    double y_max = 0.0;
    std::optional<QuadraticIntegral> fbar;

    bool all_passed() const {
        for (const Certificate& c : certificates)
            if (!c.passed && !c.advisory) return false;
        return true;
    }
    const Certificate* find_certificate(const std::string& name) const {
        for (const Certificate& c : certificates)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline MetricPair riemannianize(const TorusSystem& S, int grid = 64) {
    if (S.family_tag != "global_liouville")
        throw config_error("riemannianize: needs a global liouville family, got " +
                           S.family_tag);
    const MetricField& M = S.metric;
    const QuadraticIntegral& F = S.integral();
    const Rect r = S.domain;

    // recover the one-variable profiles from the stored fields:
    // g11 = X - Y, c = X / (X - Y), a = eps * Y / (X - Y)
    const double eps = (M.g22(0.31, 0.47) / M.g11(0.31, 0.47)) > 0.0 ? 1.0 : -1.0;
    const auto X_of = [&](double x) { return F.c(x, 0.37) * M.g11(x, 0.37); };
    const auto Y_of = [&](double y) { return eps * F.a(0.37, y) * M.g11(0.37, y); };

    double slice_gap = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double x = r.x0 + r.width() * (i + 0.5) / 64;
        slice_gap = std::max(slice_gap,
                             std::abs(X_of(x) - F.c(x, 0.81) * M.g11(x, 0.81)));
    }

    const double x_min = refine_extremum(X_of, r.x0, r.x1, 4096, false);
    const double y_max = refine_extremum(Y_of, r.y0, r.y1, 4096, true);
    if (!(x_min > y_max))
        throw ordering_error("riemannianize: min X = " + std::to_string(x_min) +
                             " does not exceed max Y = " + std::to_string(y_max));

    MetricPair pair;
    pair.g = M;
    pair.domain = r;
    pair.x_min = x_min;
    pair.y_max = y_max;
    pair.certificates.push_back(
        cert("profile_reconstruction", slice_gap <= 1e-10, slice_gap, 1e-10));

    const QuadraticIntegral fbar =
        lin_comb(1.0, hamiltonian_coefficients(M), 1.0 / (x_min + y_max), F);

    double form_floor = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const Sym2 A = fbar.coeff_at(r.x0 + r.width() * (i + 0.5) / grid,
                                         r.y0 + r.height() * (j + 0.5) / grid);
            form_floor = std::min(form_floor, std::min(A.m11, A.det()));
        }
    pair.certificates.push_back(
        cert("fbar_positive_definite", form_floor > 0.0, form_floor, 0.0));

    pair.gbar = metric_from_integral(M, fbar, r);
    pair.gbar.signature = Signature::riemannian;
    pair.fbar = fbar;

    double eig_floor = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j)
        for (int i = 0; i < grid; ++i) {
            const Sym2 Gb = pair.gbar.at(r.x0 + r.width() * (i + 0.5) / grid,
                                         r.y0 + r.height() * (j + 0.5) / grid);
            eig_floor = std::min(eig_floor, Gb.eigenvalues()[0]);
        }
    pair.certificates.push_back(
        cert("gbar_positive_definite", eig_floor > 0.0, eig_floor, 0.0));
    return pair;
}

// max residual of g-geodesics measured against gbar's geodesic equation;
// initial conditions are drawn up front so the result does not depend on
// how the batch is split across workers
inline double geodesic_equivalence_check(MetricPair& pair, int n_samples, double T = 5.0,
                                         std::uint64_t seed = 1234, StepControl ctrl = {}) {
    ctrl.richardson = false;
    std::mt19937_64 rng(seed);
    std::vector<PhaseState> starts;
    for (int k = 0; k < n_samples; ++k)
        starts.push_back(random_unit_energy_state(pair.g, pair.domain, rng));
    std::vector<double> residuals(starts.size(), 0.0);
    parallel_for(static_cast<int>(starts.size()), [&](int k) {
        const Trajectory traj = integrate(pair.g, starts[static_cast<std::size_t>(k)], T, ctrl);
        const SampledCurve curve = curve_from_trajectory(pair.g, traj);
        residuals[static_cast<std::size_t>(k)] = unparam_geodesic_residual(pair.gbar, curve);
    });
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);
    pair.equivalence_residual = worst;
    return worst;
}

// ---------------------------------------------------------------------------
// Killing transfer across an equivalent pair: for a Killing field Kbar of
// gbar, K^i = (det g / det gbar)^{1/3} gbar^{ik} g_{kj} Kbar^j is Killing
// for g.
// ---------------------------------------------------------------------------

inline VectorField2D transfer_killing(const MetricField& g, const MetricField& gbar,
                                      const VectorField2D& Kbar,
                                      const Rect& check = {0.0, 1.0, 0.0, 1.0},
                                      bool check_input = true) {
    if (check_input) {
        const double res = killing_residual(gbar, Kbar, check, 16, 16);
        if (res > 1e-8)
            throw config_error("transfer_killing: input field has Killing residual " +
                               std::to_string(res) + " for gbar");
    }
    using namespace fields;
    const ScalarField2D detgb = sym_det(metric_fields(gbar));
    const ScalarField2D ratio = cbrt_of(div(sym_det(metric_fields(g)), detgb));
    const ScalarField2D w1 = add(mul(g.g11, Kbar.vx), mul(g.g12, Kbar.vy));
    const ScalarField2D w2 = add(mul(g.g12, Kbar.vx), mul(g.g22, Kbar.vy));
    VectorField2D K;
    K.vx = mul(ratio, div(sub(mul(gbar.g22, w1), mul(gbar.g12, w2)), detgb));
    K.vy = mul(ratio, div(sub(mul(gbar.g11, w2), mul(gbar.g12, w1)), detgb));
    return K;
}

// ---------------------------------------------------------------------------
// The projective-field obstruction form: for a vector field v,
//   I(xi) = (L_v g)(xi, xi) - (2/3) trace(g^{-1} L_v g) g(xi, xi)
// vanishes identically iff v is Killing up to the trace part; when v is
// projective, I is a first integral in velocities along geodesics.
// ---------------------------------------------------------------------------

inline SymFields projective_integral(const MetricField& M, const VectorField2D& v) {
    const auto entry = [M, v](int which) {
        ScalarField2D s;
        s.f = [M, v, which](double x, double y) {
            const Sym2 L = lie_derivative_metric(M, v, x, y);
            const Sym2 G = M.at(x, y);
            const double tr = (G.inverse().full() * L.full()).trace();
            const double f = 2.0 / 3.0 * tr;
            const Sym2 I{L.m11 - f * G.m11, L.m12 - f * G.m12, L.m22 - f * G.m22};
            return which == 0 ? I.m11 : which == 1 ? I.m12 : I.m22;
        };
        return s;
    };
    return {entry(0), entry(1), entry(2)};
}

// max |I - I(0)| of a velocity-quadratic form along a trajectory
inline double velocity_quadratic_drift(const MetricField& M, const SymFields& Q,
                                       const Trajectory& traj) {
    if (traj.states.empty()) throw config_error("velocity_quadratic_drift: empty trajectory");
    const auto value = [&](const PhaseState& s) {
        const Vec2 xi = M.inverse_at(s.x, s.y).apply(s.mom());
        return Q.at(s.x, s.y).quad(xi);
    };
    const double v0 = value(traj.states.front());
    double worst = 0.0;
    for (const PhaseState& s : traj.states)
        worst = std::max(worst, std::abs(value(s) - v0));
    return worst;
}

// ---------------------------------------------------------------------------
// Superintegrability rank: integrals are flattened to vectors of coefficient
// samples and the rank of their span is read off the Gram spectrum with a
// relative singular-value threshold.
// ---------------------------------------------------------------------------

struct RankReport {
    int rank = 0;
    std::vector<std::string> rejected;       // candidates failing the bracket test
    std::vector<double> singular_values;     // accepted span, descending
    double bracket_worst = 0.0;
};

namespace equiv_detail {

inline double grid_bracket_worst(const MetricField& M, const QuadraticIntegral& F,
                                 const Rect& r, int n) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            worst = std::max(worst,
                             poisson_bracket_residual(M, F, r.x0 + r.width() * (i + 0.5) / n,
                                                      r.y0 + r.height() * (j + 0.5) / n));
    return worst;
}

inline int span_rank(const std::vector<const QuadraticIntegral*>& Fs, const Rect& r, int n,
                     std::vector<double>* sv_out) {
    const int m = static_cast<int>(Fs.size());
    if (m == 0) return 0;
    Eigen::MatrixXd V(3 * n * n, m);
    for (int c = 0; c < m; ++c) {
        int row = 0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = r.x0 + r.width() * (i + 0.5) / n;
                const double y = r.y0 + r.height() * (j + 0.5) / n;
                V(row++, c) = Fs[c]->a(x, y);
                V(row++, c) = Fs[c]->b(x, y);
                V(row++, c) = Fs[c]->c(x, y);
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const Eigen::VectorXd sv = svd.singularValues();   // descending
    if (sv_out) sv_out->assign(sv.data(), sv.data() + sv.size());
    const double cut = 1e-8 * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut && sv(i) > 0.0) ++rank;
    return rank;
}

}  // namespace equiv_detail

inline int superintegrability_rank(const MetricField& M,
                                   const std::vector<QuadraticIntegral>& integrals,
                                   const Rect& r, int n = 16, double bracket_tol = 1e-8) {
    std::vector<const QuadraticIntegral*> ptrs;
    for (std::size_t k = 0; k < integrals.size(); ++k) {
        const double worst = equiv_detail::grid_bracket_worst(M, integrals[k], r, n);
        if (worst > bracket_tol)
            throw non_integral_error("superintegrability_rank: candidate " +
                                     std::to_string(k) + " has bracket residual " +
                                     std::to_string(worst));
        ptrs.push_back(&integrals[k]);
    }
    return equiv_detail::span_rank(ptrs, r, n, nullptr);
}

// tolerant variant: failing candidates are reported and excluded
inline RankReport superintegrability_report(
    const MetricField& M, const std::vector<std::pair<std::string, QuadraticIntegral>>& named,
    const Rect& r, int n = 16, double bracket_tol = 1e-8) {
    RankReport rep;
    std::vector<const QuadraticIntegral*> kept;
    for (const auto& [name, F] : named) {
        const double worst = equiv_detail::grid_bracket_worst(M, F, r, n);
        rep.bracket_worst = std::max(rep.bracket_worst, worst);
        if (worst > bracket_tol)
            rep.rejected.push_back(name);
        else
            kept.push_back(&F);
    }
    rep.rank = equiv_detail::span_rank(kept, r, n, &rep.singular_values);
    return rep;
}

}  // namespace liouville
