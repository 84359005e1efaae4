#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liouville/core.hpp"
#include "liouville/geometry.hpp"
#include "liouville/integral.hpp"

// ---------------------------------------------------------------------------
// Hamiltonian flow of H = (1/2) g^{ij} p_i p_j and diagnostics built on it.
//
// The method is the implicit midpoint rule: the Hamiltonian is not separable
// (the inverse metric depends on position), so explicit symplectic splittings
// are unavailable, and the midpoint rule's symmetry keeps the energy drift
// bounded over the horizons used here.  Positions are kept in the universal
// cover throughout; lattice reduction is a presentation concern and applying
// it mid-run would put jumps into anything differentiated along the path.
// ---------------------------------------------------------------------------

namespace liouville {

struct PhaseState {
    double x = 0.0, y = 0.0, px = 0.0, py = 0.0;

    Vec2 pos() const { return {x, y}; }
    Vec2 mom() const { return {px, py}; }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(px) && std::isfinite(py);
    }
};

inline PhaseState reduce_position(const PhaseState& s, const Lattice& lat) {
    const Vec2 q = lat.reduce(s.pos());
    return {q.x, q.y, s.px, s.py};
}

inline double hamiltonian_at(const MetricField& M, const PhaseState& s) {
    return 0.5 * M.inverse_at(s.x, s.y).quad(s.mom());
}

struct StepControl {
    double h = 1e-3;        // initial step; halved until the drift contract holds
    double tol = 1e-8;      // max |H(t) - H(0)| allowed over the run
    double h_min = 1e-6;
    int max_fixed_point = 25;
    double fp_tol = 1e-14;
    bool richardson = true; // one extra run at h/2 for the end-state error estimate
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhaseState> states;   // universal-cover positions
    double h_drift = 0.0;
    std::vector<std::pair<std::string, double>> integral_drifts;
    double h_used = 0.0;
    double end_error_estimate = 0.0;  // Richardson estimate for the end state

    const PhaseState& end() const { return states.back(); }
};

namespace flow_detail {

struct Deriv {
    double xd, yd, pxd, pyd;
};

// xdot^i = g^{ij} p_j = u^i,  pdot_i = (1/2) (d_i g)(u, u)
inline Deriv hamilton_rhs(const MetricField& M, const PhaseState& s) {
    const Vec2 u = M.inverse_at(s.x, s.y).apply(s.mom());
    const Sym2 gx = M.d_at(s.x, s.y, 0);
    const Sym2 gy = M.d_at(s.x, s.y, 1);
    return {u.x, u.y, 0.5 * gx.quad(u), 0.5 * gy.quad(u)};
}

inline PhaseState advance(const PhaseState& s, const Deriv& k, double h) {
    return {s.x + h * k.xd, s.y + h * k.yd, s.px + h * k.pxd, s.py + h * k.pyd};
}

inline double state_gap(const PhaseState& a, const PhaseState& b) {
    return std::max(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)),
                    std::max(std::abs(a.px - b.px), std::abs(a.py - b.py)));
}

inline double state_mag(const PhaseState& s) {
    return std::max(std::max(std::abs(s.x), std::abs(s.y)),
                    std::max(std::abs(s.px), std::abs(s.py)));
}

// One implicit midpoint step solved by fixed-point iteration.
inline bool midpoint_step(const MetricField& M, const PhaseState& s, double h,
                          const StepControl& ctrl, PhaseState& out) {
    PhaseState z = advance(s, hamilton_rhs(M, s), h);   // explicit predictor
    for (int it = 0; it < ctrl.max_fixed_point; ++it) {
        if (!z.finite()) return false;
        const PhaseState mid{0.5 * (s.x + z.x), 0.5 * (s.y + z.y),
                             0.5 * (s.px + z.px), 0.5 * (s.py + z.py)};
        const PhaseState znew = advance(s, hamilton_rhs(M, mid), h);
        const double gap = state_gap(znew, z);
        z = znew;
        if (gap <= ctrl.fp_tol * (1.0 + state_mag(z))) {
            out = z;
            return z.finite();
        }
    }
    return false;
}

enum class RunStatus { ok, drift_exceeded, blown_up };

// Fixed-step run over [t0, t0+T].  drift_abort lets the caller stop a run that
// already failed the contract instead of finishing it.
inline RunStatus run_fixed(const MetricField& M, const PhaseState& s0, double t0, double T,
                           double h, const StepControl& ctrl, double drift_abort,
                           Trajectory& out) {
    const long n = std::max<long>(1, std::lround(std::ceil(T / h - 1e-12)));
    const double hs = T / static_cast<double>(n);
    out.times.assign(1, t0);
    out.states.assign(1, s0);
    out.times.reserve(n + 1);
    out.states.reserve(n + 1);
    const double h0 = hamiltonian_at(M, s0);
    double drift = 0.0;
    PhaseState s = s0;
    for (long k = 1; k <= n; ++k) {
        PhaseState next;
        bool ok = false;
        try {
            ok = midpoint_step(M, s, hs, ctrl, next);
            if (ok) drift = std::max(drift, std::abs(hamiltonian_at(M, next) - h0));
        } catch (const degenerate_metric_error&) {
            ok = false;
        }
        if (!ok) {
            out.h_drift = drift;
            return RunStatus::blown_up;
        }
        s = next;
        out.times.push_back(t0 + hs * static_cast<double>(k));
        out.states.push_back(s);
        if (drift > drift_abort) {
            out.h_drift = drift;
            return RunStatus::drift_exceeded;
        }
    }
    out.h_drift = drift;
    return RunStatus::ok;
}

}  // namespace flow_detail

inline Trajectory integrate(const MetricField& M, const PhaseState& s0, double T,
                            StepControl ctrl = {}, double t0 = 0.0) {
    if (!s0.finite()) throw config_error("integrate: initial state has nonfinite components");
    if (!(T > 0.0)) throw config_error("integrate: horizon T must be positive");
    hamiltonian_at(M, s0);   // surfaces a degenerate metric at the start point

    using flow_detail::RunStatus;
    Trajectory traj;
    double h = ctrl.h;
    for (;;) {
        const RunStatus st = flow_detail::run_fixed(M, s0, t0, T, h, ctrl, ctrl.tol, traj);
        if (st == RunStatus::ok) break;
        h *= 0.5;
        if (h < ctrl.h_min)
            throw step_underflow_error(
                "integrate: step fell below h_min without meeting the energy drift bound "
                "(last drift " + std::to_string(traj.h_drift) + ")");
    }
    traj.h_used = h;

    if (ctrl.richardson) {
        Trajectory fine;
        const double big = std::numeric_limits<double>::infinity();
        if (flow_detail::run_fixed(M, s0, t0, T, 0.5 * h, ctrl, big, fine) !=
            flow_detail::RunStatus::blown_up) {
            // midpoint is second order: |end_h - end_{h/2}| / (2^2 - 1)
            traj.end_error_estimate = flow_detail::state_gap(traj.end(), fine.end()) / 3.0;
        }
    }
    return traj;
}

// max_k |F(state_k) - F(state_0)| for a quadratic integral
inline double conservation_report(const Trajectory& traj, const QuadraticIntegral& F) {
    if (traj.states.empty()) throw config_error("conservation_report: empty trajectory");
    const PhaseState& s0 = traj.states.front();
    const double f0 = F.value(s0.x, s0.y, s0.mom());
    double worst = 0.0;
    for (const PhaseState& s : traj.states)
        worst = std::max(worst, std::abs(F.value(s.x, s.y, s.mom()) - f0));
    return worst;
}

// same for the linear integral (momentum map) of a vector field: I = v^i p_i
inline double conservation_report(const Trajectory& traj, const VectorField2D& v) {
    if (traj.states.empty()) throw config_error("conservation_report: empty trajectory");
    const PhaseState& s0 = traj.states.front();
    const double f0 = dot(v.at(s0.x, s0.y), s0.mom());
    double worst = 0.0;
    for (const PhaseState& s : traj.states)
        worst = std::max(worst, std::abs(dot(v.at(s.x, s.y), s.mom()) - f0));
    return worst;
}

// Uniform position samples along a curve together with its velocities.
struct SampledCurve {
    std::vector<double> times;
    std::vector<Vec2> points;
    std::vector<Vec2> velocities;
};

inline SampledCurve curve_from_trajectory(const MetricField& M, const Trajectory& traj) {
    SampledCurve c;
    c.times = traj.times;
    c.points.reserve(traj.states.size());
    c.velocities.reserve(traj.states.size());
    for (const PhaseState& s : traj.states) {
        c.points.push_back(s.pos());
        c.velocities.push_back(M.inverse_at(s.x, s.y).apply(s.mom()));
    }
    return c;
}

// Reparametrization-invariant geodesic defect: acceleration must stay parallel
// to the velocity, so the residual is |det[xddot + Gamma(xdot,xdot), xdot]| / |xdot|^3.
// Accelerations come from fourth-order central differences on the positions,
// so the two samples at each end of the curve are not scored.
inline double unparam_geodesic_residual(const MetricField& M, const SampledCurve& curve,
                                        std::size_t max_evals = 1500) {
    const std::size_t n = curve.points.size();
    if (n < 5 || curve.times.size() != n || curve.velocities.size() != n)
        throw config_error("unparam_geodesic_residual: need >= 5 uniform samples with velocities");
    const double h = curve.times[1] - curve.times[0];
    if (!(h > 0.0))
        throw config_error("unparam_geodesic_residual: times must increase");

    // the stencil stays on the fine grid; only the evaluation points thin out
    const std::size_t stride = std::max<std::size_t>(1, (n - 4) / std::max<std::size_t>(max_evals, 1));
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; i += stride) {
        const Vec2 v = curve.velocities[i];
        const double speed = v.norm();
        if (speed < 1e-10)
            throw stationary_point_error("unparam_geodesic_residual: |xdot| < 1e-10 at sample " +
                                         std::to_string(i));
        const Vec2 acc =
            (curve.points[i - 2] * -1.0 + curve.points[i - 1] * 16.0 + curve.points[i] * -30.0 +
             curve.points[i + 1] * 16.0 + curve.points[i + 2] * -1.0) *
            (1.0 / (12.0 * h * h));
        const auto gamma = christoffel_at(M, curve.points[i].x, curve.points[i].y);
        const Vec2 a{acc.x + gamma[0].quad(v), acc.y + gamma[1].quad(v)};
        worst = std::max(worst, std::abs(cross(a, v)) / (speed * speed * speed));
    }
    return worst;
}

// Random covector with |g(u,u)| = 1, i.e. |H| = 1/2.  Near light-like draws
// are rejected so the rescaling stays stable.
inline PhaseState random_unit_energy_state(const MetricField& M, const Rect& r,
                                           std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(r.x0, r.x1), uy(r.y0, r.y1),
        uphi(0.0, 2.0 * kPi);
    for (int tries = 0; tries < 256; ++tries) {
        const double x = ux(rng), y = uy(rng), phi = uphi(rng);
        const PhaseState probe{x, y, std::cos(phi), std::sin(phi)};
        double hval = 0.0;
        try {
            hval = hamiltonian_at(M, probe);
        } catch (const degenerate_metric_error&) {
            continue;
        }
        if (std::abs(hval) < 1e-3) continue;
        const double sc = 1.0 / std::sqrt(2.0 * std::abs(hval));
        return {x, y, probe.px * sc, probe.py * sc};
    }
    throw config_error("random_unit_energy_state: no usable covector after 256 draws");
}

}  // namespace liouville
