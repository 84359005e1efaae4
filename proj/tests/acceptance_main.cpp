// Acceptance gate: one line per criterion, PASS or FAIL with the measured
// numbers.  Exits nonzero if any criterion fails.  Each block is independent
// and exceptions are folded into a FAIL line so every criterion reports.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "liouville/equivalence.hpp"
#include "liouville/families.hpp"
#include "liouville/flow.hpp"
#include "liouville/integral.hpp"

#include "support/oracles.hpp"

namespace {

using namespace liouville;

int g_failures = 0;

void report(int idx, const std::string& label, bool ok, const std::string& detail) {
    std::printf("[%2d] %s %s (%s)\n", idx, ok ? "PASS" : "FAIL", label.c_str(),
                detail.c_str());
    if (!ok) ++g_failures;
}

template <typename Fn>
void criterion(int idx, const std::string& label, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(idx, label, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::string>& shipped_presets() {
    static const std::vector<std::string> names = {
        "global_liouville", "klein_liouville", "linear_integral_torus", "jordan_foliation",
        "mixed_foliation",  "reeb_foliation",  "flat_torus"};
    return names;
}

MetricField flat_dxdy() {
    MetricField M;
    M.g11 = fields::constant(0.0);
    M.g12 = fields::constant(0.5);
    M.g22 = fields::constant(0.0);
    M.signature = Signature::lorentzian;
    return M;
}

MetricField flat_euclid() {
    MetricField M;
    M.g11 = fields::constant(1.0);
    M.g12 = fields::constant(0.0);
    M.g22 = fields::constant(1.0);
    M.signature = Signature::riemannian;
    return M;
}

MetricField scaled(const MetricField& M, double c) {
    MetricField out = M;
    out.g11 = fields::scale(M.g11, c);
    out.g12 = fields::scale(M.g12, c);
    out.g22 = fields::scale(M.g22, c);
    return out;
}

double sym_gap(const Sym2& A, const Sym2& B) {
    return std::max({std::abs(A.m11 - B.m11), std::abs(A.m12 - B.m12),
                     std::abs(A.m22 - B.m22)});
}

// ---------------------------------------------------------------------------

void c1_bracket_vanishing() {
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    for (const std::string& name : shipped_presets()) {
        const auto t0 = std::chrono::steady_clock::now();
        const TorusSystem S = presets::by_name(name);
        double preset_worst = 0.0;
        for (const QuadraticIntegral& F : S.integrals)
            preset_worst = std::max(
                preset_worst, poisson_bracket_residual_grid(S.metric, F, S.domain, 64, 64, 8));
        const double dt = seconds_since(t0);
        worst = std::max(worst, preset_worst);
        slowest = std::max(slowest, dt);
        if (preset_worst > 1e-8 || dt > 10.0) ok = false;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "worst residual %.2e <= 1e-8, slowest preset %.1fs <= 10s",
                  worst, slowest);
    report(1, "poisson bracket vanishes on the shipped presets", ok, buf);
}

void c2_conservation_along_flow() {
    const auto t0 = std::chrono::steady_clock::now();
    const TorusSystem S = presets::global_liouville();
    std::mt19937_64 rng(42);
    StepControl ctrl;
    ctrl.richardson = false;
    double worst_f = 0.0, worst_h = 0.0;
    for (int k = 0; k < 10; ++k) {
        const PhaseState s0 = random_unit_energy_state(S.metric, S.domain, rng);
        const Trajectory traj = integrate(S.metric, s0, 10.0, ctrl);
        worst_h = std::max(worst_h, traj.h_drift);
        worst_f = std::max(worst_f, conservation_report(traj, S.integral()));
    }
    const double dt = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "F drift %.2e <= 1e-6, H drift %.2e <= 1e-8, %.1fs <= 60s",
                  worst_f, worst_h, dt);
    report(2, "integrals conserved along 10 random unit-energy flows, T=10",
           worst_f <= 1e-6 && worst_h <= 1e-8 && dt <= 60.0, buf);
}

void c3_null_coordinate_structure() {
    double worst_a = 0.0, worst_c = 0.0;
    bool ok = true;
    for (const std::string& name : presets::names()) {
        const TorusSystem S = presets::by_name(name);
        if (!S.chart) {
            ok = false;
            continue;
        }
        const ChartCheck ck = chart_coefficient_check(S.metric, S.integral(), *S.chart, 32, 32);
        worst_a = std::max(worst_a, ck.a_variation);
        worst_c = std::max(worst_c, ck.c_variation);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max a(x) y-variation %.2e, max c(y) x-variation %.2e",
                  worst_a, worst_c);
    report(3, "integral coefficients separate in every preset's null chart",
           ok && worst_a <= 1e-9 && worst_c <= 1e-9, buf);
}

void c4_jordan_trace_identity() {
    const TorusSystem S = presets::jordan_block();
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double x = oracles::urand(rng, S.domain.x0, S.domain.x1);
        const double y = oracles::urand(rng, S.domain.y0, S.domain.y1);
        const double L = trace_L(S.integral(), S.metric, x, y);
        worst = std::max(worst, std::abs(L + 0.5 * std::sin(kTwoPi * y)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |L + Y/2| = %.2e <= 1e-10 at 1000 points", worst);
    report(4, "jordan block trace identity L = -Y/2", worst <= 1e-10, buf);
}

void c5_eigenvalue_regimes() {
    const int n = 64;
    auto sweep = [&](const TorusSystem& S, auto&& cell) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = S.domain.x0 + S.domain.width() * (i + 0.5) / n;
                const double y = S.domain.y0 + S.domain.height() * (j + 0.5) / n;
                cell(S, x, y);
            }
    };

    int real_distinct = 0;
    const TorusSystem L = presets::global_liouville();
    sweep(L, [&](const TorusSystem& S, double x, double y) {
        if (eigen_data(S.integral(), S.metric, x, y).discriminant > 0.0) ++real_distinct;
    });

    double jordan_disc = 0.0, jordan_gap = 0.0;
    for (const TorusSystem& S : {presets::jordan_block(), presets::jordan_foliation()})
        sweep(S, [&](const TorusSystem& Sy, double x, double y) {
            const Eigen2 e = eigen_data(Sy.integral(), Sy.metric, x, y);
            jordan_disc = std::max(jordan_disc, std::abs(e.discriminant));
            const double fb4 = 0.5 * Sy.metric.g12(x, y) * Sy.integral().b(x, y);
            jordan_gap = std::max(jordan_gap, std::abs(e.lambda1.real() - fb4));
        });

    int conjugate = 0;
    const TorusSystem C = presets::complex_liouville();
    sweep(C, [&](const TorusSystem& S, double x, double y) {
        const Eigen2 e = eigen_data(S.integral(), S.metric, x, y);
        if (e.discriminant < 0.0 && e.lambda1.imag() != 0.0) ++conjugate;
    });

    const bool ok = real_distinct == n * n && jordan_disc <= 1e-10 && jordan_gap <= 1e-8 &&
                    conjugate == n * n;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "liouville real-distinct %d/%d, jordan |D| %.2e and |lambda - fb/4| %.2e, "
                  "complex conjugate %d/%d",
                  real_distinct, n * n, jordan_disc, jordan_gap, conjugate, n * n);
    report(5, "eigenvalue regimes match the three normal forms", ok, buf);
}

void c6_classification_fractions() {
    const TorusSystem mixed = presets::mixed_foliation();
    const double jm =
        classify_grid(mixed.integral(), mixed.metric, mixed.domain, 128, 128).jordan_fraction();

    const TorusSystem jf = presets::jordan_foliation();
    const double jj =
        classify_grid(jf.integral(), jf.metric, jf.domain, 128, 128).jordan_fraction();

    const TorusSystem gl = presets::global_liouville();
    const double lf = classify_grid(gl.integral(), gl.metric, gl.domain, 128, 128)
                          .fraction(TypeLabel::LIOUVILLE);

    const bool ok = std::abs(jm - 0.5) <= 0.05 && jj == 1.0 && lf == 1.0;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "mixed jordan %.4f in 0.5+-0.05, jordan_foliation %.2f, global liouville %.2f",
                  jm, jj, lf);
    report(6, "classification fractions on 128x128 grids", ok, buf);
}

void c7_equivalence_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<MetricField> metrics;
    for (const std::string& name : presets::names())
        metrics.push_back(presets::by_name(name).metric);
    std::mt19937_64 rng(101);
    double worst_rt = 0.0;
    int done = 0;
    while (done < 100) {
        const auto& mg = metrics[rng() % metrics.size()];
        const auto& mb = metrics[rng() % metrics.size()];
        const Sym2 G = mg.at(oracles::urand(rng, 0.05, 0.95), oracles::urand(rng, 0.05, 0.95));
        const Sym2 Gb = mb.at(oracles::urand(rng, 0.05, 0.95), oracles::urand(rng, 0.05, 0.95));
        const Sym2 A = equiv_detail::pair_integral(G, Gb);
        worst_rt = std::max(worst_rt, sym_gap(equiv_detail::partner_metric(G, A), Gb));

        Sym2 A0{oracles::urand(rng, -2, 2), oracles::urand(rng, -2, 2),
                oracles::urand(rng, -2, 2)};
        if (std::abs(A0.det()) < 0.05) continue;
        const Sym2 Gb0 = equiv_detail::partner_metric(G, A0);
        worst_rt = std::max(worst_rt, sym_gap(equiv_detail::pair_integral(G, Gb0), A0));
        ++done;
    }

    MetricPair pair = riemannianize(presets::global_liouville());
    double min_eig = std::numeric_limits<double>::infinity();
    const int n = 64;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const Sym2 gb = pair.gbar.at(pair.domain.x0 + pair.domain.width() * i / n,
                                         pair.domain.y0 + pair.domain.height() * j / n);
            const double half_tr = 0.5 * (gb.m11 + gb.m22);
            const double rad = std::hypot(0.5 * (gb.m11 - gb.m22), gb.m12);
            min_eig = std::min(min_eig, half_tr - rad);
        }

    const double residual = geodesic_equivalence_check(pair, 10, 5.0);
    const double dt = seconds_since(t0);

    const bool ok = worst_rt <= 1e-9 && min_eig > 0.0 && residual <= 1e-4 && dt <= 120.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "round trip %.2e <= 1e-9, min gbar eigenvalue %.3f > 0, geodesic residual "
                  "%.2e <= 1e-4, %.1fs <= 120s",
                  worst_rt, min_eig, residual, dt);
    report(7, "equivalence round trip and riemannianized partner", ok, buf);
}

void c8_killing_transfer() {
    const Rect r{0.0, 1.0, 0.0, 1.0};
    const MetricField g = flat_dxdy();
    const VectorField2D Kbar{fields::constant(1.0), fields::constant(0.0)};

    const VectorField2D K1 = transfer_killing(g, flat_euclid(), Kbar, r);
    const double res1 = killing_residual(g, K1, r, 16, 16);

    const VectorField2D K2 = transfer_killing(g, scaled(g, 4.0), Kbar, r);
    const double res2 = killing_residual(g, K2, r, 16, 16);

    char buf[96];
    std::snprintf(buf, sizeof buf, "flat pair residual %.2e, gbar = 4g residual %.2e", res1,
                  res2);
    report(8, "killing fields transfer across equivalent pairs", res1 <= 1e-10 && res2 <= 1e-10,
           buf);
}

void c9_superintegrability() {
    const TorusSystem flat = presets::flat_torus();
    std::vector<std::pair<std::string, QuadraticIntegral>> trio;
    trio.emplace_back("hamiltonian", hamiltonian_coefficients(flat.metric));
    for (std::size_t i = 0; i < flat.integrals.size(); ++i)
        trio.emplace_back("integral_" + std::to_string(i), flat.integrals[i]);
    const int rank3 = superintegrability_report(flat.metric, trio, flat.domain).rank;

    double curv = 0.0;
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i)
            curv = std::max(curv, std::abs(gauss_curvature_at(flat.metric, (i + 0.5) / 64.0,
                                                              (j + 0.5) / 64.0)));

    const TorusSystem gl = presets::global_liouville();
    std::vector<std::pair<std::string, QuadraticIntegral>> duo;
    duo.emplace_back("hamiltonian", hamiltonian_coefficients(gl.metric));
    duo.emplace_back("integral_0", gl.integral());
    const int rank2 = superintegrability_report(gl.metric, duo, gl.domain).rank;

    char buf[112];
    std::snprintf(buf, sizeof buf, "flat triple rank %d, max |curvature| %.2e, model pair rank %d",
                  rank3, curv, rank2);
    report(9, "superintegrable flat torus and rank-2 model pair", rank3 == 3 && curv <= 1e-8 &&
                                                                      rank2 == 2,
           buf);
}

void c10_projective_integral() {
    double killing_i = 0.0;
    int fields_seen = 0;
    for (const std::string& name : presets::names()) {
        const TorusSystem S = presets::by_name(name);
        if (!S.killing) continue;
        ++fields_seen;
        const SymFields I = projective_integral(S.metric, *S.killing);
        for (int j = 0; j <= 32; ++j)
            for (int i = 0; i <= 32; ++i) {
                const double x = S.domain.x0 + S.domain.width() * i / 32.0;
                const double y = S.domain.y0 + S.domain.height() * j / 32.0;
                killing_i = std::max({killing_i, std::abs(I.m11(x, y)), std::abs(I.m12(x, y)),
                                      std::abs(I.m22(x, y))});
            }
    }

    // v = x (x d/dx + y d/dy) is projective but not affine for the flat plane
    const MetricField M = flat_dxdy();
    using namespace fields;
    const VectorField2D v{mul(coord_x(), coord_x()), mul(coord_x(), coord_y())};
    const SymFields I = projective_integral(M, v);
    std::mt19937_64 rng(19);
    StepControl ctrl;
    ctrl.richardson = false;
    double drift = 0.0;
    for (int k = 0; k < 5; ++k) {
        const PhaseState s0 = random_unit_energy_state(M, {0.0, 1.0, 0.0, 1.0}, rng);
        const Trajectory traj = integrate(M, s0, 1.0, ctrl);
        const SampledCurve curve = curve_from_trajectory(M, traj);
        double q0 = 0.0;
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            const Vec2& p = curve.points[i];
            const Vec2& u = curve.velocities[i];
            const double q = I.m11(p.x, p.y) * u.x * u.x + 2.0 * I.m12(p.x, p.y) * u.x * u.y +
                             I.m22(p.x, p.y) * u.y * u.y;
            if (i == 0) q0 = q;
            drift = std::max(drift, std::abs(q - q0));
        }
    }

    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "max |I| %.2e over %d killing fields, projective drift %.2e on 5 lines",
                  killing_i, fields_seen, drift);
    report(10, "projective obstruction integral", fields_seen == 5 && killing_i <= 1e-12 &&
                                                      drift <= 1e-6,
           buf);
}

void c11_integrator_self_tests() {
    const TorusSystem S = presets::global_liouville();
    std::mt19937_64 rng(23);
    StepControl ctrl;
    ctrl.richardson = false;
    double reversal = 0.0;
    for (int k = 0; k < 3; ++k) {
        const PhaseState s0 = random_unit_energy_state(S.metric, S.domain, rng);
        const Trajectory fwd = integrate(S.metric, s0, 4.0, ctrl);
        PhaseState back = fwd.end();
        back.px = -back.px;
        back.py = -back.py;
        const PhaseState r = integrate(S.metric, back, 4.0, ctrl).end();
        reversal = std::max({reversal, std::abs(r.x - s0.x), std::abs(r.y - s0.y),
                             std::abs(r.px + s0.px), std::abs(r.py + s0.py)});
    }

    const MetricField E = flat_euclid();
    double straight = 0.0;
    for (const PhaseState s0 :
         {PhaseState{0.1, 0.2, 1.0, 2.0}, PhaseState{0.5, 0.4, -0.3, 0.7}}) {
        const PhaseState e = integrate(E, s0, 1.0, ctrl).end();
        straight = std::max({straight, std::abs(e.x - (s0.x + s0.px)),
                             std::abs(e.y - (s0.y + s0.py)), std::abs(e.px - s0.px),
                             std::abs(e.py - s0.py)});
    }

    char buf[96];
    std::snprintf(buf, sizeof buf, "reversal return error %.2e <= 1e-6, straight-line error "
                                   "%.2e <= 1e-10",
                  reversal, straight);
    report(11, "integrator reversal and flat exactness", reversal <= 1e-6 && straight <= 1e-10,
           buf);
}

}  // namespace

int main() {
    criterion(1, "poisson bracket vanishes on the shipped presets", c1_bracket_vanishing);
    criterion(2, "integrals conserved along 10 random unit-energy flows, T=10",
              c2_conservation_along_flow);
    criterion(3, "integral coefficients separate in every preset's null chart",
              c3_null_coordinate_structure);
    criterion(4, "jordan block trace identity L = -Y/2", c4_jordan_trace_identity);
    criterion(5, "eigenvalue regimes match the three normal forms", c5_eigenvalue_regimes);
    criterion(6, "classification fractions on 128x128 grids", c6_classification_fractions);
    criterion(7, "equivalence round trip and riemannianized partner",
              c7_equivalence_round_trip);
    criterion(8, "killing fields transfer across equivalent pairs", c8_killing_transfer);
    criterion(9, "superintegrable flat torus and rank-2 model pair", c9_superintegrability);
    criterion(10, "projective obstruction integral", c10_projective_integral);
    criterion(11, "integrator reversal and flat exactness", c11_integrator_self_tests);

    if (g_failures == 0)
        std::printf("all 11 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
