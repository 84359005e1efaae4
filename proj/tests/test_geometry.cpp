#include <catch2/catch_amalgamated.hpp>

#include "liouville/geometry.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace liouville;

TEST_CASE("metric evaluation and inverse") {
    const ScalarPeriodic1D X(2.0, {{1, 1.0}}, {}, 1.0);   // 2 + cos(2 pi x)
    const ScalarPeriodic1D Y(0.0, {}, {{1, 1.0}}, 1.0);   // sin(2 pi y)
    const MetricField M = builders::liouville_metric(X, Y, +1.0);

    const Sym2 g = M.at(0.25, 0.0);
    CHECK(g.m11 == Catch::Approx(2.0).margin(1e-14));
    CHECK(g.m12 == Catch::Approx(0.0).margin(1e-14));
    CHECK(g.m22 == Catch::Approx(2.0).margin(1e-14));

    const Sym2 gi = M.inverse_at(0.25, 0.0);
    CHECK(gi.m11 == Catch::Approx(0.5).margin(1e-14));
    CHECK(gi.m22 == Catch::Approx(0.5).margin(1e-14));

    const Sym2 h = builders::flat_dxdy().at(0.3, -1.2);
    CHECK(h.m12 == Catch::Approx(0.5).margin(1e-15));
    CHECK(h.det() == Catch::Approx(-0.25).margin(1e-15));
}

TEST_CASE("degenerate metric raises") {
    // g = x dx dy degenerates on the line x = 0
    MetricField M = builders::conformal_null(fields::coord_x());
    CHECK_THROWS_AS(M.at(0.0, 0.3), degenerate_metric_error);
    CHECK_NOTHROW(M.at(0.5, 0.3));
}

TEST_CASE("christoffel symbols of a conformally null metric") {
    // g = f dx dy has exactly Gamma^x_xx = f_x/f and Gamma^y_yy = f_y/f
    const ScalarField2D f = fields::compose1(
        fields::add(fields::coord_x(), fields::scale(fields::coord_y(), 2.0)),
        [](double t) { return std::exp(t); }, [](double t) { return std::exp(t); },
        [](double t) { return std::exp(t); });
    const MetricField M = builders::conformal_null(f);

    for (auto [x, y] : {std::pair{0.1, 0.2}, {-0.4, 0.7}, {0.0, 0.0}}) {
        const auto gamma = christoffel_at(M, x, y);
        CHECK(gamma[0].m11 == Catch::Approx(1.0).margin(1e-11));   // f_x/f = 1
        CHECK(gamma[0].m12 == Catch::Approx(0.0).margin(1e-11));
        CHECK(gamma[0].m22 == Catch::Approx(0.0).margin(1e-11));
        CHECK(gamma[1].m11 == Catch::Approx(0.0).margin(1e-11));
        CHECK(gamma[1].m12 == Catch::Approx(0.0).margin(1e-11));
        CHECK(gamma[1].m22 == Catch::Approx(2.0).margin(1e-11));   // f_y/f = 2
    }
}

TEST_CASE("gauss curvature: flat metrics vanish, sphere gives one") {
    const MetricField flat1 = builders::flat_dxdy();
    const MetricField flat2 = builders::flat_euclidean();
    const MetricField flat3 = builders::flat_minkowski();
    for (auto [x, y] : {std::pair{0.0, 0.0}, {0.3, -0.8}, {2.0, 5.0}}) {
        CHECK(std::abs(gauss_curvature_at(flat1, x, y)) < 1e-13);
        CHECK(std::abs(gauss_curvature_at(flat2, x, y)) < 1e-13);
        CHECK(std::abs(gauss_curvature_at(flat3, x, y)) < 1e-13);
    }

    const MetricField sph = builders::sphere_chart();
    for (double x : {0.4, 0.9, 1.3, 2.2})
        CHECK(gauss_curvature_at(sph, x, 0.7) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("gauss curvature agrees with the brioschi oracle") {
    const ScalarPeriodic1D X(2.0, {{1, 1.0}}, {}, 1.0);
    const ScalarPeriodic1D Y(0.0, {}, {{1, 1.0}}, 1.0);
    const MetricField L = builders::liouville_metric(X, Y, -1.0);

    const ScalarField2D f =
        fields::add(fields::constant(2.0),
                    fields::mul(fields::cos_of(fields::scale(fields::coord_x(), kTwoPi)),
                                fields::sin_of(fields::scale(fields::coord_y(), kTwoPi))));
    const MetricField C = builders::conformal_null(f);

    std::mt19937_64 rng(2024);
    double spread_lo = 1e300, spread_hi = -1e300;
    for (int i = 0; i < 60; ++i) {
        const double x = oracles::urand(rng), y = oracles::urand(rng);
        const double k1 = gauss_curvature_at(L, x, y);
        CHECK(k1 == Catch::Approx(oracles::brioschi_curvature(L, x, y)).margin(1e-9));
        const double k2 = gauss_curvature_at(C, x, y);
        CHECK(k2 == Catch::Approx(oracles::brioschi_curvature(C, x, y)).margin(1e-9));
        spread_lo = std::min(spread_lo, k1);
        spread_hi = std::max(spread_hi, k1);
    }
    CHECK(spread_hi - spread_lo > 1e-3);   // generic family is not flat
}

TEST_CASE("curvature is invariant under admissible reparametrization") {
    // pull g = f dx dy back along x = u + 0.1 sin(2 pi u), y = v (admissible)
    auto fval = [](double x, double y) {
        return 2.0 + std::cos(kTwoPi * x) * std::sin(kTwoPi * y);
    };
    const ScalarField2D f =
        fields::add(fields::constant(2.0),
                    fields::mul(fields::cos_of(fields::scale(fields::coord_x(), kTwoPi)),
                                fields::sin_of(fields::scale(fields::coord_y(), kTwoPi))));
    const MetricField M = builders::conformal_null(f);

    auto xm = [](double u) { return u + 0.1 * std::sin(kTwoPi * u); };
    auto xm1 = [](double u) { return 1.0 + 0.1 * kTwoPi * std::cos(kTwoPi * u); };

    MetricField P;   // pulled-back metric, evaluator-only fields (FD partials)
    P.g11 = fields::constant(0.0);
    P.g12.f = [fval, xm, xm1](double u, double v) { return 0.5 * fval(xm(u), v) * xm1(u); };
    P.g22 = fields::constant(0.0);
    P.signature = Signature::lorentzian;

    std::mt19937_64 rng(5);
    for (int i = 0; i < 25; ++i) {
        const double u = oracles::urand(rng), v = oracles::urand(rng);
        CHECK(gauss_curvature_at(P, u, v) ==
              Catch::Approx(gauss_curvature_at(M, xm(u), v)).margin(1e-6));
    }
}

TEST_CASE("null frame normalization and branch") {
    SECTION("dx dy") {
        const auto [V1, V2] = null_frame_at(builders::flat_dxdy(), 0.0, 0.0);
        CHECK(V1.x == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
        CHECK(V1.y == Catch::Approx(0.0).margin(1e-12));
        CHECK(V2.x == Catch::Approx(0.0).margin(1e-12));
        CHECK(V2.y == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    }
    SECTION("dx^2 - dy^2") {
        const MetricField M = builders::flat_minkowski();
        const auto [V1, V2] = null_frame_at(M, 0.0, 0.0);
        const double s = 1.0 / std::sqrt(2.0);
        // both diagonal directions are null; V1 takes the positive-x branch
        CHECK(V1.x == Catch::Approx(s).margin(1e-12));
        CHECK(std::abs(V1.y) == Catch::Approx(s).margin(1e-12));
        CHECK(cross(V1, V2) > 0.0);
        CHECK(M.at(0, 0).bilin(V1, V2) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("random lorentzian metrics satisfy the frame contract") {
        std::mt19937_64 rng(99);
        for (int i = 0; i < 200; ++i) {
            Sym2 g;
            do {
                g = {oracles::urand(rng, -2, 2), oracles::urand(rng, -2, 2),
                     oracles::urand(rng, -2, 2)};
            } while (g.det() >= -1e-3);
            MetricField M;
            M.g11 = fields::constant(g.m11);
            M.g12 = fields::constant(g.m12);
            M.g22 = fields::constant(g.m22);
            M.signature = Signature::lorentzian;
            const auto [V1, V2] = null_frame_at(M, 0, 0);
            CHECK(std::abs(g.quad(V1)) < 1e-10);
            CHECK(std::abs(g.quad(V2)) < 1e-10);
            CHECK(g.bilin(V1, V2) == Catch::Approx(1.0).margin(1e-10));
            CHECK(cross(V1, V2) > 0.0);
            CHECK((V1.x > 1e-12 || (std::abs(V1.x) <= 1e-12 && V1.y > 0.0)));
        }
    }
    SECTION("riemannian point refuses a null frame") {
        CHECK_THROWS_AS(null_frame_at(builders::flat_euclidean(), 0, 0), signature_error);
    }
}

TEST_CASE("lie derivative of the metric detects Killing fields") {
    const MetricField E = builders::flat_euclidean();

    VectorField2D tx{fields::constant(1.0), fields::constant(0.0)};
    VectorField2D rot{fields::neg(fields::coord_y()), fields::coord_x()};
    VectorField2D dil{fields::coord_x(), fields::coord_y()};

    for (auto [x, y] : {std::pair{0.2, 0.4}, {-1.0, 0.9}}) {
        CHECK(lie_derivative_metric(E, tx, x, y).max_abs() < 1e-14);
        CHECK(lie_derivative_metric(E, rot, x, y).max_abs() < 1e-14);
        // dilation is not Killing: L_v g = 2 g
        const Sym2 L = lie_derivative_metric(E, dil, x, y);
        CHECK(L.m11 == Catch::Approx(2.0).margin(1e-12));
        CHECK(L.m22 == Catch::Approx(2.0).margin(1e-12));
    }

    // y-dependent conformal factor: d/dx stays Killing, d/dy does not
    const MetricField C = builders::conformal_null(
        fields::add(fields::constant(2.0), fields::sin_of(fields::scale(fields::coord_y(), kTwoPi))));
    VectorField2D ty{fields::constant(0.0), fields::constant(1.0)};
    CHECK(lie_derivative_metric(C, tx, 0.3, 0.7).max_abs() < 1e-14);
    CHECK(lie_derivative_metric(C, ty, 0.3, 0.7).max_abs() > 1e-2);
}

TEST_CASE("lattice reduction") {
    const Lattice L({1.0, 0.0}, {0.0, 1.0});
    const Vec2 p = L.reduce({1.25, -0.25});
    CHECK(p.x == Catch::Approx(0.25).margin(1e-14));
    CHECK(p.y == Catch::Approx(0.75).margin(1e-14));

    const Lattice S({2.0, 0.0}, {1.0, 1.0});   // sheared
    const Vec2 q = S.reduce({5.3, 2.4});
    const Vec2 c = S.basis_coords(q);
    CHECK(c.x >= 0.0);
    CHECK(c.x < 1.0);
    CHECK(c.y >= 0.0);
    CHECK(c.y < 1.0);
    // q differs from the input by a lattice vector
    const Vec2 d = Vec2{5.3, 2.4} - q;
    const Vec2 cd = S.basis_coords(d);
    CHECK(cd.x == Catch::Approx(std::round(cd.x)).margin(1e-12));
    CHECK(cd.y == Catch::Approx(std::round(cd.y)).margin(1e-12));

    CHECK_THROWS_AS(Lattice({1.0, 1.0}, {2.0, 2.0}), config_error);
}
