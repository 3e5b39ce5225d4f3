#include "curveflow/error.hpp"
#include "curveflow/quotient.hpp"
#include "curveflow/virial_flow.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace curveflow;

namespace {

// c1 = c2 = R = 1, omega = sqrt(2), c3 = 3 reduce to (A, B) = (2, -3).
GasParams unit_gas(double k = 1.0) { return GasParams::make(1.0, 3, k, 1.0, 1.0); }
ZerothEquation unit_equation() { return {1.0, 1.0, 3.0, 1.0, std::sqrt(2.0)}; }
ZerothTerm unit_term() { return ZerothTerm::integrate(unit_equation(), 0.5, -1.0, 2.7); }

template <typename T>
void expect_code(ErrorCode code, T&& fn) {
    try {
        fn();
        FAIL("expected ", error_code_name(code));
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

struct Inventory {
    double y, N;
    EigenClass cls;
};

void check_inventory(ReducedParams p, std::vector<Inventory> want) {
    const auto got = fixed_points(p);
    REQUIRE(got.size() == want.size());
    std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) { return a.N < b.N; });
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i].y - want[i].y) <= 1e-12);
        CHECK(std::abs(got[i].N - want[i].N) <= 1e-12);
        CHECK(got[i].cls == want[i].cls);
    }
}

} // namespace

TEST_CASE("flow-temperature right-hand side") {
    CHECK(flow_temperature_rhs({0.7, -1.3}, 1.0, 0.0) == 1.0);
    CHECK(flow_temperature_rhs({0.0, 0.0}, 4.0, 1.0) == doctest::Approx(4.0 / 3.0));
    const ReducedParams p{2.0, -3.0};
    CHECK(p.A * 1.0 * 1.0 + p.B * 1.0 + 1.0 == 0.0);
    expect_code(ErrorCode::OnBreakingParabola, [&] { (void)flow_temperature_rhs(p, 1.0, 1.0); });
    expect_code(ErrorCode::OnBreakingParabola, [&] { (void)flow_temperature_rhs(p, 4.0, -2.0); });
}

TEST_CASE("fixed point inventories") {
    using E = EigenClass;
    check_inventory({-2.0, 1.0}, {{0, 0, E::UnstableNode}, {0.25, -0.5, E::Saddle}, {1, 1, E::Saddle}});
    check_inventory({1.0, 2.0}, {{0, 0, E::UnstableNode}});
    check_inventory({2.0, -3.0}, {{0, 0, E::Saddle}, {1, 1, E::Centre}, {2.25, -1.5, E::UnstableSpiral}});
    check_inventory({-2.0, -1.0}, {{0, 0, E::Saddle}});

    // A = 0 drops a degree: N (N + B) = 0.
    const auto lin = fixed_points({0.0, 2.0});
    REQUIRE(lin.size() == 2);
    CHECK(lin[0].N == -2.0);
    CHECK(lin[0].y == 4.0);
    const auto dbl = fixed_points({0.0, 0.0});
    REQUIRE(dbl.size() == 1);
    CHECK(dbl[0].multiplicity == 2);
}

TEST_CASE("fixed points are equilibria with matching Jacobians") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const ReducedParams p{u(rng), u(rng)};
        const auto field = as_planar_system(p);
        const auto fps = fixed_points(p);
        CHECK(!fps.empty());
        for (const auto& fp : fps) {
            const auto v = field(fp.y, fp.N);
            CHECK(std::abs(v[0]) <= 1e-12 * std::max(1.0, fp.y));
            CHECK(std::abs(v[1]) <= 1e-12 * std::max(1.0, std::abs(fp.N) * (1 + std::abs(p.A) * fp.y + std::abs(p.B))));
            CHECK(std::abs(fp.N * (p.A * fp.N * fp.N + fp.N + p.B)) <= 1e-12 * std::max(1.0, std::pow(std::abs(fp.N), 3) * std::abs(p.A) + 1));
            CHECK(fp.y == fp.N * fp.N);
            const auto J = fp.jacobian;
            for (int c = 0; c < 2; ++c) {
                const double dy = fd_derivative([&](double s) { return field(s, fp.N)[c]; }, fp.y, 1);
                const double dN = fd_derivative([&](double s) { return field(fp.y, s)[c]; }, fp.N, 1);
                CHECK(std::abs(dy - J[c][0]) <= 1e-6);
                CHECK(std::abs(dN - J[c][1]) <= 1e-6);
            }
            CHECK(J[0][0] == 1.0);
            CHECK(J[0][1] == -2.0 * fp.N);
            CHECK(J[1][0] == p.A * fp.N + 1.0);
            CHECK(J[1][1] == p.A * fp.y + p.B);
        }
        const auto origin = field(0.0, 0.0);
        CHECK(origin[0] == 0.0);
        CHECK(origin[1] == 0.0);
    }
}

TEST_CASE("planar trajectories follow the graph equation off the parabola") {
    const ReducedParams p{2.0, -3.0};
    const auto field = as_planar_system(p);
    TrajectoryOptions opt;
    opt.sample_ds = 0.01;
    opt.window = {-10.0, 10.0, -10.0, 10.0};
    const auto tr = integrate_trajectory(p, {2.0, 0.3}, 0.5, opt);
    REQUIRE(tr.reason == Termination::ReachedSMax);
    int checked = 0;
    for (const auto& s : tr.samples) {
        if (s.y - s.N * s.N < 0.05) continue;
        const auto v = field(s.y, s.N);
        CHECK(std::abs(v[1] / v[0] - flow_temperature_rhs(p, s.y, s.N)) <= 1e-8);
        ++checked;
    }
    CHECK(checked > 10);

    // Against a fixed-step reference.
    const oracle::Field<2> f = [&](double, const std::array<double, 2>& z) { return field(z[0], z[1]); };
    const auto ref = oracle::rk4_half_step<2>(f, 0.0, {2.0, 0.3}, 0.5, 2000);
    CHECK(std::abs(tr.samples.back().y - ref[0]) < 1e-7);
    CHECK(std::abs(tr.samples.back().N - ref[1]) < 1e-7);
}

TEST_CASE("trajectory behaviour near equilibria") {
    // N0 = 0, y > 0 moves to larger y first.
    const auto up = integrate_trajectory({0.3, -0.8}, {0.5, 0.0}, 0.01);
    CHECK(up.samples[1].y > 0.5);

    TrajectoryOptions opt;
    opt.sample_ds = 0.01;
    const auto centre = integrate_trajectory({2.0, -3.0}, {1.05, 1.05}, 50.0, opt);
    CHECK(centre.reason == Termination::ReachedSMax);
    double lo = 1e9, hi = 0.0;
    for (const auto& s : centre.samples) {
        const double d = std::hypot(s.y - 1.0, s.N - 1.0);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(lo > 0.04);
    CHECK(hi < 0.08);
    CHECK(centre.samples.back().s == 50.0);
    CHECK(centre.parabola_crossings.size() >= 2);
    for (const auto& c : centre.parabola_crossings) CHECK(std::abs(c.y - c.N * c.N) < 1e-7);

    const auto node = integrate_trajectory({-2.0, 1.0}, {0.01, 0.01}, 20.0);
    double far = 0.0;
    for (const auto& s : node.samples) far = std::max(far, std::hypot(s.y, s.N));
    CHECK(far > 0.5);

    // The unstable spiral attracts in reverse time.
    const auto spiral = integrate_trajectory({2.0, -3.0}, {2.3, -1.45}, -200.0);
    CHECK(spiral.reason == Termination::NearFixedPoint);
    CHECK(std::hypot(spiral.samples.back().y - 2.25, spiral.samples.back().N + 1.5) < 2e-6);

    const auto out = integrate_trajectory({1.0, 2.0}, {2.9, 1.0}, 10.0);
    CHECK(out.reason == Termination::LeftWindow);

    expect_code(ErrorCode::InvalidArgument, [] { (void)integrate_trajectory({2.0, -3.0}, {1.0, 1.0}, 1.0); });
}

TEST_CASE("portrait bundles") {
    const ReducedParams p{-2.0, 1.0};
    const auto win = default_portrait_window();
    CHECK(win.first.min == -1.0);
    CHECK(win.first.max == 3.0);
    CHECK(win.second.min == -2.0);
    CHECK(win.second.max == 2.0);
    const auto pic = portrait(p, win, {{0.5, 0.5}, {2.0, -1.0}, {0.0, 0.0}}, 5.0);
    CHECK(pic.fixed_points.size() == 3);
    CHECK(pic.trajectories.size() == 4);   // the equilibrium seed is skipped
    CHECK(pic.directions.size() == win.size());
    for (const auto& d : pic.directions) {
        const double len = std::hypot(d.dy, d.dN);
        CHECK((len == 0.0 || std::abs(len - 1.0) < 1e-12));
    }
    CHECK(!pic.parabola.empty());
    for (const auto& q : pic.parabola) CHECK(q[0] == q[1] * q[1]);
}

TEST_CASE("rescaling to reduced parameters") {
    const auto id = rescale_to_reduced(1.0, 1.0, 0.7, 1.0, 1.3);
    CHECK(id.alpha == 1.0);
    CHECK(id.beta == 1.0);
    CHECK(id.params.A == doctest::Approx(1.3 * 1.3));
    CHECK(id.params.B == doctest::Approx(-0.7));

    const auto r = rescale_to_reduced(1.3, 0.7, 0.4, 1.2, 0.9);
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double y = u(rng), N = u(rng);
        const auto back = r.to_physical(r.to_reduced(y, N)[0], r.to_reduced(y, N)[1]);
        CHECK(std::abs(back[0] - y) <= 1e-14 * std::max(1.0, std::abs(y)));
        CHECK(std::abs(back[1] - N) <= 1e-14 * std::max(1.0, std::abs(N)));
    }

    // Physical solution graphs map to reduced solution graphs.
    const ZerothEquation eq{1.3, 0.7, 0.4, 1.2, 0.9};
    const auto term = ZerothTerm::integrate(eq, 3.0, 1.0, 6.0);
    const auto [lo, hi] = term.domain();
    REQUIRE(hi - lo > 0.5);
    for (int i = 0; i < 20; ++i) {
        const double y = lo + (hi - lo) * (i + 0.5) / 20.0;
        const double N = term.N0(y);
        const auto red = r.to_reduced(y, N);
        const double slope = eq.slope(y, N) * r.alpha / r.beta;
        CHECK(std::abs(slope - flow_temperature_rhs(r.params, red[0], red[1])) <= 1e-8 * std::max(1.0, std::abs(slope)));
    }

    expect_code(ErrorCode::DegenerateScaling, [] { (void)rescale_to_reduced(0.0, 1.0, 0.0, 1.0, 1.0); });
    expect_code(ErrorCode::DegenerateScaling, [] { (void)rescale_to_reduced(1.0, 0.0, 0.0, 1.0, 1.0); });
    expect_code(ErrorCode::DegenerateScaling, [] { (void)rescale_to_reduced(1.0, 1.0, 0.0, -1.0, 1.0); });
}

TEST_CASE("zeroth-order term") {
    const auto z = unit_term();
    const auto [lo, hi] = z.domain();
    CHECK(lo == 0.5);
    CHECK(hi > 2.0);

    // N0 against an independent fixed-step integration of the graph equation.
    const auto eq = unit_equation();
    const oracle::Field<1> f = [&](double y, const std::array<double, 1>& n) {
        return std::array<double, 1>{(y + (2.0 * y - 3.0) * n[0]) / (y - n[0] * n[0])};
    };
    for (double y : {0.9, 1.6, 2.0}) {
        const auto ref = oracle::rk4_half_step<1>(f, 0.5, {-1.0}, y, 4000);
        CHECK(std::abs(z.N0(y) - ref[0]) < 1e-9);
    }

    for (int i = 0; i <= 100; ++i) {
        const double y = lo + (hi - lo) * i / 100.0;
        const auto e = zeroth_residual(z, eq.R, eq.omega, y);
        CHECK(e[0] == 0.0);
        CHECK(std::abs(e[1]) <= 1e-10);
        CHECK(std::abs(e[2]) <= 1e-10);
        CHECK(std::abs(e[3]) <= 1e-10 * std::max(1.0, std::abs(z.jet(y).L0_y)));
        const auto j = z.jet(y);
        CHECK(std::abs(j.L0 * j.N0 + j.M0 * j.K0 - z.c2()) <= 1e-12 * std::max(1.0, std::abs(j.M0 * j.K0)));
    }
    // A different omega does not satisfy the fourth equation.
    CHECK(std::abs(zeroth_residual(z, eq.R, 1.0, 1.5)[3]) > 1e-3);

    expect_code(ErrorCode::OffTrajectory, [&] { (void)z.N0(0.4); });
    expect_code(ErrorCode::OffTrajectory, [&] { (void)zeroth_residual(z, 1.0, 1.0, hi + 0.1); });
    CHECK_THROWS_AS(ZerothTerm::integrate(eq, 1.0, 1.0, 2.0), Error);
}

TEST_CASE("first-order right-hand side") {
    const auto z = unit_term();
    const auto gas = unit_gas(0.8);
    const VirialCoefficient A1({0.2, -0.1, 0.05});
    const auto j = z.jet(1.2);

    const FirstOrderState s{0.3, -0.2, 0.5, 0.1};
    const auto d = first_order_rhs(j, gas, A1, s);
    const double want = (gas.R() * (j.y * j.K0 + gas.n() * j.N0 / 2) - gas.k() * j.L0 * s.M1) / (gas.k() * z.c1());
    CHECK(d.M1 == doctest::Approx(want).epsilon(1e-13));
    const auto r = first_order_residual(j, gas, A1, s, d);
    for (double v : r) CHECK(std::abs(v) < 1e-12);

    // Homogeneous zero state with A1 = 0: only the R forcing of the first equation.
    const VirialCoefficient none;
    const auto d0 = first_order_rhs(j, gas, none, {});
    CHECK(d0.M1 == doctest::Approx(gas.R() * (j.y * j.K0 + 1.5 * j.N0) / (gas.k() * j.M0)));
    CHECK(d0.N1 == doctest::Approx(j.N0 * d0.M1 / j.M0));
    const double lead3 = gas.R() * j.M0 * j.M0 * j.y - j.N0 * j.N0;
    CHECK(d0.L1 == doctest::Approx(-gas.R() * j.M0 * j.M0 * d0.M1 / lead3));

    // Affine in the state.
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const FirstOrderState a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
        const FirstOrderState ab{a.M1 + b.M1, a.N1 + b.N1, a.L1 + b.L1, a.K1 + b.K1};
        const auto fa = first_order_rhs(j, gas, A1, a), fb = first_order_rhs(j, gas, A1, b);
        const auto fab = first_order_rhs(j, gas, A1, ab), f0 = first_order_rhs(j, gas, A1, {});
        CHECK(std::abs(fab.M1 - fa.M1 - fb.M1 + f0.M1) < 1e-10);
        CHECK(std::abs(fab.N1 - fa.N1 - fb.N1 + f0.N1) < 1e-10);
        CHECK(std::abs(fab.L1 - fa.L1 - fb.L1 + f0.L1) < 1e-10);
        CHECK(std::abs(fab.K1 - fa.K1 - fb.K1 + f0.K1) < 1e-10);
    }

    expect_code(ErrorCode::SingularLeadingCoefficient, [&] { (void)first_order_rhs(j, unit_gas(0.0), A1, s); });
    auto bad = j;
    bad.L0 = -bad.M0 * bad.K0 / bad.N0;   // L0 N0 + M0 K0 = 0
    expect_code(ErrorCode::SingularLeadingCoefficient, [&] { (void)first_order_rhs(bad, gas, A1, s); });
    bad = j;
    bad.N0 = std::sqrt(gas.R() * bad.M0 * bad.M0 * bad.y);
    expect_code(ErrorCode::SingularLeadingCoefficient, [&] { (void)first_order_rhs(bad, gas, A1, s); });
}

TEST_CASE("first-order solutions") {
    const auto z = unit_term();
    const auto gas = unit_gas();
    const VirialCoefficient A1({0.2, -0.1, 0.05});
    const std::array<double, 2> range{0.6, 2.0};

    const auto sol = integrate_first_order(z, gas, A1, range, {0.1, 0.0, -0.2, 0.3}, 1e-8);
    CHECK(sol.samples.size() == 801);
    for (double r : sol.max_residual) CHECK(r <= 10 * 1e-8);
    CHECK(sol.samples.back().y == 2.0);
    for (double r : sol.max_residual) CHECK(r <= 1e-6);

    const VirialCoefficient none;
    const auto forced = integrate_first_order(z, gas, none, range, {}, 1e-8);
    CHECK(std::abs(forced.samples.back().state.M1) > 1e-3);

    // Doubling A1 doubles the A1-driven part.
    const auto base = integrate_first_order(z, gas, none, range, {}, 1e-10);
    const auto one = integrate_first_order(z, gas, A1, range, {}, 1e-10);
    const VirialCoefficient A2({0.4, -0.2, 0.1});
    const auto two = integrate_first_order(z, gas, A2, range, {}, 1e-10);
    for (std::size_t i = 0; i < base.samples.size(); i += 40) {
        const auto &b = base.samples[i].state, &o = one.samples[i].state, &t = two.samples[i].state;
        CHECK(std::abs((t.M1 - b.M1) - 2 * (o.M1 - b.M1)) < 1e-7);
        CHECK(std::abs((t.N1 - b.N1) - 2 * (o.N1 - b.N1)) < 1e-7);
        CHECK(std::abs((t.L1 - b.L1) - 2 * (o.L1 - b.L1)) < 1e-7);
        CHECK(std::abs((t.K1 - b.K1) - 2 * (o.K1 - b.K1)) < 1e-7);
    }

    expect_code(ErrorCode::OffTrajectory, [&] { (void)integrate_first_order(z, gas, A1, {0.4, 1.0}, {}); });
}

TEST_CASE("truncated series solves the quotient to the expected order") {
    const auto z = unit_term();
    const auto gas = unit_gas(0.8);
    const VirialCoefficient A1({0.2, -0.1, 0.05});
    const auto pot = virial_potential(3, {A1}, 1);
    const double y = 1.3;
    const auto sol = integrate_first_order(z, gas, A1, {0.6, y}, {0.1, -0.3, 0.2, 0.4}, 1e-11, 101);
    const auto& last = sol.samples.back();
    const auto j0 = z.jet_at(y, last.N0);
    const auto s = last.state;
    const auto ds = first_order_rhs(j0, gas, A1, s);

    auto residual = [&](double x) {
        TresseJet t;
        t.point = {x, y, j0.K0 + x * s.K1, x * (j0.L0 + x * s.L1), j0.M0 + x * s.M1, j0.N0 + x * s.N1};
        t.K_x = s.K1;
        t.K_y = j0.K0_y + x * ds.K1;
        t.L_x = j0.L0 + 2 * x * s.L1;
        t.L_y = x * (j0.L0_y + x * ds.L1);
        t.M_x = s.M1;
        t.M_y = j0.M0_y + x * ds.M1;
        t.N_x = s.N1;
        t.N_y = j0.N0_y + x * ds.N1;
        return quotient_residual(t, gas, pot);
    };
    const auto big = residual(2e-3), small = residual(1e-3);
    // Halving x divides q1, q2 by 4 and q3, q4 by 8.
    CHECK(big[0] / small[0] == doctest::Approx(4.0).epsilon(0.01));
    CHECK(big[1] / small[1] == doctest::Approx(4.0).epsilon(0.01));
    CHECK(big[2] / small[2] == doctest::Approx(8.0).epsilon(0.01));
    CHECK(big[3] / small[3] == doctest::Approx(8.0).epsilon(0.01));
}
