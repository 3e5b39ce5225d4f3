#include "curveflow/error.hpp"
#include "curveflow/euler_system.hpp"
#include "curveflow/quotient.hpp"
#include "curveflow/thermo.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace curveflow;

namespace {

GasParams gas_with(int n, double omega, double R = 1.0, double k = 1.0) {
    // omega^2 = 2 lambda g with g = 1
    return GasParams::make(R, n, k, 1.0, 0.5 * omega * omega);
}

double max_abs(const std::array<double, 4>& q) {
    return std::max({std::abs(q[0]), std::abs(q[1]), std::abs(q[2]), std::abs(q[3])});
}

PlanckPotential sample_virial(int n) {
    return virial_potential(n, {Polynomial({0.3, -0.2, 0.05}), Polynomial({0.1, 0.02})}, 2);
}

TresseJet random_jet(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.3, 2.5), any(-2.0, 2.0);
    TresseJet j;
    j.point = {pos(rng), pos(rng), any(rng), any(rng), any(rng), any(rng)};
    j.K_x = any(rng);
    j.K_y = any(rng);
    j.L_x = any(rng);
    j.L_y = any(rng);
    j.M_x = any(rng);
    j.M_y = any(rng);
    j.N_x = any(rng);
    j.N_y = any(rng);
    return j;
}

struct Constants {
    double c1, c2, omega;
};

constexpr Constants kConstantSets[] = {{1.0, 2.0, 1.0}, {-1.0, 4.0, 1.0}, {2.0, 1.0, 0.5}};

} // namespace

TEST_CASE("first constant-type solution solves the quotient") {
    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    const auto f = quotsol1(1.0, 2.0, 3, 1.0);
    CHECK(max_abs(quotient_residual(f, gas, pot, 1.0, 1.0)) <= 1e-9);

    std::mt19937_64 rng(21);
    for (int n : {3, 4, 5}) {
        const auto potn = ideal_gas_potential(n);
        for (const auto& c : kConstantSets) {
            const auto g = gas_with(n, c.omega);
            for (int sigma : {1, -1}) {
                const auto sol = quotsol1(c.c1, c.c2, n, c.omega, sigma);
                const double x_min = c.omega / std::sqrt(c.c2);
                std::uniform_real_distribution<double> xs(1.05 * x_min, 3.0 * x_min), ys(0.2, 3.0);
                double worst = 0.0;
                for (int i = 0; i < 100; ++i) {
                    worst = std::max(worst, max_abs(quotient_residual(sol, g, potn, xs(rng), ys(rng))));
                }
                CHECK(worst <= 1e-8);
            }
        }
    }
}

TEST_CASE("second constant-type solution solves the quotient") {
    std::mt19937_64 rng(22);
    for (int n : {3, 4, 5}) {
        const auto pot = ideal_gas_potential(n);
        const double m = 2.0 * n / (n - 2.0);
        for (const auto& c : kConstantSets) {
            const auto gas = gas_with(n, c.omega);
            for (int sigma : {1, -1}) {
                const auto sol = quotsol2(c.c1, c.c2, n, c.omega, sigma);
                const double r_min = std::pow(c.omega * c.omega / c.c2, 1.0 / m);
                std::uniform_real_distribution<double> rs(1.02 * r_min, 1.6 * r_min), ys(0.3, 2.0);
                double worst = 0.0, worst_alt = 0.0;
                for (int i = 0; i < 100; ++i) {
                    const double y = ys(rng), x = rs(rng) * y;
                    REQUIRE(sol.in_domain(x, y));
                    worst = std::max(worst, max_abs(quotient_residual(sol, gas, pot, x, y)));
                    worst_alt = std::max(worst_alt, std::abs(quotient_residual_alt4(sol, x, y)));
                }
                CHECK(worst <= 1e-8);
                CHECK(worst_alt <= 1e-8);
            }
        }
    }
}

TEST_CASE("perturbed constant-type solutions are rejected") {
    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    const auto sol = quotsol2(1.0, 2.0, 3, 1.0);
    auto jet = sol.jet(1.5, 1.0);
    jet.point.K *= 1.01;
    CHECK(max_abs(quotient_residual(jet, gas, pot)) > 1e-3);
    // Wrong gas: the k-term cancels, but omega does not.
    CHECK(max_abs(quotient_residual(sol, gas_with(3, 1.2), pot, 1.5, 1.0)) > 1e-3);
}

TEST_CASE("q1 cancels term by term") {
    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    SampledTresseField f([](double x, double y) { return TressePoint{0, 0, 2.0, std::sin(x), 3.0, 2.0 * y}; });
    const auto q = quotient_residual(f, gas, pot, 1.3, 0.7);
    CHECK(std::abs(q[0]) < 1e-9);
}

TEST_CASE("rewritten fourth equation is a combination of q3 and q4") {
    std::mt19937_64 rng(23);
    const auto gas = GasParams::make(1.4, 5, 0.6, 1.0, 0.8);
    for (const auto& pot : {ideal_gas_potential(5), sample_virial(5)}) {
        for (int i = 0; i < 200; ++i) {
            const auto j = random_jet(rng);
            const auto& p = j.point;
            const double det = p.x * p.K * p.M + p.L * p.N;
            if (std::abs(p.L) < 0.1 || std::abs(det) < 0.1 || std::abs(p.M) < 0.1) continue;
            const auto q = quotient_residual(j, gas, pot);
            const double combo = (p.L * q[3] - p.x * p.M * q[2]) / det;
            const double alt = quotient_residual_alt4(j);
            CHECK(std::abs(alt - combo) <= 1e-10 * std::max(1.0, std::abs(alt)));
        }
    }
}

TEST_CASE("rewritten fourth equation preconditions and hand values") {
    CHECK_THROWS_AS(quotient_residual_alt4(ConstantTresseField(0.0, 0.0, 1.0, 1.0), 1.0, 1.0), Error);
    try {
        (void)quotient_residual_alt4(quotsol1(1.0, 2.0, 3, 1.0), 1.0, 1.0);
        FAIL("expected AltFormUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AltFormUnavailable);
    }
    const double c = 0.7;
    CHECK(quotient_residual_alt4(ConstantTresseField(c, c, 1.3, -0.4), 1.2, 0.8) == doctest::Approx(2 * c * c));
}

TEST_CASE("nondegeneracy is enforced") {
    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    for (const auto& f : {ConstantTresseField(1.0, 1.0, 0.0, 1.0), ConstantTresseField(0.0, 0.0, 1.0, 1.0),
                          ConstantTresseField(1.0, 1.0, 1.0, -1.0)}) {
        try {
            (void)quotient_residual(f, gas, pot, 1.0, 1.0);
            FAIL("expected NondegeneracyViolated");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NondegeneracyViolated);
        }
    }
    CHECK_THROWS_AS(quotient_residual(quotsol1(1.0, 2.0, 3, 1.0), gas, pot, 0.5, 1.0), Error);
}

TEST_CASE("quotient symbol determinant factorizes") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> any(-2.0, 2.0);
    const auto gas = GasParams::make(1.4, 5, 0.6, 1.0, 0.8);
    for (const auto& pot : {ideal_gas_potential(5), sample_virial(5)}) {
        for (int i = 0; i < 100; ++i) {
            const auto p = random_jet(rng).point;
            const auto s = quotient_symbol(p, gas, pot, {any(rng), any(rng)});
            CHECK(std::abs(s.det_direct - s.det_factored) <= 1e-12 * std::max(1.0, std::abs(s.det_direct)));
        }
    }

    const TressePoint p{1.2, 0.7, 0.4, 0.9, -1.1, 0.6};
    const auto pot = ideal_gas_potential(3);
    const auto null = quotient_symbol(p, gas, pot, {p.M, -p.L});
    CHECK(null.det_direct == doctest::Approx(0.0));
    CHECK(null.det_factored == 0.0);

    const auto phi = pot.jet(p.x, p.y);
    const double det = p.x * p.K * p.M + p.L * p.N;
    const double want = -gas.k() * det * p.M * p.M *
                        (gas.R() * p.x * p.y * p.M * p.M * (p.x * phi.xx + 2 * phi.x) + p.N * p.N);
    CHECK(quotient_symbol(p, gas, pot, {0.0, 1.0}).det_direct == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("characteristic fields") {
    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    const auto sol = quotsol1(1.0, 2.0, 3, 1.0);
    const auto zs = characteristic_fields(sol, pot, gas, 1.5, 4.0);
    REQUIRE(zs.size() == 3);
    CHECK(zs[0].tag == CharacteristicTag::Z1);
    CHECK(zs[0].v_x == 0.0);
    CHECK(zs[0].v_y == doctest::Approx(std::pow(1.5, 1.0 + 2.0 / 3.0)));

    const TressePoint p{1.5, 4.0, 0.3, -0.8, 1.2, 0.5};
    const auto z = characteristic_fields(p, gas, pot);
    REQUIRE(z.size() == 3);
    // radicand is R y = 4 for the ideal gas
    CHECK(z[1].v_x - z[2].v_x == doctest::Approx(2 * 2 * p.L));
    CHECK(z[1].v_y - z[2].v_y == doctest::Approx(2 * 2 * p.M));
    CHECK(z[1].v_x + z[2].v_x == doctest::Approx(2 * p.x * p.K));
    CHECK(z[1].v_y + z[2].v_y == doctest::Approx(-2 * p.N));

    // x Phi_xx + 2 Phi_x = -1/x - 2 A_1 > 0 at x = 1 when A_1 = -1
    const auto bad = virial_potential(3, {Polynomial({-1.0})}, 1);
    REQUIRE(admissibility(bad, 1.0, 1.0) > 0.0);
    const auto only = characteristic_fields(TressePoint{1.0, 1.0, 0.3, 0.2, 1.0, 0.1}, gas, bad);
    REQUIRE(only.size() == 1);
    CHECK(only[0].tag == CharacteristicTag::Z1);

    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> pos(0.1, 5.0);
    for (int i = 0; i < 100; ++i) {
        CHECK(characteristic_fields(TressePoint{pos(rng), pos(rng), 1, 1, 1, 1}, gas, pot).size() == 3);
    }
}

TEST_CASE("first integrals along Z1") {
    const CharacteristicField z{1.0, 1.0, 0.3, -0.7, CharacteristicTag::Z1};
    CHECK(first_integral_residual(z, [](double, double) { return 5.0; }) == 0.0);

    const auto gas = gas_with(3, 1.0);
    const auto pot = ideal_gas_potential(3);
    const auto s1 = quotsol1(1.0, 2.0, 3, 1.0);
    const auto z1 = characteristic_fields(s1, pot, gas, 1.4, 0.9)[0];
    CHECK(std::abs(first_integral_residual(z1, [&](double x, double y) { return s1.jet(x, y).point.M; })) < 1e-8);
    CHECK(std::abs(first_integral_residual(z1, [&](double x, double y) { return s1.jet(x, y).point.L; })) < 1e-12);

    const auto s2 = quotsol2(1.0, 2.0, 4, 1.0);
    const auto j = s2.jet(1.0, 1.0);
    CHECK(j.point.L == doctest::Approx(1.0));
    CHECK(j.L_x == doctest::Approx(4.0));
    CHECK(j.L_y == doctest::Approx(-4.0));
    const auto z2 = characteristic_fields(s2, pot, gas, 1.0, 1.0)[0];
    CHECK(z2.v_x == doctest::Approx(1.0));
    CHECK(z2.v_y == doctest::Approx(1.0));
    CHECK(first_integral_residual(z2, j.L_x, j.L_y) == doctest::Approx(0.0));
    CHECK(std::abs(first_integral_residual(z2, [&](double x, double y) { return s2.jet(x, y).point.L; })) < 1e-8);
    CHECK(std::abs(first_integral_residual(z2, [&](double x, double y) { return s2.jet(x, y).point.M; })) < 1e-8);
}

TEST_CASE("constant-type solution closed forms") {
    const auto s1 = quotsol1(1.5, 2.0, 3, 1.0);
    for (double x : {0.8, 1.3, 2.0}) {
        const auto j = s1.jet(x, 1.7);
        CHECK(j.K_x == doctest::Approx(2.0 * x / std::sqrt(2.0 * x * x - 1.0)));
        CHECK(j.point.N / j.point.K == doctest::Approx(-2.0 * 1.7 / 3.0));
    }
    const auto s2 = quotsol2(1.0, 2.0, 4, 1.0);
    for (double x : {0.9, 1.3, 2.0}) {
        const auto j = s2.jet(x, 0.8);
        CHECK(j.point.M * x == doctest::Approx(j.point.L * 0.8));
        CHECK(j.point.L == doctest::Approx(std::pow(x / 0.8, 4)));
    }

    // Exact partials against finite differences.
    for (const TresseField* f : std::initializer_list<const TresseField*>{&s1, &s2}) {
        SampledTresseField fd([&](double x, double y) { return f->jet(x, y).point; });
        for (double x : {1.1, 1.6}) {
            for (double y : {0.7, 1.0}) {
                const auto e = f->jet(x, y), d = fd.jet(x, y);
                CHECK(oracle::scaled_error(d.K_x, e.K_x) < 1e-6);
                CHECK(oracle::scaled_error(d.K_y, e.K_y) < 1e-6);
                CHECK(oracle::scaled_error(d.L_x, e.L_x) < 1e-6);
                CHECK(oracle::scaled_error(d.L_y, e.L_y) < 1e-6);
                CHECK(oracle::scaled_error(d.M_x, e.M_x) < 1e-6);
                CHECK(oracle::scaled_error(d.M_y, e.M_y) < 1e-6);
                CHECK(oracle::scaled_error(d.N_x, e.N_x) < 1e-6);
                CHECK(oracle::scaled_error(d.N_y, e.N_y) < 1e-6);
            }
        }
    }

    for (double c2 : {0.0, -1.0}) {
        try {
            (void)quotsol1(1.0, c2, 3, 1.0);
            FAIL("expected EmptyDomain");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyDomain);
        }
        CHECK_THROWS_AS(quotsol2(1.0, c2, 3, 1.0), Error);
    }
    CHECK_THROWS_AS(quotsol2(1.0, 2.0, 2, 1.0), Error);
    CHECK_THROWS_AS(quotsol1(0.0, 2.0, 3, 1.0), Error);
    CHECK_FALSE(s1.in_domain(0.5, 1.0));
    CHECK_THROWS_AS(s1.jet(0.5, 1.0), Error);
}

TEST_CASE("flow invariants of the exact families lie on the constant-type graphs") {
    std::mt19937_64 rng(26);
    for (int n : {3, 5}) {
        const auto gas = GasParams::make(1.0, n, 1.0, 1.0, 0.5);
        const double w = gas.omega();
        const std::array<double, 5> c{1.2, 2.0, 0.3, 0.1, 0.0};
        const auto one = solution_family_1(c, gas, 1e-10);
        const auto two = solution_family_2({1.2, 2.0, 0.3, 0.1, -1.0}, gas, 1e-10);
        std::uniform_real_distribution<double> ts(one.reference_time() - 1.0, one.reference_time() + 1.0),
            as(0.1, 2.0);
        for (int i = 0; i < 30; ++i) {
            const double t = ts(rng), a = as(rng);
            const auto p = invariants_of_flow(one, t, a);
            const double sigma = p.K < 0 ? -1.0 : 1.0;
            const double root = std::sqrt(c[1] * p.x * p.x - w * w);
            CHECK(std::abs(p.L) <= 1e-6);
            CHECK(std::abs(p.M - c[0] * std::pow(p.x, 1.0 + 2.0 / n)) <= 1e-6);
            CHECK(std::abs(p.K - sigma * root) <= 1e-6);
            CHECK(std::abs(p.N + 2.0 * p.y / n * sigma * root) <= 1e-6);
            CHECK(std::abs(tresse_jacobian(one, t, a)) > 1e-6);

            const auto q = invariants_of_flow(two, t, a);
            const auto g = quotsol2(c[0], c[1], n, w, q.K < 0 ? -1 : 1).jet(q.x, q.y).point;
            CHECK(std::abs(q.L - g.L) <= 1e-6);
            CHECK(std::abs(q.M - g.M) <= 1e-6);
            CHECK(std::abs(q.K - g.K) <= 1e-6);
            CHECK(std::abs(q.N - g.N) <= 1e-6);
        }
    }
}
