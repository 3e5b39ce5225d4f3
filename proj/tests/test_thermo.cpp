#include "curveflow/config.hpp"
#include "curveflow/error.hpp"
#include "curveflow/numerics.hpp"
#include "curveflow/thermo.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace curveflow;

namespace {

PlanckPotential sample_virial() {
    return virial_potential(5,
                            {Polynomial({0.3, -0.2, 0.05}), Polynomial({0.1, 0.02}), Polynomial({0.0, 0.0, 0.0, -0.05})},
                            3);
}

// |fd - exact| relative to |exact|, with an absolute floor for partials that vanish.
void check_close(double fd, double exact, double tol = 1e-6) {
    CHECK(std::abs(fd - exact) <= tol * std::max(std::abs(exact), 1e-3));
}

} // namespace

TEST_CASE("ideal gas potential closed forms") {
    const auto pot = ideal_gas_potential(3);
    auto j = pot.jet(1.0, 1.0);
    CHECK(j.phi == 0.0);
    CHECK(j.x == -1.0);
    j = pot.jet(2.0, 1.0);
    CHECK(j.xx == doctest::Approx(0.25));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 50; ++i) {
        const auto jj = pot.jet(u(rng), u(rng));
        CHECK(jj.xy == 0.0);
        CHECK(jj.xxy == 0.0);
        CHECK(jj.xyy == 0.0);
    }
}

TEST_CASE("virial potential examples") {
    const auto one = virial_potential(3, {Polynomial({1.0})}, 1);
    auto j = one.jet(2.0, 3.0);
    CHECK(j.x == doctest::Approx(-0.5 - 1.0));
    CHECK(j.xx == doctest::Approx(0.25));
    const auto lin = virial_potential(3, {Polynomial({0.0, 1.0})}, 1);
    CHECK(lin.jet(1.7, 0.4).xy == doctest::Approx(-1.0));

    const auto empty = virial_potential(4, {Polynomial({1.0, 2.0})}, 0);
    const auto ideal = ideal_gas_potential(4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), y = u(rng);
        const auto a = empty.jet(x, y), b = ideal.jet(x, y);
        CHECK(a.phi == b.phi);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
        CHECK(a.xx == b.xx);
        CHECK(a.yy == b.yy);
        CHECK(a.xxx == b.xxx);
    }
    CHECK_THROWS_AS(virial_potential(3, {Polynomial({1.0})}, 2), Error);
}

TEST_CASE("every exact partial matches finite differences of the level below") {
    for (const auto& pot : {ideal_gas_potential(3), sample_virial()}) {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.1, 10.0);
        for (int i = 0; i < 10; ++i) {
            for (int k = 0; k < 10; ++k) {
                const double x = u(rng), y = u(rng);
                const auto j = pot.jet(x, y);
                auto in_x = [&](auto field) { return [&, field](double s) { return field(pot.jet(s, y)); }; };
                auto in_y = [&](auto field) { return [&, field](double s) { return field(pot.jet(x, s)); }; };
                check_close(fd_derivative(in_x([](const PotentialJet& p) { return p.phi; }), x, 1), j.x);
                check_close(fd_derivative(in_y([](const PotentialJet& p) { return p.phi; }), y, 1), j.y);
                check_close(fd_derivative(in_x([](const PotentialJet& p) { return p.x; }), x, 1), j.xx);
                check_close(fd_derivative(in_y([](const PotentialJet& p) { return p.x; }), y, 1), j.xy);
                check_close(fd_derivative(in_x([](const PotentialJet& p) { return p.y; }), x, 1), j.xy);
                check_close(fd_derivative(in_y([](const PotentialJet& p) { return p.y; }), y, 1), j.yy);
                check_close(fd_derivative(in_x([](const PotentialJet& p) { return p.xx; }), x, 1), j.xxx);
                check_close(fd_derivative(in_y([](const PotentialJet& p) { return p.xx; }), y, 1), j.xxy);
                check_close(fd_derivative(in_x([](const PotentialJet& p) { return p.xy; }), x, 1), j.xxy);
                check_close(fd_derivative(in_y([](const PotentialJet& p) { return p.xy; }), y, 1), j.xyy);
            }
        }
    }
}

TEST_CASE("potential domain errors") {
    const auto pot = ideal_gas_potential(3);
    for (auto [x, y] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{-1.0, 2.0}}) {
        try {
            pot.jet(x, y);
            FAIL("expected DomainError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DomainError);
        }
    }
    CHECK_THROWS_AS(pressure(pot, 1.0, -1.0, 1.0), Error);
    CHECK_THROWS_AS(ideal_gas_potential(0), Error);
}

TEST_CASE("pressure, entropy and admissibility") {
    const auto ideal3 = ideal_gas_potential(3);
    CHECK(pressure(ideal3, 1.0, 2.0, 3.0) == doctest::Approx(6.0));
    const auto one = virial_potential(3, {Polynomial({1.0})}, 1);
    CHECK(pressure(one, 1.0, 1.0, 1.0) == doctest::Approx(2.0));
    CHECK(entropy(ideal_gas_potential(2), 1.7, 1.0, 1.0) == doctest::Approx(1.7));
    CHECK(admissibility(ideal3, 2.0, 1.0) == doctest::Approx(-0.5));
    CHECK(admissibility(one, 1.0, 5.0) == doctest::Approx(-3.0));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    const double R = 0.8;
    for (int n = 1; n <= 5; ++n) {
        const auto pot = ideal_gas_potential(n);
        const auto y_only = virial_potential(n, {Polynomial({0.4}), Polynomial({-0.1})}, 2);
        for (int i = 0; i < 20; ++i) {
            const double x = u(rng), y = u(rng);
            CHECK(std::abs(pressure(pot, R, x, y) - R * x * y) <= 1e-12 * R * x * y);
            const double s = R * (0.5 * n * std::log(y) - std::log(x) + 0.5 * n);
            CHECK(std::abs(entropy(pot, R, x, y) - s) <= 1e-12 * std::max(1.0, std::abs(s)));
            CHECK(std::abs(admissibility(pot, x, y) + 1.0 / x) <= 1e-12 * (1.0 / x));
            CHECK(admissibility(pot, x, y) < 0.0);
            // y-independent A_i shift Phi by a function of x alone: s_y is unchanged and
            // s moves by -R (0.4 x - 0.1 x^2 / 2).
            const double shift = -R * (0.4 * x - 0.05 * x * x);
            CHECK(entropy(y_only, R, x, y) - entropy(pot, R, x, y) == doctest::Approx(shift).epsilon(1e-12));
            CHECK(thermo_jet(y_only, R, x, y).s_y == doctest::Approx(thermo_jet(pot, R, x, y).s_y).epsilon(1e-13));
        }
    }
}

TEST_CASE("thermo_jet partials agree with finite differences of pressure and entropy") {
    const auto pot = sample_virial();
    const double R = 1.3;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int i = 0; i < 30; ++i) {
        const double x = u(rng), y = u(rng);
        const auto t = thermo_jet(pot, R, x, y);
        check_close(fd_derivative([&](double s) { return pressure(pot, R, s, y); }, x, 1), t.p_x);
        check_close(fd_derivative([&](double s) { return pressure(pot, R, x, s); }, y, 1), t.p_y);
        check_close(fd_derivative([&](double s) { return entropy(pot, R, s, y); }, x, 1), t.s_x);
        check_close(fd_derivative([&](double s) { return entropy(pot, R, x, s); }, y, 1), t.s_y);
    }
}

TEST_CASE("virial coefficient derivatives match finite differences") {
    const Polynomial a({0.5, -1.0, 0.25, 0.125});
    for (double y : {-2.0, -0.3, 0.0, 1.1, 4.0}) {
        CHECK(std::abs(a.derivative(y, 1) - fd_derivative([&](double s) { return a(s); }, y, 1)) < 1e-8);
        CHECK(std::abs(a.derivative(y, 2) - fd_derivative([&](double s) { return a.derivative(s, 1); }, y, 1)) <
              1e-8);
    }
    CHECK(Polynomial({3.0}).derivative(2.0, 1) == 0.0);
    CHECK(Polynomial().is_zero());
}

TEST_CASE("GasParams invariants") {
    const auto gas = GasParams::make(1.0, 3, 0.5, 1.0, 0.5);
    CHECK(gas.omega() == 1.0);
    CHECK(gas.omega_squared() == 1.0);
    CHECK_THROWS_AS(GasParams::make(0.0, 3, 0.5, 1.0, 0.5), Error);
    CHECK_THROWS_AS(GasParams::make(1.0, 3, -0.5, 1.0, 0.5), Error);
    CHECK_THROWS_AS(GasParams::make(1.0, 3, 0.5, 1.0, 0.0), Error);
    CHECK_THROWS_AS(GasParams::make(1.0, 0, 0.5, 1.0, 0.5), Error);
}

TEST_CASE("gas configuration parsing") {
    const auto cfg = parse_gas_config(R"({"R": 2, "n": 5, "k": 0.1, "g": 9.81, "lambda": 0.2,
        "potential": {"type": "virial", "coeffs": [[1, 0.5], [0, 0, 2]]}})");
    CHECK(cfg.gas.R() == 2.0);
    CHECK(cfg.gas.n() == 5);
    CHECK(cfg.gas.omega() == doctest::Approx(std::sqrt(2 * 0.2 * 9.81)));
    REQUIRE(cfg.potential.kind() == PlanckPotential::Kind::Virial);
    CHECK(cfg.potential.coefficients().size() == 2);

    const auto ideal = parse_gas_config(R"({"R": 1, "n": 3, "k": 1, "g": 1, "lambda": 0.5})");
    CHECK(ideal.potential.kind() == PlanckPotential::Kind::IdealGas);

    auto code_of = [](const char* text) {
        try {
            parse_gas_config(text);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;  // sentinel: parse unexpectedly succeeded
    };
    CHECK(code_of(R"({"R": 1, "n": 3, "k": 1, "g": 1, "lambda": 0.5, "omega": 2})") == ErrorCode::ConfigError);
    CHECK(code_of(R"({"R": 1, "n": 3, "k": 1, "g": 1})") == ErrorCode::ConfigError);
    CHECK(code_of(R"({"R": 1, "n": 3.5, "k": 1, "g": 1, "lambda": 0.5})") == ErrorCode::ConfigError);
    CHECK(code_of(R"({"R": -1, "n": 3, "k": 1, "g": 1, "lambda": 0.5})") == ErrorCode::ConfigError);
    CHECK(code_of(R"({"R": 1, "n": 3, "k": 1, "g": 1, "lambda": 0.5, "potential": {"type": "vdw"}})") ==
          ErrorCode::ConfigError);
    CHECK(code_of(R"({"R": 1, "n": 3, "k": 1, "g": 1, "lambda": 0.5, "potential": {"type": "ideal", "x": 1}})") ==
          ErrorCode::ConfigError);
    CHECK(code_of("{not json") == ErrorCode::ConfigError);

    const auto round = parse_gas_config(gas_config_to_json(cfg));
    CHECK(round.gas.lambda() == cfg.gas.lambda());
    CHECK(round.potential.coefficients()[1].coefficients()[2] == 2.0);
}
