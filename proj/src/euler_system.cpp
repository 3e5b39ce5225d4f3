#include "curveflow/euler_system.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace curveflow {

FlowValues FlowField::values(double t, double a) const {
    const auto j = jet(t, a);
    return {j.u, j.rho, j.theta};
}

ConstantFlow::ConstantFlow(double u, double rho, double theta) : state_{u, rho, theta} {}

FlowJet ConstantFlow::jet(double, double) const {
    FlowJet j;
    j.u = state_.u;
    j.rho = state_.rho;
    j.theta = state_.theta;
    j.theta_aa = 0.0;
    return j;
}

SampledFlow::SampledFlow(ValueFn values, ValidityFn validity)
    : values_(std::move(values)), validity_(std::move(validity)) {}

bool SampledFlow::valid(double t, double a) const { return !validity_ || validity_(t, a); }

FlowValues SampledFlow::values(double t, double a) const {
    if (!valid(t, a)) throw Error(ErrorCode::OutsideValidity, fmt::format("({}, {}) outside the flow domain", t, a));
    return values_(t, a);
}

FlowJet SampledFlow::jet(double t, double a) const {
    const auto v = values(t, a);
    auto in_t = [&](double FlowValues::*member) {
        return fd_derivative([&](double s) { return values_(s, a).*member; }, t, 1);
    };
    auto in_a = [&](double FlowValues::*member, int order) {
        return fd_derivative([&](double s) { return values_(t, s).*member; }, a, order);
    };
    FlowJet j;
    j.u = v.u;
    j.rho = v.rho;
    j.theta = v.theta;
    j.u_t = in_t(&FlowValues::u);
    j.rho_t = in_t(&FlowValues::rho);
    j.theta_t = in_t(&FlowValues::theta);
    j.u_a = in_a(&FlowValues::u, 1);
    j.rho_a = in_a(&FlowValues::rho, 1);
    j.theta_a = in_a(&FlowValues::theta, 1);
    j.theta_aa = in_a(&FlowValues::theta, 2);
    return j;
}

// ---------------------------------------------------------------------------
// Exact solution families

ExactSolution::ExactSolution(const SolutionConstants& constants, const GasParams& gas, double tol)
    : constants_(constants), R_(gas.R()), n_(gas.n()), omega_(gas.omega()), tol_(tol) {
    const auto& c = constants_.c;
    if (constants_.family != 1 && constants_.family != 2) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("solution family must be 1 or 2 (got {})", constants_.family));
    }
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
    for (double v : c) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "solution constants must be finite");
    }
    if (c[0] == 0.0) throw Error(ErrorCode::InvalidArgument, "solution families require c1 != 0");
    if (!(c[1] > 0.0)) throw Error(ErrorCode::InvalidArgument, "solution families require c2 > 0");
    if (constants_.family == 2 && n_ == 2) {
        throw Error(ErrorCode::InvalidArgument, "solution family 2 requires n != 2");
    }
    const double n = n_;
    amplitude_ = c[0] * std::pow(c[1], -(n + 2.0) / (2.0 * n)) * std::pow(omega_, (n + 2.0) / n);
    t_ref_ = c[2] / omega_;
    const double half_width = 0.5 * std::numbers::pi / omega_;
    const double guard = 10.0 * tol_;
    t_lo_ = t_ref_ - half_width + guard;
    t_hi_ = t_ref_ + half_width - guard;
}

double ExactSolution::cos_power_integral(double t) const {
    const double e = 2.0 / n_;
    const double c3 = constants_.c[2];
    return quadrature([&](double s) { return std::pow(std::cos(c3 - omega_ * s), -e); }, t_ref_, t, tol_);
}

double ExactSolution::forcing(double t) const {
    const double phase = constants_.c[2] - omega_ * t;
    return -R_ * amplitude_ / std::cos(phase) * (cos_power_integral(t) + constants_.c[3]);
}

double ExactSolution::forcing_integral(double t) const {
    const double c3 = constants_.c[2];
    // The inner integral error is amplified by at most |t - t_ref| sup|R C sec^2|.
    const double inner_tol = std::max(1e-15, 0.01 * tol_);
    auto integrand = [&](double s) {
        const double sec = 1.0 / std::cos(c3 - omega_ * s);
        const double inner = quadrature(
            [&](double r) { return std::pow(std::cos(c3 - omega_ * r), -2.0 / n_); }, t_ref_, s, inner_tol);
        return -R_ * amplitude_ * sec * (inner + constants_.c[3]) * sec;
    };
    return quadrature(integrand, t_ref_, t, tol_);
}

ExactSolution::TimeTerms ExactSolution::time_terms(double t) const {
    if (!in_window(t)) {
        throw Error(ErrorCode::OutsideValidity,
                    fmt::format("t = {} outside the solution interval ({}, {})", t, t_lo_, t_hi_));
    }
    const double phase = constants_.c[2] - omega_ * t;
    TimeTerms tt;
    tt.sec = 1.0 / std::cos(phase);
    tt.tan = std::tan(phase);
    const double integral = cos_power_integral(t) + constants_.c[3];
    const double ra = R_ * amplitude_;
    tt.f = -ra * tt.sec * integral;
    tt.f_t = -ra * (-omega_ * tt.sec * tt.tan * integral + std::pow(tt.sec, 1.0 + 2.0 / n_));
    tt.J = forcing_integral(t);
    return tt;
}

FlowJet ExactSolution::assemble(const TimeTerms& tt, double a) const {
    const auto& c = constants_.c;
    const double w = omega_;
    const double sec = tt.sec, tan = tt.tan;
    FlowJet j;
    j.theta_aa = 0.0;
    if (constants_.family == 1) {
        const double e = 2.0 / n_;
        const double C = amplitude_;
        const double sec_e = std::pow(sec, e);
        const double sec_1e = sec_e * sec;
        const double rho0 = w / std::sqrt(c[1]);
        j.rho = rho0 * sec;
        j.rho_t = -w * rho0 * sec * tan;
        j.rho_a = 0.0;
        j.u = a * w * tan + tt.f;
        j.u_a = w * tan;
        j.u_t = -a * w * w * sec * sec + tt.f_t;
        const double bracket = C * tt.J + c[4];
        j.theta = C * a * sec_1e - sec_e * bracket;
        j.theta_a = C * sec_1e;
        j.theta_t = -w * (1.0 + e) * C * a * sec_1e * tan + e * w * sec_e * tan * bracket - sec_e * C * tt.f * sec;
    } else {
        const double n = n_;
        const double D = c[0] * w * w / c[1];
        const double G = std::pow(std::sqrt(c[1]) / (w * sec), (n - 2.0) / n);
        const double G_t = G * (n - 2.0) / n * w * tan;
        const double bracket = 2.0 * tt.J + c[4];
        j.rho = D * a * sec * sec - D * sec * bracket;
        j.rho_a = D * sec * sec;
        j.rho_t = -2.0 * w * D * a * sec * sec * tan + w * D * sec * tan * bracket - 2.0 * D * tt.f * sec * sec;
        j.theta = G * j.rho;
        j.theta_a = G * j.rho_a;
        j.theta_t = G_t * j.rho + G * j.rho_t;
        j.u = a * w * tan + 2.0 * tt.f;
        j.u_a = w * tan;
        j.u_t = -a * w * w * sec * sec + 2.0 * tt.f_t;
    }
    return j;
}

bool ExactSolution::valid(double t, double a) const {
    if (!in_window(t)) return false;
    const auto v = assemble(time_terms(t), a);
    return v.rho > 0.0 && v.theta > 0.0 && std::isfinite(v.rho) && std::isfinite(v.theta);
}

FlowJet ExactSolution::jet(double t, double a) const {
    const auto j = assemble(time_terms(t), a);
    if (!(j.rho > 0.0 && j.theta > 0.0)) {
        throw Error(ErrorCode::OutsideValidity,
                    fmt::format("family {} has rho = {}, theta = {} at ({}, {})", constants_.family, j.rho, j.theta,
                                t, a));
    }
    return j;
}

FlowValues ExactSolution::values(double t, double a) const {
    const auto j = jet(t, a);
    return {j.u, j.rho, j.theta};
}

ExactSolution solution_family_1(const std::array<double, 5>& c, const GasParams& gas, double tol) {
    return ExactSolution(SolutionConstants{c, 1}, gas, tol);
}

ExactSolution solution_family_2(const std::array<double, 5>& c, const GasParams& gas, double tol) {
    return ExactSolution(SolutionConstants{c, 2}, gas, tol);
}

// ---------------------------------------------------------------------------
// Residuals, symbol, invariants

std::array<double, 3> euler_residual(const FlowField& field, const GasParams& gas, const PlanckPotential& pot,
                                     double t, double a) {
    if (!field.valid(t, a)) {
        throw Error(ErrorCode::OutsideValidity, fmt::format("({}, {}) outside the flow domain", t, a));
    }
    const auto j = field.jet(t, a);
    if (!j.theta_aa) throw Error(ErrorCode::DerivativeUnavailable, "flow field does not provide theta_aa");
    const auto th = thermo_jet(pot, gas.R(), j.rho, j.theta);

    const double p_a = th.p_x * j.rho_a + th.p_y * j.theta_a;
    const double s_t = th.s_x * j.rho_t + th.s_y * j.theta_t;
    const double s_a = th.s_x * j.rho_a + th.s_y * j.theta_a;
    return {
        j.rho * (j.u_t + j.u * j.u_a) + p_a + 2.0 * j.rho * gas.g() * gas.lambda() * a,
        j.rho_t + j.rho_a * j.u + j.rho * j.u_a,
        j.rho * j.theta * (s_t + j.u * s_a) - gas.k() * *j.theta_aa,
    };
}

EulerSymbol euler_symbol(const GasParams& gas, const PlanckPotential& pot, const FlowValues& state,
                         std::array<double, 2> xi) {
    const auto phi = pot.jet(state.rho, state.theta);
    const double R = gas.R(), k = gas.k();
    const double rho = state.rho, theta = state.theta, u = state.u;
    const double transport = xi[0] + u * xi[1];
    const double stiffness = rho * phi.xx + 2.0 * phi.x;

    EulerSymbol s;
    s.matrix = {{
        {rho * transport, -R * rho * theta * xi[1] * stiffness, -R * rho * rho * xi[1] * (theta * phi.xy + phi.x)},
        {rho * xi[1], transport, 0.0},
        {0.0, 0.0, -k * xi[1] * xi[1]},
    }};
    s.det_direct = determinant<3>(s.matrix);
    s.det_factored =
        -k * rho * xi[1] * xi[1] * (transport * transport + R * rho * theta * xi[1] * xi[1] * stiffness);
    return s;
}

std::pair<double, double> characteristic_speeds(const GasParams& gas, const PlanckPotential& pot,
                                                const FlowValues& state) {
    const auto phi = pot.jet(state.rho, state.theta);
    const double c2 = -gas.R() * state.rho * state.theta * (state.rho * phi.xx + 2.0 * phi.x);
    if (c2 < 0.0) {
        throw Error(ErrorCode::DomainError, "inadmissible state: no real characteristic speeds");
    }
    const double c = std::sqrt(c2);
    return {state.u - c, state.u + c};
}

TressePoint invariants_of_flow(const FlowField& field, double t, double a) {
    if (!field.valid(t, a)) {
        throw Error(ErrorCode::OutsideValidity, fmt::format("({}, {}) outside the flow domain", t, a));
    }
    const auto j = field.jet(t, a);
    return {j.rho, j.theta, j.u_a, j.rho_a, j.theta_a, j.theta_t + j.u * j.theta_a};
}

double tresse_jacobian(const FlowField& field, double t, double a) {
    const auto j = field.jet(t, a);
    return j.rho_a * j.theta_t - j.rho_t * j.theta_a;
}

} // namespace curveflow
