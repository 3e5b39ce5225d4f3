#pragma once

// The Euler system on the curve {x = f(a), y = g(a), z = lambda a^2}:
//
//   rho (u_t + u u_a) = -p_a - 2 rho g lambda a
//   rho_t + (rho u)_a = 0
//   rho theta (s_t + u s_a) - k theta_aa = 0
//
// with p and s derived from a Planck potential.

#include "curveflow/numerics.hpp"
#include "curveflow/thermo.hpp"
#include "curveflow/tresse.hpp"

#include <array>
#include <functional>
#include <optional>
#include <utility>

namespace curveflow {

struct FlowValues {
    double u = 0.0;
    double rho = 0.0;
    double theta = 0.0;
};

struct FlowJet {
    double u = 0.0, u_t = 0.0, u_a = 0.0;
    double rho = 0.0, rho_t = 0.0, rho_a = 0.0;
    double theta = 0.0, theta_t = 0.0, theta_a = 0.0;
    std::optional<double> theta_aa;
};

/// Evaluable (u, rho, theta) over (t, a).
class FlowField {
public:
    virtual ~FlowField() = default;

    virtual bool valid(double t, double a) const = 0;
    /// Throws OutsideValidity when !valid(t, a).
    virtual FlowJet jet(double t, double a) const = 0;
    virtual FlowValues values(double t, double a) const;
};

class ConstantFlow final : public FlowField {
public:
    ConstantFlow(double u, double rho, double theta);

    bool valid(double, double) const override { return true; }
    FlowJet jet(double t, double a) const override;

private:
    FlowValues state_;
};

/// Flow given by value functions only; derivatives come from fd_derivative.
class SampledFlow final : public FlowField {
public:
    using ValueFn = std::function<FlowValues(double t, double a)>;
    using ValidityFn = std::function<bool(double t, double a)>;

    explicit SampledFlow(ValueFn values, ValidityFn validity = {});

    bool valid(double t, double a) const override;
    FlowJet jet(double t, double a) const override;
    FlowValues values(double t, double a) const override;

private:
    ValueFn values_;
    ValidityFn validity_;
};

struct SolutionConstants {
    std::array<double, 5> c{1.0, 2.0, 0.0, 0.0, 0.0};
    int family = 1;
};

// The two exact solution families of the ideal gas. Both live on the connected
// component of {cos(c3 - omega t) > 0} containing t_ref = c3 / omega, where
// the indefinite integrals are anchored.
class ExactSolution final : public FlowField {
public:
    ExactSolution(const SolutionConstants& constants, const GasParams& gas, double tol);

    bool valid(double t, double a) const override;
    FlowJet jet(double t, double a) const override;
    FlowValues values(double t, double a) const override;

    int family() const noexcept { return constants_.family; }
    const SolutionConstants& constants() const noexcept { return constants_; }
    double reference_time() const noexcept { return t_ref_; }
    /// Open time interval (guard band removed) on which the field is defined.
    std::pair<double, double> time_window() const noexcept { return {t_lo_, t_hi_}; }

    /// f(t) and the anchored integrals; exposed for tests and diagnostics.
    double forcing(double t) const;
    double cos_power_integral(double t) const;   // int_{t_ref}^t cos^{-2/n}(c3 - omega s) ds
    double forcing_integral(double t) const;     // int_{t_ref}^t f(s) / cos(c3 - omega s) ds

private:
    struct TimeTerms {
        double sec, tan, f, f_t, J;
    };
    TimeTerms time_terms(double t) const;
    bool in_window(double t) const noexcept { return t > t_lo_ && t < t_hi_; }
    FlowJet assemble(const TimeTerms& tt, double a) const;

    SolutionConstants constants_;
    double R_;
    int n_;
    double omega_;
    double tol_;
    double t_ref_;
    double t_lo_;
    double t_hi_;
    double amplitude_;  // c1 c2^{-(n+2)/(2n)} omega^{(n+2)/n}
};

ExactSolution solution_family_1(const std::array<double, 5>& c, const GasParams& gas, double tol);
ExactSolution solution_family_2(const std::array<double, 5>& c, const GasParams& gas, double tol);

/// (r1, r2, r3): momentum, mass and energy residuals at (t, a).
std::array<double, 3> euler_residual(const FlowField& field, const GasParams& gas, const PlanckPotential& pot,
                                     double t, double a);

struct EulerSymbol {
    Matrix<3> matrix{};
    double det_direct = 0.0;
    double det_factored = 0.0;
};

/// Principal symbol at the state (u, rho, theta) for the covector (xi1, xi2).
EulerSymbol euler_symbol(const GasParams& gas, const PlanckPotential& pot, const FlowValues& state,
                         std::array<double, 2> xi);

/// Characteristic speeds u -/+ c with c^2 = -R rho theta (rho Phi_rr + 2 Phi_r);
/// the covector (-speed, 1) annihilates the quadratic factor of the symbol.
std::pair<double, double> characteristic_speeds(const GasParams& gas, const PlanckPotential& pot,
                                                const FlowValues& state);

/// (rho, theta, u_a, rho_a, theta_a, theta_t + u theta_a) at (t, a).
TressePoint invariants_of_flow(const FlowField& field, double t, double a);

/// rho_a theta_t - rho_t theta_a; the quotient chart needs it nonzero.
double tresse_jacobian(const FlowField& field, double t, double a);

} // namespace curveflow
