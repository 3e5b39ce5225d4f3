#pragma once

// Planck-potential thermodynamics. Coordinates follow the quotient chart:
// x is density, y is temperature.

#include <cstddef>
#include <span>
#include <vector>

namespace curveflow {

/// Physical constants of the gas and the curve z = lambda a^2.
class GasParams {
public:
    /// Validates R, g, lambda > 0, k >= 0, n >= 1 and derives omega = sqrt(2 lambda g).
    static GasParams make(double R, int n, double k, double g, double lambda);

    double R() const noexcept { return R_; }
    int n() const noexcept { return n_; }
    double k() const noexcept { return k_; }
    double g() const noexcept { return g_; }
    double lambda() const noexcept { return lambda_; }
    double omega() const noexcept { return omega_; }
    double omega_squared() const noexcept { return 2.0 * lambda_ * g_; }

private:
    GasParams(double R, int n, double k, double g, double lambda);

    double R_;
    int n_;
    double k_;
    double g_;
    double lambda_;
    double omega_;
};

/// Real polynomial in y, coefficients in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);

    double operator()(double y) const noexcept;
    /// Value of the order-th derivative at y.
    double derivative(double y, int order = 1) const noexcept;
    Polynomial derivative_poly() const;

    std::span<const double> coefficients() const noexcept { return coefficients_; }
    bool is_zero() const noexcept;

private:
    std::vector<double> coefficients_;
};

/// A_i(y) of the virial series.
using VirialCoefficient = Polynomial;

struct PotentialJet {
    double phi = 0.0;
    double x = 0.0, y = 0.0;
    double xx = 0.0, xy = 0.0, yy = 0.0;
    double xxx = 0.0, xxy = 0.0, xyy = 0.0;
};

// Phi(x, y) = (n/2) ln y - ln x - sum_{i=1..m} (x^i / i) A_i(y), with m = 0 for
// the ideal gas. Immutable after construction.
class PlanckPotential {
public:
    enum class Kind { IdealGas, Virial };

    static PlanckPotential ideal_gas(int n);
    static PlanckPotential virial(int n, std::vector<VirialCoefficient> coefficients, std::size_t truncation);

    /// Phi and all partials through total order three. Throws DomainError
    /// unless x > 0 and y > 0.
    PotentialJet jet(double x, double y) const;

    Kind kind() const noexcept { return kind_; }
    int n() const noexcept { return n_; }
    std::span<const VirialCoefficient> coefficients() const noexcept { return coefficients_; }

private:
    PlanckPotential(Kind kind, int n, std::vector<VirialCoefficient> coefficients);

    Kind kind_;
    int n_;
    std::vector<VirialCoefficient> coefficients_;
};

PlanckPotential ideal_gas_potential(int n);
PlanckPotential virial_potential(int n, std::vector<VirialCoefficient> coefficients, std::size_t truncation);

/// p = -R x^2 y Phi_x
double pressure(const PlanckPotential& pot, double R, double x, double y);
/// s = R (Phi + y Phi_y)
double entropy(const PlanckPotential& pot, double R, double x, double y);
/// x Phi_xx + 2 Phi_x; non-positive for admissible states.
double admissibility(const PlanckPotential& pot, double x, double y);

/// Pressure and entropy with their first partials, by exact chain rule.
struct ThermoJet {
    double p = 0.0, p_x = 0.0, p_y = 0.0;
    double s = 0.0, s_x = 0.0, s_y = 0.0;
};

ThermoJet thermo_jet(const PlanckPotential& pot, double R, double x, double y);

} // namespace curveflow
