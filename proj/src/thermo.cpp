#include "curveflow/thermo.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace curveflow {

GasParams::GasParams(double R, int n, double k, double g, double lambda)
    : R_(R), n_(n), k_(k), g_(g), lambda_(lambda), omega_(std::sqrt(2.0 * lambda * g)) {}

GasParams GasParams::make(double R, int n, double k, double g, double lambda) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(R)) throw Error(ErrorCode::InvalidArgument, fmt::format("R must be positive (got {})", R));
    if (!positive(g)) throw Error(ErrorCode::InvalidArgument, fmt::format("g must be positive (got {})", g));
    if (!positive(lambda)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("lambda must be positive (got {})", lambda));
    }
    if (!(std::isfinite(k) && k >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("k must be non-negative (got {})", k));
    }
    if (n < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("n must be at least 1 (got {})", n));
    return GasParams(R, n, k, g, lambda);
}

Polynomial::Polynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    for (double c : coefficients_) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "polynomial coefficients must be finite");
    }
}

double Polynomial::operator()(double y) const noexcept {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * y + *it;
    return acc;
}

double Polynomial::derivative(double y, int order) const noexcept {
    double acc = 0.0;
    for (std::size_t i = coefficients_.size(); i-- > static_cast<std::size_t>(order);) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= static_cast<double>(i - j);
        acc = acc * y + falling * coefficients_[i];
    }
    return acc;
}

Polynomial Polynomial::derivative_poly() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < coefficients_.size(); ++i) d.push_back(static_cast<double>(i) * coefficients_[i]);
    return Polynomial(std::move(d));
}

bool Polynomial::is_zero() const noexcept {
    for (double c : coefficients_)
        if (c != 0.0) return false;
    return true;
}

PlanckPotential::PlanckPotential(Kind kind, int n, std::vector<VirialCoefficient> coefficients)
    : kind_(kind), n_(n), coefficients_(std::move(coefficients)) {}

PlanckPotential PlanckPotential::ideal_gas(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("n must be at least 1 (got {})", n));
    return PlanckPotential(Kind::IdealGas, n, {});
}

PlanckPotential PlanckPotential::virial(int n, std::vector<VirialCoefficient> coefficients, std::size_t truncation) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("n must be at least 1 (got {})", n));
    if (truncation > coefficients.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("truncation order {} exceeds the {} supplied coefficients", truncation,
                                coefficients.size()));
    }
    coefficients.resize(truncation);
    return PlanckPotential(Kind::Virial, n, std::move(coefficients));
}

PotentialJet PlanckPotential::jet(double x, double y) const {
    if (!(x > 0.0 && y > 0.0)) {
        throw Error(ErrorCode::DomainError, fmt::format("Planck potential needs x > 0, y > 0 (got {}, {})", x, y));
    }
    const double half_n = 0.5 * n_;
    PotentialJet j;
    j.phi = half_n * std::log(y) - std::log(x);
    j.x = -1.0 / x;
    j.y = half_n / y;
    j.xx = 1.0 / (x * x);
    j.yy = -half_n / (y * y);
    j.xxx = -2.0 / (x * x * x);

    // -sum x^i/i A_i(y), differentiated term by term.
    double x_pow_im1 = 1.0;  // x^(i-1)
    double x_pow_im2 = 0.0;  // x^(i-2), zero for i = 1 (its coefficient vanishes anyway)
    double x_pow_im3 = 0.0;
    for (std::size_t idx = 0; idx < coefficients_.size(); ++idx) {
        const double i = static_cast<double>(idx + 1);
        const auto& a = coefficients_[idx];
        const double a0 = a(y), a1 = a.derivative(y, 1), a2 = a.derivative(y, 2);
        const double x_pow_i = x_pow_im1 * x;
        j.phi -= x_pow_i / i * a0;
        j.x -= x_pow_im1 * a0;
        j.y -= x_pow_i / i * a1;
        j.yy -= x_pow_i / i * a2;
        j.xy -= x_pow_im1 * a1;
        j.xyy -= x_pow_im1 * a2;
        j.xx -= (i - 1.0) * x_pow_im2 * a0;
        j.xxy -= (i - 1.0) * x_pow_im2 * a1;
        j.xxx -= (i - 1.0) * (i - 2.0) * x_pow_im3 * a0;
        x_pow_im3 = x_pow_im2;
        x_pow_im2 = x_pow_im1;
        x_pow_im1 = x_pow_i;
    }
    return j;
}

PlanckPotential ideal_gas_potential(int n) { return PlanckPotential::ideal_gas(n); }

PlanckPotential virial_potential(int n, std::vector<VirialCoefficient> coefficients, std::size_t truncation) {
    return PlanckPotential::virial(n, std::move(coefficients), truncation);
}

double pressure(const PlanckPotential& pot, double R, double x, double y) {
    return -R * x * x * y * pot.jet(x, y).x;
}

double entropy(const PlanckPotential& pot, double R, double x, double y) {
    const auto j = pot.jet(x, y);
    return R * (j.phi + y * j.y);
}

double admissibility(const PlanckPotential& pot, double x, double y) {
    const auto j = pot.jet(x, y);
    return x * j.xx + 2.0 * j.x;
}

ThermoJet thermo_jet(const PlanckPotential& pot, double R, double x, double y) {
    const auto j = pot.jet(x, y);
    ThermoJet t;
    t.p = -R * x * x * y * j.x;
    t.p_x = -R * (2.0 * x * y * j.x + x * x * y * j.xx);
    t.p_y = -R * (x * x * j.x + x * x * y * j.xy);
    t.s = R * (j.phi + y * j.y);
    t.s_x = R * (j.x + y * j.xy);
    t.s_y = R * (2.0 * j.y + y * j.yy);
    return t;
}

} // namespace curveflow
