#pragma once

// The quotient of the Euler system in Lie-Tresse coordinates (x, y, K, L, M, N):
// four first-order PDEs for K, L, M, N as functions of (x, y).

#include "curveflow/numerics.hpp"
#include "curveflow/thermo.hpp"
#include "curveflow/tresse.hpp"

#include <array>
#include <functional>
#include <string_view>
#include <vector>

namespace curveflow {

struct TresseJet {
    TressePoint point;
    double K_x = 0.0, K_y = 0.0;
    double L_x = 0.0, L_y = 0.0;
    double M_x = 0.0, M_y = 0.0;
    double N_x = 0.0, N_y = 0.0;
};

/// K, L, M, N over a region of the (x, y) half plane.
class TresseField {
public:
    virtual ~TresseField() = default;

    virtual bool in_domain(double x, double y) const = 0;
    /// Throws OutsideValidity outside the domain.
    virtual TresseJet jet(double x, double y) const = 0;
};

class ConstantTresseField final : public TresseField {
public:
    ConstantTresseField(double K, double L, double M, double N) : K_(K), L_(L), M_(M), N_(N) {}

    bool in_domain(double x, double y) const override { return x > 0.0 && y > 0.0; }
    TresseJet jet(double x, double y) const override;

private:
    double K_, L_, M_, N_;
};

/// Field known by values only; partials come from fd_derivative.
class SampledTresseField final : public TresseField {
public:
    // Returns (x, y, K, L, M, N); x and y are overwritten with the arguments.
    using ValueFn = std::function<TressePoint(double x, double y)>;
    using DomainFn = std::function<bool(double x, double y)>;

    explicit SampledTresseField(ValueFn values, DomainFn domain = {});

    bool in_domain(double x, double y) const override;
    TresseJet jet(double x, double y) const override;

private:
    ValueFn values_;
    DomainFn domain_;
};

// L = 0, M = c1 x^{1+2/n}, K = sigma sqrt(c2 x^2 - omega^2), N = -(2y/n) K
// on c2 x^2 > omega^2. sigma = -1 selects the other root branch.
class Quotsol1 final : public TresseField {
public:
    Quotsol1(double c1, double c2, int n, double omega, int sigma = 1);

    bool in_domain(double x, double y) const override;
    TresseJet jet(double x, double y) const override;

private:
    double c1_, c2_, omega_;
    int n_, sigma_;
};

// L = c1 r^m, M = (y/x) L, K = sigma sqrt(c2 r^m - omega^2), N = -2Ky/n
// with r = x/y, m = 2n/(n-2), on c2 r^m > omega^2.
class Quotsol2 final : public TresseField {
public:
    Quotsol2(double c1, double c2, int n, double omega, int sigma = 1);

    bool in_domain(double x, double y) const override;
    TresseJet jet(double x, double y) const override;

private:
    double c1_, c2_, omega_, m_;
    int n_, sigma_;
};

Quotsol1 quotsol1(double c1, double c2, int n, double omega, int sigma = 1);
Quotsol2 quotsol2(double c1, double c2, int n, double omega, int sigma = 1);

/// (q1, q2, q3, q4). Throws NondegeneracyViolated unless M != 0 and xKM + LN != 0.
std::array<double, 4> quotient_residual(const TresseJet& jet, const GasParams& gas, const PlanckPotential& pot);
std::array<double, 4> quotient_residual(const TresseField& field, const GasParams& gas, const PlanckPotential& pot,
                                        double x, double y);

/// x (M K_y - K L_x + L K_x) + N L_y + 2KL; throws AltFormUnavailable when L ~ 0.
double quotient_residual_alt4(const TresseJet& jet);
double quotient_residual_alt4(const TresseField& field, double x, double y);

struct QuotientSymbol {
    Matrix<4> matrix{};
    double det_direct = 0.0;
    double det_factored = 0.0;
};

QuotientSymbol quotient_symbol(const TressePoint& p, const PotentialJet& phi, double R, double k,
                               std::array<double, 2> xi);
QuotientSymbol quotient_symbol(const TressePoint& p, const GasParams& gas, const PlanckPotential& pot,
                               std::array<double, 2> xi);

enum class CharacteristicTag { Z1, Z2, Z3 };

std::string_view characteristic_tag_name(CharacteristicTag tag) noexcept;

struct CharacteristicField {
    double x = 0.0, y = 0.0;
    double v_x = 0.0, v_y = 0.0;
    CharacteristicTag tag = CharacteristicTag::Z1;
};

// Z1 = L d_x + M d_y always; Z2,3 = xK d_x - N d_y +/- sqrt(-Rxy(x Phi_xx + 2 Phi_x)) Z1
// only where the radicand is non-negative.
std::vector<CharacteristicField> characteristic_fields(const TressePoint& p, const GasParams& gas,
                                                       const PlanckPotential& pot);
std::vector<CharacteristicField> characteristic_fields(const TresseField& field, const PlanckPotential& pot,
                                                       const GasParams& gas, double x, double y);

using PlaneFn = std::function<double(double x, double y)>;

/// Z(h) = v_x h_x + v_y h_y, with the gradient from fd_derivative.
double first_integral_residual(const CharacteristicField& z, const PlaneFn& h);
double first_integral_residual(const CharacteristicField& z, double h_x, double h_y) noexcept;

} // namespace curveflow
