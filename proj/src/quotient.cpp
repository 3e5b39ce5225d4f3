#include "curveflow/quotient.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace curveflow {

namespace {

constexpr double kNondegeneracyTol = 1e-10;

void require_domain(const TresseField& field, double x, double y) {
    if (!field.in_domain(x, y)) {
        throw Error(ErrorCode::OutsideValidity, fmt::format("({}, {}) outside the field domain", x, y));
    }
}

double local_scale(const TressePoint& p) {
    return std::max({1.0, std::abs(p.K), std::abs(p.L), std::abs(p.M), std::abs(p.N)});
}

void validate_constants(double c1, double c2, int n, double omega, int sigma) {
    if (c1 == 0.0 || !std::isfinite(c1)) throw Error(ErrorCode::InvalidArgument, "c1 must be finite and nonzero");
    if (!std::isfinite(c2)) throw Error(ErrorCode::InvalidArgument, "c2 must be finite");
    if (n < 1) throw Error(ErrorCode::InvalidArgument, fmt::format("n must be >= 1 (got {})", n));
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::InvalidArgument, "omega must be >= 0");
    if (sigma != 1 && sigma != -1) throw Error(ErrorCode::InvalidArgument, "branch sign must be +1 or -1");
    if (c2 <= 0.0) {
        throw Error(ErrorCode::EmptyDomain, fmt::format("c2 = {} leaves no point where the square root is real", c2));
    }
}

} // namespace

TresseJet ConstantTresseField::jet(double x, double y) const {
    require_domain(*this, x, y);
    TresseJet j;
    j.point = {x, y, K_, L_, M_, N_};
    return j;
}

SampledTresseField::SampledTresseField(ValueFn values, DomainFn domain)
    : values_(std::move(values)), domain_(std::move(domain)) {}

bool SampledTresseField::in_domain(double x, double y) const {
    return x > 0.0 && y > 0.0 && (!domain_ || domain_(x, y));
}

TresseJet SampledTresseField::jet(double x, double y) const {
    require_domain(*this, x, y);
    TresseJet j;
    j.point = values_(x, y);
    j.point.x = x;
    j.point.y = y;
    auto d_x = [&](double TressePoint::*m) {
        return fd_derivative([&](double s) { return values_(s, y).*m; }, x, 1);
    };
    auto d_y = [&](double TressePoint::*m) {
        return fd_derivative([&](double s) { return values_(x, s).*m; }, y, 1);
    };
    j.K_x = d_x(&TressePoint::K);
    j.K_y = d_y(&TressePoint::K);
    j.L_x = d_x(&TressePoint::L);
    j.L_y = d_y(&TressePoint::L);
    j.M_x = d_x(&TressePoint::M);
    j.M_y = d_y(&TressePoint::M);
    j.N_x = d_x(&TressePoint::N);
    j.N_y = d_y(&TressePoint::N);
    return j;
}

Quotsol1::Quotsol1(double c1, double c2, int n, double omega, int sigma)
    : c1_(c1), c2_(c2), omega_(omega), n_(n), sigma_(sigma) {
    validate_constants(c1, c2, n, omega, sigma);
}

bool Quotsol1::in_domain(double x, double y) const {
    return x > 0.0 && y > 0.0 && c2_ * x * x > omega_ * omega_;
}

TresseJet Quotsol1::jet(double x, double y) const {
    require_domain(*this, x, y);
    const double p = 1.0 + 2.0 / n_;
    const double root = std::sqrt(c2_ * x * x - omega_ * omega_);
    const double K = sigma_ * root;
    const double K_x = sigma_ * c2_ * x / root;

    TresseJet j;
    j.point = {x, y, K, 0.0, c1_ * std::pow(x, p), -2.0 * y / n_ * K};
    j.K_x = K_x;
    j.M_x = c1_ * p * std::pow(x, p - 1.0);
    j.N_x = -2.0 * y / n_ * K_x;
    j.N_y = -2.0 / n_ * K;
    return j;
}

Quotsol2::Quotsol2(double c1, double c2, int n, double omega, int sigma)
    : c1_(c1), c2_(c2), omega_(omega), m_(0.0), n_(n), sigma_(sigma) {
    validate_constants(c1, c2, n, omega, sigma);
    if (n == 2) throw Error(ErrorCode::InvalidArgument, "the second constant-type solution requires n != 2");
    m_ = 2.0 * n / (n - 2.0);
}

bool Quotsol2::in_domain(double x, double y) const {
    if (!(x > 0.0 && y > 0.0)) return false;
    return c2_ * std::pow(x / y, m_) > omega_ * omega_;
}

TresseJet Quotsol2::jet(double x, double y) const {
    require_domain(*this, x, y);
    const double rm = std::pow(x / y, m_);
    const double S = c2_ * rm - omega_ * omega_;
    const double root = std::sqrt(S);
    const double L = c1_ * rm;
    const double M = y / x * L;
    const double K = sigma_ * root;
    const double dK = sigma_ * c2_ * m_ * rm / (2.0 * root);  // x K_x = -y K_y = dK

    TresseJet j;
    j.point = {x, y, K, L, M, -2.0 * K * y / n_};
    j.L_x = m_ * L / x;
    j.L_y = -m_ * L / y;
    j.M_x = (m_ - 1.0) * M / x;
    j.M_y = -(m_ - 1.0) * M / y;
    j.K_x = dK / x;
    j.K_y = -dK / y;
    j.N_x = -2.0 * y * j.K_x / n_;
    j.N_y = -2.0 * (K + y * j.K_y) / n_;
    return j;
}

Quotsol1 quotsol1(double c1, double c2, int n, double omega, int sigma) { return {c1, c2, n, omega, sigma}; }
Quotsol2 quotsol2(double c1, double c2, int n, double omega, int sigma) { return {c1, c2, n, omega, sigma}; }

// ---------------------------------------------------------------------------

std::array<double, 4> quotient_residual(const TresseJet& jet, const GasParams& gas, const PlanckPotential& pot) {
    const auto& [x, y, K, L, M, N] = jet.point;
    const double scale = local_scale(jet.point);
    const double det = x * K * M + L * N;
    if (std::abs(M) <= kNondegeneracyTol * scale) {
        throw Error(ErrorCode::NondegeneracyViolated, fmt::format("M = {} vanishes at ({}, {})", M, x, y));
    }
    if (std::abs(det) <= kNondegeneracyTol * std::max(1.0, std::abs(x * K * M) + std::abs(L * N))) {
        throw Error(ErrorCode::NondegeneracyViolated, fmt::format("xKM + LN = {} vanishes at ({}, {})", det, x, y));
    }
    const auto phi = pot.jet(x, y);
    const double R = gas.R(), k = gas.k(), w2 = gas.omega_squared();
    const double L_x = jet.L_x, L_y = jet.L_y, M_x = jet.M_x, M_y = jet.M_y;

    // Second derivative of the pressure along L d_x + M d_y, shared by q3 and q4.
    const double big = x * y * (phi.xxx * L * L + 2.0 * phi.xxy * M * L + phi.xyy * M * M) +
                       (x * y * L * L_x + x * y * M * L_y + 2.0 * x * L * M + 3.0 * y * L * L) * phi.xx +
                       (x * y * L * M_x + M * (x * y * M_y + 2.0 * x * M + 3.0 * y * L)) * phi.xy +
                       (2.0 * y * L * L_x + 2.0 * y * M * L_y + x * L * M_x + M * (x * M_y + 3.0 * L)) * phi.x;

    return {
        x * K * M_x - N * M_y + L * jet.N_x + M * (jet.N_y - K),
        R * x * y * (x * K * (phi.x + y * phi.xy) - N * (2.0 * phi.y + y * phi.yy)) + k * (L * M_x + M * M_y),
        R * L * big + x * K * K * L_x - K * N * L_y - det * jet.K_y - 3.0 * L * K * K - w2 * L,
        R * M * x * big + N * N * L_y - x * K * N * L_x + det * x * jet.K_x + 2.0 * L * K * N -
            x * M * (K * K + w2),
    };
}

std::array<double, 4> quotient_residual(const TresseField& field, const GasParams& gas, const PlanckPotential& pot,
                                        double x, double y) {
    require_domain(field, x, y);
    return quotient_residual(field.jet(x, y), gas, pot);
}

double quotient_residual_alt4(const TresseJet& jet) {
    const auto& [x, y, K, L, M, N] = jet.point;
    if (std::abs(L) <= kNondegeneracyTol * local_scale(jet.point)) {
        throw Error(ErrorCode::AltFormUnavailable, fmt::format("L = {} vanishes at ({}, {})", L, x, y));
    }
    return x * (M * jet.K_y - K * jet.L_x + L * jet.K_x) + N * jet.L_y + 2.0 * K * L;
}

double quotient_residual_alt4(const TresseField& field, double x, double y) {
    require_domain(field, x, y);
    return quotient_residual_alt4(field.jet(x, y));
}

QuotientSymbol quotient_symbol(const TressePoint& p, const PotentialJet& phi, double R, double k,
                               std::array<double, 2> xi) {
    const auto& [x, y, K, L, M, N] = p;
    const double Z = L * xi[0] + M * xi[1];
    const double W = x * K * xi[0] - N * xi[1];
    const double det = x * K * M + L * N;
    const double stiffness = x * phi.xx + 2.0 * phi.x;
    const double cross = y * phi.xy + phi.x;

    QuotientSymbol s;
    s.matrix = {{
        {0.0, 0.0, k * Z, 0.0},
        {0.0, 0.0, W, Z},
        {-det * xi[1], R * y * L * Z * stiffness + K * W, R * x * L * Z * cross, 0.0},
        {x * det * xi[0], R * y * x * M * Z * stiffness - N * W, R * x * x * M * Z * cross, 0.0},
    }};
    s.det_direct = determinant<4>(s.matrix);
    s.det_factored = -k * det * Z * Z * (R * x * y * Z * Z * stiffness + W * W);
    return s;
}

QuotientSymbol quotient_symbol(const TressePoint& p, const GasParams& gas, const PlanckPotential& pot,
                               std::array<double, 2> xi) {
    return quotient_symbol(p, pot.jet(p.x, p.y), gas.R(), gas.k(), xi);
}

std::string_view characteristic_tag_name(CharacteristicTag tag) noexcept {
    switch (tag) {
    case CharacteristicTag::Z1: return "Z1";
    case CharacteristicTag::Z2: return "Z2";
    case CharacteristicTag::Z3: return "Z3";
    }
    return "?";
}

std::vector<CharacteristicField> characteristic_fields(const TressePoint& p, const GasParams& gas,
                                                       const PlanckPotential& pot) {
    std::vector<CharacteristicField> out;
    out.push_back({p.x, p.y, p.L, p.M, CharacteristicTag::Z1});
    const double radicand = -gas.R() * p.x * p.y * admissibility(pot, p.x, p.y);
    if (radicand >= 0.0) {
        const double r = std::sqrt(radicand);
        out.push_back({p.x, p.y, p.x * p.K + r * p.L, -p.N + r * p.M, CharacteristicTag::Z2});
        out.push_back({p.x, p.y, p.x * p.K - r * p.L, -p.N - r * p.M, CharacteristicTag::Z3});
    }
    return out;
}

std::vector<CharacteristicField> characteristic_fields(const TresseField& field, const PlanckPotential& pot,
                                                       const GasParams& gas, double x, double y) {
    require_domain(field, x, y);
    return characteristic_fields(field.jet(x, y).point, gas, pot);
}

double first_integral_residual(const CharacteristicField& z, double h_x, double h_y) noexcept {
    return z.v_x * h_x + z.v_y * h_y;
}

double first_integral_residual(const CharacteristicField& z, const PlaneFn& h) {
    const double h_x = fd_derivative([&](double s) { return h(s, z.y); }, z.x, 1);
    const double h_y = fd_derivative([&](double s) { return h(z.x, s); }, z.y, 1);
    return first_integral_residual(z, h_x, h_y);
}

} // namespace curveflow
