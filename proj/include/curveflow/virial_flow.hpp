#pragma once

// Power-series solutions of the quotient for a virial gas,
//   K = x^{d_K} sum K_k(y) x^k, ... ,
// truncated after the first-order terms.
//
// Zeroth order reduces to the flow-temperature equation
//   N0' = (A y N0 + B N0 + y) / (y - N0^2),
// studied here through the polynomial planar field (y - N^2, A y N + B N + y).
// Its orientation is reversed relative to the graph ODE where y < N^2.

#include "curveflow/numerics.hpp"
#include "curveflow/thermo.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace curveflow {

struct ExpansionOrders {
    int d_K = 0;
    int d_L = 1;
    int d_M = 0;
    int d_N = 0;
};

struct ReducedParams {
    double A = 0.0;
    double B = 0.0;
};

struct FixedPoint {
    double y = 0.0;
    double N = 0.0;
    Matrix<2> jacobian{};
    PlanarSpectrum spectrum;
    EigenClass cls = EigenClass::Degenerate;
    int multiplicity = 1;
};

/// Throws OnBreakingParabola when y is within 1e-12 (relative) of N0^2.
double flow_temperature_rhs(const ReducedParams& p, double y, double N0);

class PlanarField {
public:
    explicit PlanarField(ReducedParams p) : p_(p) {}

    std::array<double, 2> operator()(double y, double N) const noexcept {
        return {y - N * N, p_.A * y * N + p_.B * N + y};
    }
    Matrix<2> jacobian(double y, double N) const noexcept {
        return {{{1.0, -2.0 * N}, {p_.A * N + 1.0, p_.A * y + p_.B}}};
    }
    const ReducedParams& params() const noexcept { return p_; }

private:
    ReducedParams p_;
};

PlanarField as_planar_system(const ReducedParams& p);

/// All real equilibria y = N^2, N (A N^2 + N + B) = 0, ascending in N.
std::vector<FixedPoint> fixed_points(const ReducedParams& p);

enum class Termination { ReachedSMax, NearFixedPoint, LeftWindow };

std::string_view termination_name(Termination t) noexcept;

struct TrajectorySample {
    double s = 0.0;
    double y = 0.0;
    double N = 0.0;
};

struct TrajectoryWindow {
    double y_min = -1.0, y_max = 3.0;
    double N_min = -2.0, N_max = 2.0;
};

struct TrajectoryOptions {
    double tol = 1e-9;
    TrajectoryWindow window;
    /// Stop once this close (Euclidean) to an equilibrium.
    double fixed_point_radius = 1e-6;
    /// Sample spacing in s; 0 records every accepted step.
    double sample_ds = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination reason = Termination::ReachedSMax;
    /// Points where the curve crosses y = N^2 and stops being a graph over y.
    std::vector<TrajectorySample> parabola_crossings;
};

/// Integrates the planar field from start over s in [0, s_max] (s_max < 0 runs backward).
Trajectory integrate_trajectory(const ReducedParams& p, std::array<double, 2> start, double s_max,
                                const TrajectoryOptions& options = {});

struct DirectionSample {
    double y = 0.0, N = 0.0;
    double dy = 0.0, dN = 0.0;   // unit length, or zero at equilibria
};

struct Portrait {
    ReducedParams params;
    Grid2D window;   // first: y, second: N
    std::vector<DirectionSample> directions;
    std::vector<Trajectory> trajectories;
    std::vector<FixedPoint> fixed_points;
    std::vector<std::array<double, 2>> parabola;   // (y, N) with y = N * N
};

Grid2D default_portrait_window();

/// Each seed is integrated forward and backward for |s| <= s_max.
Portrait portrait(const ReducedParams& p, const Grid2D& window, const std::vector<std::array<double, 2>>& seeds,
                  double s_max = 10.0, double tol = 1e-9);

// Physical (y, N0) = (alpha Y, beta N~) with alpha = R c1^4 / c2^2, beta = R c1^3 / c2.
struct Rescaling {
    ReducedParams params;
    double alpha = 1.0;
    double beta = 1.0;

    std::array<double, 2> to_reduced(double y, double N0) const noexcept { return {y / alpha, N0 / beta}; }
    std::array<double, 2> to_physical(double Y, double N) const noexcept { return {alpha * Y, beta * N}; }
};

/// Throws DegenerateScaling unless c1 != 0, c2 != 0 and R > 0.
Rescaling rescale_to_reduced(double c1, double c2, double c3, double R, double omega);

/// Right-hand side of the unscaled zeroth-order equation
/// N0' = (c1 c2 R y + (omega^2 y - c3) N0) / (c1^2 R y - N0^2).
struct ZerothEquation {
    double c1 = 1.0, c2 = 1.0, c3 = 0.0, R = 1.0, omega = 1.0;

    double denominator(double y, double N0) const noexcept { return c1 * c1 * R * y - N0 * N0; }
    double numerator(double y, double N0) const noexcept {
        return c1 * c2 * R * y + (omega * omega * y - c3) * N0;
    }
    double slope(double y, double N0) const noexcept { return numerator(y, N0) / denominator(y, N0); }
    /// d^2 N0 / dy^2 along solutions.
    double curvature(double y, double N0) const noexcept;
};

/// Zeroth-order coefficients at one point of an N0 solution.
struct ZerothJet {
    double y = 0.0;
    double N0 = 0.0, N0_y = 0.0, N0_yy = 0.0;
    double M0 = 0.0, M0_y = 0.0;
    double K0 = 0.0, K0_y = 0.0;
    double L0 = 0.0, L0_y = 0.0;
};

// M0 = c1, K0 = N0', L0 = (c2 - c1 N0') / N0, with N0 a graph over y solving
// ZerothEquation. The graph is integrated from (y0, N0_start) towards y_end and
// truncated before N0 = 0 or the breaking curve c1^2 R y = N0^2.
class ZerothTerm {
public:
    static ZerothTerm integrate(const ZerothEquation& eq, double y0, double N0_start, double y_end,
                                double tol = 1e-11);

    const ZerothEquation& equation() const noexcept { return eq_; }
    double c1() const noexcept { return eq_.c1; }
    double c2() const noexcept { return eq_.c2; }
    double c3() const noexcept { return eq_.c3; }
    /// Closed y-interval on which N0 is available.
    std::array<double, 2> domain() const noexcept;
    bool truncated() const noexcept { return truncated_; }
    const std::vector<OdeSample>& samples() const noexcept { return samples_; }

    /// N0(y); throws OffTrajectory outside domain().
    double N0(double y) const;
    ZerothJet jet(double y) const;
    /// Jet at an arbitrary point (y, N0) using the ODE for the derivatives.
    ZerothJet jet_at(double y, double N0) const;

private:
    ZerothTerm(ZerothEquation eq, double tol) : eq_(eq), tol_(tol) {}

    ZerothEquation eq_;
    double tol_;
    bool truncated_ = false;
    std::vector<OdeSample> samples_;   // ordered in the direction of integration
};

/// (e1, e2, e3, e4) of the zeroth-order system at y.
std::array<double, 4> zeroth_residual(const ZerothTerm& term, double R, double omega, double y);
std::array<double, 4> zeroth_residual(const ZerothJet& jet, double R, double omega);

struct FirstOrderState {
    double M1 = 0.0, N1 = 0.0, L1 = 0.0, K1 = 0.0;
};

/// Solves the four first-order equations for (M1', N1', L1', K1'). Throws
/// SingularLeadingCoefficient when k M0, M0, R M0^2 y - N0^2 or L0 N0 + M0 K0 vanishes.
FirstOrderState first_order_rhs(const ZerothJet& z, const GasParams& gas, const VirialCoefficient& A1,
                                const FirstOrderState& s);
FirstOrderState first_order_rhs(const ZerothTerm& z, const GasParams& gas, const VirialCoefficient& A1, double y,
                                const FirstOrderState& s);

/// Residuals of the four first-order equations given values and derivatives.
std::array<double, 4> first_order_residual(const ZerothJet& z, const GasParams& gas, const VirialCoefficient& A1,
                                           const FirstOrderState& s, const FirstOrderState& ds);

struct FirstOrderSample {
    double y = 0.0;
    double N0 = 0.0;
    FirstOrderState state;
    std::array<double, 4> residual{};
};

struct FirstOrderSolution {
    std::vector<FirstOrderSample> samples;
    /// Largest |residual| of each equation over the samples, with derivatives
    /// taken by centred seven-point differences on the output grid (one-sided
    /// only where the system cannot be continued past an end).
    std::array<double, 4> max_residual{};
};

FirstOrderSolution integrate_first_order(const ZerothTerm& z, const GasParams& gas, const VirialCoefficient& A1,
                                         std::array<double, 2> y_range, const FirstOrderState& initial,
                                         double tol = 1e-8, std::size_t samples = 801);

} // namespace curveflow
