#pragma once

// Numerical kernels shared by the rest of the library: finite differences,
// adaptive quadrature, an adaptive Runge-Kutta integrator with events, real
// cubic roots and the planar linear-stability taxonomy.

#include "curveflow/error.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace curveflow {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

/// Laplace expansion along the first row. Intended for N <= 4.
template <std::size_t N>
double determinant(const Matrix<N>& m) {
    if constexpr (N == 1) {
        return m[0][0];
    } else if constexpr (N == 2) {
        return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    } else {
        double det = 0.0;
        for (std::size_t col = 0; col < N; ++col) {
            if (m[0][col] == 0.0) continue;
            Matrix<N - 1> minor{};
            for (std::size_t r = 1; r < N; ++r) {
                std::size_t mc = 0;
                for (std::size_t c = 0; c < N; ++c) {
                    if (c == col) continue;
                    minor[r - 1][mc++] = m[r][c];
                }
            }
            const double sign = (col % 2 == 0) ? 1.0 : -1.0;
            det += sign * m[0][col] * determinant<N - 1>(minor);
        }
        return det;
    }
}

struct Grid1D {
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;

    /// Throws InvalidArgument unless min < max and count >= 2.
    static Grid1D make(double min, double max, std::size_t count);

    double point(std::size_t i) const noexcept;
    double spacing() const noexcept { return (max - min) / static_cast<double>(count - 1); }
};

struct Grid2D {
    Grid1D first;
    Grid1D second;

    std::size_t size() const noexcept { return first.count * second.count; }
};

enum class EigenClass {
    StableNode,
    UnstableNode,
    Saddle,
    Centre,
    StableSpiral,
    UnstableSpiral,
    Degenerate,
};

std::string_view eigen_class_name(EigenClass c) noexcept;

using ScalarFn = std::function<double(double)>;

double default_fd_step(double point, int order) noexcept;

// Central differences (second-order stencils) with one Richardson refinement
// between step h and h/2, giving fourth-order accuracy. Samples lie within
// [point - 2h, point + 2h].
double fd_derivative(const ScalarFn& f, double point, int order, double step);
double fd_derivative(const ScalarFn& f, double point, int order);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

// Globally adaptive Gauss-Kronrod (7/15). The absolute error target is tol,
// floored at the roundoff level of the integrand magnitudes.
QuadratureResult quadrature_detailed(const ScalarFn& f, double lo, double hi, double tol,
                                     std::size_t max_intervals = 4000);
double quadrature(const ScalarFn& f, double lo, double hi, double tol);

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeEvent {
    std::function<double(double t, std::span<const double> y)> fn;
    bool terminal = true;
    /// 0: any sign change; +1: only rising through zero; -1: only falling.
    int direction = 0;
};

struct OdeSample {
    double t = 0.0;
    OdeState y;
};

struct EventHit {
    std::size_t event = 0;
    double t = 0.0;
    OdeState y;
};

struct OdeOptions {
    double tol = 1e-8;
    double initial_step = 0.0;   // 0 selects a step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    /// When non-empty, samples are recorded exactly at these abscissae (which
    /// must be ordered in the direction of integration) instead of at every
    /// accepted step.
    std::vector<double> output_points;
};

struct OdeResult {
    std::vector<OdeSample> samples;
    std::vector<EventHit> events;
    std::optional<std::size_t> terminal_event;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    const OdeSample& last() const { return samples.back(); }
};

/// Raised when the step size underflows or the field stops being finite.
class SingularityError : public Error {
public:
    SingularityError(const std::string& message, double t, OdeState y)
        : Error(ErrorCode::SingularityEncountered, message), t_(t), y_(std::move(y)) {}

    double last_t() const noexcept { return t_; }
    const OdeState& last_y() const noexcept { return y_; }

private:
    double t_;
    OdeState y_;
};

// Dormand-Prince 5(4) with error-per-unit-step control: a step of size h keeps
// the local error of every component below tol * (1 + |y_i|) * h / |t1 - t0|,
// so the local errors over a whole run sum to about tol. Events are located by
// re-stepping from the last accepted point, to within tol * max(1, |t|).
OdeResult ode_solve(const OdeRhs& rhs, double t0, OdeState y0, double t1, const OdeOptions& options,
                    std::span<const OdeEvent> events = {});

/// Real roots (with multiplicity, ascending) of a3 x^3 + a2 x^2 + a1 x + a0.
std::vector<double> cubic_real_roots(double a3, double a2, double a1, double a0);

struct PlanarSpectrum {
    double trace = 0.0;
    double det = 0.0;
    double discriminant = 0.0;
};

PlanarSpectrum planar_spectrum(const Matrix<2>& j) noexcept;
EigenClass classify_2x2(const Matrix<2>& j);

} // namespace curveflow
