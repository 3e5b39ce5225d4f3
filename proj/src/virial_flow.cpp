#include "curveflow/virial_flow.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace curveflow {

double flow_temperature_rhs(const ReducedParams& p, double y, double N0) {
    const double den = y - N0 * N0;
    if (std::abs(den) < 1e-12 * std::max({1.0, std::abs(y), N0 * N0})) {
        throw Error(ErrorCode::OnBreakingParabola, fmt::format("(y, N0) = ({}, {}) lies on y = N0^2", y, N0));
    }
    return (p.A * y * N0 + p.B * N0 + y) / den;
}

PlanarField as_planar_system(const ReducedParams& p) { return PlanarField(p); }

std::vector<FixedPoint> fixed_points(const ReducedParams& p) {
    const auto roots = cubic_real_roots(p.A, 1.0, p.B, 0.0);
    const PlanarField field(p);
    std::vector<FixedPoint> out;
    for (double N : roots) {
        if (!out.empty() && out.back().N == N) {
            ++out.back().multiplicity;
            continue;
        }
        FixedPoint fp;
        fp.N = N + 0.0;   // no signed zeros in reports
        fp.y = N * N;
        fp.jacobian = field.jacobian(fp.y, fp.N);
        fp.spectrum = planar_spectrum(fp.jacobian);
        fp.cls = classify_2x2(fp.jacobian);
        out.push_back(fp);
    }
    return out;
}

std::string_view termination_name(Termination t) noexcept {
    switch (t) {
    case Termination::ReachedSMax: return "ReachedSMax";
    case Termination::NearFixedPoint: return "NearFixedPoint";
    case Termination::LeftWindow: return "LeftWindow";
    }
    return "?";
}

Trajectory integrate_trajectory(const ReducedParams& p, std::array<double, 2> start, double s_max,
                                const TrajectoryOptions& options) {
    const auto fps = fixed_points(p);
    for (const auto& fp : fps) {
        if (std::hypot(start[0] - fp.y, start[1] - fp.N) <= 1e-10) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("start ({}, {}) is an equilibrium", start[0], start[1]));
        }
    }
    const auto& w = options.window;
    Trajectory out;
    out.samples.push_back({0.0, start[0], start[1]});
    if (start[0] < w.y_min || start[0] > w.y_max || start[1] < w.N_min || start[1] > w.N_max) {
        out.reason = Termination::LeftWindow;
        return out;
    }
    if (s_max == 0.0) return out;

    const PlanarField field(p);
    auto rhs = [&](double, std::span<const double> z, std::span<double> dz) {
        const auto v = field(z[0], z[1]);
        dz[0] = v[0];
        dz[1] = v[1];
    };

    std::vector<OdeEvent> events;
    events.push_back({[](double, std::span<const double> z) { return z[0] - z[1] * z[1]; }, false, 0});
    events.push_back({[&](double, std::span<const double> z) { return z[0] - w.y_min; }, true, 0});
    events.push_back({[&](double, std::span<const double> z) { return w.y_max - z[0]; }, true, 0});
    events.push_back({[&](double, std::span<const double> z) { return z[1] - w.N_min; }, true, 0});
    events.push_back({[&](double, std::span<const double> z) { return w.N_max - z[1]; }, true, 0});
    const std::size_t first_fp_event = events.size();
    const double r2 = options.fixed_point_radius * options.fixed_point_radius;
    for (const auto& fp : fps) {
        events.push_back({[fp, r2](double, std::span<const double> z) {
                              const double dy = z[0] - fp.y, dN = z[1] - fp.N;
                              return dy * dy + dN * dN - r2;
                          },
                          true, 0});
    }

    OdeOptions opt;
    opt.tol = options.tol;
    if (options.sample_ds > 0.0) {
        const double step = std::copysign(options.sample_ds, s_max);
        for (double s = step; std::abs(s) < std::abs(s_max); s += step) opt.output_points.push_back(s);
        opt.output_points.push_back(s_max);
    }

    const auto result = ode_solve(rhs, 0.0, {start[0], start[1]}, s_max, opt, events);
    out.samples.clear();
    if (!opt.output_points.empty()) out.samples.push_back({0.0, start[0], start[1]});
    for (const auto& s : result.samples) out.samples.push_back({s.t, s.y[0], s.y[1]});
    for (const auto& e : result.events) {
        if (e.event == 0) out.parabola_crossings.push_back({e.t, e.y[0], e.y[1]});
    }
    if (result.terminal_event) {
        const auto& hit = result.events.back();
        if (out.samples.empty() || out.samples.back().s != hit.t) out.samples.push_back({hit.t, hit.y[0], hit.y[1]});
        out.reason = hit.event >= first_fp_event ? Termination::NearFixedPoint : Termination::LeftWindow;
    } else {
        out.reason = Termination::ReachedSMax;
    }
    return out;
}

Grid2D default_portrait_window() { return {Grid1D::make(-1.0, 3.0, 21), Grid1D::make(-2.0, 2.0, 21)}; }

Portrait portrait(const ReducedParams& p, const Grid2D& window, const std::vector<std::array<double, 2>>& seeds,
                  double s_max, double tol) {
    Grid1D::make(window.first.min, window.first.max, window.first.count);
    Grid1D::make(window.second.min, window.second.max, window.second.count);

    Portrait out;
    out.params = p;
    out.window = window;
    out.fixed_points = fixed_points(p);

    const PlanarField field(p);
    for (std::size_t i = 0; i < window.first.count; ++i) {
        for (std::size_t k = 0; k < window.second.count; ++k) {
            const double y = window.first.point(i), N = window.second.point(k);
            const auto v = field(y, N);
            const double norm = std::hypot(v[0], v[1]);
            DirectionSample d{y, N, 0.0, 0.0};
            if (norm > 0.0) {
                d.dy = v[0] / norm;
                d.dN = v[1] / norm;
            }
            out.directions.push_back(d);
        }
    }

    TrajectoryOptions opt;
    opt.tol = tol;
    opt.window = {window.first.min, window.first.max, window.second.min, window.second.max};
    for (const auto& seed : seeds) {
        const bool at_equilibrium = std::any_of(out.fixed_points.begin(), out.fixed_points.end(), [&](const auto& fp) {
            return std::hypot(seed[0] - fp.y, seed[1] - fp.N) <= 1e-10;
        });
        if (at_equilibrium) continue;
        out.trajectories.push_back(integrate_trajectory(p, seed, s_max, opt));
        out.trajectories.push_back(integrate_trajectory(p, seed, -s_max, opt));
    }

    const auto Ns = Grid1D::make(window.second.min, window.second.max, 201);
    for (std::size_t i = 0; i < Ns.count; ++i) {
        const double N = Ns.point(i);
        const double y = N * N;
        if (y >= window.first.min && y <= window.first.max) out.parabola.push_back({y, N});
    }
    return out;
}

Rescaling rescale_to_reduced(double c1, double c2, double c3, double R, double omega) {
    if (c1 == 0.0 || c2 == 0.0 || !(R > 0.0) || !std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(c3) ||
        !std::isfinite(R) || !std::isfinite(omega)) {
        throw Error(ErrorCode::DegenerateScaling,
                    fmt::format("rescaling needs c1 != 0, c2 != 0, R > 0 (got c1 = {}, c2 = {}, R = {})", c1, c2, R));
    }
    Rescaling r;
    r.params = {c1 * c1 * omega * omega / (c2 * c2), -c3 / (c1 * c1 * R)};
    r.alpha = R * std::pow(c1, 4) / (c2 * c2);
    r.beta = R * std::pow(c1, 3) / c2;
    return r;
}

// ---------------------------------------------------------------------------
// Zeroth order

double ZerothEquation::curvature(double y, double N0) const noexcept {
    const double num = numerator(y, N0), den = denominator(y, N0);
    const double num_y = c1 * c2 * R + omega * omega * N0;
    const double num_N = omega * omega * y - c3;
    const double den_y = c1 * c1 * R;
    const double den_N = -2.0 * N0;
    const double F = num / den;
    const double F_y = (num_y * den - num * den_y) / (den * den);
    const double F_N = (num_N * den - num * den_N) / (den * den);
    return F_y + F_N * F;
}

ZerothTerm ZerothTerm::integrate(const ZerothEquation& eq, double y0, double N0_start, double y_end, double tol) {
    if (eq.c1 == 0.0) throw Error(ErrorCode::InvalidArgument, "zeroth term requires c1 != 0");
    if (N0_start == 0.0) throw Error(ErrorCode::InvalidArgument, "zeroth term requires N0 != 0 at the start");
    if (y0 == y_end) throw Error(ErrorCode::InvalidArgument, "empty y interval");
    const double den0 = eq.denominator(y0, N0_start);
    const double guard = 1e-6 * std::max(1.0, std::abs(eq.c1 * eq.c1 * eq.R * y0));
    if (std::abs(den0) <= guard) {
        throw Error(ErrorCode::OnBreakingParabola,
                    fmt::format("start ({}, {}) lies on the breaking curve", y0, N0_start));
    }

    ZerothTerm term(eq, tol);
    auto rhs = [eq](double y, std::span<const double> z, std::span<double> dz) { dz[0] = eq.slope(y, z[0]); };
    const double side = den0 > 0.0 ? 1.0 : -1.0;
    const double n_side = N0_start > 0.0 ? 1.0 : -1.0;
    std::vector<OdeEvent> events{
        {[eq, side, guard](double y, std::span<const double> z) { return side * eq.denominator(y, z[0]) - guard; },
         true, 0},
        {[n_side](double, std::span<const double> z) { return n_side * z[0] - 1e-9; }, true, 0},
    };
    OdeOptions opt;
    opt.tol = tol;
    const auto grid = Grid1D::make(std::min(y0, y_end), std::max(y0, y_end), 801);
    for (std::size_t i = 1; i < grid.count; ++i) {
        opt.output_points.push_back(y_end > y0 ? grid.point(i) : grid.point(grid.count - 1 - i));
    }
    opt.output_points.back() = y_end;

    term.samples_.push_back({y0, {N0_start}});
    try {
        const auto result = ode_solve(rhs, y0, {N0_start}, y_end, opt, events);
        for (const auto& s : result.samples) term.samples_.push_back(s);
        if (result.terminal_event) {
            const auto& hit = result.events.back();
            if (term.samples_.back().t != hit.t) term.samples_.push_back({hit.t, hit.y});
            term.truncated_ = true;
        }
    } catch (const SingularityError& e) {
        if (term.samples_.back().t != e.last_t()) term.samples_.push_back({e.last_t(), e.last_y()});
        term.truncated_ = true;
    }
    if (term.samples_.size() < 2) {
        throw Error(ErrorCode::SingularityEncountered, "zeroth-order solution could not be continued from the start");
    }
    return term;
}

std::array<double, 2> ZerothTerm::domain() const noexcept {
    const double a = samples_.front().t, b = samples_.back().t;
    return {std::min(a, b), std::max(a, b)};
}

double ZerothTerm::N0(double y) const {
    const auto [lo, hi] = domain();
    if (!(y >= lo && y <= hi)) {
        throw Error(ErrorCode::OffTrajectory, fmt::format("y = {} outside the computed range [{}, {}]", y, lo, hi));
    }
    const auto nearest = std::min_element(samples_.begin(), samples_.end(), [y](const auto& a, const auto& b) {
        return std::abs(a.t - y) < std::abs(b.t - y);
    });
    if (nearest->t == y) return nearest->y[0];
    const auto eq = eq_;
    auto rhs = [eq](double t, std::span<const double> z, std::span<double> dz) { dz[0] = eq.slope(t, z[0]); };
    OdeOptions opt;
    opt.tol = tol_;
    return ode_solve(rhs, nearest->t, nearest->y, y, opt).last().y[0];
}

ZerothJet ZerothTerm::jet_at(double y, double N0) const {
    if (N0 == 0.0) throw Error(ErrorCode::OffTrajectory, fmt::format("N0 vanishes at y = {}", y));
    ZerothJet j;
    j.y = y;
    j.N0 = N0;
    j.N0_y = eq_.slope(y, N0);
    j.N0_yy = eq_.curvature(y, N0);
    j.M0 = eq_.c1;
    j.M0_y = 0.0;
    j.K0 = j.N0_y;
    j.K0_y = j.N0_yy;
    j.L0 = (eq_.c2 - eq_.c1 * j.N0_y) / N0;
    j.L0_y = (-eq_.c1 * j.N0_yy * N0 - (eq_.c2 - eq_.c1 * j.N0_y) * j.N0_y) / (N0 * N0);
    return j;
}

ZerothJet ZerothTerm::jet(double y) const { return jet_at(y, N0(y)); }

std::array<double, 4> zeroth_residual(const ZerothJet& z, double R, double omega) {
    return {
        z.M0 * z.M0_y,
        z.M0 * z.N0_y - z.N0 * z.M0_y - z.K0 * z.M0,
        (z.L0 * z.N0 + z.M0 * z.K0) * (z.N0 * z.L0_y + z.M0 * z.K0_y + z.K0 * z.L0),
        R * z.M0 * z.M0 * (z.y * z.L0_y + z.M0_y + z.L0) - z.L0_y * z.N0 * z.N0 +
            z.M0 * (z.K0 * z.K0 + omega * omega) - z.L0 * z.K0 * z.N0,
    };
}

std::array<double, 4> zeroth_residual(const ZerothTerm& term, double R, double omega, double y) {
    return zeroth_residual(term.jet(y), R, omega);
}

// ---------------------------------------------------------------------------
// First order

std::array<double, 4> first_order_residual(const ZerothJet& z, const GasParams& gas, const VirialCoefficient& A1,
                                           const FirstOrderState& s, const FirstOrderState& ds) {
    const double R = gas.R(), k = gas.k(), w2 = gas.omega_squared(), n = gas.n();
    const double y = z.y;
    const double M0 = z.M0, M0p = z.M0_y, N0 = z.N0, N0p = z.N0_y;
    const double K0 = z.K0, K0p = z.K0_y, L0 = z.L0, L0p = z.L0_y;

    const double a = A1(y), a1 = A1.derivative(y, 1), a2 = A1.derivative(y, 2);
    const double yA_yy = y * a2 + 2.0 * a1;   // (A1 y)''
    const double yA_y = a + y * a1;           // (y A1)'
    const double source = M0 * (M0 * yA_yy + yA_y * (3.0 * L0 + M0p)) + 2.0 * y * a * (L0 * L0 + M0 * L0p);

    const double r1 = k * M0 * ds.M1 + k * (M0p + L0) * s.M1 - R * (y * K0 + n * N0 / 2.0);
    const double r2 = N0 * ds.M1 - M0 * ds.N1 + s.N1 * (M0p - L0) + s.K1 * M0 - s.M1 * N0p;
    const double r3 = (R * M0 * M0 * y - N0 * N0) * ds.L1 + R * M0 * M0 * ds.M1 + (M0 * K0 - 2.0 * L0 * N0) * s.K1 -
                      (K0 * L0 + 2.0 * L0p * N0) * s.N1 +
                      ((2.0 * y * L0p + 3.0 * L0 + 2.0 * M0p) * R * M0 + K0 * K0 + w2) * s.M1 +
                      R * M0 * (y * L0 + M0) * s.L1 + R * M0 * source;
    const double r4 = (L0 * N0 + M0 * K0) * ds.K1 + (R * y * L0 * M0 + N0 * K0) * ds.L1 + R * L0 * M0 * ds.M1 +
                      s.N1 * (K0p * L0 + L0p * K0) +
                      s.L1 * (R * M0 * (y * L0p + 2.0 * L0 + M0p) + y * R * L0 * L0 + K0p * N0 + K0 * K0 + w2) +
                      s.M1 * (R * L0 * (y * L0p + 2.0 * L0 + M0p) + K0p * K0) +
                      s.K1 * (M0 * K0p + 4.0 * K0 * L0 + L0p * N0) + R * L0 * source;
    return {r1, r2, r3, r4};
}

FirstOrderState first_order_rhs(const ZerothJet& z, const GasParams& gas, const VirialCoefficient& A1,
                                const FirstOrderState& s) {
    const double R = gas.R(), k = gas.k();
    auto require = [&](double value, double scale, const char* what) {
        if (std::abs(value) <= 1e-12 * std::max(1.0, scale)) {
            throw Error(ErrorCode::SingularLeadingCoefficient,
                        fmt::format("leading coefficient {} vanishes at y = {}", what, z.y));
        }
    };
    const double lead3 = R * z.M0 * z.M0 * z.y - z.N0 * z.N0;
    const double lead4 = z.L0 * z.N0 + z.M0 * z.K0;
    require(k * z.M0, std::abs(k * z.M0), "k M0");
    require(z.M0, std::abs(z.M0), "M0");
    require(lead3, std::abs(R * z.M0 * z.M0 * z.y) + z.N0 * z.N0, "R M0^2 y - N0^2");
    require(lead4, std::abs(z.L0 * z.N0) + std::abs(z.M0 * z.K0), "L0 N0 + M0 K0");

    // The system is triangular: equation i involves only the first i derivatives.
    FirstOrderState ds;
    ds.M1 = -first_order_residual(z, gas, A1, s, ds)[0] / (k * z.M0);
    ds.N1 = first_order_residual(z, gas, A1, s, ds)[1] / z.M0;
    ds.L1 = -first_order_residual(z, gas, A1, s, ds)[2] / lead3;
    ds.K1 = -first_order_residual(z, gas, A1, s, ds)[3] / lead4;
    return ds;
}

FirstOrderState first_order_rhs(const ZerothTerm& z, const GasParams& gas, const VirialCoefficient& A1, double y,
                                const FirstOrderState& s) {
    return first_order_rhs(z.jet(y), gas, A1, s);
}

namespace {

// First derivative on a uniform grid from the seven nearest samples (sixth
// order), with Fornberg weights so the same code covers the one-sided ends.
double grid_derivative(const std::vector<double>& f, std::size_t i, double h) {
    constexpr std::size_t width = 7;
    const std::size_t n = f.size();
    const std::size_t first = std::min(i >= width / 2 ? i - width / 2 : 0, n - width);
    std::array<double, width> nodes{};
    for (std::size_t j = 0; j < width; ++j) nodes[j] = static_cast<double>(first + j) - static_cast<double>(i);

    // c[j][m]: weight of node j for the m-th derivative (m <= 1).
    std::array<std::array<double, 2>, width> c{};
    c[0][0] = 1.0;
    double c1 = 1.0;
    for (std::size_t a = 1; a < width; ++a) {
        double c2 = 1.0;
        for (std::size_t b = 0; b < a; ++b) {
            const double c3 = nodes[a] - nodes[b];
            c2 *= c3;
            if (b == a - 1) {
                c[a][1] = c1 * (c[a - 1][0] - nodes[a - 1] * c[a - 1][1]) / c2;
                c[a][0] = -c1 * nodes[a - 1] * c[a - 1][0] / c2;
            }
            c[b][1] = (nodes[a] * c[b][1] - c[b][0]) / c3;
            c[b][0] = nodes[a] * c[b][0] / c3;
        }
        c1 = c2;
    }
    double d = 0.0;
    for (std::size_t j = 0; j < width; ++j) d += c[j][1] * f[first + j];
    return d / h;
}

} // namespace

FirstOrderSolution integrate_first_order(const ZerothTerm& z, const GasParams& gas, const VirialCoefficient& A1,
                                         std::array<double, 2> y_range, const FirstOrderState& initial, double tol,
                                         std::size_t samples) {
    if (samples < 7) throw Error(ErrorCode::InvalidArgument, "first-order output needs at least 7 samples");
    if (y_range[0] == y_range[1]) throw Error(ErrorCode::InvalidArgument, "empty y range");
    const auto [lo, hi] = z.domain();
    for (double y : y_range) {
        if (!(y >= lo && y <= hi)) {
            throw Error(ErrorCode::OffTrajectory,
                        fmt::format("y = {} outside the zeroth-order range [{}, {}]", y, lo, hi));
        }
    }
    const auto& eq = z.equation();
    auto rhs = [&](double y, std::span<const double> u, std::span<double> du) {
        const auto jet = z.jet_at(y, u[0]);
        const auto d = first_order_rhs(jet, gas, A1, {u[1], u[2], u[3], u[4]});
        du[0] = eq.slope(y, u[0]);
        du[1] = d.M1;
        du[2] = d.N1;
        du[3] = d.L1;
        du[4] = d.K1;
    };

    // The solution is recorded on a grid `refine` times finer than the output
    // and residuals are checked at every fine point. Fast transients (zero
    // initial data off the slow manifold) can leave the stencils unresolved,
    // so the grid is doubled until the measured residual stops shrinking.
    auto evaluate = [&](std::size_t refine) {
        const std::size_t fine = (samples - 1) * refine + 1;
        const double h = (y_range[1] - y_range[0]) / static_cast<double>(fine - 1);
        OdeOptions opt;
        opt.tol = tol;
        for (std::size_t i = 1; i < fine; ++i) opt.output_points.push_back(y_range[0] + h * static_cast<double>(i));
        opt.output_points.back() = y_range[1];

        const OdeState u0{z.N0(y_range[0]), initial.M1, initial.N1, initial.L1, initial.K1};
        auto result = ode_solve(rhs, y_range[0], u0, y_range[1], opt);
        std::vector<OdeSample> grid;
        grid.reserve(fine);
        grid.push_back({y_range[0], u0});
        for (auto& s : result.samples) grid.push_back(std::move(s));

        // Three extra samples past each end, when the system stays regular there,
        // keep the stencils centred at the ends too.
        auto pad = [&](double from, const OdeState& start, double step) {
            std::vector<OdeSample> extra;
            OdeOptions po;
            po.tol = tol;
            for (int k = 1; k <= 3; ++k) po.output_points.push_back(from + step * k);
            try {
                const auto r = ode_solve(rhs, from, start, from + 3.0 * step, po);
                if (r.samples.size() == 3) extra = r.samples;
            } catch (const Error&) {
                // one-sided stencils at this end
            }
            return extra;
        };
        const auto before = pad(y_range[0], u0, -h);
        const auto after = pad(y_range[1], grid.back().y, h);

        const std::size_t offset = before.size();
        std::array<std::vector<double>, 4> cols;
        auto push = [&](const OdeState& u) {
            for (std::size_t c = 0; c < 4; ++c) cols[c].push_back(u[c + 1]);
        };
        for (auto it = before.rbegin(); it != before.rend(); ++it) push(it->y);
        for (const auto& s : grid) push(s.y);
        for (const auto& s : after) push(s.y);

        FirstOrderSolution out;
        out.samples.reserve(samples);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::size_t j = i + offset;
            const FirstOrderState d{grid_derivative(cols[0], j, h), grid_derivative(cols[1], j, h),
                                    grid_derivative(cols[2], j, h), grid_derivative(cols[3], j, h)};
            const auto& u = grid[i].y;
            const FirstOrderState state{u[1], u[2], u[3], u[4]};
            const auto r = first_order_residual(z.jet_at(grid[i].t, u[0]), gas, A1, state, d);
            for (std::size_t e = 0; e < 4; ++e) out.max_residual[e] = std::max(out.max_residual[e], std::abs(r[e]));
            if (i % refine == 0) out.samples.push_back({grid[i].t, u[0], state, r});
        }
        return out;
    };

    auto worst = [](const FirstOrderSolution& s) {
        return *std::max_element(s.max_residual.begin(), s.max_residual.end());
    };
    std::size_t refine = 4;
    auto best = evaluate(refine);
    while (worst(best) > tol && refine < 64) {
        refine *= 2;
        auto next = evaluate(refine);
        const bool converged = worst(next) >= 0.5 * worst(best);
        best = std::move(next);
        if (converged) break;
    }
    return best;
}

} // namespace curveflow
