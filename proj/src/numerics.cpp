#include "curveflow/numerics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace curveflow {

Grid1D Grid1D::make(double min, double max, std::size_t count) {
    if (!(std::isfinite(min) && std::isfinite(max)) || !(min < max) || count < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("grid needs finite min < max and count >= 2 (got [{}, {}] x {})", min, max,
                                count));
    }
    return Grid1D{min, max, count};
}

double Grid1D::point(std::size_t i) const noexcept {
    if (i + 1 == count) return max;
    return min + spacing() * static_cast<double>(i);
}

std::string_view eigen_class_name(EigenClass c) noexcept {
    switch (c) {
    case EigenClass::StableNode: return "StableNode";
    case EigenClass::UnstableNode: return "UnstableNode";
    case EigenClass::Saddle: return "Saddle";
    case EigenClass::Centre: return "Centre";
    case EigenClass::StableSpiral: return "StableSpiral";
    case EigenClass::UnstableSpiral: return "UnstableSpiral";
    case EigenClass::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// Finite differences

// After Richardson the truncation error is O(h^4) and rounding grows like
// eps / h^order, so higher orders want larger steps (about eps^(1/(4+order))).
double default_fd_step(double point, int order) noexcept {
    const double scale = std::max(1.0, std::abs(point));
    switch (order) {
    case 1: return 1e-5 * scale;
    case 2: return 1e-3 * scale;
    default: return 5e-3 * scale;
    }
}

namespace {

double checked(const ScalarFn& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteSample, fmt::format("non-finite sample f({}) = {}", x, v));
    }
    return v;
}

double central_difference(const ScalarFn& f, double x, int order, double h) {
    switch (order) {
    case 1:
        return (checked(f, x + h) - checked(f, x - h)) / (2.0 * h);
    case 2:
        return (checked(f, x + h) - 2.0 * checked(f, x) + checked(f, x - h)) / (h * h);
    case 3:
        return (checked(f, x + 2.0 * h) - 2.0 * checked(f, x + h) + 2.0 * checked(f, x - h) -
                checked(f, x - 2.0 * h)) /
               (2.0 * h * h * h);
    default:
        throw Error(ErrorCode::InvalidArgument, fmt::format("derivative order {} not in 1..3", order));
    }
}

} // namespace

double fd_derivative(const ScalarFn& f, double point, int order, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    }
    const double coarse = central_difference(f, point, order, step);
    const double fine = central_difference(f, point, order, 0.5 * step);
    return (4.0 * fine - coarse) / 3.0;
}

double fd_derivative(const ScalarFn& f, double point, int order) {
    return fd_derivative(f, point, order, default_fd_step(point, order));
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod quadrature

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error, magnitude;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const ScalarFn& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = checked(f, centre);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    double magnitude = kKronrodWeights[7] * std::abs(fc);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f1 = checked(f, centre - dx);
        const double f2 = checked(f, centre + dx);
        kronrod += kKronrodWeights[j] * (f1 + f2);
        magnitude += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
    }
    const double value = kronrod * half;
    return Segment{lo, hi, value, std::abs((kronrod - gauss) * half), magnitude * std::abs(half)};
}

} // namespace

QuadratureResult quadrature_detailed(const ScalarFn& f, double lo, double hi, double tol,
                                     std::size_t max_intervals) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
    if (!(std::isfinite(lo) && std::isfinite(hi))) {
        throw Error(ErrorCode::InvalidArgument, "quadrature limits must be finite");
    }
    QuadratureResult result;
    if (lo == hi) return result;
    const double sign = hi > lo ? 1.0 : -1.0;
    if (sign < 0) std::swap(lo, hi);

    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(f, lo, hi);
    double value = first.value;
    double error = first.error;
    double magnitude = first.magnitude;
    heap.push(first);
    result.evaluations = 15;

    auto floor_tol = [&] { return std::max(tol, 50.0 * std::numeric_limits<double>::epsilon() * magnitude); };
    while (error > floor_tol()) {
        if (heap.size() >= max_intervals) {
            throw Error(ErrorCode::ToleranceNotMet,
                        fmt::format("quadrature on [{}, {}] stalled at error {:.3e} > tol {:.3e}", lo, hi, error,
                                    tol));
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const Segment left = gauss_kronrod(f, worst.lo, mid);
        const Segment right = gauss_kronrod(f, mid, worst.hi);
        result.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift from the incremental updates.
    double total = 0.0;
    double total_error = 0.0;
    result.intervals = heap.size();
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        heap.pop();
    }
    result.value = sign * total;
    result.error_estimate = total_error;
    return result;
}

double quadrature(const ScalarFn& f, double lo, double hi, double tol) {
    return quadrature_detailed(f, lo, hi, tol).value;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

struct DormandPrince {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class Stepper {
public:
    Stepper(const OdeRhs& rhs, std::size_t dim, double tol, double span)
        : rhs_(rhs), tol_(tol), span_(std::abs(span)), k_(7, OdeState(dim)), tmp_(dim) {}

    // One step of size h from (t, y). Returns the scaled error norm (<= 1 is
    // acceptable, infinity when the field was not finite).
    double step(double t, const OdeState& y, double h, OdeState& out) {
        using D = DormandPrince;
        const std::size_t n = y.size();
        auto eval = [&](double tt, const OdeState& yy, OdeState& k) {
            rhs_(tt, yy, k);
        };
        eval(t, y, k_[0]);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * D::a21 * k_[0][i];
        eval(t + D::c2 * h, tmp_, k_[1]);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (D::a31 * k_[0][i] + D::a32 * k_[1][i]);
        eval(t + D::c3 * h, tmp_, k_[2]);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (D::a41 * k_[0][i] + D::a42 * k_[1][i] + D::a43 * k_[2][i]);
        eval(t + D::c4 * h, tmp_, k_[3]);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (D::a51 * k_[0][i] + D::a52 * k_[1][i] + D::a53 * k_[2][i] + D::a54 * k_[3][i]);
        eval(t + D::c5 * h, tmp_, k_[4]);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (D::a61 * k_[0][i] + D::a62 * k_[1][i] + D::a63 * k_[2][i] + D::a64 * k_[3][i] +
                                  D::a65 * k_[4][i]);
        eval(t + h, tmp_, k_[5]);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = y[i] + h * (D::b1 * k_[0][i] + D::b3 * k_[2][i] + D::b4 * k_[3][i] + D::b5 * k_[4][i] +
                                 D::b6 * k_[5][i]);
        eval(t + h, out, k_[6]);

        // Error per unit step: the local errors of a full run add up to about tol.
        const double share = std::min(1.0, std::abs(h) / span_);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err = h * (D::e1 * k_[0][i] + D::e3 * k_[2][i] + D::e4 * k_[3][i] + D::e5 * k_[4][i] +
                                    D::e6 * k_[5][i] + D::e7 * k_[6][i]);
            const double scale = tol_ * share * (1.0 + std::max(std::abs(y[i]), std::abs(out[i])));
            const double ratio = std::abs(err) / scale;
            if (!std::isfinite(ratio) || !std::isfinite(out[i])) return std::numeric_limits<double>::infinity();
            norm = std::max(norm, ratio);
        }
        return norm;
    }

private:
    const OdeRhs& rhs_;
    double tol_;
    double span_;
    std::vector<OdeState> k_;
    OdeState tmp_;
};

double initial_step(const OdeRhs& rhs, double t0, const OdeState& y0, double span, double tol) {
    const std::size_t n = y0.size();
    OdeState f0(n);
    rhs(t0, y0, f0);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = tol * (1.0 + std::abs(y0[i]));
        d0 = std::max(d0, std::abs(y0[i]) / sc);
        d1 = std::max(d1, std::abs(f0[i]) / sc);
    }
    double h = (d0 < 1e-5 || d1 < 1e-5 || !std::isfinite(d1)) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, std::abs(span));
    h = std::max(h, 1e-12 * std::max(1.0, std::abs(t0)));
    return h;
}

bool crosses(double before, double after, int direction) {
    if (direction >= 0 && before < 0.0 && after >= 0.0) return true;
    if (direction <= 0 && before > 0.0 && after <= 0.0) return true;
    return false;
}

} // namespace

OdeResult ode_solve(const OdeRhs& rhs, double t0, OdeState y0, double t1, const OdeOptions& options,
                    std::span<const OdeEvent> events) {
    if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "ODE tolerance must be positive");
    if (!(std::isfinite(t0) && std::isfinite(t1))) {
        throw Error(ErrorCode::InvalidArgument, "ODE interval must be finite");
    }
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < options.output_points.size(); ++i) {
        const double p = options.output_points[i];
        const bool inside = dir > 0 ? (p >= t0 && p <= t1) : (p <= t0 && p >= t1);
        const bool ordered = i == 0 || dir * (p - options.output_points[i - 1]) > 0.0;
        if (!inside || !ordered) {
            throw Error(ErrorCode::InvalidArgument, "ODE output points must be ordered inside [t0, t1]");
        }
    }

    OdeResult result;
    const bool dense = options.output_points.empty();
    std::size_t next_output = 0;
    double t = t0;
    OdeState y = std::move(y0);
    {
        OdeState f0(y.size());
        rhs(t, y, f0);
        for (double v : f0) {
            if (!std::isfinite(v)) throw SingularityError("vector field is not finite at the start point", t, y);
        }
    }
    if (dense) {
        result.samples.push_back({t, y});
    } else if (next_output < options.output_points.size() && options.output_points[0] == t0) {
        result.samples.push_back({t, y});
        ++next_output;
    }
    if (t0 == t1) return result;

    std::vector<double> g_prev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].fn(t, y);

    Stepper stepper(rhs, y.size(), options.tol, t1 - t0);
    double h = options.initial_step > 0.0 ? options.initial_step
                                          : initial_step(rhs, t0, y, t1 - t0, options.tol);
    h = std::min(h, options.max_step);
    OdeState y_new;

    while (dir * (t1 - t) > 0.0) {
        if (result.accepted_steps + result.rejected_steps >= options.max_steps) {
            throw SingularityError("ODE step budget exhausted", t, y);
        }
        double target = t1;
        if (!dense && next_output < options.output_points.size()) target = options.output_points[next_output];
        double h_try = std::min(h, std::abs(target - t));
        const bool lands = h_try == std::abs(target - t);
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h_try < min_step && !lands) {
            throw SingularityError(fmt::format("step size underflow at t = {}", t), t, y);
        }

        const double err = stepper.step(t, y, dir * h_try, y_new);
        if (!(err <= 1.0)) {
            ++result.rejected_steps;
            const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.25)) : 0.25;
            h = h_try * factor;
            if (h < min_step) throw SingularityError(fmt::format("step size underflow at t = {}", t), t, y);
            continue;
        }
        ++result.accepted_steps;
        double t_new = lands ? target : t + dir * h_try;

        // Events: earliest sign change within the step wins.
        std::optional<std::size_t> hit;
        double hit_frac = 2.0;
        std::vector<double> g_new(events.size());
        for (std::size_t e = 0; e < events.size(); ++e) {
            g_new[e] = events[e].fn(t_new, y_new);
            if (!crosses(g_prev[e], g_new[e], events[e].direction)) continue;
            // Illinois iteration on the fraction of the step.
            double lo = 0.0, hi = 1.0, glo = g_prev[e], ghi = g_new[e];
            int side = 0;
            OdeState y_mid;
            double frac = 1.0;
            for (int it = 0; it < 100; ++it) {
                frac = (lo * ghi - hi * glo) / (ghi - glo);
                if (!(frac > lo && frac < hi)) frac = 0.5 * (lo + hi);
                stepper.step(t, y, dir * h_try * frac, y_mid);
                const double g = events[e].fn(t + dir * h_try * frac, y_mid);
                if ((hi - lo) * h_try <= options.tol * std::max(1.0, std::abs(t)) || g == 0.0) break;
                if ((g < 0.0) == (glo < 0.0)) {
                    lo = frac;
                    glo = g;
                    if (side == -1) ghi *= 0.5;
                    side = -1;
                } else {
                    hi = frac;
                    ghi = g;
                    if (side == 1) glo *= 0.5;
                    side = 1;
                }
            }
            if (events[e].terminal) {
                if (frac < hit_frac) {
                    hit_frac = frac;
                    hit = e;
                }
            } else {
                result.events.push_back({e, t + dir * h_try * frac, y_mid});
            }
        }

        if (hit) {
            // Non-terminal hits recorded past the terminal point are dropped.
            const double t_hit = t + dir * h_try * hit_frac;
            std::erase_if(result.events, [&](const EventHit& ev) { return dir * (ev.t - t_hit) > 0.0; });
            OdeState y_hit;
            stepper.step(t, y, dir * h_try * hit_frac, y_hit);
            result.events.push_back({*hit, t_hit, y_hit});
            result.terminal_event = hit;
            if (dense) result.samples.push_back({t_hit, y_hit});
            return result;
        }

        t = t_new;
        y = y_new;
        g_prev = std::move(g_new);
        if (dense) {
            result.samples.push_back({t, y});
        } else if (lands && next_output < options.output_points.size()) {
            result.samples.push_back({t, y});
            ++next_output;
        }

        const double factor = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.25), 0.2, 5.0) : 5.0;
        // Landing on an output point clamps the step; grow from the unclamped proposal.
        const double base = lands ? std::max(h, h_try) : h_try;
        h = std::min(options.max_step, base * factor);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Polynomial roots

namespace {

double horner(double a3, double a2, double a1, double a0, double x) { return ((a3 * x + a2) * x + a1) * x + a0; }

double polish(double a3, double a2, double a1, double a0, double x) {
    for (int it = 0; it < 3; ++it) {
        const double p = horner(a3, a2, a1, a0, x);
        const double dp = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if (p == 0.0 || dp == 0.0) break;
        const double candidate = x - p / dp;
        if (!(std::abs(horner(a3, a2, a1, a0, candidate)) < std::abs(p))) break;
        x = candidate;
    }
    return x;
}

void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
    const double disc = b * b - 4.0 * a * c;
    const double scale = std::max(b * b, std::abs(4.0 * a * c));
    if (std::abs(disc) <= 1e-14 * scale) {
        out.push_back(-b / (2.0 * a));
        out.push_back(-b / (2.0 * a));
        return;
    }
    if (disc < 0.0) return;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    out.push_back(q / a);
    out.push_back(c / q);
}

} // namespace

std::vector<double> cubic_real_roots(double a3, double a2, double a1, double a0) {
    for (double a : {a3, a2, a1, a0}) {
        if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "polynomial coefficients must be finite");
    }
    if (a3 == 0.0 && a2 == 0.0 && a1 == 0.0) {
        if (a0 == 0.0) throw Error(ErrorCode::InvalidArgument, "zero polynomial has no isolated roots");
        throw Error(ErrorCode::NoRoots, "nonzero constant polynomial has no roots");
    }

    std::vector<double> roots;
    if (a3 == 0.0) {
        if (a2 == 0.0) {
            roots.push_back(-a0 / a1);
        } else {
            quadratic_roots(a2, a1, a0, roots);
        }
    } else if (a0 == 0.0) {
        roots.push_back(0.0);
        if (a1 == 0.0) {
            roots.push_back(0.0);
            if (a2 == 0.0) {
                roots.push_back(0.0);
            } else {
                roots.push_back(-a2 / a3);
            }
        } else {
            quadratic_roots(a3, a2, a1, roots);
        }
    } else {
        const double b = a2 / a3, c = a1 / a3, d = a0 / a3;
        const double shift = b / 3.0;
        const double p = c - b * b / 3.0;
        const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        const double half_q2 = 0.25 * q * q;
        const double third_p3 = p * p * p / 27.0;
        const double disc = half_q2 + third_p3;
        const double disc_scale = std::max(half_q2, std::abs(third_p3));
        if (disc_scale == 0.0 || std::abs(disc) <= 1e-14 * disc_scale) {
            if (p == 0.0 || disc_scale == 0.0) {
                roots.assign(3, -shift);
            } else {
                roots.push_back(3.0 * q / p - shift);
                roots.push_back(-1.5 * q / p - shift);
                roots.push_back(-1.5 * q / p - shift);
            }
        } else if (disc > 0.0) {
            const double big = -std::copysign(std::cbrt(0.5 * std::abs(q) + std::sqrt(disc)), q);
            const double small = big != 0.0 ? -p / (3.0 * big) : 0.0;
            roots.push_back(big + small - shift);
        } else {
            const double r = 2.0 * std::sqrt(-p / 3.0);
            const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
            const double phi = std::acos(arg);
            for (int k = 0; k < 3; ++k) {
                roots.push_back(r * std::cos(phi / 3.0 - 2.0 * std::numbers::pi * k / 3.0) - shift);
            }
        }
    }
    for (double& r : roots) r = polish(a3, a2, a1, a0, r);
    std::sort(roots.begin(), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// Planar linearisation

PlanarSpectrum planar_spectrum(const Matrix<2>& j) noexcept {
    const double trace = j[0][0] + j[1][1];
    const double det = determinant<2>(j);
    return {trace, det, trace * trace - 4.0 * det};
}

EigenClass classify_2x2(const Matrix<2>& j) {
    constexpr double eps = 1e-12;
    const auto [trace, det, disc] = planar_spectrum(j);
    if (std::abs(det) < eps) return EigenClass::Degenerate;
    if (det < 0.0) return EigenClass::Saddle;
    if (std::abs(trace) < eps) return EigenClass::Centre;
    if (disc < 0.0) return trace > 0.0 ? EigenClass::UnstableSpiral : EigenClass::StableSpiral;
    return trace > 0.0 ? EigenClass::UnstableNode : EigenClass::StableNode;
}

} // namespace curveflow
