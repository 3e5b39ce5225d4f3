#include "curveflow/verify.hpp"

#include "curveflow/error.hpp"
#include "curveflow/euler_system.hpp"
#include "curveflow/quotient.hpp"
#include "curveflow/virial_flow.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace curveflow {

namespace {

// Records the worst residual and the first case that broke the tolerance.
class Tally {
public:
    Tally(std::string name, double tolerance) {
        result_.name = std::move(name);
        result_.tolerance = tolerance;
    }

    void add(double residual, const std::string& where) {
        ++result_.samples;
        if (!(residual <= result_.tolerance) && result_.detail.empty()) {
            result_.detail = fmt::format("{}: residual {:.3e}", where, residual);
        }
        if (std::isnan(residual)) {
            result_.max_residual = residual;
        } else if (!std::isnan(result_.max_residual)) {
            result_.max_residual = std::max(result_.max_residual, residual);
        }
    }
    template <std::size_t N>
    void add(const std::array<double, N>& residuals, const std::string& where) {
        double worst = 0.0;
        for (double r : residuals) worst = std::isnan(r) || std::isnan(worst) ? NAN : std::max(worst, std::abs(r));
        add(worst, where);
    }
    void fail(const std::string& why) {
        if (result_.detail.empty()) result_.detail = why;
        forced_fail_ = true;
    }

    PropertyResult finish() {
        result_.passed = !forced_fail_ && result_.detail.empty() && result_.samples > 0;
        if (result_.samples == 0 && result_.detail.empty()) result_.detail = "no samples";
        return result_;
    }

private:
    PropertyResult result_;
    bool forced_fail_ = false;
};

// |fd - exact| / max(1, |exact|)
double mixed_error(double fd, double exact) { return std::abs(fd - exact) / std::max(1.0, std::abs(exact)); }

struct ConstantSet {
    double c1, c2, omega;
};
constexpr ConstantSet kQuotientConstants[] = {{1.0, 2.0, 1.0}, {-1.0, 4.0, 1.0}, {2.0, 1.0, 0.5}};

constexpr std::array<double, 5> kFamily1Constants{1.2, 2.0, 0.3, 0.1, 0.0};
constexpr std::array<double, 5> kFamily2Constants{1.2, 2.0, 0.3, 0.1, -1.0};

std::pair<double, double> time_span(const ExactSolution& sol) {
    const double t0 = sol.reference_time();
    const double half = std::min(1.0, 0.6 * (sol.time_window().second - t0));
    return {t0 - half, t0 + half};
}

ZerothEquation expansion_equation(const GasConfig& config) {
    return {1.0, 1.0, 3.0, config.gas.R(), config.gas.omega()};
}

ZerothTerm expansion_term(const GasConfig& config) {
    return ZerothTerm::integrate(expansion_equation(config), 0.5, -1.0, 2.7);
}

} // namespace

bool VerifyReport::all_passed() const noexcept {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

const PropertyResult* VerifyReport::find(std::string_view name) const noexcept {
    for (const auto& p : properties) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

PropertyResult check_fixed_point_inventory() {
    struct Expected {
        double y, N;
        EigenClass cls;
    };
    struct Case {
        ReducedParams p;
        std::vector<Expected> points;
    };
    const std::vector<Case> cases{
        {{-2.0, 1.0},
         {{0.0, 0.0, EigenClass::UnstableNode}, {0.25, -0.5, EigenClass::Saddle}, {1.0, 1.0, EigenClass::Saddle}}},
        {{1.0, 2.0}, {{0.0, 0.0, EigenClass::UnstableNode}}},
        {{2.0, -3.0},
         {{0.0, 0.0, EigenClass::Saddle}, {1.0, 1.0, EigenClass::Centre}, {2.25, -1.5, EigenClass::UnstableSpiral}}},
        {{-2.0, -1.0}, {{0.0, 0.0, EigenClass::Saddle}}},
    };

    Tally tally("fixed_point_inventory", 1e-12);
    for (const auto& c : cases) {
        const auto found = fixed_points(c.p);
        const auto label = fmt::format("(A, B) = ({}, {})", c.p.A, c.p.B);
        if (found.size() != c.points.size()) {
            tally.fail(fmt::format("{}: {} equilibria, expected {}", label, found.size(), c.points.size()));
            continue;
        }
        for (const auto& want : c.points) {
            auto best = std::min_element(found.begin(), found.end(), [&](const auto& a, const auto& b) {
                return std::hypot(a.y - want.y, a.N - want.N) < std::hypot(b.y - want.y, b.N - want.N);
            });
            tally.add(std::hypot(best->y - want.y, best->N - want.N), label);
            if (best->cls != want.cls) {
                tally.fail(fmt::format("{}: ({}, {}) classified {} instead of {}", label, want.y, want.N,
                                       eigen_class_name(best->cls), eigen_class_name(want.cls)));
            }
        }
    }
    return tally.finish();
}

PropertyResult check_quotient_exactness(std::uint64_t seed) {
    Tally tally("quotient_exactness", 1e-8);
    std::mt19937_64 rng(seed);
    for (int n : {3, 4, 5}) {
        const auto pot = ideal_gas_potential(n);
        const double m = 2.0 * n / (n - 2.0);
        for (const auto& c : kQuotientConstants) {
            const auto gas = GasParams::make(1.0, n, 1.0, 1.0, 0.5 * c.omega * c.omega);
            for (int sigma : {1, -1}) {
                const auto one = quotsol1(c.c1, c.c2, n, c.omega, sigma);
                const auto two = quotsol2(c.c1, c.c2, n, c.omega, sigma);
                const double x_min = c.omega / std::sqrt(c.c2);
                const double r_min = std::pow(c.omega * c.omega / c.c2, 1.0 / m);
                std::uniform_real_distribution<double> xs(1.05 * x_min, 3.0 * x_min), ys(0.2, 3.0);
                std::uniform_real_distribution<double> rs(1.02 * r_min, 1.6 * r_min), y2s(0.3, 2.0);
                for (int i = 0; i < 100; ++i) {
                    const double x = xs(rng), y = ys(rng);
                    tally.add(quotient_residual(one, gas, pot, x, y),
                              fmt::format("first solution n={} sigma={} at ({}, {})", n, sigma, x, y));
                    const double y2 = y2s(rng), x2 = rs(rng) * y2;
                    tally.add(quotient_residual(two, gas, pot, x2, y2),
                              fmt::format("second solution n={} sigma={} at ({}, {})", n, sigma, x2, y2));
                }
            }
        }
    }
    return tally.finish();
}

PropertyResult check_euler_exactness(const GasConfig& config, double quadrature_tol) {
    Tally tally("euler_exactness", 1e-6);
    const auto& gas = config.gas;
    const auto pot = ideal_gas_potential(gas.n());
    for (int family : {1, 2}) {
        const ExactSolution sol({family == 1 ? kFamily1Constants : kFamily2Constants, family}, gas, quadrature_tol);
        const auto [t0, t1] = time_span(sol);
        const auto ts = Grid1D::make(t0, t1, 20);
        const auto as = Grid1D::make(0.1, 2.0, 20);
        for (std::size_t i = 0; i < ts.count; ++i) {
            for (std::size_t k = 0; k < as.count; ++k) {
                const double t = ts.point(i), a = as.point(k);
                const auto where = fmt::format("family {} at (t, a) = ({}, {})", family, t, a);
                if (!sol.valid(t, a)) {
                    tally.fail(where + " is outside validity");
                    continue;
                }
                tally.add(euler_residual(sol, gas, pot, t, a), where);
            }
        }
    }
    return tally.finish();
}

PropertyResult check_flow_quotient_correspondence(const GasConfig& config, double quadrature_tol,
                                                  std::uint64_t seed) {
    Tally tally("flow_quotient_correspondence", 1e-6);
    const auto& gas = config.gas;
    const double n = gas.n(), w2 = gas.omega_squared();
    const ExactSolution one({kFamily1Constants, 1}, gas, quadrature_tol);
    const ExactSolution two({kFamily2Constants, 2}, gas, quadrature_tol);
    const double c1 = kFamily1Constants[0], c2 = kFamily1Constants[1];
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> as(0.1, 2.0);

    for (const ExactSolution* sol : {&one, &two}) {
        const auto [t0, t1] = time_span(*sol);
        std::uniform_real_distribution<double> ts(t0, t1);
        for (int i = 0; i < 50; ++i) {
            const double t = ts(rng), a = as(rng);
            const auto where = fmt::format("family {} at (t, a) = ({}, {})", sol->family(), t, a);
            const auto p = invariants_of_flow(*sol, t, a);
            const double sigma = p.K < 0.0 ? -1.0 : 1.0;
            if (sol->family() == 1) {
                const double root = std::sqrt(std::max(0.0, c2 * p.x * p.x - w2));
                tally.add(std::array<double, 4>{p.L, p.M - c1 * std::pow(p.x, 1.0 + 2.0 / n), p.K - sigma * root,
                                                p.N + 2.0 * p.y / n * sigma * root},
                          where);
            } else {
                const double rm = std::pow(p.x / p.y, 2.0 * n / (n - 2.0));
                const double root = std::sqrt(std::max(0.0, c2 * rm - w2));
                tally.add(std::array<double, 4>{p.L - c1 * rm, p.M - p.y / p.x * c1 * rm, p.K - sigma * root,
                                                p.N + 2.0 * p.y / n * sigma * root},
                          where);
            }
        }
    }
    return tally.finish();
}

PropertyResult check_symbol_identities(std::uint64_t seed) {
    Tally tally("symbol_identities", 1e-12);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.3, 2.5), any(-2.0, 2.0), speed(-3.0, 3.0);
    const auto gas = GasParams::make(1.4, 5, 0.6, 1.0, 0.8);
    const std::vector<PlanckPotential> pots{
        ideal_gas_potential(5),
        virial_potential(5, {Polynomial({0.3, -0.2, 0.05}), Polynomial({0.1, 0.02})}, 2),
    };
    auto relative = [](double direct, double factored) {
        return std::abs(direct - factored) / std::max(1.0, std::abs(direct));
    };
    for (std::size_t k = 0; k < pots.size(); ++k) {
        for (int i = 0; i < 100; ++i) {
            const FlowValues state{speed(rng), pos(rng), pos(rng)};
            const std::array<double, 2> xi{any(rng), any(rng)};
            const auto e = euler_symbol(gas, pots[k], state, xi);
            tally.add(relative(e.det_direct, e.det_factored), fmt::format("Euler symbol, potential {}, case {}", k, i));

            const TressePoint p{pos(rng), pos(rng), any(rng), any(rng), any(rng), any(rng)};
            const auto q = quotient_symbol(p, gas, pots[k], {any(rng), any(rng)});
            tally.add(relative(q.det_direct, q.det_factored),
                      fmt::format("quotient symbol, potential {}, case {}", k, i));
        }
    }
    return tally.finish();
}

PropertyResult check_zeroth_residual(const GasConfig& config) {
    Tally tally("expansion_zeroth_residual", 1e-10);
    const auto term = expansion_term(config);
    const double R = config.gas.R(), w = config.gas.omega();
    for (const auto& s : term.samples()) {
        const auto z = term.jet(s.t);
        auto e = zeroth_residual(z, R, w);
        // Sum of the absolute terms in each equation. Next to the breaking
        // curve N0'' reaches 1e9 and an absolute 1e-10 is below rounding.
        const std::array<double, 4> size{
            std::abs(z.M0 * z.M0_y),
            std::abs(z.M0 * z.N0_y) + std::abs(z.N0 * z.M0_y) + std::abs(z.K0 * z.M0),
            std::abs(z.L0 * z.N0 + z.M0 * z.K0) *
                (std::abs(z.N0 * z.L0_y) + std::abs(z.M0 * z.K0_y) + std::abs(z.K0 * z.L0)),
            std::abs(R * z.M0 * z.M0) * (std::abs(z.y * z.L0_y) + std::abs(z.M0_y) + std::abs(z.L0)) +
                std::abs(z.L0_y * z.N0 * z.N0) + std::abs(z.M0) * (z.K0 * z.K0 + w * w) +
                std::abs(z.L0 * z.K0 * z.N0),
        };
        for (int i = 0; i < 4; ++i) e[i] /= std::max(1.0, size[i]);
        tally.add(e, fmt::format("y = {}", s.t));
    }
    return tally.finish();
}

PropertyResult check_telescoping(const GasConfig& config) {
    Tally tally("expansion_telescoping", 1e-12);
    const auto term = expansion_term(config);
    for (const auto& s : term.samples()) {
        const auto z = term.jet(s.t);
        tally.add(std::abs(z.L0 * z.N0 + z.M0 * z.K0 - term.c2()) / std::max(1.0, std::abs(term.c2())),
                  fmt::format("y = {}", s.t));
    }
    return tally.finish();
}

PropertyResult check_first_order(const GasConfig& config) {
    Tally tally("expansion_first_order", 1e-6);
    const auto term = expansion_term(config);
    const auto [lo, hi] = term.domain();
    // Stay clear of the breaking curve where the zeroth term was truncated.
    const std::array<double, 2> range{lo, lo + 0.5 * (hi - lo)};

    std::vector<std::pair<std::string, VirialCoefficient>> coefficients{
        {"A1 = 0", Polynomial({0.0})}, {"A1 = 1", Polynomial({1.0})}, {"A1 = y", Polynomial({0.0, 1.0})}};
    if (!config.potential.coefficients().empty()) {
        coefficients.emplace_back("configured A1", config.potential.coefficients()[0]);
    }
    for (const auto& [label, A1] : coefficients) {
        for (const FirstOrderState& init : {FirstOrderState{0.0, 0.0, 0.0, 0.0}, FirstOrderState{0.2, -0.1, 0.3, 0.1}}) {
            const auto sol = integrate_first_order(term, config.gas, A1, range, init);
            tally.add(sol.max_residual,
                      fmt::format("{}, initial ({}, {}, {}, {})", label, init.M1, init.N1, init.L1, init.K1));
        }
    }
    return tally.finish();
}

PropertyResult check_exact_derivatives(const GasConfig& config, std::uint64_t seed) {
    Tally tally("exact_derivatives", 1e-6);
    std::mt19937_64 rng(seed);
    const int n = config.gas.n();
    const double R = config.gas.R();

    // Potential and thermodynamic partials.
    std::vector<PlanckPotential> pots{ideal_gas_potential(n), config.potential};
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (std::size_t k = 0; k < pots.size(); ++k) {
        const auto& pot = pots[k];
        for (int i = 0; i < 30; ++i) {
            const double x = u(rng), y = u(rng);
            const auto j = pot.jet(x, y);
            auto dx = [&](double PotentialJet::*m) {
                return fd_derivative([&](double s) { return pot.jet(s, y).*m; }, x, 1);
            };
            auto dy = [&](double PotentialJet::*m) {
                return fd_derivative([&](double s) { return pot.jet(x, s).*m; }, y, 1);
            };
            const auto where = fmt::format("potential {} at ({}, {})", k, x, y);
            tally.add(std::array<double, 10>{mixed_error(dx(&PotentialJet::phi), j.x),
                                             mixed_error(dy(&PotentialJet::phi), j.y),
                                             mixed_error(dx(&PotentialJet::x), j.xx),
                                             mixed_error(dy(&PotentialJet::x), j.xy),
                                             mixed_error(dx(&PotentialJet::y), j.xy),
                                             mixed_error(dy(&PotentialJet::y), j.yy),
                                             mixed_error(dx(&PotentialJet::xx), j.xxx),
                                             mixed_error(dy(&PotentialJet::xx), j.xxy),
                                             mixed_error(dx(&PotentialJet::xy), j.xxy),
                                             mixed_error(dy(&PotentialJet::xy), j.xyy)},
                      where);
            const auto t = thermo_jet(pot, R, x, y);
            tally.add(
                std::array<double, 4>{
                    mixed_error(fd_derivative([&](double s) { return pressure(pot, R, s, y); }, x, 1), t.p_x),
                    mixed_error(fd_derivative([&](double s) { return pressure(pot, R, x, s); }, y, 1), t.p_y),
                    mixed_error(fd_derivative([&](double s) { return entropy(pot, R, s, y); }, x, 1), t.s_x),
                    mixed_error(fd_derivative([&](double s) { return entropy(pot, R, x, s); }, y, 1), t.s_y)},
                "thermo " + where);
        }
    }

    // Constant-type solutions.
    for (int qn : {3, 4, 5}) {
        for (const auto& c : kQuotientConstants) {
            const auto one = quotsol1(c.c1, c.c2, qn, c.omega);
            const auto two = quotsol2(c.c1, c.c2, qn, c.omega, -1);
            const double x_min = c.omega / std::sqrt(c.c2);
            const double r_min = std::pow(c.omega * c.omega / c.c2, (qn - 2.0) / (2.0 * qn));
            std::uniform_real_distribution<double> xs(1.2 * x_min, 3.0 * x_min), ys(0.3, 2.0),
                rs(1.2 * r_min, 1.6 * r_min);
            for (int i = 0; i < 10; ++i) {
                const double y1 = ys(rng), x1 = xs(rng), y2 = ys(rng), x2 = rs(rng) * y2;
                for (const auto& [field, x, y] : {std::tuple<const TresseField*, double, double>{&one, x1, y1},
                                                  std::tuple<const TresseField*, double, double>{&two, x2, y2}}) {
                    SampledTresseField fd([field](double a, double b) { return field->jet(a, b).point; });
                    const auto e = field->jet(x, y), d = fd.jet(x, y);
                    tally.add(std::array<double, 8>{mixed_error(d.K_x, e.K_x), mixed_error(d.K_y, e.K_y),
                                                    mixed_error(d.L_x, e.L_x), mixed_error(d.L_y, e.L_y),
                                                    mixed_error(d.M_x, e.M_x), mixed_error(d.M_y, e.M_y),
                                                    mixed_error(d.N_x, e.N_x), mixed_error(d.N_y, e.N_y)},
                              fmt::format("constant-type solution n={} at ({}, {})", qn, x, y));
                }
            }
        }
    }

    // Exact Euler families.
    for (int family : {1, 2}) {
        const ExactSolution sol({family == 1 ? kFamily1Constants : kFamily2Constants, family}, config.gas, 1e-12);
        SampledFlow fd([&](double t, double a) { return sol.values(t, a); });
        const auto [t0, t1] = time_span(sol);
        std::uniform_real_distribution<double> ts(t0, t1), as(0.1, 2.0);
        for (int i = 0; i < 20; ++i) {
            const double t = ts(rng), a = as(rng);
            const auto e = sol.jet(t, a), d = fd.jet(t, a);
            tally.add(std::array<double, 7>{mixed_error(d.u_t, e.u_t), mixed_error(d.u_a, e.u_a),
                                            mixed_error(d.rho_t, e.rho_t), mixed_error(d.rho_a, e.rho_a),
                                            mixed_error(d.theta_t, e.theta_t), mixed_error(d.theta_a, e.theta_a),
                                            mixed_error(*d.theta_aa, e.theta_aa.value_or(0.0))},
                      fmt::format("family {} at (t, a) = ({}, {})", family, t, a));
        }
    }
    return tally.finish();
}

PropertyResult check_ode_self_convergence() {
    Tally tally("ode_self_convergence", 1e-6);
    struct Problem {
        std::string name;
        OdeRhs rhs;
        double t0, t1;
        OdeState y0;
    };
    const PlanarField centre({2.0, -3.0});
    const ZerothEquation eq{1.0, 1.0, 3.0, 1.0, 1.0};
    const std::vector<Problem> problems{
        {"planar field (2, -3) from (1.05, 1.05)",
         [&](double, std::span<const double> y, std::span<double> dy) {
             const auto f = centre(y[0], y[1]);
             dy[0] = f[0];
             dy[1] = f[1];
         },
         0.0, 10.0, {1.05, 1.05}},
        {"flow-temperature graph from (0.5, -1)",
         [&](double y, std::span<const double> u, std::span<double> du) { du[0] = eq.slope(y, u[0]); }, 0.5, 1.5,
         {-1.0}},
        {"damped oscillator",
         [](double t, std::span<const double> y, std::span<double> dy) {
             dy[0] = y[1];
             dy[1] = -y[0] - 0.1 * y[1] + std::sin(t);
         },
         0.0, 20.0, {1.0, 0.0}},
    };
    for (const auto& p : problems) {
        OdeOptions loose, tight;
        loose.tol = 1e-6;
        tight.tol = 1e-9;
        const auto a = ode_solve(p.rhs, p.t0, p.y0, p.t1, loose).last();
        const auto b = ode_solve(p.rhs, p.t0, p.y0, p.t1, tight).last();
        double worst = std::abs(a.t - b.t);
        for (std::size_t i = 0; i < a.y.size(); ++i) worst = std::max(worst, std::abs(a.y[i] - b.y[i]));
        tally.add(worst, p.name);
    }
    return tally.finish();
}

PropertyResult check_centre_annulus() {
    // Residual is how far the orbit strays outside the annulus, so 0 passes.
    Tally tally("centre_annulus", 0.0);
    TrajectoryOptions opt;
    opt.window = {-10.0, 10.0, -10.0, 10.0};
    opt.sample_ds = 0.01;
    const auto tr = integrate_trajectory({2.0, -3.0}, {1.05, 1.05}, 50.0, opt);
    if (tr.reason != Termination::ReachedSMax) {
        tally.fail(fmt::format("trajectory stopped early ({})", termination_name(tr.reason)));
    }
    for (const auto& s : tr.samples) {
        const double r = std::hypot(s.y - 1.0, s.N - 1.0);
        tally.add(std::max({0.0, 0.001 - r, r - 0.5}), fmt::format("s = {}, radius {}", s.s, r));
    }
    return tally.finish();
}

VerifyReport run_verification(const GasConfig& config, const VerifyOptions& options) {
    if (config.gas.n() == 2) {
        throw Error(ErrorCode::InvalidArgument, "solution family 2 requires n != 2; configured n = 2");
    }
    if (!(options.quadrature_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadrature tolerance must be > 0");
    const auto s = options.seed;
    VerifyReport report;
    report.properties = {
        check_fixed_point_inventory(),
        check_quotient_exactness(s),
        check_euler_exactness(config, options.quadrature_tol),
        check_flow_quotient_correspondence(config, options.quadrature_tol, s + 1),
        check_symbol_identities(s + 2),
        check_zeroth_residual(config),
        check_telescoping(config),
        check_first_order(config),
        check_exact_derivatives(config, s + 3),
        check_ode_self_convergence(),
        check_centre_annulus(),
    };
    return report;
}

std::string verify_report_json(const GasConfig& config, const VerifyOptions& options, const VerifyReport& report) {
    nlohmann::ordered_json doc;
    doc["config"] = nlohmann::ordered_json::parse(gas_config_to_json(config));
    doc["seed"] = options.seed;
    doc["quadrature_tol"] = options.quadrature_tol;
    auto& list = doc["properties"] = nlohmann::ordered_json::array();
    for (const auto& p : report.properties) {
        nlohmann::ordered_json entry;
        entry["name"] = p.name;
        entry["max_residual"] = p.max_residual;
        entry["tolerance"] = p.tolerance;
        entry["samples"] = p.samples;
        entry["passed"] = p.passed;
        if (!p.detail.empty()) entry["detail"] = p.detail;
        list.push_back(std::move(entry));
    }
    doc["passed"] = report.all_passed();
    return doc.dump(2) + "\n";
}

} // namespace curveflow
