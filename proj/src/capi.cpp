#include "curveflow/curveflow.h"

#include "curveflow/config.hpp"
#include "curveflow/error.hpp"
#include "curveflow/euler_system.hpp"
#include "curveflow/quotient.hpp"
#include "curveflow/render.hpp"
#include "curveflow/verify.hpp"
#include "curveflow/virial_flow.hpp"

#include <fmt/format.h>

#include <cmath>
#include <exception>
#include <new>
#include <string>

struct cf_config {
    curveflow::GasConfig value;
};

struct cf_text {
    std::string value;
};

namespace {

using namespace curveflow;

thread_local std::string last_error;

static_assert(static_cast<int>(ErrorCode::InvalidArgument) + 1 == CF_INVALID_ARGUMENT);
static_assert(static_cast<int>(ErrorCode::IoError) + 1 == CF_IO_ERROR);

cf_status to_status(ErrorCode code) { return static_cast<cf_status>(static_cast<int>(code) + 1); }

cf_status fail(cf_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
cf_status guarded(Body&& body) noexcept {
    try {
        body();
        return CF_OK;
    } catch (const Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CF_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(CF_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(CF_INTERNAL_ERROR, "unknown failure");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

cf_text* make_text(std::string s) { return new cf_text{std::move(s)}; }

OutputFormat to_format(cf_format f) {
    switch (f) {
    case CF_FORMAT_CSV: return OutputFormat::Csv;
    case CF_FORMAT_JSON: return OutputFormat::Json;
    case CF_FORMAT_SVG: return OutputFormat::Svg;
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown output format {}", static_cast<int>(f)));
}

ExactSolution make_solution(const cf_config* config, const cf_solution_request* r) {
    SolutionConstants sc;
    for (int i = 0; i < 5; ++i) sc.c[i] = r->constants[i];
    sc.family = r->family;
    if (sc.family == 2 && config->value.gas.n() == 2) {
        throw Error(ErrorCode::InvalidArgument, "solution family 2 requires n != 2; configured n = 2");
    }
    return ExactSolution(sc, config->value.gas, r->quadrature_tol);
}

} // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_name(cf_status status) {
    if (status == CF_OK) return "Ok";
    if (status > CF_OK && status < CF_INTERNAL_ERROR) {
        return error_code_name(static_cast<ErrorCode>(static_cast<int>(status) - 1)).data();
    }
    return "InternalError";
}

const char* cf_last_error(void) { return last_error.c_str(); }

cf_status cf_config_default(cf_config** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = new cf_config{default_gas_config()};
    });
}

cf_status cf_config_parse(const char* json, cf_config** out) {
    return guarded([&] {
        require(json != nullptr && out != nullptr, "json and out must not be null");
        *out = new cf_config{parse_gas_config(json)};
    });
}

cf_status cf_config_load(const char* path, cf_config** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path and out must not be null");
        *out = new cf_config{load_gas_config(path)};
    });
}

void cf_config_free(cf_config* config) { delete config; }

cf_status cf_config_to_json(const cf_config* config, cf_text** out) {
    return guarded([&] {
        require(config != nullptr && out != nullptr, "config and out must not be null");
        *out = make_text(gas_config_to_json(config->value));
    });
}

cf_status cf_config_omega(const cf_config* config, double* out) {
    return guarded([&] {
        require(config != nullptr && out != nullptr, "config and out must not be null");
        *out = config->value.gas.omega();
    });
}

cf_status cf_config_n(const cf_config* config, int* out) {
    return guarded([&] {
        require(config != nullptr && out != nullptr, "config and out must not be null");
        *out = config->value.gas.n();
    });
}

const char* cf_text_data(const cf_text* text) { return text ? text->value.c_str() : ""; }
size_t cf_text_size(const cf_text* text) { return text ? text->value.size() : 0; }
void cf_text_free(cf_text* text) { delete text; }

cf_status cf_fixed_points(double A, double B, cf_text** out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        require(std::isfinite(A) && std::isfinite(B), "A and B must be finite");
        *out = make_text(fixed_points_json(fixed_points({A, B})));
    });
}

void cf_window_default(cf_window* window) {
    if (!window) return;
    const auto g = default_portrait_window();
    *window = {g.first.min, g.first.max, g.second.min, g.second.max, g.first.count, g.second.count};
}

cf_status cf_portrait(double A, double B, const cf_window* window, const double* seeds, size_t seed_count,
                      double s_max, double tol, cf_format format, cf_text** out) {
    return guarded([&] {
        require(window != nullptr && out != nullptr, "window and out must not be null");
        require(seed_count == 0 || seeds != nullptr, "seeds must not be null");
        require(std::isfinite(A) && std::isfinite(B), "A and B must be finite");
        require(s_max > 0.0 && tol > 0.0, "s_max and tol must be positive");
        const Grid2D grid{Grid1D::make(window->y_min, window->y_max, window->y_count),
                          Grid1D::make(window->n_min, window->n_max, window->n_count)};
        std::vector<std::array<double, 2>> pts;
        for (size_t i = 0; i < seed_count; ++i) pts.push_back({seeds[2 * i], seeds[2 * i + 1]});
        const auto f = to_format(format);
        *out = make_text(render_portrait(portrait({A, B}, grid, pts, s_max, tol), f));
    });
}

cf_status cf_solution_request_default(int family, cf_solution_request* request) {
    return guarded([&] {
        require(request != nullptr, "request must not be null");
        if (family != 1 && family != 2) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("family must be 1 or 2 (got {})", family));
        }
        *request = {};
        request->family = family;
        const double c[5] = {1.0, 2.0, 0.0, 0.0, family == 1 ? 0.0 : -1.0};
        for (int i = 0; i < 5; ++i) request->constants[i] = c[i];
        request->quadrature_tol = 1e-10;
    });
}

cf_status cf_solution(const cf_config* config, const cf_solution_request* request, cf_format format, cf_text** out) {
    return guarded([&] {
        require(config != nullptr && request != nullptr && out != nullptr, "arguments must not be null");
        const auto f = to_format(format);
        if (f == OutputFormat::Svg) throw Error(ErrorCode::InvalidArgument, "solution output is csv or json");
        const auto sol = make_solution(config, request);
        const Grid2D grid = request->t_count == 0 || request->a_count == 0
                                ? default_solution_grid(sol)
                                : Grid2D{Grid1D::make(request->t_min, request->t_max, request->t_count),
                                         Grid1D::make(request->a_min, request->a_max, request->a_count)};
        const auto table = tabulate_solution(sol, config->value.gas, grid);
        *out = make_text(f == OutputFormat::Csv ? solution_csv(table) : solution_json(table));
    });
}

void cf_expand_request_default(cf_expand_request* request) {
    if (!request) return;
    const ExpansionRequest d;
    *request = {};
    request->order = d.order;
    for (int i = 0; i < 3; ++i) request->constants[i] = d.constants[i];
    request->y_min = d.y_range[0];
    request->y_max = d.y_range[1];
    request->n0_start = d.N0_start;
    request->tol = d.tol;
    request->samples = d.samples;
}

cf_status cf_expand(const cf_config* config, const cf_expand_request* request, cf_format format, cf_text** out) {
    return guarded([&] {
        require(config != nullptr && request != nullptr && out != nullptr, "arguments must not be null");
        const auto f = to_format(format);
        if (f == OutputFormat::Svg) throw Error(ErrorCode::InvalidArgument, "expansion output is csv or json");
        ExpansionRequest r;
        r.order = request->order;
        r.constants = {request->constants[0], request->constants[1], request->constants[2]};
        r.y_range = {request->y_min, request->y_max};
        r.N0_start = request->n0_start;
        r.initial = {request->initial[0], request->initial[1], request->initial[2], request->initial[3]};
        r.tol = request->tol;
        r.samples = request->samples;
        const auto table = expand(config->value, r);
        *out = make_text(f == OutputFormat::Csv ? expansion_csv(table) : expansion_json(table));
    });
}

cf_status cf_verify(const cf_config* config, uint64_t seed, double quadrature_tol, cf_text** report,
                    int* all_passed) {
    return guarded([&] {
        require(config != nullptr && report != nullptr && all_passed != nullptr, "arguments must not be null");
        VerifyOptions opt;
        opt.seed = seed;
        opt.quadrature_tol = quadrature_tol;
        const auto r = run_verification(config->value, opt);
        *report = make_text(verify_report_json(config->value, opt, r));
        *all_passed = r.all_passed() ? 1 : 0;
    });
}

cf_status cf_flow_temperature_rhs(double A, double B, double y, double n0, double* out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        *out = flow_temperature_rhs({A, B}, y, n0);
    });
}

cf_status cf_quotient_residual(const cf_config* config, const double jet[14], double residual[4]) {
    return guarded([&] {
        require(config != nullptr && jet != nullptr && residual != nullptr, "arguments must not be null");
        TresseJet j;
        j.point = {jet[0], jet[1], jet[2], jet[3], jet[4], jet[5]};
        j.K_x = jet[6];
        j.K_y = jet[7];
        j.L_x = jet[8];
        j.L_y = jet[9];
        j.M_x = jet[10];
        j.M_y = jet[11];
        j.N_x = jet[12];
        j.N_y = jet[13];
        const auto q = quotient_residual(j, config->value.gas, config->value.potential);
        for (int i = 0; i < 4; ++i) residual[i] = q[i];
    });
}

cf_status cf_solution_point(const cf_config* config, const cf_solution_request* request, double t, double a,
                            double values[3], double residual[3]) {
    return guarded([&] {
        require(config != nullptr && request != nullptr && values != nullptr && residual != nullptr,
                "arguments must not be null");
        const auto sol = make_solution(config, request);
        const auto v = sol.values(t, a);
        const auto r = euler_residual(sol, config->value.gas, ideal_gas_potential(config->value.gas.n()), t, a);
        values[0] = v.u;
        values[1] = v.rho;
        values[2] = v.theta;
        for (int i = 0; i < 3; ++i) residual[i] = r[i];
    });
}

} // extern "C"
