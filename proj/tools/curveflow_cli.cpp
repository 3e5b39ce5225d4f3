// curveflow: command-line front end over the C API.
//
// Exit codes: 0 success, 1 verification failed, 2 usage or configuration
// error, 3 I/O error, 4 numerical failure. Every failure prints exactly one
// line "error: <Code>: <message>" on stderr.

#include "curveflow/curveflow.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3, kNumerical = 4 };

// Carries a status out of the command handlers.
struct Failure {
    cf_status status;
    std::string message;
};

int exit_code(cf_status s) {
    switch (s) {
    case CF_OK: return kOk;
    case CF_INVALID_ARGUMENT:
    case CF_CONFIG_ERROR:
    case CF_UNSUPPORTED_ORDER: return kUsage;
    case CF_IO_ERROR: return kIo;
    default: return kNumerical;
    }
}

std::string one_line(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

void check(cf_status s) {
    if (s != CF_OK) throw Failure{s, cf_last_error()};
}

struct ConfigDeleter {
    void operator()(cf_config* c) const { cf_config_free(c); }
};
struct TextDeleter {
    void operator()(cf_text* t) const { cf_text_free(t); }
};
using ConfigPtr = std::unique_ptr<cf_config, ConfigDeleter>;
using TextPtr = std::unique_ptr<cf_text, TextDeleter>;

ConfigPtr load_config(const std::string& path) {
    cf_config* raw = nullptr;
    check(path.empty() ? cf_config_default(&raw) : cf_config_load(path.c_str(), &raw));
    return ConfigPtr(raw);
}

void emit(const cf_text* text, const std::string& out_path) {
    const char* data = cf_text_data(text);
    const std::size_t size = cf_text_size(text);
    if (out_path.empty() || out_path == "-") {
        std::fwrite(data, 1, size, stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{CF_IO_ERROR, "cannot open '" + out_path + "' for writing"};
    out.write(data, static_cast<std::streamsize>(size));
    out.close();
    if (!out) throw Failure{CF_IO_ERROR, "failed writing '" + out_path + "'"};
}

cf_format parse_format(const std::string& name) {
    if (name == "csv") return CF_FORMAT_CSV;
    if (name == "json") return CF_FORMAT_JSON;
    if (name == "svg") return CF_FORMAT_SVG;
    throw Failure{CF_INVALID_ARGUMENT, "unknown format '" + name + "'"};
}

// Seed file: one "y N0" or "y,N0" pair per line; '#' starts a comment.
std::vector<double> read_seeds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{CF_IO_ERROR, "cannot open seed file '" + path + "'"};
    std::vector<double> seeds;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (auto& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream fields(line);
        double y = 0.0, n = 0.0;
        if (!(fields >> y)) continue;
        std::string rest;
        if (!(fields >> n) || (fields >> rest)) {
            throw Failure{CF_INVALID_ARGUMENT, path + ":" + std::to_string(line_no) + ": expected two numbers"};
        }
        seeds.push_back(y);
        seeds.push_back(n);
    }
    return seeds;
}

// A 4 x 4 lattice strictly inside the window.
std::vector<double> default_seeds(const cf_window& w) {
    std::vector<double> seeds;
    for (int i = 1; i <= 4; ++i) {
        for (int k = 1; k <= 4; ++k) {
            seeds.push_back(w.y_min + (w.y_max - w.y_min) * i / 5.0);
            seeds.push_back(w.n_min + (w.n_max - w.n_min) * k / 5.0);
        }
    }
    return seeds;
}

struct Common {
    std::string config;
    std::string format;
    std::string out;
    std::optional<double> tol;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format, const std::string& formats) {
    sub->add_option("--config", c.config, "Gas configuration (JSON)");
    sub->add_option("--format", c.format, "Output format: " + formats)->default_val(default_format);
    sub->add_option("--out", c.out, "Output file (stdout when omitted)");
    sub->add_option("--tol", c.tol, "Numerical tolerance");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solutions, quotient PDE and virial flow-temperature tools for gas flow on a quadratic curve"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cf_version()));

    Common verify_opt, fp_opt, portrait_opt, solution_opt, expand_opt;

    auto* verify = app.add_subcommand("verify", "Run the cross-verification suite and print a JSON report");
    add_common(verify, verify_opt, "json", "json");
    std::uint64_t seed = 20240611;
    verify->add_option("--seed", seed, "Random seed for sampled properties")->capture_default_str();

    auto* fixed = app.add_subcommand("fixed-points", "Equilibria of the reduced flow-temperature field");
    add_common(fixed, fp_opt, "json", "json");
    double fA = 0.0, fB = 0.0;
    fixed->add_option("-A", fA, "Parameter A")->required();
    fixed->add_option("-B", fB, "Parameter B")->required();

    auto* port = app.add_subcommand("portrait", "Phase portrait of the reduced field");
    add_common(port, portrait_opt, "svg", "csv, json or svg");
    double pA = 0.0, pB = 0.0, s_max = 10.0;
    std::vector<double> window;
    std::vector<std::size_t> grid_counts;
    std::string seeds_path;
    port->add_option("-A", pA, "Parameter A")->required();
    port->add_option("-B", pB, "Parameter B")->required();
    port->add_option("--window", window, "y0,y1,n0,n1")->delimiter(',')->expected(4);
    port->add_option("--grid", grid_counts, "Direction grid ny,nn")->delimiter(',')->expected(2);
    port->add_option("--seeds", seeds_path, "Seed file, one 'y N0' pair per line");
    port->add_option("--s-max", s_max, "Integration length in each direction")->capture_default_str();

    auto* sol = app.add_subcommand("solution", "Tabulate an exact solution family with its Euler residuals");
    add_common(sol, solution_opt, "csv", "csv or json");
    int family = 1;
    std::vector<double> constants, sol_grid;
    sol->add_option("--family", family, "1 or 2")->capture_default_str();
    sol->add_option("--constants", constants, "c1,c2,c3,c4,c5")->delimiter(',')->expected(5);
    sol->add_option("--grid", sol_grid, "t0,t1,nt,a0,a1,na")->delimiter(',')->expected(6);

    auto* exp = app.add_subcommand("expand", "Zeroth and first-order virial expansion terms with residuals");
    add_common(exp, expand_opt, "csv", "csv or json");
    int order = 1;
    std::vector<double> exp_constants, y_range, initial;
    std::size_t samples = 0;
    exp->add_option("--order", order, "0 or 1")->capture_default_str();
    exp->add_option("--constants", exp_constants, "c1,c2,c3")->delimiter(',')->expected(3);
    exp->add_option("--y-range", y_range, "y0,y1")->delimiter(',')->expected(2);
    exp->add_option("--initial", initial, "N0[,M1,N1,L1,K1] at y0")->delimiter(',')->expected(1, 5);
    exp->add_option("--samples", samples, "Output rows (order 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: Usage: %s\n", one_line(e.what()).c_str());
        return kUsage;
    }

    try {
        if (*verify) {
            if (verify_opt.format != "json") throw Failure{CF_INVALID_ARGUMENT, "verify writes json only"};
            auto config = load_config(verify_opt.config);
            cf_text* raw = nullptr;
            int passed = 0;
            check(cf_verify(config.get(), seed, verify_opt.tol.value_or(1e-10), &raw, &passed));
            TextPtr report(raw);
            emit(report.get(), verify_opt.out);
            return passed ? kOk : kVerifyFailed;
        }
        if (*fixed) {
            if (fp_opt.format != "json") throw Failure{CF_INVALID_ARGUMENT, "fixed-points writes json only"};
            if (!fp_opt.config.empty()) load_config(fp_opt.config);
            cf_text* raw = nullptr;
            check(cf_fixed_points(fA, fB, &raw));
            TextPtr text(raw);
            emit(text.get(), fp_opt.out);
            return kOk;
        }
        if (*port) {
            const auto format = parse_format(portrait_opt.format);
            if (!portrait_opt.config.empty()) load_config(portrait_opt.config);
            cf_window w;
            cf_window_default(&w);
            if (!window.empty()) {
                w.y_min = window[0];
                w.y_max = window[1];
                w.n_min = window[2];
                w.n_max = window[3];
            }
            if (!grid_counts.empty()) {
                w.y_count = grid_counts[0];
                w.n_count = grid_counts[1];
            }
            const auto seeds = seeds_path.empty() ? default_seeds(w) : read_seeds(seeds_path);
            cf_text* raw = nullptr;
            check(cf_portrait(pA, pB, &w, seeds.data(), seeds.size() / 2, s_max, portrait_opt.tol.value_or(1e-9),
                              format, &raw));
            TextPtr text(raw);
            emit(text.get(), portrait_opt.out);
            return kOk;
        }
        if (*sol) {
            const auto format = parse_format(solution_opt.format);
            auto config = load_config(solution_opt.config);
            cf_solution_request req;
            check(cf_solution_request_default(family, &req));
            if (!constants.empty()) {
                for (int i = 0; i < 5; ++i) req.constants[i] = constants[i];
            }
            if (!sol_grid.empty()) {
                if (sol_grid[2] < 2 || sol_grid[5] < 2) throw Failure{CF_INVALID_ARGUMENT, "grid counts must be >= 2"};
                req.t_min = sol_grid[0];
                req.t_max = sol_grid[1];
                req.t_count = static_cast<std::size_t>(sol_grid[2]);
                req.a_min = sol_grid[3];
                req.a_max = sol_grid[4];
                req.a_count = static_cast<std::size_t>(sol_grid[5]);
            }
            if (solution_opt.tol) req.quadrature_tol = *solution_opt.tol;
            cf_text* raw = nullptr;
            check(cf_solution(config.get(), &req, format, &raw));
            TextPtr text(raw);
            emit(text.get(), solution_opt.out);
            return kOk;
        }
        if (*exp) {
            const auto format = parse_format(expand_opt.format);
            auto config = load_config(expand_opt.config);
            cf_expand_request req;
            cf_expand_request_default(&req);
            req.order = order;
            if (!exp_constants.empty()) {
                for (int i = 0; i < 3; ++i) req.constants[i] = exp_constants[i];
            }
            if (!y_range.empty()) {
                req.y_min = y_range[0];
                req.y_max = y_range[1];
            }
            if (!initial.empty()) {
                req.n0_start = initial[0];
                for (std::size_t i = 1; i < initial.size(); ++i) req.initial[i - 1] = initial[i];
            }
            if (samples) req.samples = samples;
            if (expand_opt.tol) req.tol = *expand_opt.tol;
            cf_text* raw = nullptr;
            check(cf_expand(config.get(), &req, format, &raw));
            TextPtr text(raw);
            emit(text.get(), expand_opt.out);
            return kOk;
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s: %s\n", cf_status_name(f.status), one_line(f.message).c_str());
        return exit_code(f.status);
    }
    return kUsage;
}
