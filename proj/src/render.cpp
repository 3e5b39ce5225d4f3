#include "curveflow/render.hpp"

#include "curveflow/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace curveflow {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest form that round-trips.
std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json fixed_point_entry(const FixedPoint& fp) {
    ordered_json e;
    e["y"] = fp.y;
    e["N0"] = fp.N;
    e["class"] = std::string(eigen_class_name(fp.cls));
    e["trace"] = fp.spectrum.trace;
    e["det"] = fp.spectrum.det;
    e["multiplicity"] = fp.multiplicity;
    return e;
}

// Maps the (y, N) window onto an SVG canvas with N increasing upwards.
struct Canvas {
    static constexpr double size = 640.0;
    static constexpr double margin = 48.0;
    double y_min, y_max, N_min, N_max;

    double px(double y) const { return margin + (y - y_min) / (y_max - y_min) * (size - 2 * margin); }
    double py(double N) const { return size - margin - (N - N_min) / (N_max - N_min) * (size - 2 * margin); }
    bool contains(double y, double N) const { return y >= y_min && y <= y_max && N >= N_min && N <= N_max; }
};

std::string polyline(const Canvas& c, const std::vector<std::array<double, 2>>& pts, std::string_view cls) {
    std::string out = fmt::format("<polyline class=\"{}\" points=\"", cls);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ' ';
        out += fmt::format("{:.2f},{:.2f}", c.px(pts[i][0]), c.py(pts[i][1]));
    }
    out += "\"/>\n";
    return out;
}

} // namespace

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    if (name == "svg") return OutputFormat::Svg;
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown output format '{}' (csv, json or svg)", name));
}

std::string_view output_format_name(OutputFormat f) noexcept {
    switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Svg: return "svg";
    }
    return "?";
}

std::string fixed_points_json(const std::vector<FixedPoint>& points) {
    auto doc = ordered_json::array();
    for (const auto& fp : points) doc.push_back(fixed_point_entry(fp));
    return dump(doc);
}

// ---------------------------------------------------------------------------
// Portraits

std::string portrait_csv(const Portrait& p) {
    std::string out = "kind,index,s,y,N0,dy,dN0\n";
    for (std::size_t i = 0; i < p.directions.size(); ++i) {
        const auto& d = p.directions[i];
        out += fmt::format("direction,{},,{},{},{},{}\n", i, num(d.y), num(d.N), num(d.dy), num(d.dN));
    }
    for (std::size_t i = 0; i < p.trajectories.size(); ++i) {
        for (const auto& s : p.trajectories[i].samples) {
            out += fmt::format("trajectory,{},{},{},{},,\n", i, num(s.s), num(s.y), num(s.N));
        }
    }
    return out;
}

std::string portrait_json(const Portrait& p) {
    ordered_json doc;
    doc["A"] = p.params.A;
    doc["B"] = p.params.B;
    doc["window"] = {{"y", {p.window.first.min, p.window.first.max, p.window.first.count}},
                     {"N0", {p.window.second.min, p.window.second.max, p.window.second.count}}};
    auto& fps = doc["fixed_points"] = ordered_json::array();
    for (const auto& fp : p.fixed_points) fps.push_back(fixed_point_entry(fp));
    auto& dirs = doc["directions"] = ordered_json::array();
    for (const auto& d : p.directions) dirs.push_back({d.y, d.N, d.dy, d.dN});
    auto& trs = doc["trajectories"] = ordered_json::array();
    for (const auto& t : p.trajectories) {
        ordered_json e;
        e["termination"] = std::string(termination_name(t.reason));
        auto& s = e["samples"] = ordered_json::array();
        for (const auto& x : t.samples) s.push_back({x.s, x.y, x.N});
        auto& c = e["parabola_crossings"] = ordered_json::array();
        for (const auto& x : t.parabola_crossings) c.push_back({x.s, x.y, x.N});
        trs.push_back(std::move(e));
    }
    auto& par = doc["parabola"] = ordered_json::array();
    for (const auto& q : p.parabola) par.push_back({q[0], q[1]});
    return dump(doc);
}

std::string portrait_svg(const Portrait& p) {
    const Canvas c{p.window.first.min, p.window.first.max, p.window.second.min, p.window.second.max};
    const double S = Canvas::size;
    std::string out;
    out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
                       S);
    out += "<style>.direction{stroke:#999;stroke-width:1}.parabola{fill:none;stroke:#c33;stroke-width:1.5;"
           "stroke-dasharray:6 4}.trajectory{fill:none;stroke:#247;stroke-width:1.2}.fixed-point{fill:#000}"
           "text{font-family:sans-serif;font-size:12px}</style>\n";
    out += fmt::format("<rect x=\"{0:.2f}\" y=\"{0:.2f}\" width=\"{1:.2f}\" height=\"{1:.2f}\" fill=\"none\" "
                       "stroke=\"#000\"/>\n",
                       Canvas::margin, S - 2 * Canvas::margin);
    out += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\">A = {}, B = {}</text>\n", S / 2,
                       num(p.params.A), num(p.params.B));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">y</text>\n", S / 2, S - 14);
    out += fmt::format("<text x=\"14\" y=\"{:.2f}\" text-anchor=\"middle\">N0</text>\n", S / 2);
    for (double y : {c.y_min, c.y_max}) {
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", c.px(y),
                           S - Canvas::margin + 16, num(y));
    }
    for (double N : {c.N_min, c.N_max}) {
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", Canvas::margin - 4,
                           c.py(N) + 4, num(N));
    }

    // Direction ticks scaled to a fraction of the smaller cell side.
    const double cell = std::min((S - 2 * Canvas::margin) / std::max<double>(1, p.window.first.count - 1),
                                 (S - 2 * Canvas::margin) / std::max<double>(1, p.window.second.count - 1));
    const double half = 0.35 * cell;
    for (const auto& d : p.directions) {
        // Screen y grows downwards.
        const double x0 = c.px(d.y), y0 = c.py(d.N);
        out += fmt::format("<line class=\"direction\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n",
                           x0 - half * d.dy, y0 + half * d.dN, x0 + half * d.dy, y0 - half * d.dN);
    }

    if (!p.parabola.empty()) out += polyline(c, p.parabola, "parabola");
    for (const auto& t : p.trajectories) {
        if (t.samples.size() < 2) continue;
        std::vector<std::array<double, 2>> pts;
        pts.reserve(t.samples.size());
        for (const auto& s : t.samples) pts.push_back({s.y, s.N});
        out += polyline(c, pts, "trajectory");
    }
    for (const auto& fp : p.fixed_points) {
        if (!c.contains(fp.y, fp.N)) continue;
        out += fmt::format("<circle class=\"fixed-point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\"><title>({}, {}) {}"
                           "</title></circle>\n",
                           c.px(fp.y), c.py(fp.N), num(fp.y), num(fp.N), eigen_class_name(fp.cls));
    }
    out += "</svg>\n";
    return out;
}

std::string render_portrait(const Portrait& p, OutputFormat f) {
    switch (f) {
    case OutputFormat::Csv: return portrait_csv(p);
    case OutputFormat::Json: return portrait_json(p);
    case OutputFormat::Svg: return portrait_svg(p);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown output format");
}

// ---------------------------------------------------------------------------
// Exact solutions

Grid2D default_solution_grid(const ExactSolution& sol, std::size_t t_count, std::size_t a_count) {
    const double t0 = sol.reference_time();
    const double half = std::min(1.0, 0.6 * (sol.time_window().second - t0));
    return {Grid1D::make(t0 - half, t0 + half, t_count), Grid1D::make(0.1, 2.0, a_count)};
}

SolutionTable tabulate_solution(const ExactSolution& sol, const GasParams& gas, const Grid2D& grid) {
    const auto pot = ideal_gas_potential(gas.n());
    SolutionTable table;
    table.constants = sol.constants();
    table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.first.count; ++i) {
        for (std::size_t k = 0; k < grid.second.count; ++k) {
            SolutionRow row;
            row.t = grid.first.point(i);
            row.a = grid.second.point(k);
            row.valid = sol.valid(row.t, row.a);
            if (row.valid) {
                row.values = sol.values(row.t, row.a);
                row.residual = euler_residual(sol, gas, pot, row.t, row.a);
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

std::string solution_csv(const SolutionTable& table) {
    std::string out = "t,a,u,rho,theta,r1,r2,r3,valid\n";
    for (const auto& r : table.rows) {
        if (r.valid) {
            out += fmt::format("{},{},{},{},{},{},{},{},1\n", num(r.t), num(r.a), num(r.values.u), num(r.values.rho),
                               num(r.values.theta), num(r.residual[0]), num(r.residual[1]), num(r.residual[2]));
        } else {
            out += fmt::format("{},{},,,,,,,0\n", num(r.t), num(r.a));
        }
    }
    return out;
}

std::string solution_json(const SolutionTable& table) {
    ordered_json doc;
    doc["family"] = table.constants.family;
    doc["constants"] = table.constants.c;
    auto& rows = doc["rows"] = ordered_json::array();
    double worst = 0.0;
    for (const auto& r : table.rows) {
        ordered_json e;
        e["t"] = r.t;
        e["a"] = r.a;
        e["valid"] = r.valid;
        if (r.valid) {
            e["u"] = r.values.u;
            e["rho"] = r.values.rho;
            e["theta"] = r.values.theta;
            e["residual"] = r.residual;
            for (double v : r.residual) worst = std::max(worst, std::abs(v));
        }
        rows.push_back(std::move(e));
    }
    doc["max_residual"] = worst;
    return dump(doc);
}

// ---------------------------------------------------------------------------
// Expansion

ExpansionTable expand(const GasConfig& config, const ExpansionRequest& req) {
    if (req.order != 0 && req.order != 1) {
        throw Error(ErrorCode::UnsupportedOrder, fmt::format("expansion order {} is not supported (0 or 1)", req.order));
    }
    if (!(req.y_range[0] < req.y_range[1])) throw Error(ErrorCode::InvalidArgument, "y range must be increasing");
    const auto& gas = config.gas;
    const ZerothEquation eq{req.constants[0], req.constants[1], req.constants[2], gas.R(), gas.omega()};
    const auto term = ZerothTerm::integrate(eq, req.y_range[0], req.N0_start, req.y_range[1]);
    if (term.truncated()) {
        throw Error(ErrorCode::SingularityEncountered,
                    fmt::format("zeroth-order solution breaks down at y = {} before the end of the range",
                                term.domain()[1]));
    }

    ExpansionTable table;
    table.order = req.order;
    if (req.order == 0) {
        for (const auto& s : term.samples()) {
            ExpansionRow row;
            row.y = s.t;
            row.N0 = s.y[0];
            row.zeroth_residual = zeroth_residual(term.jet_at(row.y, row.N0), gas.R(), gas.omega());
            table.rows.push_back(row);
        }
        return table;
    }

    const auto coeffs = config.potential.coefficients();
    const VirialCoefficient A1 = coeffs.empty() ? Polynomial({0.0}) : coeffs[0];
    const auto sol = integrate_first_order(term, gas, A1, req.y_range, req.initial, req.tol, req.samples);
    for (const auto& s : sol.samples) {
        ExpansionRow row;
        row.y = s.y;
        row.N0 = s.N0;
        row.zeroth_residual = zeroth_residual(term.jet_at(s.y, s.N0), gas.R(), gas.omega());
        row.first = s.state;
        row.first_residual = s.residual;
        table.rows.push_back(row);
    }
    return table;
}

std::string expansion_csv(const ExpansionTable& table) {
    std::string out = "y,N0,e1,e2,e3,e4";
    if (table.order == 1) out += ",M1,N1,L1,K1,f1,f2,f3,f4";
    out += '\n';
    for (const auto& r : table.rows) {
        out += fmt::format("{},{},{},{},{},{}", num(r.y), num(r.N0), num(r.zeroth_residual[0]),
                           num(r.zeroth_residual[1]), num(r.zeroth_residual[2]), num(r.zeroth_residual[3]));
        if (table.order == 1) {
            out += fmt::format(",{},{},{},{},{},{},{},{}", num(r.first.M1), num(r.first.N1), num(r.first.L1),
                               num(r.first.K1), num(r.first_residual[0]), num(r.first_residual[1]),
                               num(r.first_residual[2]), num(r.first_residual[3]));
        }
        out += '\n';
    }
    return out;
}

std::string expansion_json(const ExpansionTable& table) {
    ordered_json doc;
    doc["order"] = table.order;
    auto& rows = doc["rows"] = ordered_json::array();
    std::array<double, 4> worst0{}, worst1{};
    for (const auto& r : table.rows) {
        ordered_json e;
        e["y"] = r.y;
        e["N0"] = r.N0;
        e["zeroth_residual"] = r.zeroth_residual;
        for (std::size_t i = 0; i < 4; ++i) worst0[i] = std::max(worst0[i], std::abs(r.zeroth_residual[i]));
        if (table.order == 1) {
            e["M1"] = r.first.M1;
            e["N1"] = r.first.N1;
            e["L1"] = r.first.L1;
            e["K1"] = r.first.K1;
            e["first_residual"] = r.first_residual;
            for (std::size_t i = 0; i < 4; ++i) worst1[i] = std::max(worst1[i], std::abs(r.first_residual[i]));
        }
        rows.push_back(std::move(e));
    }
    doc["max_zeroth_residual"] = worst0;
    if (table.order == 1) doc["max_first_residual"] = worst1;
    return dump(doc);
}

} // namespace curveflow
