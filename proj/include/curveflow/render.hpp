#pragma once

// Text serializations of results: CSV, JSON and a minimal hand-written SVG.
// Numbers are printed with 17 significant digits so reruns are byte-identical.

#include "curveflow/config.hpp"
#include "curveflow/euler_system.hpp"
#include "curveflow/virial_flow.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace curveflow {

enum class OutputFormat { Csv, Json, Svg };

/// Throws InvalidArgument for anything but csv, json or svg.
OutputFormat parse_output_format(std::string_view name);
std::string_view output_format_name(OutputFormat f) noexcept;

/// [{y, N0, class, trace, det, multiplicity}, ...]
std::string fixed_points_json(const std::vector<FixedPoint>& points);

/// One row per direction-grid cell followed by one row per trajectory sample.
std::string portrait_csv(const Portrait& p);
std::string portrait_json(const Portrait& p);
std::string portrait_svg(const Portrait& p);
std::string render_portrait(const Portrait& p, OutputFormat f);

struct SolutionRow {
    double t = 0.0, a = 0.0;
    bool valid = false;
    FlowValues values;
    std::array<double, 3> residual{};
};

struct SolutionTable {
    SolutionConstants constants;
    std::vector<SolutionRow> rows;
};

/// A t-grid around the reference time inside the validity window, a in [0.1, 2].
Grid2D default_solution_grid(const ExactSolution& sol, std::size_t t_count = 20, std::size_t a_count = 20);

/// Points outside validity are kept and flagged rather than evaluated.
SolutionTable tabulate_solution(const ExactSolution& sol, const GasParams& gas, const Grid2D& grid);

/// Columns t, a, u, rho, theta, r1, r2, r3, valid. Invalid rows leave the field columns empty.
std::string solution_csv(const SolutionTable& table);
std::string solution_json(const SolutionTable& table);

struct ExpansionRequest {
    int order = 1;
    /// c1, c2, c3 of the zeroth-order equation.
    std::array<double, 3> constants{1.0, 1.0, 3.0};
    std::array<double, 2> y_range{0.5, 1.5};
    double N0_start = -1.0;
    FirstOrderState initial;
    double tol = 1e-8;
    std::size_t samples = 801;
};

struct ExpansionRow {
    double y = 0.0;
    double N0 = 0.0;
    std::array<double, 4> zeroth_residual{};
    FirstOrderState first;
    std::array<double, 4> first_residual{};
};

struct ExpansionTable {
    int order = 0;
    std::vector<ExpansionRow> rows;
};

// A1 is the first virial coefficient of the configured potential (zero for the
// ideal gas). Throws UnsupportedOrder for orders other than 0 and 1.
ExpansionTable expand(const GasConfig& config, const ExpansionRequest& request);

/// Columns y, N0, e1..e4 and, at order 1, M1, N1, L1, K1, f1..f4.
std::string expansion_csv(const ExpansionTable& table);
std::string expansion_json(const ExpansionTable& table);

} // namespace curveflow
