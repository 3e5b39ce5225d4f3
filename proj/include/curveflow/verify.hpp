#pragma once

// Cross-module verification suite. Each property reports the largest residual
// it saw against its tolerance. Random samples come from fixed seeds, so the
// report for a given configuration is reproducible byte for byte.

#include "curveflow/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace curveflow {

struct PropertyResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    bool passed = false;
    /// Empty on success; otherwise the first failing case.
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20240611;
    /// Quadrature tolerance for the exact Euler families.
    double quadrature_tol = 1e-10;
};

struct VerifyReport {
    std::vector<PropertyResult> properties;

    bool all_passed() const noexcept;
    const PropertyResult* find(std::string_view name) const noexcept;
};

// Individual properties. The gas-dependent ones use the ideal gas of the
// configured n for the exact families and the configured R, k, omega elsewhere.

/// Equilibria and classes of the four reference (A, B) pairs.
PropertyResult check_fixed_point_inventory();
/// Constant-type solutions, n in {3, 4, 5}, three constant sets, both branches.
PropertyResult check_quotient_exactness(std::uint64_t seed);
/// Both exact families on 20 x 20 (t, a) grids.
PropertyResult check_euler_exactness(const GasConfig& config, double quadrature_tol);
/// Flow invariants of the families against the constant-type closed forms.
PropertyResult check_flow_quotient_correspondence(const GasConfig& config, double quadrature_tol, std::uint64_t seed);
/// Direct against factored determinants of both symbols, relative.
PropertyResult check_symbol_identities(std::uint64_t seed);
/// Zeroth-order residuals, each divided by max(1, sum of its absolute terms).
PropertyResult check_zeroth_residual(const GasConfig& config);
PropertyResult check_telescoping(const GasConfig& config);
/// First-order residuals for A1 in {0, 1, y} plus the configured A1, if any.
PropertyResult check_first_order(const GasConfig& config);
/// Exact partials of potentials, pressure/entropy, constant-type solutions and
/// the Euler families against finite differences.
PropertyResult check_exact_derivatives(const GasConfig& config, std::uint64_t seed);
/// ode_solve at tol 1e-6 against a 1e-9 reference.
PropertyResult check_ode_self_convergence();
/// (A, B) = (2, -3) seeded at (1.05, 1.05) stays in the annulus around (1, 1).
PropertyResult check_centre_annulus();

/// Throws InvalidArgument when the configuration cannot host both families (n = 2).
VerifyReport run_verification(const GasConfig& config, const VerifyOptions& options = {});

std::string verify_report_json(const GasConfig& config, const VerifyOptions& options, const VerifyReport& report);

} // namespace curveflow
