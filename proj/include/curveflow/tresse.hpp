#pragma once

namespace curveflow {

// Lie-Tresse coordinates of a flow at one point:
// (x, y, K, L, M, N) = (rho, theta, u_a, rho_a, theta_a, theta_t + u theta_a).
struct TressePoint {
    double x = 0.0;
    double y = 0.0;
    double K = 0.0;
    double L = 0.0;
    double M = 0.0;
    double N = 0.0;
};

} // namespace curveflow
