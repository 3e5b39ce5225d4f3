#ifndef CURVEFLOW_CURVEFLOW_H
#define CURVEFLOW_CURVEFLOW_H

/* C interface to libcurveflow.
 *
 * Every function returns a cf_status. On failure the message of the most
 * recent error on the calling thread is available from cf_last_error() until
 * the next failing call. Objects returned through out-parameters are owned by
 * the caller and released with the matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CURVEFLOW_BUILDING)
#    define CF_API __declspec(dllexport)
#  else
#    define CF_API __declspec(dllimport)
#  endif
#else
#  define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
    CF_OK = 0,
    CF_INVALID_ARGUMENT,
    CF_DOMAIN_ERROR,
    CF_NON_FINITE_SAMPLE,
    CF_TOLERANCE_NOT_MET,
    CF_SINGULARITY_ENCOUNTERED,
    CF_NO_ROOTS,
    CF_OUTSIDE_VALIDITY,
    CF_DERIVATIVE_UNAVAILABLE,
    CF_NONDEGENERACY_VIOLATED,
    CF_ALT_FORM_UNAVAILABLE,
    CF_EMPTY_DOMAIN,
    CF_ON_BREAKING_PARABOLA,
    CF_DEGENERATE_SCALING,
    CF_SINGULAR_LEADING_COEFFICIENT,
    CF_OFF_TRAJECTORY,
    CF_UNSUPPORTED_ORDER,
    CF_CONFIG_ERROR,
    CF_IO_ERROR,
    CF_INTERNAL_ERROR
} cf_status;

typedef enum cf_format { CF_FORMAT_CSV = 0, CF_FORMAT_JSON = 1, CF_FORMAT_SVG = 2 } cf_format;

/* Opaque handles. */
typedef struct cf_config cf_config;
typedef struct cf_text cf_text;

CF_API const char* cf_version(void);
/* Upper-camel name of a status, e.g. "UnsupportedOrder". */
CF_API const char* cf_status_name(cf_status status);
CF_API const char* cf_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* R = 1, n = 3, k = 1, g = 1, lambda = 0.5, ideal gas. */
CF_API cf_status cf_config_default(cf_config** out);
CF_API cf_status cf_config_parse(const char* json, cf_config** out);
CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API void cf_config_free(cf_config* config);
CF_API cf_status cf_config_to_json(const cf_config* config, cf_text** out);
/* omega = sqrt(2 lambda g) */
CF_API cf_status cf_config_omega(const cf_config* config, double* out);
CF_API cf_status cf_config_n(const cf_config* config, int* out);

/* ---- text results ----------------------------------------------------- */

CF_API const char* cf_text_data(const cf_text* text);
CF_API size_t cf_text_size(const cf_text* text);
CF_API void cf_text_free(cf_text* text);

/* ---- commands --------------------------------------------------------- */

/* JSON list of {y, N0, class, trace, det, multiplicity}. */
CF_API cf_status cf_fixed_points(double A, double B, cf_text** out);

typedef struct cf_window {
    double y_min, y_max;
    double n_min, n_max;
    size_t y_count, n_count;
} cf_window;

/* [-1, 3] x [-2, 2] on a 21 x 21 grid. */
CF_API void cf_window_default(cf_window* window);

/* seeds holds seed_count (y, N0) pairs; each is integrated both ways for |s| <= s_max. */
CF_API cf_status cf_portrait(double A, double B, const cf_window* window, const double* seeds, size_t seed_count,
                             double s_max, double tol, cf_format format, cf_text** out);

typedef struct cf_solution_request {
    int family;
    double constants[5];
    /* Zero counts select a 20 x 20 grid around the reference time. */
    double t_min, t_max;
    size_t t_count;
    double a_min, a_max;
    size_t a_count;
    double quadrature_tol;
} cf_solution_request;

/* Family 1: constants (1, 2, 0, 0, 0); family 2: (1, 2, 0, 0, -1). */
CF_API cf_status cf_solution_request_default(int family, cf_solution_request* request);
CF_API cf_status cf_solution(const cf_config* config, const cf_solution_request* request, cf_format format,
                             cf_text** out);

typedef struct cf_expand_request {
    int order;
    double constants[3];
    double y_min, y_max;
    double n0_start;
    double initial[4]; /* M1, N1, L1, K1 at y_min */
    double tol;
    size_t samples;
} cf_expand_request;

CF_API void cf_expand_request_default(cf_expand_request* request);
CF_API cf_status cf_expand(const cf_config* config, const cf_expand_request* request, cf_format format,
                           cf_text** out);

/* JSON report; *all_passed is set to 1 when every property passes. */
CF_API cf_status cf_verify(const cf_config* config, uint64_t seed, double quadrature_tol, cf_text** report,
                           int* all_passed);

/* ---- point evaluations ------------------------------------------------ */

/* (A y N0 + B N0 + y) / (y - N0^2) */
CF_API cf_status cf_flow_temperature_rhs(double A, double B, double y, double n0, double* out);

/* jet = {x, y, K, L, M, N, K_x, K_y, L_x, L_y, M_x, M_y, N_x, N_y}; writes q1..q4. */
CF_API cf_status cf_quotient_residual(const cf_config* config, const double jet[14], double residual[4]);

/* (u, rho, theta) and the three Euler residuals of an exact family at (t, a). */
CF_API cf_status cf_solution_point(const cf_config* config, const cf_solution_request* request, double t, double a,
                                   double values[3], double residual[3]);

#ifdef __cplusplus
}
#endif

#endif
