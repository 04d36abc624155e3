#ifndef SEPKERN_H
#define SEPKERN_H

/* C interface to the separable-kernel operator library.
 *
 * All functions returning sk_status set a thread-local error message
 * retrievable with sk_last_error() on failure. Strings returned through
 * char** out-parameters are heap-allocated; release them with
 * sk_string_free(). Operators are opaque handles released with
 * sk_operator_free().
 */

#include <stddef.h>

#if defined(_WIN32)
#  define SEPKERN_API __declspec(dllexport)
#else
#  define SEPKERN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
    SK_OK = 0,
    SK_ERR_ARGUMENT = 1,   /* invalid argument / precondition violation */
    SK_ERR_DOMAIN = 2,     /* evaluation outside an atom's admissible domain */
    SK_ERR_NUMERICAL = 3,  /* quadrature / consistency failure */
    SK_ERR_PARSE = 4,      /* malformed JSON input */
    SK_ERR_UNKNOWN = 5
} sk_status;

typedef struct sk_operator sk_operator;

SEPKERN_API const char* sk_version(void);

/* Message for the most recent failure on this thread ("" if none). */
SEPKERN_API const char* sk_last_error(void);

SEPKERN_API void sk_string_free(char* s);

/* Gauss-Legendre nodes per quadrature panel (2..512). The environment
 * variable SEPKERN_QUAD_NODES provides the initial value. */
SEPKERN_API sk_status sk_set_default_quad_nodes(int n);

/* ---- operators -------------------------------------------------------- */

SEPKERN_API sk_status sk_operator_from_json(const char* json_text, sk_operator** out);
SEPKERN_API void sk_operator_free(sk_operator* op);
SEPKERN_API sk_status sk_operator_to_json(const sk_operator* op, char** json_out);

/* ---- pairing / closed forms ------------------------------------------- */

/* Q_G(u, v) over G = [lo, hi] for two atoms given as JSON. */
SEPKERN_API sk_status sk_pair_atoms(const char* atom_u_json, const char* atom_v_json,
                                    double lo, double hi, double* value_out);

SEPKERN_API double sk_sigma1(double omega, double a1, double b1);
SEPKERN_API double sk_sigma2(double omega, double a1, double b1);

/* Determinant of the four-term trigonometric family's 4x4 system matrix. */
SEPKERN_API sk_status sk_detv_trig(const double theta_a[4], double delta,
                                   double sigma1, double sigma2, double* out);

/* ---- operator algebra -------------------------------------------------- */

SEPKERN_API sk_status sk_compose(const sk_operator* a, const sk_operator* b,
                                 sk_operator** out);
SEPKERN_API sk_status sk_power(const sk_operator* a, int m, sk_operator** out);

/* L2 norm of AB - BA over (hull of left supports) x (domain intersection). */
SEPKERN_API sk_status sk_commutator_norm(const sk_operator* a, const sk_operator* b,
                                         double* out);

/* Covariance check AB = B F(A); poly holds F's coefficients, constant first.
 * The report (JSON) carries holds, the three region residuals, tolerance,
 * method, scale and the violated condition number. */
SEPKERN_API sk_status sk_check_covariance(const sk_operator* a, const sk_operator* b,
                                          const double* poly, size_t n_coeffs, double tol,
                                          char** report_json_out);

/* ---- scenarios / reproduction ------------------------------------------ */

/* Runs a version-1 scenario. command_override may be NULL; when given it must
 * match the scenario's command (or supplies it when absent). exit code:
 * 0 expectation met, 1 check failed, 2 input or numerical error. */
SEPKERN_API sk_status sk_run_scenario(const char* scenario_json,
                                      const char* command_override,
                                      char** report_json_out, char** text_out,
                                      int* exit_code_out);

/* Reproduction programs: any family id, or "case2a-detv-factorization". */
SEPKERN_API sk_status sk_reproduce(const char* id, unsigned seed, double tol,
                                   char** report_json_out, char** text_out,
                                   int* exit_code_out);

/* Sorted {"families": [{"id":..., "description":...}, ...]} listing. */
SEPKERN_API sk_status sk_list_families(char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SEPKERN_H */
