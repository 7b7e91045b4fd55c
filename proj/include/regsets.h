/* C interface to the regsets library: Ahlfors-David regular set
 * constructions at finite resolution. Opaque handles, integer status codes,
 * JSON strings for structured data. All functions are thread-compatible;
 * the last-error message is thread-local.
 */
#ifndef REGSETS_H
#define REGSETS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RS_API __declspec(dllexport)
#else
#define RS_API __attribute__((visibility("default")))
#endif

typedef struct rs_net rs_net;

typedef enum rs_status {
  RS_OK = 0,
  RS_ERR_EMPTY_NET = -1,
  RS_ERR_INVALID_RADIUS = -2,
  RS_ERR_SCALE_BELOW_RESOLUTION = -3,
  RS_ERR_CANNOT_RESCALE = -4,
  RS_ERR_EMPTY_REGION = -5,
  RS_ERR_GAP_NOT_FOUND = -6,
  RS_ERR_INVALID_LAMBDA = -7,
  RS_ERR_INVALID_DIMENSION = -8,
  RS_ERR_TOO_DEEP = -9,
  RS_ERR_BAD_ADDRESS = -10,
  RS_ERR_SPEC_MISMATCH = -11,
  RS_ERR_INSUFFICIENT_CHILDREN = -12,
  RS_ERR_INSUFFICIENT_TARGETS = -13,
  RS_ERR_OUTSIDE_DOMAIN = -14,
  RS_ERR_OUTSIDE_CELL = -15,
  RS_ERR_DEGENERATE_PAIR = -16,
  RS_ERR_DIRECTION_NOT_FOUND = -17,
  RS_ERR_SLAB_OVERLAP = -18,
  RS_ERR_PRECISION_LOSS = -19,
  RS_ERR_NO_VACANT_BALL = -20,
  RS_ERR_INVALID_PARAMS = -21,
  RS_ERR_INVALID_SCHEDULE = -22,
  RS_ERR_BUDGET_EXCEEDED = -23,
  RS_ERR_PARSE = -24,
  RS_ERR_IO = -25,
  RS_ERR_UNKNOWN = -99
} rs_status;

/* Library version as "major.minor.patch". */
RS_API const char* rs_version(void);

/* Human-readable name of a status code. */
RS_API const char* rs_status_name(rs_status status);

/* Message describing the most recent failure on this thread. */
RS_API const char* rs_last_error(void);

/* --- Nets ---------------------------------------------------------------- */

/* Euclidean net from row-major coordinates; count points of dimension dim. */
RS_API rs_status rs_net_create(int dim, const double* coords, const double* weights, size_t count,
                               double resolution, rs_net** out);

/* Standard Cantor net C(t, a) in R^n at the given depth. */
RS_API rs_status rs_net_cantor(int n, double t, double a, int depth, rs_net** out);

RS_API rs_status rs_net_load(const char* path, rs_net** out);
RS_API rs_status rs_net_save(const rs_net* net, const char* path);
RS_API void rs_net_free(rs_net* net);

RS_API size_t rs_net_size(const rs_net* net);
RS_API int rs_net_dim(const rs_net* net);
RS_API double rs_net_resolution(const rs_net* net);
RS_API rs_status rs_net_diameter(const rs_net* net, double* out);

/* Closed-ball query around an arbitrary center (dim doubles). Up to capacity
 * indices are stored; *count_out reports the full count, *mass_out the total
 * weight. */
RS_API rs_status rs_net_ball_query(const rs_net* net, const double* center, double r,
                                   size_t* index_buffer, size_t capacity, size_t* count_out,
                                   double* mass_out);

/* Empirical regularity constants over [r_min, r_max]:
 * inf and sup of mass(B(x, r)) / r^s. centers_sample = 0 scans every
 * positive-weight center. */
RS_API rs_status rs_net_estimate_regularity(const rs_net* net, double s, double r_min, double r_max,
                                            size_t centers_sample, int radii_per_decade,
                                            double* c_lower, double* C_upper);

/* Distance-rescaled copy with diameter 1; weights divide by diameter^s. */
RS_API rs_status rs_net_rescale_unit(const rs_net* net, double s, rs_net** out);

/* --- Pipelines ------------------------------------------------------------ */

/* Runs one command from a JSON config (see the net/config schemas in the
 * project README). On success *report_json receives a heap string to release
 * with rs_string_free; *all_passed is 1 when every verdict passed. A failed
 * run still produces a report when possible. */
RS_API rs_status rs_run(const char* config_json, char** report_json, int* all_passed);

RS_API void rs_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* REGSETS_H */
