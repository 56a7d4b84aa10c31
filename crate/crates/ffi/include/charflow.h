#ifndef CHARFLOW_H
#define CHARFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_ARGUMENT = 2,
  CF_STATUS_PARSE = 3,
  // The point or data lies outside where the problem is solvable.
  CF_STATUS_DOMAIN = 4,
  CF_STATUS_NUMERICS = 5,
  CF_STATUS_PANIC = 6,
} CfStatus;

typedef enum CfForm {
  CF_FORM_Y_OF_X = 0,
  CF_FORM_X_OF_Y = 1,
  CF_FORM_POLAR = 2,
} CfForm;

typedef enum CfInvariant {
  CF_INVARIANT_FIRST = 0,
  CF_INVARIANT_SECOND = 1,
} CfInvariant;

typedef enum CfCellClass {
  CF_CELL_CLASS_COVERED = 0,
  CF_CELL_CLASS_SUPPORT = 1,
  CF_CELL_CLASS_EXTERIOR_UNCOVERED = 2,
  CF_CELL_CLASS_GAP = 3,
} CfCellClass;

// Coverage classification of a window with its gap components.
typedef struct CfDomainGrid CfDomainGrid;

// A one-parameter family of characteristic curves.
typedef struct CfFamily CfFamily;

// Forward solution of a Cauchy problem.
typedef struct CfSolution CfSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `len`) and returns the full message length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t cf_last_error_message(char *buf, size_t len);

// Builds the forward solution for `u(x, 0) = tau(x)`, `u_y(x, 0) = nu(x)`
// on `[a, b]`. `tol` of 0 selects the default tolerance.
//
// # Safety
// `tau` and `nu` must be NUL-terminated strings; `out` must be writable.
enum CfStatus cf_solution_new(double a,
                              double b,
                              const char *tau,
                              const char *nu,
                              double tol,
                              struct CfSolution **out);

// # Safety
// `sol` must be null or a handle from [`cf_solution_new`] not yet freed.
void cf_solution_free(struct CfSolution *sol);

// # Safety
// `sol` must be a live handle; `u` must be writable.
enum CfStatus cf_solution_solve_u(const struct CfSolution *sol, double x, double y, double *u);

// Characteristic directions at `(x, y)` as `[dx1, dy1, dx2, dy2]`.
//
// # Safety
// `sol` must be a live handle; `out` must point to 4 writable doubles.
enum CfStatus cf_solution_directions(const struct CfSolution *sol, double x, double y, double *out);

// Family from an expression `phi` in variables `x`/`y` (or `r`, `theta`
// for the polar form) and `c`, scanned over `c ∈ [c_lo, c_hi]`.
//
// # Safety
// `phi` must be a NUL-terminated string; `out` must be writable.
enum CfStatus cf_family_new(enum CfForm form,
                            const char *phi,
                            enum CfInvariant inv,
                            double c_lo,
                            double c_hi,
                            struct CfFamily **out);

// One of the two families of a built-in example (`example` 1, 2 or 3).
//
// # Safety
// `out` must be writable.
enum CfStatus cf_family_from_example(uint32_t example,
                                     double a,
                                     double b,
                                     enum CfInvariant inv,
                                     struct CfFamily **out);

// # Safety
// `fam` must be null or a live family handle.
void cf_family_free(struct CfFamily *fam);

// Parameter of the curve of `fam` through `(x, y)`.
//
// # Safety
// `fam` must be a live handle; `c` must be writable.
enum CfStatus cf_family_param(const struct CfFamily *fam, double x, double y, double *c);

// Gradient `(u_x, u_y)` from a first-family tangent `(dx1, dy1)` and a
// second-family tangent `(dx2, dy2)`.
//
// # Safety
// `u_x` and `u_y` must be writable.
enum CfStatus cf_recover_pointwise(double dx1,
                                   double dy1,
                                   double dx2,
                                   double dy2,
                                   double *u_x,
                                   double *u_y);

// Recovers `τ'`, `ν` and `τ` (with `τ(norm_x) = norm_u`) at `n` uniform
// samples of `[lo, hi]`. Each output array holds `n` doubles.
//
// # Safety
// Family handles must be live; output pointers must hold `n` doubles.
enum CfStatus cf_recover_line(const struct CfFamily *fam1,
                              const struct CfFamily *fam2,
                              double lo,
                              double hi,
                              size_t n,
                              double norm_x,
                              double norm_u,
                              double *x,
                              double *tau_prime,
                              double *nu,
                              double *tau);

// Recovers `u_x`, `u_y` and `u` (with `u(1, norm_theta) = norm_u`) on the
// unit circle at the `n` increasing angles `theta`.
//
// # Safety
// Family handles must be live; `theta` and the outputs must hold `n` doubles.
enum CfStatus cf_recover_circle(const struct CfFamily *fam1,
                                const struct CfFamily *fam2,
                                const double *theta,
                                size_t n,
                                double norm_theta,
                                double norm_u,
                                double *u_x,
                                double *u_y,
                                double *u);

// Classifies an `nx × ny` grid over `[x0, x1] × [y0, y1]`. The support is
// the segment `[s_lo, s_hi]` of `y = 0`, or the unit circle when
// `unit_circle` is true.
//
// # Safety
// Family handles must be live; `out` must be writable.
enum CfStatus cf_domain_grid_new(const struct CfFamily *fam1,
                                 const struct CfFamily *fam2,
                                 bool unit_circle,
                                 double s_lo,
                                 double s_hi,
                                 double x0,
                                 double x1,
                                 double y0,
                                 double y1,
                                 size_t nx,
                                 size_t ny,
                                 struct CfDomainGrid **out);

// # Safety
// `grid` must be null or a live grid handle.
void cf_domain_grid_free(struct CfDomainGrid *grid);

// # Safety
// `grid` must be a live handle; `class` must be writable.
enum CfStatus cf_domain_grid_class(const struct CfDomainGrid *grid,
                                   size_t i,
                                   size_t j,
                                   enum CfCellClass *class_);

// Number of gap components.
//
// # Safety
// `grid` must be a live handle; `count` must be writable.
enum CfStatus cf_domain_grid_gap_count(const struct CfDomainGrid *grid, size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARFLOW_H */
