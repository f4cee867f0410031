/* C interface of the fiber generation library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function returning fg_status leaves a message for fg_last_error()
 * on failure; the message is per thread and valid until the next call. */
#ifndef FIBERGEN_H
#define FIBERGEN_H

#include <stddef.h>

#if defined(_WIN32)
#define FG_API __declspec(dllexport)
#else
#define FG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fg_status {
  FG_OK = 0,
  FG_ERR_PARAMETER = 1, /* bad parameter value, flag or configuration */
  FG_ERR_MESH_IO = 2,   /* unreadable or invalid mesh, file errors */
  FG_ERR_SOLVER = 3,    /* ill-posed or unconverged linear solve */
  FG_ERR_INVALID_ARGUMENT = 4,
  FG_ERR_INTERNAL = 5
} fg_status;

typedef enum fg_element_kind { FG_TET4 = 0, FG_HEX8 = 1 } fg_element_kind;
typedef enum fg_format { FG_FORMAT_PRM = 0, FG_FORMAT_JSON = 1, FG_FORMAT_XML = 2 } fg_format;
typedef enum fg_verbosity { FG_MINIMAL = 0, FG_STANDARD = 1, FG_FULL = 2 } fg_verbosity;

typedef struct fg_mesh fg_mesh;
typedef struct fg_params fg_params;
typedef struct fg_result fg_result;

typedef struct fg_mesh_stats {
  double h_min, h_avg, h_max;
  double quality_max;
  size_t n_elements, n_vertices;
} fg_mesh_stats;

typedef struct fg_sensitivity {
  double avg_deg, max_deg;
  size_t n_points, n_outside;
} fg_sensitivity;

FG_API const char* fg_version(void);
FG_API const char* fg_last_error(void);
/* Symbolic name of the last error, e.g. "PatternMismatch"; "" after success. */
FG_API const char* fg_last_error_code(void);
/* Releases memory handed out by the library (strings, arrays). */
FG_API void fg_free(void* p);

/* ---- meshes ---- */
FG_API fg_status fg_mesh_read(const char* path, fg_mesh** out);
/* version is 41 or 22 */
FG_API fg_status fg_mesh_write(const fg_mesh* mesh, const char* path, int version);
FG_API fg_status fg_mesh_generate_slab(double lx, double ly, double lz, int nx, int ny, int nz, fg_element_kind kind,
                                       fg_mesh** out);
FG_API fg_status fg_mesh_generate_shell(double r_inner, double r_outer, int n_surface, int n_layers,
                                        fg_element_kind kind, fg_mesh** out);
FG_API fg_status fg_mesh_generate_ventricle(int complete, int n_surface, int n_layers, fg_element_kind kind,
                                            fg_mesh** out);
FG_API fg_status fg_mesh_generate_atrium(double r_inner, double r_outer, int n_surface, int n_layers,
                                         fg_element_kind kind, fg_mesh** out);
FG_API fg_status fg_mesh_scale(const fg_mesh* mesh, double factor, fg_mesh** out);
FG_API fg_status fg_mesh_refine(const fg_mesh* mesh, int steps, fg_mesh** out);
FG_API size_t fg_mesh_num_vertices(const fg_mesh* mesh);
FG_API size_t fg_mesh_num_cells(const fg_mesh* mesh);
FG_API fg_element_kind fg_mesh_kind(const fg_mesh* mesh);
/* xyz holds 3 * fg_mesh_num_vertices doubles */
FG_API fg_status fg_mesh_vertices(const fg_mesh* mesh, double* xyz);
FG_API fg_status fg_mesh_statistics(const fg_mesh* mesh, fg_mesh_stats* out);
FG_API void fg_mesh_free(fg_mesh* mesh);

/* ---- parameters (the fiber-generation tree) ---- */
FG_API fg_status fg_params_create(fg_params** out);
FG_API fg_status fg_params_parse(fg_params* params, const char* text, fg_format format);
FG_API fg_status fg_params_read_file(fg_params* params, const char* path);
/* path uses '/' between subsections, e.g. "Fiber generation/Output/Filename" */
FG_API fg_status fg_params_set(fg_params* params, const char* path, const char* value);
/* Returns a copy to release with fg_free. */
FG_API fg_status fg_params_get(const fg_params* params, const char* path, char** value);
FG_API fg_status fg_params_generate(const fg_params* params, fg_format format, fg_verbosity verbosity, char** text);
FG_API void fg_params_free(fg_params* params);

/* ---- fibers ---- */
FG_API fg_status fg_generate_fibers(const fg_mesh* mesh, const fg_params* params, fg_result** out);
FG_API size_t fg_result_num_vertices(const fg_result* result);
/* name is "f", "s" or "n"; out holds 3 * n values */
FG_API fg_status fg_result_vectors(const fg_result* result, const char* name, double* out);
/* name is "phi" or an auxiliary potential such as "psi"; out holds n values */
FG_API fg_status fg_result_scalars(const fg_result* result, const char* name, double* out);
/* Atrial bundle ids; fails for other geometries. */
FG_API fg_status fg_result_bundles(const fg_result* result, int* out);
FG_API fg_status fg_write_vtu(const fg_mesh* mesh, const fg_result* result, const char* path);
FG_API void fg_result_free(fg_result* result);

/* Angle error of the coarse fiber field against a reference, sampled at the
 * reference vertices. dtheta (optional) receives an fg_free-able array of
 * per-vertex errors in degrees. */
FG_API fg_status fg_compare_vtu(const char* coarse_path, const char* reference_path, fg_sensitivity* out,
                                double** dtheta);

/* Command-line driver; returns the process exit status. */
FG_API int fg_cli_main(int argc, const char* const* argv);

#ifdef __cplusplus
}
#endif

#endif
