/* C interface to the topology-optimization core. All entry points return a
 * status code; details for the latest failure on the calling thread are
 * available via topoc_last_error(). Objects are opaque handles released with
 * their matching _free function. Strings returned through out-parameters are
 * heap-allocated and released with topoc_string_free. */

#ifndef TOPOC_H
#define TOPOC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  TOPOC_OK = 0,
  TOPOC_EINVAL = 1,  /* bad argument or configuration */
  TOPOC_ESTATE = 2,  /* operation not valid in the current state */
  TOPOC_ESOLVER = 3, /* linear solver did not converge */
  TOPOC_EIO = 4,     /* filesystem failure */
  TOPOC_EUNKNOWN = 5
} topoc_status;

typedef struct topoc_config topoc_config; /* a parsed run configuration */
typedef struct topoc_run topoc_run;       /* results of an executed run */

const char* topoc_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
const char* topoc_last_error(void);

void topoc_string_free(char* s);

/* --- configuration ------------------------------------------------------ */

topoc_status topoc_config_parse(const char* json_text, topoc_config** out);
topoc_status topoc_config_load(const char* path, topoc_config** out);
topoc_status topoc_config_serialize(const topoc_config* cfg, char** out_text);
void topoc_config_free(topoc_config* cfg);

/* Command-line style adjustments applied on top of the parsed file. */
topoc_status topoc_config_set_scale(topoc_config* cfg, double scale);
topoc_status topoc_config_set_out_dir(topoc_config* cfg, const char* dir);
/* comma-separated method names: simp_i,simp_ii,simp_iii,beso,vartop,levelset */
topoc_status topoc_config_set_methods(topoc_config* cfg, const char* list);
topoc_status topoc_config_set_allow_large(topoc_config* cfg, int enable);
topoc_status topoc_config_set_parallel(topoc_config* cfg, int workers);

/* Builds the benchmark case without running it: checks mesh alignment,
 * passive regions, and boundary conditions. */
topoc_status topoc_config_validate(const topoc_config* cfg);

/* --- execution ---------------------------------------------------------- */

topoc_status topoc_run_execute(const topoc_config* cfg, topoc_run** out);
void topoc_run_free(topoc_run* run);

int topoc_run_outcome_count(const topoc_run* run);
/* Any method finished cleanly (process-level success criterion). */
int topoc_run_any_ok(const topoc_run* run);

const char* topoc_run_method_name(const topoc_run* run, int idx);
int topoc_run_method_ok(const topoc_run* run, int idx);
int topoc_run_method_converged(const topoc_run* run, int idx);
int topoc_run_method_iterations(const topoc_run* run, int idx);
double topoc_run_method_j_blackwhite(const topoc_run* run, int idx);
double topoc_run_method_bar_width(const topoc_run* run, int idx);
const char* topoc_run_method_error(const topoc_run* run, int idx);

/* Path of the aligned-text summary written by the run. */
const char* topoc_run_summary_path(const topoc_run* run);

/* --- standalone exports ------------------------------------------------- */

/* Writes the case's domain preview (active / passive-void / passive-solid
 * element classification) as a legacy-VTK file under out_dir. */
topoc_status topoc_export_case(const topoc_config* cfg, const char* out_dir);

/* Renders the summary CSV from a previous run directory as aligned text. */
topoc_status topoc_report(const char* out_dir, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* TOPOC_H */
