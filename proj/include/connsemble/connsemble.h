/*
 * C interface to the connsemble library.
 *
 * All objects are opaque handles created by a connsemble_* constructor and
 * released with the matching *_free function. Every fallible call returns a
 * connsemble_status; on failure connsemble_last_error() describes what went
 * wrong on the calling thread until the next call into the library.
 */
#ifndef CONNSEMBLE_H
#define CONNSEMBLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONNSEMBLE_BUILDING_LIBRARY)
#    define CONNSEMBLE_API __declspec(dllexport)
#  else
#    define CONNSEMBLE_API __declspec(dllimport)
#  endif
#else
#  define CONNSEMBLE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum connsemble_status {
  CONNSEMBLE_OK = 0,
  CONNSEMBLE_ERR_USAGE = 1,      /* bad argument or configuration */
  CONNSEMBLE_ERR_DATA = 2,       /* malformed or invalid input data */
  CONNSEMBLE_ERR_NUMERICAL = 3,  /* eigensolver, non-finite objective, disconnected graph */
  CONNSEMBLE_ERR_IO = 4,         /* missing file, unwritable path, existing output */
  CONNSEMBLE_ERR_INTERNAL = 5
} connsemble_status;

typedef struct connsemble_cohort connsemble_cohort;
typedef struct connsemble_report connsemble_report;
typedef struct connsemble_comparison connsemble_comparison;

CONNSEMBLE_API const char* connsemble_version(void);

/* Message of the last failure on this thread ("" if none). */
CONNSEMBLE_API const char* connsemble_last_error(void);
/* Precise error name of the last failure, e.g. "NegativeWeight" ("" if none). */
CONNSEMBLE_API const char* connsemble_last_error_kind(void);

/* ---- cohorts ---------------------------------------------------------- */

typedef struct connsemble_load_options {
  double symmetry_tolerance;       /* relative; default 1e-9 */
  const char* disconnected_policy; /* "max_finite" | "constant:<v>" | "error"; NULL = max_finite */
  int threads;                     /* default 1 */
} connsemble_load_options;

CONNSEMBLE_API void connsemble_load_options_init(connsemble_load_options* options);

/* Manifest CSV with header subject_id,label,path. options may be NULL. */
CONNSEMBLE_API connsemble_status connsemble_cohort_load(const char* manifest_path,
                                                        const connsemble_load_options* options,
                                                        connsemble_cohort** out);

/* Directory written by connsemble_cohort_write_features. */
CONNSEMBLE_API connsemble_status connsemble_cohort_load_features(const char* dir, connsemble_cohort** out);

CONNSEMBLE_API connsemble_status connsemble_cohort_write_features(const connsemble_cohort* cohort, const char* dir,
                                                                  int overwrite);

CONNSEMBLE_API size_t connsemble_cohort_size(const connsemble_cohort* cohort);
CONNSEMBLE_API size_t connsemble_cohort_feature_dim(const connsemble_cohort* cohort);
/* label: 0 = HC, 1 = MCI */
CONNSEMBLE_API size_t connsemble_cohort_count(const connsemble_cohort* cohort, int label);
CONNSEMBLE_API void connsemble_cohort_free(connsemble_cohort* cohort);

typedef struct connsemble_synth_config {
  int n_nodes;                   /* 120 */
  int n_hc;                      /* 49 */
  int n_mci;                     /* 108 */
  double effect_size;            /* 0.3, in [0, 1) */
  double affected_edge_fraction; /* 0.1 */
  double noise_scale;            /* 0.5 */
  double edge_density;           /* 0.3 */
  uint64_t seed;                 /* 0 */
} connsemble_synth_config;

CONNSEMBLE_API void connsemble_synth_config_init(connsemble_synth_config* config);

/* Writes <out_dir>/manifest.csv and <out_dir>/matrices/<subject>.csv. */
CONNSEMBLE_API connsemble_status connsemble_synthesize(const connsemble_synth_config* config, const char* out_dir,
                                                       int overwrite);

/* Same cohort, featurized in memory. options may be NULL. */
CONNSEMBLE_API connsemble_status connsemble_cohort_synthesize(const connsemble_synth_config* config,
                                                              const connsemble_load_options* options,
                                                              connsemble_cohort** out);

/* ---- evaluation ------------------------------------------------------- */

typedef struct connsemble_eval_options {
  const char* sampler;      /* "none" | "random" | "nearmiss3" | "iht" */
  const char* sampler_mode; /* "dataset" | "fold" */
  const char* auc_mode;     /* "per_fold" | "pooled" */
  int folds;                /* 10 */
  int repeats;              /* 10 */
  uint64_t seed;            /* 0 */
  double l2_alpha;          /* 1e-4 */
  int max_iterations;       /* 200 */
  int lbfgs_history;        /* 10 */
  double gradient_tolerance; /* 1e-5 */
  double threshold;         /* 0.5 */
  int k_neighbors;          /* 3 */
  int iht_internal_folds;   /* 5 */
  int threads;              /* 1 */
} connsemble_eval_options;

CONNSEMBLE_API void connsemble_eval_options_init(connsemble_eval_options* options);

CONNSEMBLE_API connsemble_status connsemble_evaluate(const connsemble_cohort* cohort,
                                                     const connsemble_eval_options* options,
                                                     connsemble_report** out);

CONNSEMBLE_API connsemble_status connsemble_report_write(const connsemble_report* report, const char* path,
                                                         int overwrite);
/* CSV strategy,metric,index,value with every per-fold sample. */
CONNSEMBLE_API connsemble_status connsemble_report_write_folds(const connsemble_report* report, const char* path,
                                                               int overwrite);
CONNSEMBLE_API connsemble_status connsemble_report_read(const char* path, connsemble_report** out);

/* strategy: weights | shortest_path | communicability | fusion | ensemble
   metric:   accuracy | auc | sensitivity | specificity | f1
   Any output pointer may be NULL. */
CONNSEMBLE_API connsemble_status connsemble_report_metric(const connsemble_report* report, const char* strategy,
                                                          const char* metric, double* mean, double* se,
                                                          size_t* n_folds);
CONNSEMBLE_API void connsemble_report_free(connsemble_report* report);

/* Mann-Whitney test of every (strategy, metric) sample of a against b. */
CONNSEMBLE_API connsemble_status connsemble_compare(const connsemble_report* a, const connsemble_report* b,
                                                    connsemble_comparison** out);
CONNSEMBLE_API size_t connsemble_comparison_size(const connsemble_comparison* cmp);
CONNSEMBLE_API connsemble_status connsemble_comparison_row(const connsemble_comparison* cmp, size_t index,
                                                           const char** strategy, const char** metric,
                                                           double* mean_a, double* mean_b, double* u, double* p);
/* Fixed-width text table; owned by the handle. */
CONNSEMBLE_API const char* connsemble_comparison_table(const connsemble_comparison* cmp);
CONNSEMBLE_API void connsemble_comparison_free(connsemble_comparison* cmp);

#ifdef __cplusplus
}
#endif

#endif /* CONNSEMBLE_H */
