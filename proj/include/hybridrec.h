/* hybridrec: rating prediction with bias, neighborhood, factor, and
 * blended models behind a C ABI. All functions returning hr_status give
 * HR_OK on success; on failure hr_last_error() describes what happened
 * (per thread). Out-parameters are written only on success. Handles are
 * freed with their hr_*_free function; passing NULL there is a no-op. */

#ifndef HYBRIDREC_H
#define HYBRIDREC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HR_API __declspec(dllexport)
#elif defined(__GNUC__)
#define HR_API __attribute__((visibility("default")))
#else
#define HR_API
#endif

typedef enum hr_status {
    HR_OK = 0,
    HR_ERR_IO = 1,          /* unreadable or unwritable file */
    HR_ERR_PARSE = 2,       /* malformed file content */
    HR_ERR_RANGE = 3,       /* rating outside the declared scale */
    HR_ERR_CONFIG = 4,      /* invalid or inconsistent configuration */
    HR_ERR_USAGE = 5,       /* precondition violated by the caller */
    HR_ERR_SOLVER = 6,      /* singular system in a least-squares solve */
    HR_ERR_DIVERGED = 7,    /* training objective blew up */
    HR_ERR_INVALID_ARG = 8, /* NULL handle or out-of-range enum value */
    HR_ERR_INTERNAL = 9
} hr_status;

typedef enum hr_algo {
    HR_ALGO_BASELINE = 0,
    HR_ALGO_CF_USER = 1,
    HR_ALGO_CF_ITEM = 2,
    HR_ALGO_MF_ALS = 3,
    HR_ALGO_CF_MF_V1 = 4,
    HR_ALGO_CF_MF_V2 = 5
} hr_algo;

typedef enum hr_format { HR_FORMAT_MOVIETWEETINGS = 0, HR_FORMAT_CSV = 1 } hr_format;

typedef enum hr_mixture {
    HR_MIX_PURE_BIAS = 0,
    HR_MIX_PURE_FACTOR = 1,
    HR_MIX_PURE_NEIGHBOR = 2,
    HR_MIX_PER_USER = 3
} hr_mixture;

/* Message for the most recent failure on this thread; never NULL. */
HR_API const char* hr_last_error(void);

HR_API const char* hr_version(void);

typedef struct hr_dataset hr_dataset;
typedef struct hr_model hr_model;
typedef struct hr_report hr_report;

/* Every tunable in one flat struct; each algorithm reads its slice.
 * Initialize with hr_params_init before touching fields. */
typedef struct hr_params {
    int algo;          /* hr_algo */
    int baseline_mode; /* 0 offsets, 1 mean-sum (study knob) */
    /* neighbor lists */
    double shrink;
    unsigned top_n;
    /* factors */
    unsigned k;
    /* alternating least squares */
    double lambda;
    int als_targets;   /* 0 residual, 1 raw (study knob) */
    int als_init;      /* 0 constant, 1 seeded-uniform */
    double init_value; /* <= 0 means 1/k */
    /* joint SGD models */
    double lambda1, lambda2, lambda3, lambda4;
    double r1, r2, r3, r4;
    int a_reg_center; /* 0 zero, 1 one (study knob) */
    /* shared training knobs */
    unsigned max_iter;
    double epsilon;
    unsigned long long seed;
    int select_by; /* 0 min-test-mae, 1 final */
    int clamp;     /* clamp predictions to [0, 10] at evaluation */
} hr_params;

/* Fills the per-algorithm defaults. */
HR_API hr_status hr_params_init(hr_params* params, int algo);

/* test_path may be NULL to load training data only. */
HR_API hr_status hr_dataset_load(const char* train_path, const char* test_path, int format,
                                 hr_dataset** out);

HR_API hr_status hr_dataset_generate(unsigned users, unsigned items, unsigned k_true,
                                     double density, double noise_sd, int mixture,
                                     unsigned long long seed, hr_dataset** out);

/* Writes the dataset's records back out; test_path may be NULL. */
HR_API hr_status hr_dataset_write(const hr_dataset* ds, const char* train_path,
                                  const char* test_path, int format);

/* Any out-pointer may be NULL. pruned counts test records dropped for
 * naming a user or item absent from the training data. */
HR_API hr_status hr_dataset_stats(const hr_dataset* ds, unsigned* users, unsigned* items,
                                  unsigned long long* train_size, unsigned long long* test_size,
                                  unsigned long long* pruned);

HR_API void hr_dataset_free(hr_dataset* ds);

/* Trains params->algo on the dataset. When the dataset has test pairs
 * the report includes their MAE and coverage. report_out may be NULL. */
HR_API hr_status hr_train(const hr_dataset* ds, const hr_params* params, hr_model** model_out,
                          hr_report** report_out);

/* Predicts every test pair of ds with an already trained model. The
 * dataset must be the one the model was trained on. */
HR_API hr_status hr_evaluate(const hr_model* model, const hr_dataset* ds, int clamp,
                             hr_report** report_out);

/* Single prediction by external ids, unclamped. */
HR_API hr_status hr_predict(const hr_model* model, const hr_dataset* ds, const char* user_id,
                            const char* item_id, double* out);

HR_API hr_status hr_model_save(const hr_model* model, const char* path);
HR_API hr_status hr_model_load(const char* path, hr_model** out);
HR_API hr_status hr_model_algo(const hr_model* model, int* out);

/* Writes the model's neighbor lists as "entity<TAB>neighbor<TAB>score"
 * lines. Only neighborhood and blended models carry neighbor lists. */
HR_API hr_status hr_model_save_neighbors(const hr_model* model, const char* path);

HR_API void hr_model_free(hr_model* model);

HR_API double hr_report_mae(const hr_report* report);      /* NaN if not evaluated */
HR_API double hr_report_coverage(const hr_report* report); /* NaN if not evaluated */

/* include_timings adds wall-clock seconds; off, the JSON is
 * byte-identical across repeat runs. */
HR_API hr_status hr_report_to_json(const hr_report* report, int include_timings, char** out);
HR_API hr_status hr_report_write_json(const hr_report* report, const char* path,
                                      int include_timings);
HR_API void hr_report_free(hr_report* report);

HR_API void hr_string_free(char* s);

/* Runs every (algorithm, value) cell of a neighbor-count (axis 0, "N")
 * or factor-count (axis 1, "K") sweep. jobs > 1 runs cells in parallel
 * without changing the results. CSV lands in csv_path (if non-NULL)
 * and/or *csv_out (if non-NULL, freed with hr_string_free). */
HR_API hr_status hr_sweep(const hr_dataset* ds, const hr_params* base, int axis,
                          const unsigned* values, size_t n_values, const int* algos,
                          size_t n_algos, unsigned jobs, const char* csv_path, char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HYBRIDREC_H */
