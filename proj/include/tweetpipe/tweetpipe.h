/*
 * tweetpipe — public C API.
 *
 * A pipeline for archived tweet-object streams: ingest (filter + dedupe),
 * free-text location resolution against a gazetteer, corpus analytics, rank
 * correlation against reference country rankings, and report assembly.
 *
 * Conventions:
 *   - Every fallible function returns a twp_status; TWP_OK means success.
 *   - On failure, twp_last_error() returns a message for the calling thread,
 *     valid until the next tweetpipe call on that thread.
 *   - Opaque handles are created and released by matching twp_*_open/free
 *     pairs. Handles are immutable after creation and safe to share across
 *     threads.
 *   - All strings are UTF-8, NUL-terminated.
 */

#ifndef TWEETPIPE_H
#define TWEETPIPE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TWP_API __declspec(dllexport)
#else
#define TWP_API __attribute__((visibility("default")))
#endif

typedef enum twp_status {
    TWP_OK = 0,
    TWP_EINVAL = 1,  /* invalid argument or configuration */
    TWP_EIO = 2,     /* file or network I/O failure */
    TWP_EPARSE = 3,  /* malformed input data */
    TWP_EDOMAIN = 4, /* operation undefined for these values */
    TWP_EMISSING = 5 /* required upstream artifact absent */
} twp_status;

/* Human-readable name of a status code ("ok", "invalid-argument", ...). */
TWP_API const char* twp_status_name(twp_status status);

/* Message for the most recent failure on the calling thread. Never NULL. */
TWP_API const char* twp_last_error(void);

TWP_API const char* twp_version(void);

/* ---------------------------------------------------------------- text --- */

/*
 * Canonical text normalization used for all gazetteer matching: canonical
 * decomposition, combining marks removed, case folded. Idempotent.
 *
 * Writes a heap-allocated string to *out; release it with twp_string_free.
 */
TWP_API twp_status twp_normalize(const char* utf8, char** out);

TWP_API void twp_string_free(char* s);

/* ----------------------------------------------------------- gazetteer --- */

typedef struct twp_gazetteer twp_gazetteer;

/*
 * Load a gazetteer from CSV (pattern,country,city,country_iso). Entry order
 * is significant: the first matching entry wins. denylist_csv optionally
 * names a CSV of fictional-place patterns checked before any entry; pass
 * NULL to use only the built-in denylist.
 */
TWP_API twp_status twp_gazetteer_open(const char* csv_path,
                                      const char* denylist_csv,
                                      twp_gazetteer** out);

/*
 * Build a new gazetteer with the patch file's entries prepended, so patch
 * entries win first-match. The original handle is untouched.
 */
TWP_API twp_status twp_gazetteer_refine(const twp_gazetteer* gaz,
                                        const char* patch_csv,
                                        twp_gazetteer** out);

TWP_API size_t twp_gazetteer_entry_count(const twp_gazetteer* gaz);

TWP_API void twp_gazetteer_free(twp_gazetteer* gaz);

typedef struct twp_location {
    char country[96];
    char city[96];    /* empty when the entry has no city */
    char iso[3];      /* ISO 3166-1 alpha-2 */
    int64_t entry_id; /* index of the matched entry */
} twp_location;

/*
 * Resolve one free-text location. Sets *found to 1 and fills *out when some
 * entry matches; sets *found to 0 when nothing matches (not an error).
 */
TWP_API twp_status twp_resolve_text(const twp_gazetteer* gaz, const char* utf8,
                                    twp_location* out, int* found);

/* ---------------------------------------------------- rank correlation --- */

/*
 * Modified Spearman coefficient for partial lists.
 *
 * v[i] is the comparison-list rank of reference item i+1 (1-based ranks),
 * with absent items carrying the placeholder rank m+1. n is the reference
 * length, m the comparison length. With classic_factor nonzero the sum of
 * squared displacements is scaled by 6, which reduces to the textbook
 * Spearman coefficient on full lists.
 *
 * Returns TWP_EDOMAIN when the denominator degenerates (m < 2) and the
 * displacement sum is nonzero.
 */
TWP_API twp_status twp_msrc(const int64_t* v, size_t n, size_t m,
                            int classic_factor, double* out);

/*
 * Classic Spearman coefficient. ranks_a[i] and ranks_b[i] are the two ranks
 * of the same item; each array must be a permutation of 1..n.
 */
TWP_API twp_status twp_spearman(const int64_t* ranks_a, const int64_t* ranks_b,
                                size_t n, double* out);

/* Kendall tau on the same rank-pair layout as twp_spearman. */
TWP_API twp_status twp_kendall(const int64_t* ranks_a, const int64_t* ranks_b,
                               size_t n, double* out);

/* -------------------------------------------------------------- stages --- */

typedef struct twp_ingest_stats {
    uint64_t seen;
    uint64_t skipped_missing_location;
    uint64_t skipped_missing_language;
    uint64_t parse_errors;
    uint64_t duplicates_removed;
    uint64_t kept;
} twp_ingest_stats;

typedef struct twp_ingest_options {
    const char* input_jsonl; /* replay file; NULL when polling an endpoint */
    const char* endpoint;    /* http://host:port/path; NULL when replaying */

    /* Polling policy (endpoint mode only). */
    uint32_t rate_max_requests;
    double rate_window_seconds;
    uint32_t interval_min_ms;
    uint32_t interval_max_ms;
    double poll_duration_seconds;

    const char* output_csv; /* cleaned-record CSV, required */
    const char* stats_json; /* optional stats dump */

    /* Max tweet ids held in memory before deduplication spills to disk
     * runs. 0 selects the default (1,000,000). */
    uint64_t dedupe_memory_bound;
    const char* spill_dir; /* optional; defaults to a temp directory */
} twp_ingest_options;

TWP_API void twp_ingest_options_init(twp_ingest_options* opts);

TWP_API twp_status twp_ingest_run(const twp_ingest_options* opts,
                                  twp_ingest_stats* out_stats);

typedef struct twp_resolve_metrics {
    uint64_t total;
    uint64_t resolved;
    uint64_t unresolved;
    double detection_rate;
    double precision;  /* meaningful only when has_precision is 1 */
    int has_precision; /* 1 when labels were supplied */
} twp_resolve_metrics;

typedef struct twp_resolve_options {
    const char* input_csv;     /* cleaned records, required */
    const char* gazetteer_csv; /* required */
    const char* patch_csv;     /* optional refinement patch */
    const char* denylist_csv;  /* optional fictional-place list */
    const char* output_csv;    /* records with detected fields, required */
    const char* unknowns_csv;  /* optional unresolved-location report */
    const char* labels_csv;    /* optional tweet_id,country_iso truth labels */
    const char* metrics_json;  /* optional metrics dump */
    int threads;               /* 0 = single-threaded */
} twp_resolve_options;

TWP_API void twp_resolve_options_init(twp_resolve_options* opts);

TWP_API twp_status twp_resolve_run(const twp_resolve_options* opts,
                                   twp_resolve_metrics* out_metrics);

typedef struct twp_analyze_options {
    const char* input_csv;      /* resolved records, required */
    const char* out_dir;        /* required */
    const char* native_map_csv; /* country_iso,language_code; required */
    uint32_t top_users;         /* 0 = 500 */
    uint32_t top_words;         /* 0 = 100 */
} twp_analyze_options;

TWP_API void twp_analyze_options_init(twp_analyze_options* opts);

TWP_API twp_status twp_analyze_run(const twp_analyze_options* opts);

typedef struct twp_correlate_options {
    const char* counts_csv; /* country_counts.csv from analyze, required */
    const char* hdi_csv;    /* country_iso,category,un_rank; required */
    const char* out_dir;    /* required */
    int classic_factor;     /* nonzero scales displacement sums by 6 */
} twp_correlate_options;

TWP_API void twp_correlate_options_init(twp_correlate_options* opts);

TWP_API twp_status twp_correlate_run(const twp_correlate_options* opts);

/*
 * Assemble the report bundle from stage outputs already present in dir:
 * manifest.json plus plot-ready artifact files. Fails with TWP_EMISSING
 * when an upstream artifact is absent.
 */
TWP_API twp_status twp_report_run(const char* dir);

/* ------------------------------------------------------- full pipeline --- */

typedef struct twp_pipeline_options {
    twp_ingest_options ingest;
    const char* gazetteer_csv;
    const char* patch_csv;
    const char* denylist_csv;
    const char* native_map_csv;
    const char* hdi_csv;
    const char* out_dir;
    uint32_t top_users;
    uint32_t top_words;
    int classic_factor;
    int resolve_threads;
    int dry_run; /* validate configuration only, touch nothing */
} twp_pipeline_options;

TWP_API void twp_pipeline_options_init(twp_pipeline_options* opts);

/*
 * Run ingest → resolve → analyze → correlate → report into out_dir and
 * write run_log.json with per-stage wall times and ingest statistics.
 * Stage outputs are identical to running the stages individually.
 */
TWP_API twp_status twp_pipeline_run(const twp_pipeline_options* opts,
                                    twp_ingest_stats* out_stats,
                                    twp_resolve_metrics* out_metrics);

/* ------------------------------------------------------------- corpora --- */

typedef struct twp_corpus_options {
    uint64_t seed;
    uint64_t count;      /* total lines emitted, duplicates included */
    uint64_t duplicates; /* exact number of duplicated lines */
    const char* out_jsonl;

    /* Per-record noise rates in [0,1]; negative selects the default. */
    double missing_location_rate;
    double missing_language_rate;
    double undetermined_language_rate;
    double fictional_location_rate;
    double unknown_location_rate;
    double malformed_rate;
    double retweet_rate;
} twp_corpus_options;

TWP_API void twp_corpus_options_init(twp_corpus_options* opts);

/* Deterministic synthetic raw-tweet corpus generator (same seed, same bytes). */
TWP_API twp_status twp_corpus_generate(const twp_corpus_options* opts);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TWEETPIPE_H */
