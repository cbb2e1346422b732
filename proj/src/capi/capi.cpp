#include "tweetpipe/tweetpipe.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "core/corpusgen.hpp"
#include "core/errors.hpp"
#include "core/gazetteer.hpp"
#include "core/pipeline.hpp"
#include "core/rankcorr.hpp"
#include "core/textnorm.hpp"

using namespace tweetpipe;

struct twp_gazetteer {
    Gazetteer impl;
};

namespace {

thread_local std::string g_last_error;

twp_status status_from_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return TWP_EINVAL;
        case ErrorCode::io: return TWP_EIO;
        case ErrorCode::parse: return TWP_EPARSE;
        case ErrorCode::domain: return TWP_EDOMAIN;
        case ErrorCode::missing_artifact: return TWP_EMISSING;
    }
    return TWP_EINVAL;
}

// Runs the body, translating exceptions into status codes and the
// thread-local error message.
template <typename Fn>
twp_status guarded(Fn&& fn) {
    try {
        fn();
        return TWP_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_from_code(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TWP_EIO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TWP_EINVAL;
    }
}

twp_status invalid(const char* message) {
    g_last_error = message;
    return TWP_EINVAL;
}

void copy_bounded(char* dst, size_t capacity, const std::string& src) {
    size_t n = std::min(capacity - 1, src.size());
    std::memcpy(dst, src.data(), n);
    dst[n] = '\0';
}

std::optional<std::filesystem::path> optional_path(const char* path) {
    if (!path || !*path) return std::nullopt;
    return std::filesystem::path(path);
}

std::chrono::milliseconds to_ms(double seconds) {
    return std::chrono::milliseconds(static_cast<int64_t>(seconds * 1000.0));
}

IngestOptions convert_ingest(const twp_ingest_options& opts) {
    IngestOptions out;
    out.input_jsonl = optional_path(opts.input_jsonl);
    if (opts.endpoint && *opts.endpoint) out.endpoint = opts.endpoint;
    out.policy.max_requests = opts.rate_max_requests;
    out.policy.window = to_ms(opts.rate_window_seconds);
    out.policy.poll_interval_min = std::chrono::milliseconds(opts.interval_min_ms);
    out.policy.poll_interval_max = std::chrono::milliseconds(opts.interval_max_ms);
    out.poll_duration = to_ms(opts.poll_duration_seconds);
    out.output_csv = opts.output_csv ? opts.output_csv : "";
    out.stats_json = optional_path(opts.stats_json);
    if (opts.dedupe_memory_bound) out.dedupe.memory_bound = opts.dedupe_memory_bound;
    if (opts.spill_dir && *opts.spill_dir) out.dedupe.spill_dir = opts.spill_dir;
    return out;
}

void convert_stats(const IngestStats& stats, twp_ingest_stats* out) {
    out->seen = stats.seen;
    out->skipped_missing_location = stats.skipped_missing_location;
    out->skipped_missing_language = stats.skipped_missing_language;
    out->parse_errors = stats.parse_errors;
    out->duplicates_removed = stats.duplicates_removed;
    out->kept = stats.kept;
}

void convert_metrics(const ResolverMetrics& metrics, twp_resolve_metrics* out) {
    out->total = metrics.total;
    out->resolved = metrics.resolved;
    out->unresolved = metrics.unresolved;
    out->detection_rate = metrics.detection_rate();
    out->precision = metrics.precision.value_or(0.0);
    out->has_precision = metrics.precision ? 1 : 0;
}

RankedList ranked_from_ranks(const int64_t* ranks, size_t n) {
    // Positions as synthetic item ids, ordered by the given ranks.
    std::vector<std::pair<int64_t, size_t>> order;
    order.reserve(n);
    for (size_t i = 0; i < n; ++i) order.emplace_back(ranks[i], i);
    std::sort(order.begin(), order.end());
    for (size_t i = 0; i < n; ++i)
        if (order[i].first != static_cast<int64_t>(i) + 1)
            fail(ErrorCode::invalid_argument, "ranks must be a permutation of 1..n");
    std::vector<std::string> items;
    items.reserve(n);
    for (const auto& [rank, item] : order) items.push_back(std::to_string(item));
    return RankedList::from_items(std::move(items));
}

}  // namespace

extern "C" {

const char* twp_status_name(twp_status status) {
    switch (status) {
        case TWP_OK: return "ok";
        case TWP_EINVAL: return "invalid-argument";
        case TWP_EIO: return "io-error";
        case TWP_EPARSE: return "parse-error";
        case TWP_EDOMAIN: return "domain-error";
        case TWP_EMISSING: return "missing-artifact";
    }
    return "unknown";
}

const char* twp_last_error(void) { return g_last_error.c_str(); }

const char* twp_version(void) { return "1.0.0"; }

twp_status twp_normalize(const char* utf8, char** out) {
    if (!utf8 || !out) return invalid("twp_normalize: null argument");
    return guarded([&] {
        std::string normalized = normalize_diacritics(utf8);
        char* buffer = static_cast<char*>(::operator new(normalized.size() + 1));
        std::memcpy(buffer, normalized.c_str(), normalized.size() + 1);
        *out = buffer;
    });
}

void twp_string_free(char* s) { ::operator delete(s); }

twp_status twp_gazetteer_open(const char* csv_path, const char* denylist_csv,
                              twp_gazetteer** out) {
    if (!csv_path || !out) return invalid("twp_gazetteer_open: null argument");
    return guarded([&] {
        auto handle = std::make_unique<twp_gazetteer>();
        handle->impl = Gazetteer::load(
            csv_path, denylist_csv && *denylist_csv ? denylist_csv
                                                    : std::filesystem::path());
        *out = handle.release();
    });
}

twp_status twp_gazetteer_refine(const twp_gazetteer* gaz, const char* patch_csv,
                                twp_gazetteer** out) {
    if (!gaz || !patch_csv || !out) return invalid("twp_gazetteer_refine: null argument");
    return guarded([&] {
        auto handle = std::make_unique<twp_gazetteer>();
        handle->impl = gaz->impl.refined(patch_csv);
        *out = handle.release();
    });
}

size_t twp_gazetteer_entry_count(const twp_gazetteer* gaz) {
    return gaz ? gaz->impl.size() : 0;
}

void twp_gazetteer_free(twp_gazetteer* gaz) { delete gaz; }

twp_status twp_resolve_text(const twp_gazetteer* gaz, const char* utf8,
                            twp_location* out, int* found) {
    if (!gaz || !utf8 || !out || !found)
        return invalid("twp_resolve_text: null argument");
    return guarded([&] {
        auto match = gaz->impl.resolve(utf8);
        if (!match) {
            *found = 0;
            return;
        }
        *found = 1;
        copy_bounded(out->country, sizeof out->country, match->country);
        copy_bounded(out->city, sizeof out->city, match->city.value_or(""));
        copy_bounded(out->iso, sizeof out->iso, match->country_iso);
        out->entry_id = static_cast<int64_t>(match->matched_entry_id);
    });
}

twp_status twp_msrc(const int64_t* v, size_t n, size_t m, int classic_factor,
                    double* out) {
    if (!v || !out) return invalid("twp_msrc: null argument");
    return guarded([&] {
        MsrcOptions options;
        options.classic_factor = classic_factor != 0;
        *out = msrc_from_ranks(std::span<const int64_t>(v, n), m, options);
    });
}

twp_status twp_spearman(const int64_t* ranks_a, const int64_t* ranks_b, size_t n,
                        double* out) {
    if (!ranks_a || !ranks_b || !out) return invalid("twp_spearman: null argument");
    return guarded([&] {
        *out = spearman_classic(ranked_from_ranks(ranks_a, n),
                                ranked_from_ranks(ranks_b, n));
    });
}

twp_status twp_kendall(const int64_t* ranks_a, const int64_t* ranks_b, size_t n,
                       double* out) {
    if (!ranks_a || !ranks_b || !out) return invalid("twp_kendall: null argument");
    return guarded([&] {
        *out = kendall_tau(ranked_from_ranks(ranks_a, n),
                           ranked_from_ranks(ranks_b, n));
    });
}

void twp_ingest_options_init(twp_ingest_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
    opts->rate_max_requests = 450;
    opts->rate_window_seconds = 900;
    opts->interval_min_ms = 500;
    opts->interval_max_ms = 2000;
}

twp_status twp_ingest_run(const twp_ingest_options* opts, twp_ingest_stats* out_stats) {
    if (!opts || !opts->output_csv) return invalid("twp_ingest_run: null argument");
    return guarded([&] {
        IngestStats stats = run_ingest(convert_ingest(*opts));
        if (out_stats) convert_stats(stats, out_stats);
    });
}

void twp_resolve_options_init(twp_resolve_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
}

twp_status twp_resolve_run(const twp_resolve_options* opts,
                           twp_resolve_metrics* out_metrics) {
    if (!opts || !opts->input_csv || !opts->gazetteer_csv || !opts->output_csv)
        return invalid("twp_resolve_run: missing required path");
    return guarded([&] {
        ResolveOptions options;
        options.input_csv = opts->input_csv;
        options.gazetteer_csv = opts->gazetteer_csv;
        options.patch_csv = optional_path(opts->patch_csv);
        options.denylist_csv = optional_path(opts->denylist_csv);
        options.output_csv = opts->output_csv;
        options.unknowns_csv = optional_path(opts->unknowns_csv);
        options.labels_csv = optional_path(opts->labels_csv);
        options.metrics_json = optional_path(opts->metrics_json);
        options.threads = opts->threads;
        ResolverMetrics metrics = run_resolve(options);
        if (out_metrics) convert_metrics(metrics, out_metrics);
    });
}

void twp_analyze_options_init(twp_analyze_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
    opts->top_users = 500;
    opts->top_words = 100;
}

twp_status twp_analyze_run(const twp_analyze_options* opts) {
    if (!opts || !opts->input_csv || !opts->out_dir || !opts->native_map_csv)
        return invalid("twp_analyze_run: missing required path");
    return guarded([&] {
        AnalyzeOptions options;
        options.input_csv = opts->input_csv;
        options.out_dir = opts->out_dir;
        options.native_map_csv = opts->native_map_csv;
        options.top_users = opts->top_users ? opts->top_users : 500;
        options.top_words = opts->top_words ? opts->top_words : 100;
        run_analyze(options);
    });
}

void twp_correlate_options_init(twp_correlate_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
}

twp_status twp_correlate_run(const twp_correlate_options* opts) {
    if (!opts || !opts->counts_csv || !opts->hdi_csv || !opts->out_dir)
        return invalid("twp_correlate_run: missing required path");
    return guarded([&] {
        CorrelateOptions options;
        options.counts_csv = opts->counts_csv;
        options.hdi_csv = opts->hdi_csv;
        options.out_dir = opts->out_dir;
        options.classic_factor = opts->classic_factor != 0;
        run_correlate(options);
    });
}

twp_status twp_report_run(const char* dir) {
    if (!dir) return invalid("twp_report_run: null directory");
    return guarded([&] { build_report(dir); });
}

void twp_pipeline_options_init(twp_pipeline_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
    twp_ingest_options_init(&opts->ingest);
    opts->top_users = 500;
    opts->top_words = 100;
}

twp_status twp_pipeline_run(const twp_pipeline_options* opts,
                            twp_ingest_stats* out_stats,
                            twp_resolve_metrics* out_metrics) {
    if (!opts || !opts->gazetteer_csv || !opts->native_map_csv || !opts->hdi_csv ||
        !opts->out_dir)
        return invalid("twp_pipeline_run: missing required path");
    return guarded([&] {
        PipelineOptions options;
        options.ingest = convert_ingest(opts->ingest);
        options.ingest.output_csv.clear();  // assigned by the pipeline
        options.gazetteer_csv = opts->gazetteer_csv;
        options.patch_csv = optional_path(opts->patch_csv);
        options.denylist_csv = optional_path(opts->denylist_csv);
        options.native_map_csv = opts->native_map_csv;
        options.hdi_csv = opts->hdi_csv;
        options.out_dir = opts->out_dir;
        options.top_users = opts->top_users ? opts->top_users : 500;
        options.top_words = opts->top_words ? opts->top_words : 100;
        options.classic_factor = opts->classic_factor != 0;
        options.resolve_threads = opts->resolve_threads;
        options.dry_run = opts->dry_run != 0;
        PipelineResult result = run_pipeline(options);
        if (out_stats) convert_stats(result.ingest_stats, out_stats);
        if (out_metrics) convert_metrics(result.resolve_metrics, out_metrics);
    });
}

void twp_corpus_options_init(twp_corpus_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof *opts);
    opts->seed = 1;
    opts->count = 10'000;
    opts->duplicates = 1'000;
    opts->missing_location_rate = -1;
    opts->missing_language_rate = -1;
    opts->undetermined_language_rate = -1;
    opts->fictional_location_rate = -1;
    opts->unknown_location_rate = -1;
    opts->malformed_rate = -1;
    opts->retweet_rate = -1;
}

twp_status twp_corpus_generate(const twp_corpus_options* opts) {
    if (!opts || !opts->out_jsonl) return invalid("twp_corpus_generate: missing path");
    return guarded([&] {
        CorpusOptions options;
        options.seed = opts->seed;
        options.count = opts->count;
        options.duplicates = opts->duplicates;
        if (opts->missing_location_rate >= 0)
            options.missing_location_rate = opts->missing_location_rate;
        if (opts->missing_language_rate >= 0)
            options.missing_language_rate = opts->missing_language_rate;
        if (opts->undetermined_language_rate >= 0)
            options.undetermined_language_rate = opts->undetermined_language_rate;
        if (opts->fictional_location_rate >= 0)
            options.fictional_location_rate = opts->fictional_location_rate;
        if (opts->unknown_location_rate >= 0)
            options.unknown_location_rate = opts->unknown_location_rate;
        if (opts->malformed_rate >= 0) options.malformed_rate = opts->malformed_rate;
        if (opts->retweet_rate >= 0) options.retweet_rate = opts->retweet_rate;
        generate_corpus_file(options, opts->out_jsonl);
    });
}

}  // extern "C"
