#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "core/dedupe.hpp"
#include "core/gazetteer.hpp"
#include "core/ingest.hpp"
#include "core/rate_limit.hpp"
#include "core/report.hpp"

namespace tweetpipe {

struct IngestOptions {
    std::optional<std::filesystem::path> input_jsonl;
    std::optional<std::string> endpoint;
    RateLimitPolicy policy;
    std::chrono::milliseconds poll_duration{0};
    std::filesystem::path output_csv;
    std::optional<std::filesystem::path> stats_json;
    DedupeConfig dedupe;
};

// Source -> parse -> filter -> dedupe -> CSV, with the stages on separate
// threads connected by bounded queues.
IngestStats run_ingest(const IngestOptions& options);

void write_ingest_stats_json(const IngestStats& stats,
                             const std::filesystem::path& path);

struct ResolveOptions {
    std::filesystem::path input_csv;
    std::filesystem::path gazetteer_csv;
    std::optional<std::filesystem::path> patch_csv;
    std::optional<std::filesystem::path> denylist_csv;
    std::filesystem::path output_csv;
    std::optional<std::filesystem::path> unknowns_csv;
    std::optional<std::filesystem::path> labels_csv;
    std::optional<std::filesystem::path> metrics_json;
    int threads = 0;
};

ResolverMetrics run_resolve(const ResolveOptions& options);

struct AnalyzeOptions {
    std::filesystem::path input_csv;
    std::filesystem::path out_dir;
    std::filesystem::path native_map_csv;
    size_t top_users = 500;
    size_t top_words = 100;
};

void run_analyze(const AnalyzeOptions& options);

struct CorrelateOptions {
    std::filesystem::path counts_csv;
    std::filesystem::path hdi_csv;
    std::filesystem::path out_dir;
    bool classic_factor = false;
};

void run_correlate(const CorrelateOptions& options);

struct PipelineOptions {
    IngestOptions ingest;
    std::filesystem::path gazetteer_csv;
    std::optional<std::filesystem::path> patch_csv;
    std::optional<std::filesystem::path> denylist_csv;
    std::filesystem::path native_map_csv;
    std::filesystem::path hdi_csv;
    std::filesystem::path out_dir;
    size_t top_users = 500;
    size_t top_words = 100;
    bool classic_factor = false;
    int resolve_threads = 0;
    bool dry_run = false;
};

struct PipelineResult {
    IngestStats ingest_stats;
    ResolverMetrics resolve_metrics;
    ReportBundle report;
};

// Runs every stage in order, streaming through files under out_dir, and
// writes run_log.json with stage wall times. Stage outputs are identical to
// invoking the stages one by one.
PipelineResult run_pipeline(const PipelineOptions& options);

}  // namespace tweetpipe
