#include "core/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include <nlohmann/json.hpp>

#include "core/analytics.hpp"
#include "core/bounded_queue.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rankcorr.hpp"
#include "core/sources.hpp"

namespace tweetpipe {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr size_t kBatchSize = 256;
constexpr size_t kQueueCapacity = 32;

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::exists(path))
        fail(ErrorCode::invalid_argument, what + " not found: " + path.string());
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

void write_json_file(const ordered_json& value, const fs::path& path) {
    std::ofstream out = csv::open_output(path);
    out << value.dump(2) << '\n';
    out.flush();
    if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

}  // namespace

IngestStats run_ingest(const IngestOptions& options) {
    if (!options.input_jsonl && !options.endpoint)
        fail(ErrorCode::invalid_argument, "ingest needs an input file or an endpoint");
    if (options.input_jsonl && options.endpoint)
        fail(ErrorCode::invalid_argument, "ingest takes either a file or an endpoint");
    if (options.input_jsonl) require_file(*options.input_jsonl, "input");
    options.policy.validate();

    using LineBatch = std::vector<std::string>;
    using RecordBatch = std::vector<TweetRecord>;
    BoundedQueue<LineBatch> lines(kQueueCapacity);
    BoundedQueue<RecordBatch> records(kQueueCapacity);

    std::exception_ptr source_error;
    std::exception_ptr filter_error;
    IngestStats stats;

    std::thread source_thread([&] {
        try {
            LineBatch batch;
            batch.reserve(kBatchSize);
            auto sink = [&](std::string&& line) {
                batch.push_back(std::move(line));
                if (batch.size() >= kBatchSize) {
                    if (!lines.push(std::move(batch)))
                        fail(ErrorCode::io, "pipeline stopped");
                    batch = LineBatch();
                    batch.reserve(kBatchSize);
                }
            };
            if (options.input_jsonl) {
                replay_source(*options.input_jsonl, sink);
            } else {
                poll_source(*options.endpoint, options.policy,
                            std::chrono::duration_cast<std::chrono::milliseconds>(
                                options.poll_duration),
                            sink);
            }
            if (!batch.empty()) lines.push(std::move(batch));
        } catch (...) {
            source_error = std::current_exception();
        }
        lines.close();
    });

    std::thread filter_thread([&] {
        try {
            RecordBatch batch;
            batch.reserve(kBatchSize);
            while (auto line_batch = lines.pop()) {
                for (const std::string& line : *line_batch) {
                    ++stats.seen;
                    auto raw = parse_raw(line);
                    if (!raw) {
                        ++stats.parse_errors;
                        continue;
                    }
                    SkipReason reason;
                    auto record = filter_record(*raw, &reason);
                    if (!record) {
                        if (reason == SkipReason::missing_location)
                            ++stats.skipped_missing_location;
                        else
                            ++stats.skipped_missing_language;
                        continue;
                    }
                    batch.push_back(std::move(*record));
                    if (batch.size() >= kBatchSize) {
                        if (!records.push(std::move(batch)))
                            fail(ErrorCode::io, "pipeline stopped");
                        batch = RecordBatch();
                        batch.reserve(kBatchSize);
                    }
                }
            }
            if (!batch.empty()) records.push(std::move(batch));
        } catch (...) {
            filter_error = std::current_exception();
            lines.close();  // unblock the source
        }
        records.close();
    });

    std::exception_ptr sink_error;
    try {
        RecordWriter writer(options.output_csv);
        Deduper deduper(options.dedupe,
                        [&](TweetRecord&& r) { writer.write(r); });
        while (auto batch = records.pop())
            for (auto& record : *batch) deduper.push(std::move(record));
        stats.duplicates_removed = deduper.finish();
        writer.close();
        stats.kept = writer.count();
    } catch (...) {
        sink_error = std::current_exception();
        lines.close();
        records.close();
    }

    source_thread.join();
    filter_thread.join();
    // The sink failing closes the queues and cascades; report root causes
    // first.
    if (sink_error) std::rethrow_exception(sink_error);
    if (filter_error) std::rethrow_exception(filter_error);
    if (source_error) std::rethrow_exception(source_error);

    if (options.stats_json) write_ingest_stats_json(stats, *options.stats_json);
    return stats;
}

void write_ingest_stats_json(const IngestStats& stats, const fs::path& path) {
    ordered_json out;
    out["seen"] = stats.seen;
    out["skipped_missing_location"] = stats.skipped_missing_location;
    out["skipped_missing_language"] = stats.skipped_missing_language;
    out["parse_errors"] = stats.parse_errors;
    out["duplicates_removed"] = stats.duplicates_removed;
    out["kept"] = stats.kept;
    write_json_file(out, path);
}

ResolverMetrics run_resolve(const ResolveOptions& options) {
    require_file(options.input_csv, "input");
    require_file(options.gazetteer_csv, "gazetteer");
    if (options.patch_csv) require_file(*options.patch_csv, "patch");
    if (options.denylist_csv) require_file(*options.denylist_csv, "denylist");
    if (options.labels_csv) require_file(*options.labels_csv, "labels");

    Gazetteer gazetteer = Gazetteer::load(
        options.gazetteer_csv,
        options.denylist_csv ? *options.denylist_csv : fs::path());
    if (options.patch_csv) gazetteer = gazetteer.refined(*options.patch_csv);

    std::vector<TweetRecord> records = read_records(options.input_csv);
    ResolverMetrics metrics = resolve_all(records, gazetteer, options.threads);

    if (options.labels_csv) {
        auto labels = load_labels(*options.labels_csv);
        ResolverMetrics evaluated = evaluate_resolver(records, labels);
        metrics.precision = evaluated.precision;
    }

    write_records(records, options.output_csv);

    if (options.unknowns_csv) {
        auto unknowns = unknown_report(records);
        std::ofstream out = csv::open_output(*options.unknowns_csv);
        csv::write_row(out, {"location", "count"});
        for (const auto& [location, count] : unknowns)
            csv::write_row(out, {location, std::to_string(count)});
        out.flush();
        if (!out) fail(ErrorCode::io, "unknowns write failed");
    }

    if (options.metrics_json) {
        ordered_json out;
        out["total"] = metrics.total;
        out["resolved"] = metrics.resolved;
        out["unresolved"] = metrics.unresolved;
        out["detection_rate"] = metrics.detection_rate();
        if (metrics.precision) out["precision"] = *metrics.precision;
        write_json_file(out, *options.metrics_json);
    }
    return metrics;
}

void run_analyze(const AnalyzeOptions& options) {
    require_file(options.input_csv, "input");
    require_file(options.native_map_csv, "native-language map");
    if (options.top_users == 0 || options.top_words == 0)
        fail(ErrorCode::invalid_argument, "top-users and top-words must be >= 1");
    fs::create_directories(options.out_dir);

    std::vector<TweetRecord> records = read_records(options.input_csv);
    auto native_map = load_native_map(options.native_map_csv);

    auto counts = count_by_country(records);
    {
        std::vector<const CountryStats*> ordered;
        for (const auto& [iso, stats] : counts) ordered.push_back(&stats);
        std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
            if (a->tweet_count != b->tweet_count) return a->tweet_count > b->tweet_count;
            return a->country_iso < b->country_iso;
        });
        std::ofstream out = csv::open_output(options.out_dir / "country_counts.csv");
        csv::write_row(out, {"country_iso", "tweet_count", "retweet_count"});
        for (const auto* stats : ordered)
            csv::write_row(out, {stats->country_iso, std::to_string(stats->tweet_count),
                                 std::to_string(stats->retweet_count)});
        out.flush();
        if (!out) fail(ErrorCode::io, "country_counts write failed");
    }

    {
        BinScheme scheme = BinScheme::default_scheme();
        auto bins = bin_countries(counts, scheme);
        std::ofstream out = csv::open_output(options.out_dir / "bins.csv");
        csv::write_row(out, {"bin", "lower", "upper", "countries", "total_tweets"});
        for (size_t i = 0; i < bins.size(); ++i) {
            std::string lower = std::to_string(i == 0 ? 0 : scheme.boundaries[i - 1]);
            std::string upper =
                i < scheme.boundaries.size() ? std::to_string(scheme.boundaries[i]) : "";
            std::string members;
            for (const auto& iso : bins[i].countries) {
                if (!members.empty()) members.push_back(';');
                members += iso;
            }
            csv::write_row(out, {std::to_string(i + 1), lower, upper, members,
                                 std::to_string(bins[i].total)});
        }
        out.flush();
        if (!out) fail(ErrorCode::io, "bins write failed");
    }

    for (auto [kind, name] :
         {std::pair{TweetKind::original, "top_users_tweets.csv"},
          std::pair{TweetKind::retweet, "top_users_retweets.csv"}}) {
        auto top = top_users(records, options.top_users, kind);
        std::ofstream out = csv::open_output(options.out_dir / name);
        csv::write_row(out, {"rank", "username", "country_iso", "count"});
        for (size_t i = 0; i < top.size(); ++i)
            csv::write_row(out, {std::to_string(i + 1), top[i].username,
                                 top[i].country_iso.value_or(""),
                                 std::to_string(top[i].count)});
        out.flush();
        if (!out) fail(ErrorCode::io, std::string(name) + " write failed");
    }

    {
        auto words = word_frequency(records, options.top_words);
        std::ofstream out = csv::open_output(options.out_dir / "top_words.csv");
        csv::write_row(out, {"rank", "token", "count"});
        for (size_t i = 0; i < words.size(); ++i)
            csv::write_row(out, {std::to_string(i + 1), words[i].first,
                                 std::to_string(words[i].second)});
        out.flush();
        if (!out) fail(ErrorCode::io, "top_words write failed");
    }

    {
        auto languages = language_distribution(records);
        std::vector<std::pair<std::string, uint64_t>> ordered(
            languages.counts.begin(), languages.counts.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::ofstream out = csv::open_output(options.out_dir / "languages.csv");
        csv::write_row(out, {"language_code", "count"});
        for (const auto& [code, count] : ordered)
            csv::write_row(out, {code, std::to_string(count)});
        out.flush();
        if (!out) fail(ErrorCode::io, "languages write failed");
    }

    {
        auto rows = native_language_table(records, native_map);
        std::ofstream out = csv::open_output(options.out_dir / "native_table.csv");
        csv::write_row(out, {"rank", "country_iso", "native_languages", "total_tweets",
                             "tweets_in_native", "pct_native", "pct_other"});
        for (size_t i = 0; i < rows.size(); ++i) {
            std::string langs;
            for (const auto& lang : rows[i].native_languages) {
                if (!langs.empty()) langs.push_back(';');
                langs += lang;
            }
            csv::write_row(out, {std::to_string(i + 1), rows[i].country_iso, langs,
                                 std::to_string(rows[i].total_tweets),
                                 std::to_string(rows[i].tweets_in_native),
                                 format_tenths(rows[i].pct_native_tenths),
                                 format_tenths(rows[i].pct_other_tenths)});
        }
        out.flush();
        if (!out) fail(ErrorCode::io, "native_table write failed");
    }
}

void run_correlate(const CorrelateOptions& options) {
    require_file(options.counts_csv, "counts");
    require_file(options.hdi_csv, "HDI rankings");
    fs::create_directories(options.out_dir);

    static const std::vector<std::string> header = {"country_iso", "tweet_count",
                                                    "retweet_count"};
    auto rows = csv::read_file(options.counts_csv, 3, &header);
    std::map<std::string, uint64_t> counts;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] == kUnknownCountryKey) continue;
        counts[rows[i][0]] = std::stoull(rows[i][1]);
    }

    auto fixtures = load_hdi_fixtures(options.hdi_csv);
    MsrcOptions msrc_options;
    msrc_options.classic_factor = options.classic_factor;
    auto results = hdi_experiment(counts, fixtures, msrc_options);

    std::ofstream out = csv::open_output(options.out_dir / "correlations.csv");
    csv::write_row(out, {"category", "rs_prime", "n", "m"});
    for (const auto& result : results) {
        csv::write_row(out, {hdi_category_name(result.category),
                             format_double(result.rs_prime), std::to_string(result.n),
                             std::to_string(result.m)});
        std::ofstream scatter = csv::open_output(
            options.out_dir /
            ("scatter_" + std::string(hdi_category_name(result.category)) + ".csv"));
        csv::write_row(scatter, {"country_iso", "un_rank", "tweet_rank"});
        for (const auto& point : result.scatter)
            csv::write_row(scatter, {point.country_iso,
                                     std::to_string(point.reference_rank),
                                     std::to_string(point.tweet_rank)});
        scatter.flush();
        if (!scatter) fail(ErrorCode::io, "scatter write failed");
    }
    out.flush();
    if (!out) fail(ErrorCode::io, "correlations write failed");
}

PipelineResult run_pipeline(const PipelineOptions& options) {
    // Validate the whole configuration before any stage touches the disk.
    if (!options.ingest.input_jsonl && !options.ingest.endpoint)
        fail(ErrorCode::invalid_argument, "pipeline needs an input file or endpoint");
    if (options.ingest.input_jsonl) require_file(*options.ingest.input_jsonl, "input");
    require_file(options.gazetteer_csv, "gazetteer");
    if (options.patch_csv) require_file(*options.patch_csv, "patch");
    if (options.denylist_csv) require_file(*options.denylist_csv, "denylist");
    require_file(options.native_map_csv, "native-language map");
    require_file(options.hdi_csv, "HDI rankings");
    if (options.top_users == 0 || options.top_words == 0)
        fail(ErrorCode::invalid_argument, "top-users and top-words must be >= 1");
    options.ingest.policy.validate();

    PipelineResult result;
    if (options.dry_run) return result;

    fs::create_directories(options.out_dir);
    using Clock = std::chrono::steady_clock;
    std::vector<std::pair<std::string, int64_t>> timings;
    auto timed = [&](const char* stage, auto&& fn) {
        Clock::time_point start = Clock::now();
        try {
            fn();
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            fail(ErrorCode::io, std::string(stage) + ": " + e.what());
        }
        timings.emplace_back(stage, std::chrono::duration_cast<std::chrono::milliseconds>(
                                        Clock::now() - start)
                                        .count());
    };

    IngestOptions ingest = options.ingest;
    ingest.output_csv = options.out_dir / "cleaned.csv";
    if (!ingest.stats_json) ingest.stats_json = options.out_dir / "ingest_stats.json";
    timed("ingest", [&] { result.ingest_stats = run_ingest(ingest); });

    ResolveOptions resolve;
    resolve.input_csv = options.out_dir / "cleaned.csv";
    resolve.gazetteer_csv = options.gazetteer_csv;
    resolve.patch_csv = options.patch_csv;
    resolve.denylist_csv = options.denylist_csv;
    resolve.output_csv = options.out_dir / "resolved.csv";
    resolve.unknowns_csv = options.out_dir / "unknowns.csv";
    resolve.metrics_json = options.out_dir / "resolve_metrics.json";
    resolve.threads = options.resolve_threads;
    timed("resolve", [&] { result.resolve_metrics = run_resolve(resolve); });

    AnalyzeOptions analyze;
    analyze.input_csv = options.out_dir / "resolved.csv";
    analyze.out_dir = options.out_dir;
    analyze.native_map_csv = options.native_map_csv;
    analyze.top_users = options.top_users;
    analyze.top_words = options.top_words;
    timed("analyze", [&] { run_analyze(analyze); });

    CorrelateOptions correlate;
    correlate.counts_csv = options.out_dir / "country_counts.csv";
    correlate.hdi_csv = options.hdi_csv;
    correlate.out_dir = options.out_dir;
    correlate.classic_factor = options.classic_factor;
    timed("correlate", [&] { run_correlate(correlate); });

    std::map<std::string, std::string> config_echo;
    if (options.ingest.input_jsonl)
        config_echo["input"] = options.ingest.input_jsonl->string();
    if (options.ingest.endpoint) config_echo["endpoint"] = *options.ingest.endpoint;
    config_echo["gazetteer"] = options.gazetteer_csv.string();
    if (options.patch_csv) config_echo["patch"] = options.patch_csv->string();
    if (options.denylist_csv) config_echo["denylist"] = options.denylist_csv->string();
    config_echo["native_map"] = options.native_map_csv.string();
    config_echo["hdi"] = options.hdi_csv.string();
    config_echo["out_dir"] = options.out_dir.string();
    config_echo["top_users"] = std::to_string(options.top_users);
    config_echo["top_words"] = std::to_string(options.top_words);
    config_echo["classic_factor"] = options.classic_factor ? "true" : "false";
    config_echo["dedupe_memory_bound"] =
        std::to_string(options.ingest.dedupe.memory_bound);
    timed("report", [&] { result.report = build_report(options.out_dir, config_echo); });

    ordered_json log;
    ordered_json stages = ordered_json::array();
    for (const auto& [stage, ms] : timings) {
        ordered_json entry;
        entry["stage"] = stage;
        entry["wall_ms"] = ms;
        stages.push_back(std::move(entry));
    }
    log["stages"] = std::move(stages);
    ordered_json stats;
    stats["seen"] = result.ingest_stats.seen;
    stats["skipped_missing_location"] = result.ingest_stats.skipped_missing_location;
    stats["skipped_missing_language"] = result.ingest_stats.skipped_missing_language;
    stats["parse_errors"] = result.ingest_stats.parse_errors;
    stats["duplicates_removed"] = result.ingest_stats.duplicates_removed;
    stats["kept"] = result.ingest_stats.kept;
    log["ingest_stats"] = std::move(stats);
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : config_echo) config[key] = value;
    log["config"] = std::move(config);
    write_json_file(log, options.out_dir / "run_log.json");
    return result;
}

}  // namespace tweetpipe
