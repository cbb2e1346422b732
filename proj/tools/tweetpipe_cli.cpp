// Command-line front end for the tweetpipe shared library. Everything goes
// through the public C API; subcommands map one-to-one onto pipeline stages.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tweetpipe/tweetpipe.h>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;

int exit_code_for(twp_status status) {
    if (status == TWP_OK) return kExitOk;
    if (status == TWP_EINVAL) return kExitUsage;
    return kExitStage;
}

int report_failure(twp_status status) {
    std::fprintf(stderr, "error (%s): %s\n", twp_status_name(status), twp_last_error());
    return exit_code_for(status);
}

// "450/15m", "2/1s", "10/500ms" -> requests per window.
bool parse_rate(const std::string& text, uint32_t& max_requests, double& window_seconds) {
    size_t slash = text.find('/');
    if (slash == std::string::npos) return false;
    try {
        max_requests = static_cast<uint32_t>(std::stoul(text.substr(0, slash)));
    } catch (const std::exception&) {
        return false;
    }
    std::string window = text.substr(slash + 1);
    size_t pos = 0;
    double value;
    try {
        value = std::stod(window, &pos);
    } catch (const std::exception&) {
        return false;
    }
    std::string unit = window.substr(pos);
    if (unit == "ms") window_seconds = value / 1000.0;
    else if (unit.empty() || unit == "s") window_seconds = value;
    else if (unit == "m" || unit == "min") window_seconds = value * 60.0;
    else if (unit == "h") window_seconds = value * 3600.0;
    else return false;
    return max_requests > 0 && window_seconds > 0;
}

// "500-2000ms" (or "500-2000") -> bounds in milliseconds.
bool parse_interval(const std::string& text, uint32_t& min_ms, uint32_t& max_ms) {
    size_t dash = text.find('-');
    if (dash == std::string::npos) return false;
    std::string upper = text.substr(dash + 1);
    if (upper.size() >= 2 && upper.substr(upper.size() - 2) == "ms")
        upper = upper.substr(0, upper.size() - 2);
    try {
        min_ms = static_cast<uint32_t>(std::stoul(text.substr(0, dash)));
        max_ms = static_cast<uint32_t>(std::stoul(upper));
    } catch (const std::exception&) {
        return false;
    }
    return min_ms <= max_ms;
}

// Flat key=value configuration file; '#' starts a comment.
bool load_config(const std::string& path, std::map<std::string, std::string>& out,
                 std::string& error) {
    std::ifstream in(path);
    if (!in) {
        error = "cannot open config file: " + path;
        return false;
    }
    std::string line;
    size_t line_number = 0;
    auto trim = [](std::string s) {
        size_t begin = s.find_first_not_of(" \t\r");
        size_t end = s.find_last_not_of(" \t\r");
        if (begin == std::string::npos) return std::string();
        return s.substr(begin, end - begin + 1);
    };
    while (std::getline(in, line)) {
        ++line_number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            error = path + ":" + std::to_string(line_number) + ": expected key=value";
            return false;
        }
        out[trim(trimmed.substr(0, eq))] = trim(trimmed.substr(eq + 1));
    }
    return true;
}

void print_stats(const twp_ingest_stats& stats) {
    std::printf("seen:                     %llu\n", (unsigned long long)stats.seen);
    std::printf("skipped_missing_location: %llu\n",
                (unsigned long long)stats.skipped_missing_location);
    std::printf("skipped_missing_language: %llu\n",
                (unsigned long long)stats.skipped_missing_language);
    std::printf("parse_errors:             %llu\n",
                (unsigned long long)stats.parse_errors);
    std::printf("duplicates_removed:       %llu\n",
                (unsigned long long)stats.duplicates_removed);
    std::printf("kept:                     %llu\n", (unsigned long long)stats.kept);
}

void print_metrics(const twp_resolve_metrics& metrics) {
    std::printf("total:          %llu\n", (unsigned long long)metrics.total);
    std::printf("resolved:       %llu\n", (unsigned long long)metrics.resolved);
    std::printf("unresolved:     %llu\n", (unsigned long long)metrics.unresolved);
    std::printf("detection_rate: %.4f\n", metrics.detection_rate);
    if (metrics.has_precision) std::printf("precision:      %.4f\n", metrics.precision);
}

struct RunSettings {
    std::string config_path;
    std::string input;
    std::string endpoint;
    std::string rate;
    std::string interval;
    double duration = 0;
    std::string gazetteer, patch, denylist, native_map, hdi, out_dir;
    uint32_t top_users = 0, top_words = 0;
    uint64_t dedupe_memory = 0;
    int resolve_threads = 0;
    bool classic_factor = false;
    bool dry_run = false;
};

// Config file first, then flags on top.
bool apply_config(RunSettings& s, std::string& error) {
    if (s.config_path.empty()) return true;
    std::map<std::string, std::string> config;
    if (!load_config(s.config_path, config, error)) return false;
    for (const auto& [key, value] : config) {
        if (key == "input") { if (s.input.empty()) s.input = value; }
        else if (key == "endpoint") { if (s.endpoint.empty()) s.endpoint = value; }
        else if (key == "rate") { if (s.rate.empty()) s.rate = value; }
        else if (key == "interval") { if (s.interval.empty()) s.interval = value; }
        else if (key == "duration") { if (s.duration == 0) s.duration = std::stod(value); }
        else if (key == "gazetteer") { if (s.gazetteer.empty()) s.gazetteer = value; }
        else if (key == "patch") { if (s.patch.empty()) s.patch = value; }
        else if (key == "denylist") { if (s.denylist.empty()) s.denylist = value; }
        else if (key == "native_map") { if (s.native_map.empty()) s.native_map = value; }
        else if (key == "hdi") { if (s.hdi.empty()) s.hdi = value; }
        else if (key == "out_dir") { if (s.out_dir.empty()) s.out_dir = value; }
        else if (key == "top_users") { if (!s.top_users) s.top_users = std::stoul(value); }
        else if (key == "top_words") { if (!s.top_words) s.top_words = std::stoul(value); }
        else if (key == "dedupe_memory") { if (!s.dedupe_memory) s.dedupe_memory = std::stoull(value); }
        else if (key == "resolve_threads") { if (!s.resolve_threads) s.resolve_threads = std::stoi(value); }
        else if (key == "classic_factor") { if (!s.classic_factor) s.classic_factor = value == "true" || value == "1"; }
        else {
            error = s.config_path + ": unknown key \"" + key + "\"";
            return false;
        }
    }
    return true;
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tweet-stream analytics pipeline"};
    app.require_subcommand(1);

    std::string default_out_dir;
    if (const char* env = std::getenv("TWEETPIPE_OUT_DIR")) default_out_dir = env;

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "filter and dedupe raw tweet objects");
    std::string in_input, in_endpoint, in_rate = "450/15m", in_interval = "500-2000ms";
    std::string in_output, in_stats, in_spill;
    double in_duration = 60;
    uint64_t in_dedupe_memory = 0;
    ingest->add_option("--input", in_input, "JSONL replay file");
    ingest->add_option("--endpoint", in_endpoint, "HTTP polling endpoint");
    ingest->add_option("--rate", in_rate, "request quota, e.g. 450/15m");
    ingest->add_option("--interval", in_interval, "poll interval, e.g. 500-2000ms");
    ingest->add_option("--duration", in_duration, "polling duration in seconds");
    ingest->add_option("--output", in_output, "cleaned-record CSV")->required();
    ingest->add_option("--stats", in_stats, "stats JSON path");
    ingest->add_option("--dedupe-memory", in_dedupe_memory,
                       "max ids in memory before spilling");
    ingest->add_option("--spill-dir", in_spill, "directory for dedupe spill files");

    // --- resolve ---
    auto* resolve = app.add_subcommand("resolve", "detect countries from locations");
    std::string re_input, re_gazetteer, re_patch, re_denylist, re_output, re_unknowns,
        re_labels, re_metrics;
    int re_threads = 0;
    resolve->add_option("--input", re_input, "cleaned-record CSV")->required();
    resolve->add_option("--gazetteer", re_gazetteer, "gazetteer CSV")->required();
    resolve->add_option("--patch", re_patch, "gazetteer patch CSV");
    resolve->add_option("--denylist", re_denylist, "fictional-place CSV");
    resolve->add_option("--output", re_output, "resolved-record CSV")->required();
    resolve->add_option("--unknowns", re_unknowns, "unresolved-location report CSV");
    resolve->add_option("--labels", re_labels, "tweet_id,country_iso truth labels");
    resolve->add_option("--metrics", re_metrics, "metrics JSON path");
    resolve->add_option("--threads", re_threads, "resolver worker threads");

    // --- analyze ---
    auto* analyze = app.add_subcommand("analyze", "aggregate resolved records");
    std::string an_input, an_out_dir = default_out_dir, an_native;
    uint32_t an_top_users = 500, an_top_words = 100;
    analyze->add_option("--input", an_input, "resolved-record CSV")->required();
    auto* an_out_opt = analyze->add_option("--out-dir", an_out_dir, "output directory");
    analyze->add_option("--top-users", an_top_users, "handle ranking depth");
    analyze->add_option("--top-words", an_top_words, "word ranking depth");
    analyze->add_option("--native-map", an_native, "country_iso,language_code CSV")
        ->required();

    // --- correlate ---
    auto* correlate = app.add_subcommand("correlate", "rank correlation against HDI");
    std::string co_counts, co_hdi, co_out = default_out_dir;
    bool co_classic = false;
    correlate->add_option("--counts", co_counts, "country_counts.csv")->required();
    correlate->add_option("--hdi", co_hdi, "HDI rankings CSV")->required();
    auto* co_out_opt = correlate->add_option("--out", co_out, "output directory");
    correlate->add_flag("--classic-factor", co_classic,
                        "scale displacement sums by 6");

    // --- report ---
    auto* report = app.add_subcommand("report", "assemble the report bundle");
    std::string rp_dir = default_out_dir;
    auto* rp_dir_opt = report->add_option("--dir", rp_dir, "stage output directory");

    // --- run ---
    auto* run = app.add_subcommand("run", "run the whole pipeline");
    RunSettings rs;
    rs.out_dir = default_out_dir;
    run->add_option("--config", rs.config_path, "key=value configuration file");
    run->add_option("--input", rs.input, "JSONL replay file");
    run->add_option("--endpoint", rs.endpoint, "HTTP polling endpoint");
    run->add_option("--rate", rs.rate, "request quota, e.g. 450/15m");
    run->add_option("--interval", rs.interval, "poll interval, e.g. 500-2000ms");
    run->add_option("--duration", rs.duration, "polling duration in seconds");
    run->add_option("--gazetteer", rs.gazetteer, "gazetteer CSV");
    run->add_option("--patch", rs.patch, "gazetteer patch CSV");
    run->add_option("--denylist", rs.denylist, "fictional-place CSV");
    run->add_option("--native-map", rs.native_map, "native-language map CSV");
    run->add_option("--hdi", rs.hdi, "HDI rankings CSV");
    run->add_option("--out-dir", rs.out_dir, "output directory");
    run->add_option("--top-users", rs.top_users, "handle ranking depth");
    run->add_option("--top-words", rs.top_words, "word ranking depth");
    run->add_option("--dedupe-memory", rs.dedupe_memory,
                    "max ids in memory before spilling");
    run->add_option("--resolve-threads", rs.resolve_threads, "resolver threads");
    run->add_flag("--classic-factor", rs.classic_factor,
                  "scale displacement sums by 6");
    run->add_flag("--dry-run", rs.dry_run, "validate configuration and exit");

    // --- gen-corpus ---
    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
    twp_corpus_options gc;
    twp_corpus_options_init(&gc);
    std::string gc_out;
    uint64_t gc_seed = 1, gc_count = 10'000, gc_duplicates = 1'000;
    double gc_missing_loc = -1, gc_missing_lang = -1, gc_und = -1, gc_fictional = -1,
           gc_unknown = -1, gc_malformed = -1, gc_retweet = -1;
    gen->add_option("--seed", gc_seed, "generator seed");
    gen->add_option("--count", gc_count, "total lines, duplicates included");
    gen->add_option("--duplicates", gc_duplicates, "exact duplicated-line count");
    gen->add_option("--out", gc_out, "output JSONL path")->required();
    gen->add_option("--missing-location-rate", gc_missing_loc, "");
    gen->add_option("--missing-language-rate", gc_missing_lang, "");
    gen->add_option("--und-rate", gc_und, "undetermined-language rate");
    gen->add_option("--fictional-rate", gc_fictional, "");
    gen->add_option("--unknown-rate", gc_unknown, "unresolvable-location rate");
    gen->add_option("--malformed-rate", gc_malformed, "");
    gen->add_option("--retweet-rate", gc_retweet, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every parse failure is a usage error.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (ingest->parsed()) {
        twp_ingest_options opts;
        twp_ingest_options_init(&opts);
        if (in_input.empty() == in_endpoint.empty()) {
            std::fprintf(stderr, "error: ingest needs exactly one of --input/--endpoint\n");
            return kExitUsage;
        }
        if (!parse_rate(in_rate, opts.rate_max_requests, opts.rate_window_seconds)) {
            std::fprintf(stderr, "error: bad --rate \"%s\"\n", in_rate.c_str());
            return kExitUsage;
        }
        if (!parse_interval(in_interval, opts.interval_min_ms, opts.interval_max_ms)) {
            std::fprintf(stderr, "error: bad --interval \"%s\"\n", in_interval.c_str());
            return kExitUsage;
        }
        opts.input_jsonl = or_null(in_input);
        opts.endpoint = or_null(in_endpoint);
        opts.poll_duration_seconds = in_duration;
        opts.output_csv = in_output.c_str();
        opts.stats_json = or_null(in_stats);
        opts.dedupe_memory_bound = in_dedupe_memory;
        opts.spill_dir = or_null(in_spill);
        twp_ingest_stats stats;
        twp_status status = twp_ingest_run(&opts, &stats);
        if (status != TWP_OK) return report_failure(status);
        print_stats(stats);
        return kExitOk;
    }

    if (resolve->parsed()) {
        twp_resolve_options opts;
        twp_resolve_options_init(&opts);
        opts.input_csv = re_input.c_str();
        opts.gazetteer_csv = re_gazetteer.c_str();
        opts.patch_csv = or_null(re_patch);
        opts.denylist_csv = or_null(re_denylist);
        opts.output_csv = re_output.c_str();
        opts.unknowns_csv = or_null(re_unknowns);
        opts.labels_csv = or_null(re_labels);
        opts.metrics_json = or_null(re_metrics);
        opts.threads = re_threads;
        twp_resolve_metrics metrics;
        twp_status status = twp_resolve_run(&opts, &metrics);
        if (status != TWP_OK) return report_failure(status);
        print_metrics(metrics);
        return kExitOk;
    }

    if (analyze->parsed()) {
        if (an_out_dir.empty()) {
            std::fprintf(stderr, "error: --out-dir required (or set TWEETPIPE_OUT_DIR)\n");
            return kExitUsage;
        }
        (void)an_out_opt;
        twp_analyze_options opts;
        twp_analyze_options_init(&opts);
        opts.input_csv = an_input.c_str();
        opts.out_dir = an_out_dir.c_str();
        opts.native_map_csv = an_native.c_str();
        opts.top_users = an_top_users;
        opts.top_words = an_top_words;
        twp_status status = twp_analyze_run(&opts);
        if (status != TWP_OK) return report_failure(status);
        std::printf("analytics written to %s\n", an_out_dir.c_str());
        return kExitOk;
    }

    if (correlate->parsed()) {
        if (co_out.empty()) {
            std::fprintf(stderr, "error: --out required (or set TWEETPIPE_OUT_DIR)\n");
            return kExitUsage;
        }
        (void)co_out_opt;
        twp_correlate_options opts;
        twp_correlate_options_init(&opts);
        opts.counts_csv = co_counts.c_str();
        opts.hdi_csv = co_hdi.c_str();
        opts.out_dir = co_out.c_str();
        opts.classic_factor = co_classic ? 1 : 0;
        twp_status status = twp_correlate_run(&opts);
        if (status != TWP_OK) return report_failure(status);
        std::printf("correlations written to %s\n", co_out.c_str());
        return kExitOk;
    }

    if (report->parsed()) {
        if (rp_dir.empty()) {
            std::fprintf(stderr, "error: --dir required (or set TWEETPIPE_OUT_DIR)\n");
            return kExitUsage;
        }
        (void)rp_dir_opt;
        twp_status status = twp_report_run(rp_dir.c_str());
        if (status != TWP_OK) return report_failure(status);
        std::printf("report bundle written to %s\n", rp_dir.c_str());
        return kExitOk;
    }

    if (run->parsed()) {
        std::string config_error;
        if (!apply_config(rs, config_error)) {
            std::fprintf(stderr, "error: %s\n", config_error.c_str());
            return kExitUsage;
        }
        if (rs.input.empty() == rs.endpoint.empty()) {
            std::fprintf(stderr, "error: run needs exactly one of input/endpoint\n");
            return kExitUsage;
        }
        if (!rs.endpoint.empty() && rs.duration == 0) rs.duration = 60;
        if (rs.out_dir.empty()) {
            std::fprintf(stderr, "error: out_dir required (or set TWEETPIPE_OUT_DIR)\n");
            return kExitUsage;
        }
        twp_pipeline_options opts;
        twp_pipeline_options_init(&opts);
        if (!rs.rate.empty() &&
            !parse_rate(rs.rate, opts.ingest.rate_max_requests,
                        opts.ingest.rate_window_seconds)) {
            std::fprintf(stderr, "error: bad rate \"%s\"\n", rs.rate.c_str());
            return kExitUsage;
        }
        if (!rs.interval.empty() &&
            !parse_interval(rs.interval, opts.ingest.interval_min_ms,
                            opts.ingest.interval_max_ms)) {
            std::fprintf(stderr, "error: bad interval \"%s\"\n", rs.interval.c_str());
            return kExitUsage;
        }
        opts.ingest.input_jsonl = or_null(rs.input);
        opts.ingest.endpoint = or_null(rs.endpoint);
        opts.ingest.poll_duration_seconds = rs.duration;
        opts.ingest.dedupe_memory_bound = rs.dedupe_memory;
        opts.gazetteer_csv = or_null(rs.gazetteer);
        opts.patch_csv = or_null(rs.patch);
        opts.denylist_csv = or_null(rs.denylist);
        opts.native_map_csv = or_null(rs.native_map);
        opts.hdi_csv = or_null(rs.hdi);
        opts.out_dir = rs.out_dir.c_str();
        if (rs.top_users) opts.top_users = rs.top_users;
        if (rs.top_words) opts.top_words = rs.top_words;
        opts.classic_factor = rs.classic_factor ? 1 : 0;
        opts.resolve_threads = rs.resolve_threads;
        opts.dry_run = rs.dry_run ? 1 : 0;
        if (!opts.gazetteer_csv || !opts.native_map_csv || !opts.hdi_csv) {
            std::fprintf(stderr,
                         "error: gazetteer, native_map and hdi paths are required\n");
            return kExitUsage;
        }
        twp_ingest_stats stats;
        twp_resolve_metrics metrics;
        twp_status status = twp_pipeline_run(&opts, &stats, &metrics);
        if (status != TWP_OK) return report_failure(status);
        if (rs.dry_run) {
            std::printf("configuration ok\n");
            return kExitOk;
        }
        print_stats(stats);
        print_metrics(metrics);
        std::printf("report bundle written to %s\n", rs.out_dir.c_str());
        return kExitOk;
    }

    if (gen->parsed()) {
        gc.seed = gc_seed;
        gc.count = gc_count;
        gc.duplicates = gc_duplicates;
        gc.out_jsonl = gc_out.c_str();
        gc.missing_location_rate = gc_missing_loc;
        gc.missing_language_rate = gc_missing_lang;
        gc.undetermined_language_rate = gc_und;
        gc.fictional_location_rate = gc_fictional;
        gc.unknown_location_rate = gc_unknown;
        gc.malformed_rate = gc_malformed;
        gc.retweet_rate = gc_retweet;
        twp_status status = twp_corpus_generate(&gc);
        if (status != TWP_OK) return report_failure(status);
        std::printf("corpus written to %s\n", gc_out.c_str());
        return kExitOk;
    }

    return kExitUsage;
}
