#include <doctest.h>

#include "core/corpusgen.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"
#include "core/rankcorr.hpp"
#include "core/report.hpp"
#include "helpers.hpp"

using namespace tweetpipe;

namespace {

CorpusOptions small_corpus(uint64_t seed = 5) {
    CorpusOptions options;
    options.seed = seed;
    options.count = 3'000;
    options.duplicates = 250;
    return options;
}

IngestOptions ingest_options(const std::filesystem::path& input,
                             const std::filesystem::path& output) {
    IngestOptions options;
    options.input_jsonl = input;
    options.output_csv = output;
    return options;
}

PipelineOptions pipeline_options(const testutil::TempDir& dir,
                                 const std::filesystem::path& corpus) {
    PipelineOptions options;
    options.ingest = ingest_options(corpus, {});
    options.gazetteer_csv = testutil::data_file("gazetteer.csv");
    options.denylist_csv = testutil::data_file("fictional_places.csv");
    options.native_map_csv = testutil::data_file("native_languages.csv");
    options.hdi_csv = testutil::data_file("hdi_rankings.csv");
    options.out_dir = dir.file("out");
    options.top_users = 50;
    options.top_words = 40;
    options.resolve_threads = 2;
    return options;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("run_ingest streams source to cleaned CSV with true stats") {
    testutil::TempDir dir("ingest");
    auto corpus = dir.file("corpus.jsonl");
    CorpusTruth truth = generate_corpus_file(small_corpus(), corpus);

    auto options = ingest_options(corpus, dir.file("cleaned.csv"));
    options.stats_json = dir.file("stats.json");
    IngestStats stats = run_ingest(options);

    CHECK(stats.seen == truth.expected_stats.seen);
    CHECK(stats.kept == truth.expected_stats.kept);
    CHECK(stats.duplicates_removed == truth.expected_stats.duplicates_removed);
    CHECK(stats.parse_errors == truth.expected_stats.parse_errors);
    CHECK(stats.accounting_identity_holds());

    auto records = read_records(dir.file("cleaned.csv"));
    CHECK(records.size() == stats.kept);

    auto stats_json = testutil::read_file(dir.file("stats.json"));
    CHECK(stats_json.find("\"seen\": " + std::to_string(stats.seen)) !=
          std::string::npos);

    SUBCASE("tight dedupe memory bound produces identical output") {
        auto tight = ingest_options(corpus, dir.file("cleaned_tight.csv"));
        tight.dedupe.memory_bound = 64;
        IngestStats tight_stats = run_ingest(tight);
        CHECK(tight_stats.kept == stats.kept);
        CHECK(tight_stats.duplicates_removed == stats.duplicates_removed);
        CHECK(testutil::read_file(dir.file("cleaned_tight.csv")) ==
              testutil::read_file(dir.file("cleaned.csv")));
    }
    SUBCASE("missing input file fails") {
        CHECK_THROWS_AS(run_ingest(ingest_options(dir.file("nope.jsonl"),
                                                  dir.file("x.csv"))),
                        Error);
    }
}

TEST_CASE("full pipeline produces the report bundle and run log") {
    testutil::TempDir dir("pipeline");
    auto corpus = dir.file("corpus.jsonl");
    generate_corpus_file(small_corpus(), corpus);

    auto options = pipeline_options(dir, corpus);
    PipelineResult result = run_pipeline(options);
    CHECK(result.ingest_stats.accounting_identity_holds());
    CHECK(result.resolve_metrics.resolved > 0);
    CHECK(result.report.artifacts.size() == 10);

    // Every manifest entry must point at an existing file whose hash and
    // row count are accurate.
    for (const auto& artifact : result.report.artifacts) {
        CAPTURE(artifact.name);
        auto path = options.out_dir / artifact.path;
        REQUIRE(std::filesystem::exists(path));
        CHECK(sha256_file(path) == artifact.sha256);
        auto rows = csv::read_file(path);
        REQUIRE(!rows.empty());
        CHECK(rows.size() - 1 == artifact.rows);
    }

    for (const char* name :
         {"cleaned.csv", "resolved.csv", "unknowns.csv", "country_counts.csv",
          "bins.csv", "top_users_tweets.csv", "top_users_retweets.csv",
          "top_words.csv", "languages.csv", "native_table.csv", "correlations.csv",
          "scatter_very_high.csv", "scatter_low.csv", "choropleth.csv",
          "fig3_tweets.csv", "fig3_retweets.csv", "fig4_top20.csv", "fig6_words.csv",
          "fig7_scatter_very_high.csv", "fig7_scatter_low.csv", "table1.csv",
          "manifest.json", "run_log.json", "ingest_stats.json",
          "resolve_metrics.json"})
        CHECK_MESSAGE(std::filesystem::exists(options.out_dir / name), name);

    SUBCASE("stage-by-stage execution produces identical artifacts") {
        testutil::TempDir stage_dir("stages");
        auto out = stage_dir.file("out");
        std::filesystem::create_directories(out);

        auto ingest = ingest_options(corpus, out / "cleaned.csv");
        ingest.stats_json = out / "ingest_stats.json";
        run_ingest(ingest);

        ResolveOptions resolve;
        resolve.input_csv = out / "cleaned.csv";
        resolve.gazetteer_csv = options.gazetteer_csv;
        resolve.denylist_csv = options.denylist_csv;
        resolve.output_csv = out / "resolved.csv";
        resolve.unknowns_csv = out / "unknowns.csv";
        resolve.metrics_json = out / "resolve_metrics.json";
        resolve.threads = 2;
        run_resolve(resolve);

        AnalyzeOptions analyze;
        analyze.input_csv = out / "resolved.csv";
        analyze.out_dir = out;
        analyze.native_map_csv = options.native_map_csv;
        analyze.top_users = options.top_users;
        analyze.top_words = options.top_words;
        run_analyze(analyze);

        CorrelateOptions correlate;
        correlate.counts_csv = out / "country_counts.csv";
        correlate.hdi_csv = options.hdi_csv;
        correlate.out_dir = out;
        run_correlate(correlate);

        build_report(out);

        for (const char* name :
             {"cleaned.csv", "resolved.csv", "unknowns.csv", "country_counts.csv",
              "bins.csv", "top_users_tweets.csv", "top_users_retweets.csv",
              "top_words.csv", "languages.csv", "native_table.csv",
              "correlations.csv", "scatter_very_high.csv", "scatter_high.csv",
              "scatter_medium.csv", "scatter_low.csv", "choropleth.csv",
              "fig3_tweets.csv", "fig3_retweets.csv", "fig4_top20.csv",
              "fig6_words.csv", "table1.csv"})
            CHECK_MESSAGE(testutil::read_file(out / name) ==
                              testutil::read_file(options.out_dir / name),
                          "differs: ", name);
    }
}

TEST_CASE("report rebuild is deterministic") {
    testutil::TempDir dir("determinism");
    auto corpus = dir.file("corpus.jsonl");
    generate_corpus_file(small_corpus(17), corpus);
    auto options = pipeline_options(dir, corpus);
    run_pipeline(options);

    std::map<std::string, std::string> before;
    for (const auto& entry : std::filesystem::directory_iterator(options.out_dir))
        if (entry.path().filename() != "run_log.json" &&
            entry.path().filename() != "manifest.json")
            before[entry.path().filename().string()] = testutil::read_file(entry.path());

    auto second = pipeline_options(dir, corpus);
    second.out_dir = dir.file("out2");
    run_pipeline(second);
    for (const auto& [name, contents] : before)
        CHECK_MESSAGE(testutil::read_file(second.out_dir / name) == contents,
                      "differs: ", name);
}

TEST_CASE("correlate applies the classic factor when asked") {
    testutil::TempDir dir("classic");

    // Counts that swap the top two countries of every category: the rank
    // vector is [2,1,3..], displacement sum 2.
    auto fixtures = load_hdi_fixtures(testutil::data_file("hdi_rankings.csv"));
    std::string counts = "country_iso,tweet_count,retweet_count\n";
    for (const auto& fixture : fixtures) {
        const auto& isos = fixture.countries.items();
        for (size_t i = 0; i < isos.size(); ++i) {
            uint64_t volume = 100'000 - 1'000 * i;
            if (i == 0) volume -= 1'500;  // drop first place to second
            counts += isos[i] + "," + std::to_string(volume) + ",0\n";
        }
    }
    testutil::write_file(dir.file("counts.csv"), counts);

    auto read_rs = [&](const std::filesystem::path& out) {
        auto rows = csv::read_file(out / "correlations.csv", 4);
        REQUIRE(rows.size() == 5);
        return std::stod(rows[1][1]);  // very_high
    };

    CorrelateOptions plain;
    plain.counts_csv = dir.file("counts.csv");
    plain.hdi_csv = testutil::data_file("hdi_rankings.csv");
    plain.out_dir = dir.file("plain");
    run_correlate(plain);
    CHECK(read_rs(dir.file("plain")) ==
          doctest::Approx(1.0 - 2.0 / (20.0 * 399.0)).epsilon(1e-6));

    CorrelateOptions classic = plain;
    classic.out_dir = dir.file("classic");
    classic.classic_factor = true;
    run_correlate(classic);
    CHECK(read_rs(dir.file("classic")) ==
          doctest::Approx(1.0 - 12.0 / (20.0 * 399.0)).epsilon(1e-6));
}

TEST_CASE("report fails when an upstream artifact is missing") {
    testutil::TempDir dir("missing");
    std::filesystem::create_directories(dir.file("out"));
    CHECK_THROWS_WITH_AS(build_report(dir.file("out")),
                         doctest::Contains("missing artifact: country_counts.csv"),
                         Error);
}

TEST_CASE("pipeline validation catches bad configuration before running") {
    testutil::TempDir dir("validate");
    auto corpus = dir.file("corpus.jsonl");
    generate_corpus_file(small_corpus(), corpus);
    auto options = pipeline_options(dir, corpus);

    SUBCASE("missing gazetteer names the path") {
        options.gazetteer_csv = dir.file("no-such-gazetteer.csv");
        CHECK_THROWS_WITH_AS(run_pipeline(options),
                             doctest::Contains("no-such-gazetteer.csv"), Error);
    }
    SUBCASE("dry run touches nothing") {
        options.dry_run = true;
        run_pipeline(options);
        CHECK(!std::filesystem::exists(options.out_dir));
    }
    SUBCASE("zero top-k rejected") {
        options.top_users = 0;
        CHECK_THROWS_AS(run_pipeline(options), Error);
    }
}

}  // TEST_SUITE
