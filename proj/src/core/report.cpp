#include "core/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "core/analytics.hpp"
#include "core/civil_time.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string hex(const unsigned char* bytes, size_t length) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (size_t i = 0; i < length; ++i) {
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0xf]);
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable require_table(const fs::path& dir, const std::string& name,
                       size_t expected_columns) {
    fs::path path = dir / name;
    if (!fs::exists(path)) fail(ErrorCode::missing_artifact, "missing artifact: " + name);
    auto all = csv::read_file(path, expected_columns);
    if (all.empty()) fail(ErrorCode::parse, name + ": missing header row");
    CsvTable table;
    table.header = all.front();
    table.rows.assign(all.begin() + 1, all.end());
    return table;
}

uint64_t write_table(const fs::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out = csv::open_output(path);
    csv::write_row(out, header);
    for (const auto& row : rows) csv::write_row(out, row);
    out.flush();
    if (!out) fail(ErrorCode::io, "write failed: " + path.string());
    return rows.size();
}

std::string timestamp_now() {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        long long value = std::strtoll(epoch, &end, 10);
        if (end && *end == '\0') return civil::format_iso8601_utc(value);
    }
    return civil::format_iso8601_utc(static_cast<int64_t>(std::time(nullptr)));
}

}  // namespace

std::string sha256_file(const fs::path& path) {
    std::ifstream in = csv::open_input(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        fail(ErrorCode::io, "sha256 init failed");
    }
    char buffer[1 << 16];
    while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buffer, static_cast<size_t>(in.gcount()));
        if (in.eof()) break;
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest, &length);
    EVP_MD_CTX_free(ctx);
    return hex(digest, length);
}

ReportBundle build_report(const fs::path& dir,
                          const std::map<std::string, std::string>& pipeline_config) {
    ReportBundle bundle;
    bundle.generated_at = timestamp_now();
    bundle.pipeline_config = pipeline_config;

    auto add = [&](const std::string& name, uint64_t rows) {
        bundle.artifacts.push_back({name, name, rows, sha256_file(dir / name)});
    };

    // Choropleth bins from the per-country counts.
    {
        CsvTable counts = require_table(dir, "country_counts.csv", 3);
        BinScheme scheme = BinScheme::default_scheme();
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : counts.rows) {
            if (row[0] == kUnknownCountryKey) continue;
            uint64_t tweets = std::stoull(row[1]);
            if (tweets == 0) continue;
            rows.push_back({row[0], std::to_string(scheme.bin_of(tweets) + 1)});
        }
        std::sort(rows.begin(), rows.end());
        add("choropleth.csv", write_table(dir / "choropleth.csv",
                                          {"country_iso", "bin"}, rows));
    }

    // Country composition of the top-handle lists.
    for (auto [source, target] :
         {std::pair{"top_users_tweets.csv", "fig3_tweets.csv"},
          std::pair{"top_users_retweets.csv", "fig3_retweets.csv"}}) {
        CsvTable top = require_table(dir, source, 4);
        std::map<std::string, uint64_t> by_country;
        for (const auto& row : top.rows)
            ++by_country[row[2].empty() ? kUnknownCountryKey : row[2]];
        std::vector<std::pair<std::string, uint64_t>> shares(by_country.begin(),
                                                             by_country.end());
        std::sort(shares.begin(), shares.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::vector<std::string>> rows;
        for (const auto& [iso, handles] : shares)
            rows.push_back({iso, std::to_string(handles),
                            format_tenths(percent_tenths(handles, top.rows.size()))});
        add(target, write_table(dir / target,
                                {"country_iso", "handles", "share_pct"}, rows));
    }

    // Top-20 handles.
    {
        CsvTable top = require_table(dir, "top_users_tweets.csv", 4);
        std::vector<std::vector<std::string>> rows(
            top.rows.begin(),
            top.rows.begin() + std::min<size_t>(20, top.rows.size()));
        add("fig4_top20.csv",
            write_table(dir / "fig4_top20.csv", top.header, rows));
    }

    // Word frequencies.
    {
        CsvTable words = require_table(dir, "top_words.csv", 3);
        add("fig6_words.csv",
            write_table(dir / "fig6_words.csv", words.header, words.rows));
    }

    // Correlation scatter data, one file per category.
    for (const char* category : {"very_high", "high", "medium", "low"}) {
        std::string source = std::string("scatter_") + category + ".csv";
        std::string target = std::string("fig7_scatter_") + category + ".csv";
        CsvTable scatter = require_table(dir, source, 3);
        add(target, write_table(dir / target, scatter.header, scatter.rows));
    }

    // Native-language table.
    {
        CsvTable native = require_table(dir, "native_table.csv", 7);
        add("table1.csv",
            write_table(dir / "table1.csv", native.header, native.rows));
    }

    ordered_json manifest;
    manifest["generated_at"] = bundle.generated_at;
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : bundle.pipeline_config) config[key] = value;
    manifest["pipeline_config"] = std::move(config);
    ordered_json artifacts = ordered_json::array();
    for (const auto& artifact : bundle.artifacts) {
        ordered_json entry;
        entry["name"] = artifact.name;
        entry["path"] = artifact.path;
        entry["rows"] = artifact.rows;
        entry["sha256"] = artifact.sha256;
        artifacts.push_back(std::move(entry));
    }
    manifest["artifacts"] = std::move(artifacts);

    std::ofstream out = csv::open_output(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) fail(ErrorCode::io, "manifest write failed");
    return bundle;
}

}  // namespace tweetpipe
