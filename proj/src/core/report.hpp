#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tweetpipe {

struct ReportArtifact {
    std::string name;
    std::string path;  // relative to the report directory
    uint64_t rows = 0; // data rows, header excluded
    std::string sha256;
};

struct ReportBundle {
    std::vector<ReportArtifact> artifacts;
    std::string generated_at;  // ISO-8601 UTC; excluded from hashing
    std::map<std::string, std::string> pipeline_config;
};

// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

// Assembles plot-ready artifacts from the stage outputs already present in
// `dir` (country_counts.csv, top_users_*.csv, top_words.csv, native_table.csv,
// scatter_*.csv) and writes manifest.json. Missing inputs raise
// Error(missing_artifact) naming the file. Output bytes depend only on the
// inputs; the manifest timestamp honors SOURCE_DATE_EPOCH.
ReportBundle build_report(const std::filesystem::path& dir,
                          const std::map<std::string, std::string>& pipeline_config = {});

}  // namespace tweetpipe
