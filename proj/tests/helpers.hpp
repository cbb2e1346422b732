#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/record.hpp"

namespace testutil {

// Self-deleting scratch directory for a test case.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("tweetpipe-test-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline tweetpipe::TweetRecord make_record(const std::string& id,
                                          const std::string& location = "nowhere",
                                          const std::string& lang = "en") {
    tweetpipe::TweetRecord r;
    r.created_at = "2019-10-05T12:00:00Z";
    r.tweet_id = id;
    r.language_code = lang;
    r.raw_location = location;
    r.display_name = "User " + id;
    r.username = "user_" + id;
    r.is_retweet = false;
    r.text = "hello";
    return r;
}

// Deterministic UTF-8 string generator mixing ASCII, quoting hazards,
// Latin diacritics, and astral code points.
inline std::string random_unicode(std::mt19937_64& rng, size_t max_units = 24) {
    static const std::vector<std::string> pieces = {
        "a", "Z", "9", " ", ",", "\"", "\n", "\r", "'", "%", "-",
        "é", "ß", "Ñ", "ç", "ü", "Å", "São", "México", "İstanbul",
        "Κόσμος", "Москва", "مرحبا", "नमस्ते", "こんにちは", "서울", "🌍", "𝔘"};
    size_t n = rng() % max_units;
    std::string out;
    for (size_t i = 0; i < n; ++i) out += pieces[rng() % pieces.size()];
    return out;
}

// Source directory locations injected by the build.
inline std::filesystem::path source_dir() { return TWEETPIPE_SOURCE_DIR; }
inline std::filesystem::path data_file(const std::string& name) {
    return source_dir() / "data" / name;
}
inline std::filesystem::path testdata_file(const std::string& name) {
    return source_dir() / "testdata" / name;
}

}  // namespace testutil
