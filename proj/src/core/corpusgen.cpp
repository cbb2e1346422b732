#include "core/corpusgen.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "core/civil_time.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

namespace {

using nlohmann::json;

// Weighted country pools. Every location string must resolve to the pool's
// country with the bundled gazetteer; a test pins that correspondence.
struct PoolSpec {
    const char* iso;
    const char* language;
    uint32_t weight;
    std::vector<const char*> locations;
};

const std::vector<PoolSpec>& pool_specs() {
    static const std::vector<PoolSpec> specs = {
        {"US", "en", 100, {"New York, NY", "NYC", "Los Angeles, CA", "Chicago", "United States", "USA", "Texas", "California"}},
        {"BR", "pt", 55, {"São Paulo", "Rio de Janeiro", "Brasil", "Brazil", "Belo Horizonte"}},
        {"GB", "en", 50, {"London", "United Kingdom", "Manchester", "England", "Scotland"}},
        {"ES", "es", 38, {"Madrid", "Barcelona", "España", "Spain", "Sevilla"}},
        {"FR", "fr", 36, {"Paris, France", "France", "Lyon", "Marseille"}},
        {"AR", "es", 33, {"Buenos Aires", "Argentina", "Córdoba, Argentina", "Rosario"}},
        {"IN", "hi", 30, {"New Delhi", "Mumbai", "India", "Bangalore", "Chennai"}},
        {"MX", "es", 28, {"Ciudad de México", "Mexico City", "Guadalajara", "México", "Monterrey"}},
        {"CA", "en", 26, {"Toronto", "Canada", "Vancouver", "Montréal", "Ottawa"}},
        {"NG", "en", 24, {"Lagos", "Nigeria", "Abuja", "Port Harcourt"}},
        {"JP", "ja", 22, {"Tokyo, Japan", "Tokyo", "Osaka", "日本", "東京"}},
        {"VE", "es", 20, {"Caracas", "Venezuela", "Maracaibo"}},
        {"DE", "de", 19, {"Berlin", "Deutschland", "Germany", "München", "Hamburg"}},
        {"IT", "it", 18, {"Roma", "Milano", "Italia", "Italy", "Napoli"}},
        {"TR", "tr", 17, {"Istanbul", "Türkiye", "Turkey", "Ankara", "İzmir"}},
        {"ID", "id", 16, {"Jakarta", "Indonesia", "Bandung", "Surabaya"}},
        {"RU", "ru", 15, {"Moscow", "Москва", "Russia", "Saint Petersburg"}},
        {"PH", "tl", 14, {"Manila", "Philippines", "Quezon City", "Cebu"}},
        {"EG", "ar", 13, {"Cairo, Egypt", "Egypt", "Alexandria", "مصر"}},
        {"TH", "th", 12, {"Bangkok", "Thailand", "Chiang Mai"}},
        {"KR", "ko", 11, {"Seoul", "South Korea", "Busan", "서울"}},
        {"SA", "ar", 10, {"Riyadh", "Saudi Arabia", "Jeddah"}},
        {"CO", "es", 10, {"Bogotá", "Colombia", "Medellín"}},
        {"CL", "es", 9, {"Santiago", "Chile", "Valparaíso"}},
        {"PE", "es", 9, {"Lima", "Perú", "Peru", "Arequipa"}},
        {"NL", "nl", 8, {"Amsterdam", "Netherlands", "Nederland", "Rotterdam"}},
        {"AU", "en", 8, {"Sydney", "Melbourne", "Australia", "Brisbane"}},
        {"PK", "ur", 7, {"Karachi", "Pakistan", "Lahore", "Islamabad"}},
        {"BD", "bn", 7, {"Dhaka", "Bangladesh", "Chittagong"}},
        {"VN", "vi", 6, {"Hanoi", "Vietnam", "Ho Chi Minh City"}},
        {"MY", "ms", 6, {"Kuala Lumpur", "Malaysia", "Penang"}},
        {"ZA", "en", 5, {"Johannesburg", "Cape Town", "South Africa", "Durban"}},
        {"KE", "sw", 5, {"Nairobi", "Kenya", "Mombasa"}},
        {"UA", "uk", 4, {"Kyiv", "Ukraine", "Kharkiv"}},
        {"PL", "pl", 4, {"Warsaw", "Poland", "Kraków"}},
        {"GH", "en", 4, {"Accra", "Ghana", "Kumasi"}},
        {"ET", "am", 4, {"Addis Ababa", "Ethiopia"}},
        {"SE", "sv", 3, {"Stockholm", "Sweden", "Sverige"}},
        {"NO", "no", 3, {"Oslo", "Norway", "Bergen"}},
        {"LK", "si", 3, {"Colombo", "Sri Lanka"}},
        {"CR", "es", 3, {"San José, Costa Rica", "Costa Rica"}},
        {"MZ", "pt", 3, {"Maputo", "Mozambique"}},
        {"CD", "fr", 3, {"Kinshasa", "DR Congo"}},
        {"AF", "fa", 3, {"Kabul", "Afghanistan"}},
        {"HT", "fr", 2, {"Port-au-Prince", "Haiti"}},
        {"ML", "fr", 2, {"Bamako", "Mali"}},
        {"TD", "fr", 2, {"N'Djamena", "Chad"}},
        {"NE", "fr", 2, {"Niamey", "Niger"}},
        {"YE", "ar", 2, {"Sanaa", "Yemen"}},
        {"MW", "en", 2, {"Lilongwe", "Malawi"}},
        {"SL", "en", 2, {"Freetown", "Sierra Leone"}},
    };
    return specs;
}

const std::vector<const char*>& fictional_locations() {
    static const std::vector<const char*> pool = {
        "Asgard", "Gotham City", "Konoha", "Hueco Mundo", "Narnia", "Westeros"};
    return pool;
}

const std::vector<const char*>& unknown_locations() {
    static const std::vector<const char*> pool = {
        "Worldwide",       "somewhere over the rainbow",
        "the moon",        "planet earth",
        "in your dreams",  "everywhere and nowhere",
        "🌍",              "hell on wheels",
        "3rd rock",        "look behind you"};
    return pool;
}

// Vocabulary the texts are assembled from, roughly frequency-ordered. The
// two symbolic entries are emitted standalone so the tokenizer keeps them.
const std::vector<const char*>& vocabulary() {
    static const std::vector<const char*> words = {
        "a",     "the",   "to",    "de",   "i",      "of",    "and",  "que",
        "is",    "in",    "you",   "for",  "la",     "me",    "on",   "no",
        "this",  "that",  "y",     "it",   "my",     "we",    "be",   "at",
        "have",  "not",   "are",   "was",  "but",    "they",  "he",   "she",
        "so",    "what",  "just",  "like", "love",   "good",  "day",  "today",
        "time",  "new",   "one",   "now",  "get",    "got",   "can",  "will",
        "go",    "going", "see",   "know", "think",  "make",  "back", "out",
        "up",    "down",  "more",  "all",  "some",   "when",  "who",  "why",
        "how",   "here",  "there", "em",   "um",     "com",   "el",   "se",
        "do",    "da",    "thanks", "happy", "great", "best",  "first", "last",
        "next",  "much",  "very",  "really", "never", "always", "still", "right",
        "well",  "work",  "life",  "home", "world",  "people", "night", "morning",
        "-",     "%",     "don't", "y'all"};
    return words;
}

std::vector<std::string> language_codes() {
    return {"en", "es", "pt", "fr", "de", "it", "nl", "ru", "ja", "ko", "zh",
            "ar", "hi", "bn", "ta", "te", "ur", "tr", "id", "ms", "th", "vi",
            "pl", "uk", "ro", "el", "cs", "sv", "da", "no", "fi", "hu", "bg",
            "sr", "hr", "sk", "sl", "lt", "lv", "et", "fa", "he", "sw", "am",
            "ha", "yo", "ig", "zu", "af", "sq", "az", "be", "bs", "ca", "cy",
            "eu", "gl", "is", "ka", "kk", "km", "tl", "mk", "si"};
}

// Explicit samplers keep the byte stream identical across standard
// libraries; std::uniform_int_distribution is implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t below(uint64_t n) { return engine_() % n; }

    bool chance(double rate) {
        if (rate <= 0) return false;
        if (rate >= 1) return true;
        return below(1'000'000) < static_cast<uint64_t>(rate * 1'000'000);
    }

private:
    std::mt19937_64 engine_;
};

class WeightedPicker {
public:
    explicit WeightedPicker(std::vector<uint32_t> weights) {
        uint64_t total = 0;
        for (uint32_t w : weights) {
            total += w;
            cumulative_.push_back(total);
        }
    }

    size_t pick(Rng& rng) const {
        uint64_t roll = rng.below(cumulative_.back());
        return static_cast<size_t>(
            std::upper_bound(cumulative_.begin(), cumulative_.end(), roll) -
            cumulative_.begin());
    }

private:
    std::vector<uint64_t> cumulative_;
};

constexpr int64_t kBaseEpoch = 1569888000;  // 2019-10-01T00:00:00Z

}  // namespace

const std::vector<CorpusLocationPool>& corpus_location_pools() {
    static const std::vector<CorpusLocationPool> pools = [] {
        std::vector<CorpusLocationPool> out;
        for (const auto& spec : pool_specs()) {
            CorpusLocationPool pool;
            pool.country_iso = spec.iso;
            pool.language = spec.language;
            for (const char* loc : spec.locations) pool.locations.emplace_back(loc);
            out.push_back(std::move(pool));
        }
        return out;
    }();
    return pools;
}

const std::vector<std::string>& corpus_language_codes() {
    static const std::vector<std::string> codes = language_codes();
    return codes;
}

CorpusTruth generate_corpus(const CorpusOptions& options,
                            const std::function<void(std::string&&)>& line_sink) {
    if (options.duplicates >= options.count && options.count > 0)
        fail(ErrorCode::invalid_argument, "duplicates must be fewer than count");

    const auto& pools = corpus_location_pools();
    const auto& langs = corpus_language_codes();
    const auto& vocab = vocabulary();

    std::vector<uint32_t> country_weights;
    for (const auto& spec : pool_specs()) country_weights.push_back(spec.weight);
    WeightedPicker country_picker(std::move(country_weights));

    // Zipf-ish word weights: weight of rank r is ~ N/(r+1).
    std::vector<uint32_t> word_weights;
    for (size_t r = 0; r < vocab.size(); ++r)
        word_weights.push_back(static_cast<uint32_t>(2 * vocab.size() / (r + 1) + 1));
    WeightedPicker word_picker(std::move(word_weights));

    // A pool of heavy posters plus a long tail, so top-handle rankings have
    // structure.
    std::vector<std::string> handles;
    for (int i = 0; i < 40; ++i) handles.push_back("poster_" + std::to_string(i));
    for (int i = 0; i < 560; ++i) handles.push_back("user_" + std::to_string(i));
    std::vector<uint32_t> handle_weights;
    for (size_t i = 0; i < handles.size(); ++i)
        handle_weights.push_back(i < 40 ? static_cast<uint32_t>(220 - 5 * i) : 2);
    WeightedPicker handle_picker(std::move(handle_weights));

    Rng rng(options.seed);
    CorpusTruth truth;
    uint64_t remaining_duplicates = options.duplicates;
    uint64_t remaining_fresh = options.count - options.duplicates;
    uint64_t fresh_index = 0;
    size_t language_rotation = 0;
    std::vector<std::string> duplicable;  // lines that pass the filter

    for (uint64_t line_number = 0; line_number < options.count; ++line_number) {
        ++truth.expected_stats.seen;

        bool emit_duplicate = false;
        if (remaining_duplicates > 0 && !duplicable.empty()) {
            if (remaining_fresh == 0 ||
                rng.below(remaining_duplicates + remaining_fresh) < remaining_duplicates)
                emit_duplicate = true;
        }
        if (emit_duplicate) {
            --remaining_duplicates;
            ++truth.expected_stats.duplicates_removed;
            std::string line = duplicable[rng.below(duplicable.size())];
            line_sink(std::move(line));
            continue;
        }
        if (remaining_fresh == 0)
            fail(ErrorCode::invalid_argument,
                 "no filter-passing line available to duplicate; lower the noise rates");
        --remaining_fresh;
        uint64_t index = fresh_index++;

        if (rng.chance(options.malformed_rate)) {
            ++truth.expected_stats.parse_errors;
            line_sink("{\"created_at\": \"garbled");
            continue;
        }

        enum class LocationKind { missing, fictional, unknown, country };
        LocationKind location_kind = LocationKind::country;
        if (rng.chance(options.missing_location_rate))
            location_kind = LocationKind::missing;
        else if (rng.chance(options.fictional_location_rate))
            location_kind = LocationKind::fictional;
        else if (rng.chance(options.unknown_location_rate))
            location_kind = LocationKind::unknown;

        enum class LanguageKind { missing, undetermined, normal };
        LanguageKind language_kind = LanguageKind::normal;
        if (rng.chance(options.missing_language_rate))
            language_kind = LanguageKind::missing;
        else if (rng.chance(options.undetermined_language_rate))
            language_kind = LanguageKind::undetermined;

        size_t pool_index = country_picker.pick(rng);
        const CorpusLocationPool& pool = pools[pool_index];

        std::string language = pool.language;
        if (language_kind == LanguageKind::normal && rng.chance(0.10)) {
            language = langs[language_rotation % langs.size()];
            ++language_rotation;
        }

        bool is_retweet = rng.chance(options.retweet_rate);
        size_t handle_index = handle_picker.pick(rng);

        // Assemble the text from vocabulary draws plus occasional
        // decorations the tokenizer strips again. tracked_tokens mirrors
        // exactly what tokenize() will produce for this text.
        std::vector<std::string> tracked_tokens;
        if (is_retweet) tracked_tokens.emplace_back("rt");
        std::string text;
        if (is_retweet) {
            text = "RT @" + handles[rng.below(handles.size())] + ":";
        }
        size_t word_count = 4 + rng.below(8);
        for (size_t w = 0; w < word_count; ++w) {
            std::string word = vocab[word_picker.pick(rng)];
            if (!text.empty()) text.push_back(' ');
            text += word;
            tracked_tokens.push_back(std::move(word));
        }
        if (rng.chance(0.12)) {
            std::string tag = vocab[word_picker.pick(rng)];
            while (tag == "-" || tag == "%") tag = vocab[word_picker.pick(rng)];
            text += " #" + tag;
            tracked_tokens.push_back(std::move(tag));
        }
        if (rng.chance(0.15)) text += " @user_" + std::to_string(rng.below(500));
        if (rng.chance(0.15)) text += " https://t.co/x" + std::to_string(rng.below(100000));

        json obj;
        obj["created_at"] = civil::format_source_timestamp(
            kBaseEpoch + static_cast<int64_t>(index) * 7);
        obj["id_str"] = std::to_string(1'000'000'000'000ull + index);
        obj["text"] = text;
        if (language_kind == LanguageKind::normal)
            obj["lang"] = language;
        else if (language_kind == LanguageKind::undetermined)
            obj["lang"] = kUndeterminedLanguage;
        json user;
        user["name"] = "User " + std::to_string(handle_index);
        user["screen_name"] = handles[handle_index];
        switch (location_kind) {
            case LocationKind::missing:
                break;
            case LocationKind::fictional:
                user["location"] =
                    fictional_locations()[rng.below(fictional_locations().size())];
                break;
            case LocationKind::unknown:
                user["location"] =
                    unknown_locations()[rng.below(unknown_locations().size())];
                break;
            case LocationKind::country:
                user["location"] = pool.locations[rng.below(pool.locations.size())];
                break;
        }
        obj["user"] = std::move(user);
        if (is_retweet) obj["retweeted_status"] = json::object();

        std::string line = obj.dump();

        bool kept = true;
        if (location_kind == LocationKind::missing) {
            ++truth.expected_stats.skipped_missing_location;
            kept = false;
        } else if (language_kind != LanguageKind::normal) {
            ++truth.expected_stats.skipped_missing_language;
            kept = false;
        }
        if (kept) {
            ++truth.expected_stats.kept;
            ++truth.language_counts[language];
            if (location_kind == LocationKind::country) {
                ++truth.country_counts[pool.country_iso];
                if (is_retweet) ++truth.retweets_by_country[pool.country_iso];
            } else {
                ++truth.unresolvable_kept;
            }
            for (const auto& token : tracked_tokens) ++truth.token_counts[token];
            duplicable.push_back(line);
        }
        line_sink(std::move(line));
    }
    return truth;
}

CorpusTruth generate_corpus_file(const CorpusOptions& options,
                                 const std::filesystem::path& out_path) {
    std::ofstream out = csv::open_output(out_path);
    CorpusTruth truth = generate_corpus(options, [&](std::string&& line) {
        out << line << '\n';
    });
    out.flush();
    if (!out) fail(ErrorCode::io, "corpus write failed: " + out_path.string());
    return truth;
}

}  // namespace tweetpipe
