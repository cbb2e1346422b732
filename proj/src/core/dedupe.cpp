#include "core/dedupe.hpp"

#include <algorithm>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

namespace {

constexpr size_t kMaxFanIn = 512;

std::filesystem::path make_work_dir(const std::filesystem::path& base) {
    std::filesystem::path root =
        base.empty() ? std::filesystem::temp_directory_path() : base;
    std::random_device rd;
    for (int attempt = 0; attempt < 16; ++attempt) {
        std::filesystem::path dir =
            root / ("tweetpipe-dedupe-" + std::to_string(rd()));
        std::error_code ec;
        if (std::filesystem::create_directories(dir, ec)) return dir;
    }
    fail(ErrorCode::io, "cannot create dedupe spill directory under " + root.string());
}

void write_u32(std::ostream& out, uint32_t value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

void write_u64(std::ostream& out, uint64_t value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

bool read_u32(std::istream& in, uint32_t& value) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof value));
}

bool read_u64(std::istream& in, uint64_t& value) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof value));
}

// Cursor over one sorted run of (id, index) pairs.
struct RunCursor {
    std::ifstream in;
    std::string id;
    uint64_t index = 0;

    bool advance() {
        uint32_t len;
        if (!read_u32(in, len)) return false;
        id.resize(len);
        if (len && !in.read(id.data(), len)) return false;
        return read_u64(in, index);
    }
};

struct HeapOrder {
    bool operator()(const RunCursor* a, const RunCursor* b) const {
        if (a->id != b->id) return a->id > b->id;
        return a->index > b->index;
    }
};

}  // namespace

Deduper::Deduper(DedupeConfig config, std::function<void(TweetRecord&&)> sink)
    : config_(std::move(config)), sink_(std::move(sink)) {
    if (config_.memory_bound == 0)
        fail(ErrorCode::invalid_argument, "dedupe memory bound must be >= 1");
}

Deduper::~Deduper() {
    if (!work_dir_.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(work_dir_, ec);
    }
}

void Deduper::push(TweetRecord&& record) {
    if (finished_) fail(ErrorCode::invalid_argument, "push after finish");

    if (!spilled_) {
        auto [it, inserted] = seen_.insert(record.tweet_id);
        if (!inserted) {
            ++duplicates_;
            return;
        }
        sink_(std::move(record));
        if (seen_.size() >= config_.memory_bound) begin_spill();
        return;
    }

    // Spill mode: spool the serialized record and remember (id, index).
    // Indices start at 1; 0 marks ids already emitted during the in-memory
    // phase.
    ++spooled_;
    std::ostringstream row;
    csv::write_row(row, record_to_fields(record));
    std::string serialized = row.str();
    write_u32(spool_, static_cast<uint32_t>(serialized.size()));
    spool_.write(serialized.data(), static_cast<std::streamsize>(serialized.size()));
    if (!spool_) fail(ErrorCode::io, "dedupe spool write failed");

    pair_batch_.emplace_back(record.tweet_id, spooled_);
    if (pair_batch_.size() >= config_.memory_bound) flush_pair_batch();
}

void Deduper::begin_spill() {
    spilled_ = true;
    work_dir_ = make_work_dir(config_.spill_dir);
    spool_ = csv::open_output(work_dir_ / "spool.bin");

    // The ids seen so far become run 0 with the already-emitted sentinel.
    std::vector<std::pair<std::string, uint64_t>> pairs;
    pairs.reserve(seen_.size());
    for (const auto& id : seen_) pairs.emplace_back(id, 0);
    std::sort(pairs.begin(), pairs.end());
    write_run(pairs);
    seen_.clear();
    seen_.rehash(0);
}

void Deduper::flush_pair_batch() {
    if (pair_batch_.empty()) return;
    std::sort(pair_batch_.begin(), pair_batch_.end());
    write_run(pair_batch_);
    pair_batch_.clear();
}

void Deduper::write_run(const std::vector<std::pair<std::string, uint64_t>>& pairs) {
    std::filesystem::path path =
        work_dir_ / ("run-" + std::to_string(runs_.size()) + ".bin");
    std::ofstream out = csv::open_output(path);
    for (const auto& [id, index] : pairs) {
        write_u32(out, static_cast<uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        write_u64(out, index);
    }
    out.flush();
    if (!out) fail(ErrorCode::io, "dedupe run write failed: " + path.string());
    runs_.push_back(path);
}

std::vector<std::filesystem::path> Deduper::merge_runs(
    std::vector<std::filesystem::path> runs, size_t fan_in) {
    // Repeatedly merge groups of runs until one remains, keeping only the
    // smallest index per id along the way.
    size_t generation = 0;
    while (runs.size() > 1) {
        std::vector<std::filesystem::path> next;
        for (size_t group = 0; group < runs.size(); group += fan_in) {
            size_t end = std::min(runs.size(), group + fan_in);
            std::filesystem::path merged =
                work_dir_ / ("merge-" + std::to_string(generation) + "-" +
                             std::to_string(next.size()) + ".bin");
            {
                std::vector<std::unique_ptr<RunCursor>> cursors;
                std::priority_queue<RunCursor*, std::vector<RunCursor*>, HeapOrder> heap;
                for (size_t r = group; r < end; ++r) {
                    auto cursor = std::make_unique<RunCursor>();
                    cursor->in = csv::open_input(runs[r]);
                    if (cursor->advance()) {
                        heap.push(cursor.get());
                        cursors.push_back(std::move(cursor));
                    }
                }
                std::ofstream out = csv::open_output(merged);
                std::string current_id;
                bool have_current = false;
                uint64_t best_index = 0;
                auto emit = [&] {
                    write_u32(out, static_cast<uint32_t>(current_id.size()));
                    out.write(current_id.data(),
                              static_cast<std::streamsize>(current_id.size()));
                    write_u64(out, best_index);
                };
                while (!heap.empty()) {
                    RunCursor* top = heap.top();
                    heap.pop();
                    if (!have_current || top->id != current_id) {
                        if (have_current) emit();
                        current_id = top->id;
                        best_index = top->index;
                        have_current = true;
                    }
                    // Heap order guarantees the first pop of an id carries
                    // its smallest index.
                    if (top->advance()) heap.push(top);
                }
                if (have_current) emit();
                out.flush();
                if (!out) fail(ErrorCode::io, "dedupe merge write failed");
            }
            for (size_t r = group; r < end; ++r) {
                std::error_code ec;
                std::filesystem::remove(runs[r], ec);
            }
            next.push_back(merged);
        }
        runs = std::move(next);
        ++generation;
    }
    return runs;
}

uint64_t Deduper::write_survivor_runs() {
    // After the merge there is one run holding, per distinct id, its
    // smallest stream index. Index 0 means the id was emitted before the
    // spill began, so its spooled occurrences are all duplicates. Survivor
    // indices arrive in id order and are re-sorted numerically in bounded
    // chunks for the sequential spool replay.
    std::vector<std::filesystem::path> merged = merge_runs(std::move(runs_), kMaxFanIn);
    runs_.clear();

    RunCursor cursor;
    cursor.in = csv::open_input(merged.front());
    std::vector<uint64_t> chunk;
    chunk.reserve(std::min<uint64_t>(config_.memory_bound, 1 << 20));
    uint64_t survivors = 0;
    auto flush_chunk = [&] {
        if (chunk.empty()) return;
        std::sort(chunk.begin(), chunk.end());
        std::filesystem::path path =
            work_dir_ / ("idx-" + std::to_string(index_runs_.size()) + ".bin");
        std::ofstream out = csv::open_output(path);
        for (uint64_t index : chunk) write_u64(out, index);
        out.flush();
        if (!out) fail(ErrorCode::io, "dedupe index run write failed");
        index_runs_.push_back(path);
        chunk.clear();
    };
    while (cursor.advance()) {
        if (cursor.index == 0) continue;
        ++survivors;
        chunk.push_back(cursor.index);
        if (chunk.size() >= config_.memory_bound) flush_chunk();
    }
    flush_chunk();
    return survivors;
}

void Deduper::replay_spool() {
    // Merge the sorted index runs while scanning the spool once.
    std::vector<std::unique_ptr<std::ifstream>> streams;
    using Head = std::pair<uint64_t, size_t>;
    std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
    for (const auto& path : index_runs_) {
        auto in = std::make_unique<std::ifstream>(csv::open_input(path));
        uint64_t index;
        if (read_u64(*in, index)) {
            heap.emplace(index, streams.size());
            streams.push_back(std::move(in));
        }
    }
    auto next_wanted = [&]() -> std::optional<uint64_t> {
        if (heap.empty()) return std::nullopt;
        auto [index, stream] = heap.top();
        heap.pop();
        uint64_t following;
        if (read_u64(*streams[stream], following)) heap.emplace(following, stream);
        return index;
    };

    std::ifstream in = csv::open_input(work_dir_ / "spool.bin");
    std::optional<uint64_t> want = next_wanted();
    std::string serialized;
    for (uint64_t index = 1; index <= spooled_ && want; ++index) {
        uint32_t len;
        if (!read_u32(in, len)) fail(ErrorCode::io, "dedupe spool truncated");
        serialized.resize(len);
        if (len && !in.read(serialized.data(), len))
            fail(ErrorCode::io, "dedupe spool truncated");
        if (index != *want) continue;
        want = next_wanted();
        std::istringstream stream(serialized);
        csv::Reader reader(stream);
        std::vector<std::string> fields;
        if (!reader.next(fields)) fail(ErrorCode::io, "dedupe spool corrupt");
        sink_(record_from_fields(fields, index));
    }
}

uint64_t Deduper::finish() {
    if (finished_) return duplicates_;
    finished_ = true;
    if (!spilled_) return duplicates_;

    spool_.flush();
    if (!spool_) fail(ErrorCode::io, "dedupe spool write failed");
    spool_.close();
    flush_pair_batch();

    uint64_t survivors = write_survivor_runs();
    replay_spool();
    duplicates_ += spooled_ - survivors;
    return duplicates_;
}

std::pair<std::vector<TweetRecord>, uint64_t> dedupe(std::vector<TweetRecord> records,
                                                     DedupeConfig config) {
    std::vector<TweetRecord> out;
    out.reserve(records.size());
    Deduper deduper(std::move(config), [&](TweetRecord&& r) { out.push_back(std::move(r)); });
    for (auto& r : records) deduper.push(std::move(r));
    uint64_t duplicates = deduper.finish();
    return {std::move(out), duplicates};
}

}  // namespace tweetpipe
