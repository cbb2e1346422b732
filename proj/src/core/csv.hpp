#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tweetpipe::csv {

// RFC-4180 field quoting. Fields containing a comma, quote, CR or LF are
// wrapped in double quotes with embedded quotes doubled. Rows end with '\n'.
std::string escape_field(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Streaming RFC-4180 reader. Handles quoted fields with embedded commas,
// quotes and newlines; accepts both \n and \r\n row terminators.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Reads the next row into `fields`. Returns false at end of input.
    // Throws Error(parse) on an unterminated quote or a stray character
    // after a closing quote, with the 1-based row number in the message.
    bool next(std::vector<std::string>& fields);

    // 1-based number of the last row returned (header is row 1).
    uint64_t row_number() const { return row_; }

private:
    std::istream& in_;
    uint64_t row_ = 0;
};

// Reads a whole CSV file. Validates that every row has `expected_columns`
// fields (0 disables the check) and that the header matches when given.
std::vector<std::vector<std::string>> read_file(
    const std::filesystem::path& path, size_t expected_columns = 0,
    const std::vector<std::string>* expected_header = nullptr);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace tweetpipe::csv
