#include "core/csv.hpp"

#include <sstream>

#include "core/errors.hpp"

namespace tweetpipe::csv {

std::string escape_field(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << escape_field(fields[i]);
    }
    out.put('\n');
}

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::istream::traits_type::eof()) return false;
    ++row_;

    std::string field;
    bool quoted = false;
    for (;;) {
        if (c == std::istream::traits_type::eof()) {
            if (quoted)
                fail(ErrorCode::parse, "csv row " + std::to_string(row_) +
                                           ": unterminated quoted field");
            fields.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                int peek = in_.peek();
                if (peek == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                    // Only a separator or row end may follow a closing quote.
                    if (peek != ',' && peek != '\n' && peek != '\r' &&
                        peek != std::istream::traits_type::eof())
                        fail(ErrorCode::parse,
                             "csv row " + std::to_string(row_) +
                                 ": unexpected character after closing quote");
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else if (ch == '\r' && in_.peek() == '\n') {
            in_.get();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
        c = in_.get();
    }
}

std::vector<std::vector<std::string>> read_file(
    const std::filesystem::path& path, size_t expected_columns,
    const std::vector<std::string>* expected_header) {
    std::ifstream in = open_input(path);
    Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (expected_columns && fields.size() != expected_columns)
            fail(ErrorCode::parse,
                 path.string() + ": row " + std::to_string(reader.row_number()) +
                     " has " + std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(expected_columns));
        rows.push_back(fields);
    }
    if (expected_header) {
        if (rows.empty() || rows.front() != *expected_header)
            fail(ErrorCode::parse, path.string() + ": missing or wrong header row");
    }
    return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot open for writing: " + path.string());
    return out;
}

}  // namespace tweetpipe::csv
