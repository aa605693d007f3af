#include "eamod/csv.hpp"

#include "eamod/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace eamod::csv {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

Table Table::read(std::istream& in, std::string_view source) {
    Table t;
    t.source_ = std::string(source);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        auto fields = split(trimmed);
        if (!have_header) {
            t.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header_.size()) {
            throw InvalidInput(t.source_ + ":" + std::to_string(lineno) + ": expected "
                               + std::to_string(t.header_.size()) + " fields, got "
                               + std::to_string(fields.size()));
        }
        t.rows_.push_back(std::move(fields));
        t.lines_.push_back(lineno);
    }
    if (!have_header) {
        throw InvalidInput(t.source_ + ": missing header line");
    }
    return t;
}

Table Table::read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read(in, path.string());
}

bool Table::has_column(std::string_view name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

void Table::require(std::initializer_list<std::string_view> columns) const {
    for (auto c : columns) {
        if (!has_column(c)) {
            throw InvalidInput(source_ + ": missing column '" + std::string(c) + "'");
        }
    }
}

std::size_t Table::column_index(std::string_view name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
        throw InvalidInput(source_ + ": missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header_.begin());
}

const std::string& Table::cell(std::size_t row, std::string_view column) const {
    return rows_.at(row)[column_index(column)];
}

double Table::number(std::size_t row, std::string_view column) const {
    const auto& s = cell(row, column);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidInput(source_ + ":" + std::to_string(lines_[row]) + ": '" + s
                           + "' is not a number (column " + std::string(column) + ")");
    }
    return v;
}

long Table::integer(std::size_t row, std::string_view column) const {
    const auto& s = cell(row, column);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidInput(source_ + ":" + std::to_string(lines_[row]) + ": '" + s
                           + "' is not an integer (column " + std::string(column) + ")");
    }
    return v;
}

bool Table::boolean(std::size_t row, std::string_view column) const {
    auto s = cell(row, column);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "1" || s == "true" || s == "yes") {
        return true;
    }
    if (s == "0" || s == "false" || s == "no" || s.empty()) {
        return false;
    }
    throw InvalidInput(source_ + ":" + std::to_string(lines_[row]) + ": '" + s
                       + "' is not a boolean (column " + std::string(column) + ")");
}

} // namespace eamod::csv
