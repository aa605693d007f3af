#ifndef EAMOD_CSV_HPP
#define EAMOD_CSV_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eamod::csv {

/// Header-addressed table read from a plain comma-separated file.
/// No quoting support; blank lines and lines starting with '#' are skipped.
class Table {
public:
    static Table read(std::istream& in, std::string_view source = "<stream>");
    static Table read_file(const std::filesystem::path& path);

    /// Throws InvalidInput if any of `columns` is absent from the header.
    void require(std::initializer_list<std::string_view> columns) const;
    [[nodiscard]] bool has_column(std::string_view name) const;

    [[nodiscard]] std::size_t rows() const { return rows_.size(); }
    [[nodiscard]] const std::string& cell(std::size_t row, std::string_view column) const;
    [[nodiscard]] double number(std::size_t row, std::string_view column) const;
    [[nodiscard]] long integer(std::size_t row, std::string_view column) const;
    [[nodiscard]] bool boolean(std::size_t row, std::string_view column) const;
    /// 1-based source line of a data row, for diagnostics.
    [[nodiscard]] std::size_t line(std::size_t row) const { return lines_[row]; }
    [[nodiscard]] const std::string& source() const { return source_; }

private:
    [[nodiscard]] std::size_t column_index(std::string_view name) const;

    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

} // namespace eamod::csv

#endif
