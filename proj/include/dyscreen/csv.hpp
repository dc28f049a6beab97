#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dyscreen {

// In-memory CSV table. Cells are kept as strings so that unmapped columns
// pass through cleaning untouched; numeric views are built where needed.
struct CsvTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> find(std::string_view header) const;
    std::size_t column_index(std::string_view header) const;  // throws SchemaError
    void drop_column(std::size_t index);
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv_text(std::string_view text, const std::string& source_name);
void write_csv(const CsvTable& table, const std::filesystem::path& path);
std::string csv_to_string(const CsvTable& table);

// Numeric cell parsing; returns nullopt for empty cells, the missing
// sentinel, or anything that is not a full numeric token.
std::optional<double> parse_cell(std::string_view cell, std::string_view sentinel);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace dyscreen
