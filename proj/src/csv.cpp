#include "dyscreen/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dyscreen/errors.hpp"

namespace dyscreen {

std::optional<std::size_t> CsvTable::find(std::string_view header) const {
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (headers[i] == header) return i;
    return std::nullopt;
}

std::size_t CsvTable::column_index(std::string_view header) const {
    auto idx = find(header);
    if (!idx) throw SchemaError("column not found: " + std::string(header));
    return *idx;
}

void CsvTable::drop_column(std::size_t index) {
    headers.erase(headers.begin() + static_cast<std::ptrdiff_t>(index));
    for (auto& row : rows)
        row.erase(row.begin() + static_cast<std::ptrdiff_t>(index));
}

namespace {

// One record (line, possibly spanning quoted newlines) into cells.
// Returns the position just past the record terminator.
std::size_t parse_record(std::string_view text, std::size_t pos,
                         std::vector<std::string>& out) {
    out.clear();
    std::string cell;
    bool quoted = false;
    while (pos < text.size()) {
        char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    cell.push_back('"');
                    pos += 2;
                } else {
                    quoted = false;
                    ++pos;
                }
            } else {
                cell.push_back(c);
                ++pos;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
            ++pos;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
            ++pos;
        } else if (c == '\n' || c == '\r') {
            out.push_back(std::move(cell));
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            return pos + 1;
        } else {
            cell.push_back(c);
            ++pos;
        }
    }
    out.push_back(std::move(cell));
    return pos;
}

bool needs_quoting(std::string_view cell) {
    return cell.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_cell(std::string& out, std::string_view cell) {
    if (!needs_quoting(cell)) {
        out.append(cell);
        return;
    }
    out.push_back('"');
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

CsvTable parse_csv_text(std::string_view text, const std::string& source_name) {
    CsvTable table;
    std::size_t pos = 0;
    std::vector<std::string> cells;
    pos = parse_record(text, pos, cells);
    if (cells.empty() || (cells.size() == 1 && cells[0].empty()))
        throw DataError(source_name + ": missing header row");
    table.headers = cells;
    const std::size_t width = table.headers.size();
    std::size_t line = 1;
    while (pos < text.size()) {
        pos = parse_record(text, pos, cells);
        ++line;
        if (cells.size() == 1 && cells[0].empty()) continue;  // blank line
        if (cells.size() > width)
            throw DataError(source_name + ": row " + std::to_string(line) +
                            " has more cells than headers");
        cells.resize(width);  // short rows pad with missing
        table.rows.push_back(cells);
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv_text(buffer.str(), path.filename().string());
}

std::string csv_to_string(const CsvTable& table) {
    std::string out;
    std::size_t estimate = 16;
    for (const auto& h : table.headers) estimate += h.size() + 1;
    out.reserve(estimate * (table.rows.size() + 1));
    for (std::size_t i = 0; i < table.headers.size(); ++i) {
        if (i) out.push_back(',');
        append_cell(out, table.headers[i]);
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            append_cell(out, row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << csv_to_string(table);
}

std::optional<double> parse_cell(std::string_view cell, std::string_view sentinel) {
    // Trim ASCII whitespace.
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
        cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t'))
        cell.remove_suffix(1);
    if (cell.empty() || cell == sentinel) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_double(double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace dyscreen
