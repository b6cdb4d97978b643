#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "labelaudit/core.hpp"

namespace labelaudit {

/// Raw CSV contents: header plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column_index(std::string_view name) const {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        return std::nullopt;
    }
};

namespace detail {

// One RFC-4180 record; quoted fields may contain separators, doubled quotes
// and line breaks. Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            break;
        } else if (c == '\n') {
            break;
        } else {
            field.push_back(c);
        }
    }
    if (!any) return false;
    if (in_quotes) throw DataError("unterminated quoted CSV field");
    fields.push_back(std::move(field));
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::vector<std::string> fields;
    if (!detail::read_csv_record(in, fields)) throw DataError("CSV input is empty");
    if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
    for (auto& f : fields) table.header.emplace_back(detail::trim(f));
    std::size_t line = 1;
    while (detail::read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
        if (fields.size() != table.header.size()) {
            throw DataError("CSV row " + std::to_string(line) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return read_csv(in);
}

/// Strict finite-number parse of one CSV cell.
inline std::optional<double> parse_number(std::string_view cell) {
    cell = detail::trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

/// Dense codes for one column by order of first appearance. Cells listed in
/// `noise_tokens` map to Partition::kNoise.
inline std::vector<int> encode_column(const CsvTable& table, std::string_view column,
                                      const std::vector<std::string>& noise_tokens = {}) {
    auto idx = table.column_index(column);
    if (!idx) throw DataError("unknown column: " + std::string(column));
    std::unordered_map<std::string, int> codes;
    std::vector<int> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::string key(detail::trim(row[*idx]));
        bool noise = false;
        for (const auto& t : noise_tokens) noise = noise || key == t;
        if (noise) {
            out.push_back(Partition::kNoise);
            continue;
        }
        auto [it, inserted] = codes.try_emplace(key, static_cast<int>(codes.size()));
        out.push_back(it->second);
    }
    return out;
}

/// Features are every column except the label column and `excluded`.
inline Dataset dataset_from_table(const CsvTable& table, std::optional<std::string> label_column,
                                  const std::vector<std::string>& excluded = {}) {
    if (table.rows.empty()) throw DataError("CSV has a header but no data rows");
    std::optional<std::size_t> label_idx;
    if (label_column) {
        label_idx = table.column_index(*label_column);
        if (!label_idx) throw DataError("label column not found in header: " + *label_column);
    }
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (label_idx && j == *label_idx) continue;
        bool skip = false;
        for (const auto& e : excluded) skip = skip || table.header[j] == e;
        if (skip) continue;
        feature_cols.push_back(j);
        names.push_back(table.header[j]);
    }
    if (feature_cols.empty()) throw DataError("CSV has no feature columns");
    std::vector<double> values;
    values.reserve(table.rows.size() * feature_cols.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j : feature_cols) {
            auto v = parse_number(table.rows[i][j]);
            if (!v) {
                throw DataError("non-numeric value '" + table.rows[i][j] + "' at row " +
                                std::to_string(i + 1) + ", column '" + table.header[j] + "'");
            }
            values.push_back(*v);
        }
    }
    std::optional<std::vector<int>> labels;
    if (label_column) labels = encode_column(table, *label_column);
    return Dataset(table.rows.size(), feature_cols.size(), std::move(values), std::move(names),
                   std::move(labels));
}

inline Dataset load_dataset(const std::string& path,
                            std::optional<std::string> label_column = std::nullopt) {
    return dataset_from_table(read_csv_file(path), std::move(label_column));
}

namespace detail {
inline std::string format_double(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}
}  // namespace detail

/// Writes the schema read by load_dataset: feature columns then `label`.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds,
                              const std::string& label_column = "label") {
    for (std::size_t j = 0; j < ds.dim(); ++j) {
        if (j) out << ',';
        out << detail::csv_escape(ds.feature_names()[j]);
    }
    if (ds.has_labels()) out << ',' << detail::csv_escape(label_column);
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            if (j) out << ',';
            out << detail::format_double(ds.at(i, j));
        }
        if (ds.has_labels()) out << ',' << (*ds.labels())[i];
        out << '\n';
    }
}

}  // namespace labelaudit
