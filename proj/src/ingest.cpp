#include "dyscreen/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "dyscreen/errors.hpp"
#include "dyscreen/records.hpp"

namespace dyscreen {

nlohmann::json CleaningReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["rows_in"] = rows_in;
    j["rows_out"] = rows_out;
    j["missing_word_rows_dropped"] = missing_word_rows_dropped;
    j["columns_dropped"] = columns_dropped;
    j["cells_forward_filled"] = cells_forward_filled;
    j["leading_gaps"] = leading_gaps;
    j["imputation"] = {
        {"ran", imputation.ran},
        {"iterations", imputation.iterations},
        {"imputed_cells", imputation.imputed_cells},
        {"changed_fraction", imputation.changed_fraction},
    };
    j["warnings"] = warnings;
    return j;
}

CsvTable parse_report(const std::filesystem::path& path, const ColumnMap& map) {
    map.validate();
    CsvTable table = read_csv(path);
    for (const auto& [field_name, header] : map.headers) {
        if (header.empty()) continue;
        if (!table.find(header))
            throw SchemaError("mapped header '" + header + "' (field " + field_name +
                              ") not present in " + path.string());
    }
    return table;
}

void drop_columns(CsvTable& table, const ColumnMap& map, CleaningReport& report) {
    for (const auto& name : map.drop_columns) {
        auto idx = table.find(name);
        if (!idx) continue;  // dropping an absent column is a no-op
        table.drop_column(*idx);
        report.columns_dropped.push_back(name);
    }
}

namespace {

bool cell_missing(const std::string& cell, const std::string& sentinel) {
    return cell.empty() || cell == sentinel;
}

}  // namespace

void drop_missing_word(CsvTable& table, const ColumnMap& map, CleaningReport& report) {
    const std::string& header = map.header_for(field::word);
    if (header.empty()) {
        report.warnings.push_back("word column declared absent; no rows dropped");
        return;
    }
    const std::size_t c = table.column_index(header);
    std::vector<std::vector<std::string>> kept;
    kept.reserve(table.rows.size());
    for (auto& row : table.rows) {
        if (cell_missing(row[c], map.missing_sentinel))
            ++report.missing_word_rows_dropped;
        else
            kept.push_back(std::move(row));
    }
    table.rows = std::move(kept);
    if (table.rows.empty())
        report.warnings.push_back("all rows lacked a word value");
}

void forward_fill(CsvTable& table, const ColumnMap& map, CleaningReport& report) {
    const std::string group_fields[] = {field::participant_id, field::text_id};
    std::vector<std::size_t> group_cols;
    for (const auto& f : group_fields) {
        const std::string& header = map.header_for(f);
        if (!header.empty()) group_cols.push_back(table.column_index(header));
    }
    const std::string fill_fields[] = {field::sentence_number,
                                       field::word_in_sentence_number};
    for (const auto& f : fill_fields) {
        const std::string& header = map.header_for(f);
        if (header.empty()) continue;
        const std::size_t c = table.column_index(header);
        // Last seen value per group; a gap before any value stays missing.
        std::map<std::vector<std::string>, std::string> last_seen;
        std::vector<std::string> key;
        std::size_t filled = 0;
        for (auto& row : table.rows) {
            key.clear();
            for (auto gc : group_cols) key.push_back(row[gc]);
            if (cell_missing(row[c], map.missing_sentinel)) {
                auto it = last_seen.find(key);
                if (it == last_seen.end()) {
                    ++report.leading_gaps;
                } else {
                    row[c] = it->second;
                    ++filled;
                }
            } else {
                last_seen[key] = row[c];
            }
        }
        if (filled > 0) report.cells_forward_filled[header] = filled;
    }
    if (report.leading_gaps > 0)
        report.warnings.push_back("forward fill left " +
                                  std::to_string(report.leading_gaps) +
                                  " leading gap(s) unfilled");
}

namespace {

// Numeric predictor columns for the skip imputation model: every mapped
// numeric canonical field except skip itself. Missing predictor cells take
// the column mean; constant or empty columns are left out.
struct PredictorMatrix {
    std::vector<double> data;  // row-major
    std::size_t n = 0, d = 0;
};

PredictorMatrix build_predictors(const CsvTable& table, const ColumnMap& map) {
    static const char* numeric_fields[] = {
        field::text_id, field::sentence_number, field::word_in_sentence_number,
        field::word_number, field::word_length, field::dwell_time,
        field::first_saccade_amplitude, field::first_saccade_start_time,
        field::first_saccade_end_time, field::regression_in_count,
        field::regression_out_count, field::fixation_count,
        field::first_run_fixation_count, field::first_fixation_index,
        field::first_fixation_time, field::first_fixation_x,
        field::first_fixation_y, field::ia_right,
    };
    const std::size_t n = table.rows.size();
    std::vector<std::vector<double>> columns;
    for (const char* f : numeric_fields) {
        const std::string& header = map.header_for(f);
        if (header.empty()) continue;
        auto idx = table.find(header);
        if (!idx) continue;
        std::vector<double> col(n, 0.0);
        std::vector<bool> missing(n, false);
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t r = 0; r < n; ++r) {
            auto v = parse_cell(table.rows[r][*idx], map.missing_sentinel);
            if (v) {
                col[r] = *v;
                sum += *v;
                ++present;
            } else {
                missing[r] = true;
            }
        }
        if (present == 0) continue;
        const double mean = sum / static_cast<double>(present);
        bool constant = true;
        for (std::size_t r = 0; r < n; ++r) {
            if (missing[r]) col[r] = mean;
            if (col[r] != col[0]) constant = false;
        }
        if (constant) continue;
        columns.push_back(std::move(col));
    }
    PredictorMatrix m;
    m.n = n;
    m.d = columns.size();
    m.data.resize(m.n * m.d);
    for (std::size_t c = 0; c < m.d; ++c)
        for (std::size_t r = 0; r < n; ++r) m.data[r * m.d + c] = columns[c][r];
    return m;
}

}  // namespace

void impute_skip(CsvTable& table, const ColumnMap& map, const ImputeOptions& opts,
                 CleaningReport& report) {
    const std::string& header = map.header_for(field::skip);
    if (header.empty()) {
        report.warnings.push_back("skip column declared absent; imputation skipped");
        return;
    }
    const std::size_t c = table.column_index(header);
    const std::size_t n = table.rows.size();

    std::vector<std::uint32_t> missing_rows;
    std::vector<std::uint32_t> observed_rows;
    std::vector<std::uint8_t> observed_values;
    for (std::size_t r = 0; r < n; ++r) {
        auto v = parse_cell(table.rows[r][c], map.missing_sentinel);
        if (v) {
            observed_rows.push_back(static_cast<std::uint32_t>(r));
            observed_values.push_back(*v > 0.5 ? 1 : 0);
        } else {
            missing_rows.push_back(static_cast<std::uint32_t>(r));
        }
    }
    if (missing_rows.empty()) return;  // nothing to impute
    if (observed_rows.empty())
        throw DataError("cannot impute skip: no observed values");

    report.imputation.ran = true;
    report.imputation.imputed_cells = missing_rows.size();

    std::size_t ones = 0;
    for (auto v : observed_values) ones += v;
    const std::uint8_t mode = ones * 2 > observed_values.size() ? 1 : 0;
    std::vector<std::uint8_t> imputed(missing_rows.size(), mode);

    const PredictorMatrix predictors = build_predictors(table, map);
    if (predictors.d == 0) {
        // No informative predictors: the mode is the best available estimate.
        report.imputation.iterations = 1;
        report.imputation.changed_fraction.push_back(0.0);
    } else {
        MatrixView view{predictors.data.data(), predictors.n, predictors.d};
        std::vector<double> train_data(observed_rows.size() * predictors.d);
        for (std::size_t i = 0; i < observed_rows.size(); ++i)
            std::copy_n(predictors.data.data() + observed_rows[i] * predictors.d,
                        predictors.d, train_data.data() + i * predictors.d);
        MatrixView train_view{train_data.data(), observed_rows.size(), predictors.d};
        std::vector<double> miss_data(missing_rows.size() * predictors.d);
        for (std::size_t i = 0; i < missing_rows.size(); ++i)
            std::copy_n(predictors.data.data() + missing_rows[i] * predictors.d,
                        predictors.d, miss_data.data() + i * predictors.d);
        MatrixView miss_view{miss_data.data(), missing_rows.size(), predictors.d};

        // Single class observed: every prediction is that class, one pass.
        if (ones == 0 || ones == observed_values.size()) {
            report.imputation.iterations = 1;
            report.imputation.changed_fraction.push_back(0.0);
        } else {
            for (int iter = 1; iter <= opts.max_iters; ++iter) {
                HyperParams params = opts.forest;
                params.seed = RngStream::derive_seed(opts.seed, static_cast<std::uint64_t>(iter));
                ForestModel model = train_forest(train_view, observed_values, params,
                                                 {}, opts.n_threads);
                std::vector<std::uint8_t> predicted = predict(model, miss_view);
                std::size_t changed = 0;
                for (std::size_t i = 0; i < predicted.size(); ++i)
                    if (predicted[i] != imputed[i]) ++changed;
                imputed = std::move(predicted);
                const double frac = static_cast<double>(changed) /
                                    static_cast<double>(imputed.size());
                report.imputation.changed_fraction.push_back(frac);
                report.imputation.iterations = iter;
                if (frac < opts.tol_frac) break;
            }
        }
    }

    for (std::size_t i = 0; i < missing_rows.size(); ++i)
        table.rows[missing_rows[i]][c] = imputed[i] ? "1" : "0";
}

CleaningReport clean_pipeline(CsvTable& table, const ColumnMap& map,
                              const ImputeOptions& opts) {
    CleaningReport report;
    report.rows_in = table.rows.size();
    drop_columns(table, map, report);
    drop_missing_word(table, map, report);
    forward_fill(table, map, report);
    impute_skip(table, map, opts, report);
    report.rows_out = table.rows.size();
    return report;
}

namespace {

std::optional<long> parse_long_cell(const std::string& cell,
                                    const std::string& sentinel,
                                    const char* what) {
    auto v = parse_cell(cell, sentinel);
    if (!v) return std::nullopt;
    const long rounded = std::lround(*v);
    if (*v < 0)
        throw DataError(std::string(what) + " must be non-negative, got " + cell);
    return rounded;
}

}  // namespace

std::vector<IaRecord> to_records(const CsvTable& table, const ColumnMap& map) {
    map.validate();
    auto col_of = [&](const char* f) -> std::optional<std::size_t> {
        const std::string& header = map.header_for(f);
        if (header.empty()) return std::nullopt;
        auto idx = table.find(header);
        if (!idx)
            throw SchemaError("mapped header '" + header + "' (field " +
                              std::string(f) + ") not present in table");
        return idx;
    };

    const auto c_participant = col_of(field::participant_id);
    const auto c_text = col_of(field::text_id);
    const auto c_sentence = col_of(field::sentence_number);
    const auto c_wis = col_of(field::word_in_sentence_number);
    const auto c_word_number = col_of(field::word_number);
    const auto c_word = col_of(field::word);
    const auto c_word_length = col_of(field::word_length);
    const auto c_dwell = col_of(field::dwell_time);
    const auto c_amp = col_of(field::first_saccade_amplitude);
    const auto c_sac_start = col_of(field::first_saccade_start_time);
    const auto c_sac_end = col_of(field::first_saccade_end_time);
    const auto c_reg_in = col_of(field::regression_in_count);
    const auto c_reg_out = col_of(field::regression_out_count);
    const auto c_fix = col_of(field::fixation_count);
    const auto c_first_run = col_of(field::first_run_fixation_count);
    const auto c_ffi = col_of(field::first_fixation_index);
    const auto c_fft = col_of(field::first_fixation_time);
    const auto c_ffx = col_of(field::first_fixation_x);
    const auto c_ffy = col_of(field::first_fixation_y);
    const auto c_right = col_of(field::ia_right);
    const auto c_skip = col_of(field::skip);

    const std::string& sentinel = map.missing_sentinel;
    std::vector<IaRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        IaRecord rec;
        auto num = [&](const std::optional<std::size_t>& c) -> std::optional<double> {
            if (!c) return std::nullopt;
            return parse_cell(row[*c], sentinel);
        };
        auto integer = [&](const std::optional<std::size_t>& c,
                           const char* what) -> std::optional<long> {
            if (!c) return std::nullopt;
            return parse_long_cell(row[*c], sentinel, what);
        };
        if (c_participant) rec.participant_id = row[*c_participant];
        rec.text_id = integer(c_text, "text_id");
        rec.sentence_number = integer(c_sentence, "sentence_number");
        rec.word_in_sentence_number = integer(c_wis, "word_in_sentence_number");
        rec.word_number = integer(c_word_number, "word_number");
        if (c_word) rec.word = row[*c_word] == sentinel ? "" : row[*c_word];
        rec.word_length = integer(c_word_length, "word_length");
        rec.dwell_time = num(c_dwell);
        rec.first_saccade_amplitude = num(c_amp);
        rec.first_saccade_start_time = num(c_sac_start);
        rec.first_saccade_end_time = num(c_sac_end);
        rec.regression_in_count = integer(c_reg_in, "regression_in_count");
        rec.regression_out_count = integer(c_reg_out, "regression_out_count");
        rec.fixation_count = integer(c_fix, "fixation_count");
        rec.first_run_fixation_count = integer(c_first_run, "first_run_fixation_count");
        rec.first_fixation_index = integer(c_ffi, "first_fixation_index");
        rec.first_fixation_time = num(c_fft);
        rec.first_fixation_x = num(c_ffx);
        rec.first_fixation_y = num(c_ffy);
        rec.ia_right = num(c_right);
        if (c_skip) {
            auto v = num(c_skip);
            if (v) {
                if (*v != 0.0 && *v != 1.0)
                    throw DataError("skip must be 0 or 1 after cleaning");
                rec.skip = static_cast<int>(*v);
            }
        }
        if (rec.first_saccade_start_time && rec.first_saccade_end_time &&
            *rec.first_saccade_end_time < *rec.first_saccade_start_time)
            throw DataError("first saccade ends before it starts (participant " +
                            rec.participant_id + ")");
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace dyscreen
