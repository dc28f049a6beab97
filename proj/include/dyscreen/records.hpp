#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dyscreen/column_map.hpp"
#include "dyscreen/csv.hpp"

namespace dyscreen {

// One interest-area row of an eye-tracking report. Optionals mark values the
// file did not provide; cleaning fills some of them, the rest degrade to
// column means at featurization.
struct IaRecord {
    std::string participant_id;
    std::optional<long> text_id;
    std::optional<long> sentence_number;
    std::optional<long> word_in_sentence_number;
    std::optional<long> word_number;
    std::string word;
    std::optional<long> word_length;
    std::optional<double> dwell_time;
    std::optional<double> first_saccade_amplitude;
    std::optional<double> first_saccade_start_time;
    std::optional<double> first_saccade_end_time;
    std::optional<long> regression_in_count;
    std::optional<long> regression_out_count;
    std::optional<long> fixation_count;
    std::optional<long> first_run_fixation_count;
    std::optional<long> first_fixation_index;
    std::optional<double> first_fixation_time;
    std::optional<double> first_fixation_x;
    std::optional<double> first_fixation_y;
    std::optional<double> ia_right;
    std::optional<int> skip;
};

// Typed view of a cleaned table. Enforces record invariants: saccade end not
// before start, skip in {0,1}, word non-empty.
std::vector<IaRecord> to_records(const CsvTable& table, const ColumnMap& map);

}  // namespace dyscreen
