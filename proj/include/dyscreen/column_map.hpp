#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dyscreen {

// Canonical record fields recognized by the pipeline.
namespace field {
inline constexpr const char* participant_id = "participant_id";
inline constexpr const char* text_id = "text_id";
inline constexpr const char* sentence_number = "sentence_number";
inline constexpr const char* word_in_sentence_number = "word_in_sentence_number";
inline constexpr const char* word_number = "word_number";
inline constexpr const char* word = "word";
inline constexpr const char* word_length = "word_length";
inline constexpr const char* dwell_time = "dwell_time";
inline constexpr const char* first_saccade_amplitude = "first_saccade_amplitude";
inline constexpr const char* first_saccade_start_time = "first_saccade_start_time";
inline constexpr const char* first_saccade_end_time = "first_saccade_end_time";
inline constexpr const char* regression_in_count = "regression_in_count";
inline constexpr const char* regression_out_count = "regression_out_count";
inline constexpr const char* fixation_count = "fixation_count";
inline constexpr const char* first_run_fixation_count = "first_run_fixation_count";
inline constexpr const char* first_fixation_index = "first_fixation_index";
inline constexpr const char* first_fixation_time = "first_fixation_time";
inline constexpr const char* first_fixation_x = "first_fixation_x";
inline constexpr const char* first_fixation_y = "first_fixation_y";
inline constexpr const char* ia_right = "ia_right";
inline constexpr const char* skip = "skip";
}  // namespace field

const std::vector<std::string>& canonical_fields();

// Maps canonical field names to CSV headers. An empty header string declares
// the field absent from the file. Also carries the cleaning drop list and
// the missing-cell sentinel.
struct ColumnMap {
    std::map<std::string, std::string> headers;
    std::vector<std::string> drop_columns;
    std::string missing_sentinel = ".";

    static ColumnMap defaults();
    static ColumnMap from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    // Header for a canonical field; "" when declared absent.
    const std::string& header_for(const std::string& field) const;
    bool has(const std::string& field) const;

    // Throws SchemaError on unknown fields or duplicate header strings.
    void validate() const;
};

}  // namespace dyscreen
