#include "dyscreen/column_map.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "dyscreen/errors.hpp"

namespace dyscreen {

const std::vector<std::string>& canonical_fields() {
    static const std::vector<std::string> fields = {
        field::participant_id,
        field::text_id,
        field::sentence_number,
        field::word_in_sentence_number,
        field::word_number,
        field::word,
        field::word_length,
        field::dwell_time,
        field::first_saccade_amplitude,
        field::first_saccade_start_time,
        field::first_saccade_end_time,
        field::regression_in_count,
        field::regression_out_count,
        field::fixation_count,
        field::first_run_fixation_count,
        field::first_fixation_index,
        field::first_fixation_time,
        field::first_fixation_x,
        field::first_fixation_y,
        field::ia_right,
        field::skip,
    };
    return fields;
}

ColumnMap ColumnMap::defaults() {
    ColumnMap map;
    map.headers = {
        {field::participant_id, "Participant_ID"},
        {field::text_id, "Text_ID"},
        {field::sentence_number, "Sentence_Number"},
        {field::word_in_sentence_number, "Word_In_Sentence_Number"},
        {field::word_number, "Word_Number"},
        {field::word, "Word"},
        {field::word_length, "Word_Length"},
        {field::dwell_time, "Ia_Dwell_Time"},
        {field::first_saccade_amplitude, "Ia_First_Saccade_Amplitude"},
        {field::first_saccade_start_time, "Ia_First_Saccade_Start_Time"},
        {field::first_saccade_end_time, "Ia_First_Saccade_End_Time"},
        {field::regression_in_count, "Ia_Regression_In_Count"},
        {field::regression_out_count, "Ia_Regression_Out_Count"},
        {field::fixation_count, "Ia_Fixation_Count"},
        {field::first_run_fixation_count, "Ia_First_Run_Fixation_Count"},
        {field::first_fixation_index, "Ia_First_Fixation_Index"},
        {field::first_fixation_time, "Ia_First_Fixation_Time"},
        {field::first_fixation_x, "Ia_First_Fixation_X"},
        {field::first_fixation_y, "Ia_First_Fixation_Y"},
        {field::ia_right, "Ia_Right"},
        {field::skip, "Ia_Skip"},
    };
    map.drop_columns = {"Ia_Regression_Path_Duration", "Ia_First_Run_Dwell_Time"};
    return map;
}

ColumnMap ColumnMap::from_json(const nlohmann::json& j) {
    ColumnMap map = defaults();
    if (j.contains("headers")) {
        for (const auto& [key, value] : j.at("headers").items()) {
            if (!value.is_string())
                throw ConfigError("column map header for '" + key + "' must be a string");
            map.headers[key] = value.get<std::string>();
        }
    }
    if (j.contains("drop_columns"))
        map.drop_columns = j.at("drop_columns").get<std::vector<std::string>>();
    if (j.contains("missing_sentinel"))
        map.missing_sentinel = j.at("missing_sentinel").get<std::string>();
    map.validate();
    return map;
}

nlohmann::json ColumnMap::to_json() const {
    nlohmann::json j;
    j["headers"] = headers;
    j["drop_columns"] = drop_columns;
    j["missing_sentinel"] = missing_sentinel;
    return j;
}

const std::string& ColumnMap::header_for(const std::string& field) const {
    static const std::string empty;
    auto it = headers.find(field);
    return it == headers.end() ? empty : it->second;
}

bool ColumnMap::has(const std::string& field) const {
    return !header_for(field).empty();
}

void ColumnMap::validate() const {
    const auto& known = canonical_fields();
    std::set<std::string> known_set(known.begin(), known.end());
    std::set<std::string> seen;
    for (const auto& [field_name, header] : headers) {
        if (!known_set.count(field_name))
            throw SchemaError("unknown canonical field in column map: " + field_name);
        if (header.empty()) continue;  // declared absent
        if (!seen.insert(header).second)
            throw SchemaError("column map assigns header '" + header +
                              "' to more than one field");
    }
}

}  // namespace dyscreen
