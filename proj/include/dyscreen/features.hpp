#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyscreen/matrix.hpp"
#include "dyscreen/records.hpp"

namespace dyscreen {

// Output columns of the featurization step. Input report columns keep their
// canonical headers; the two derived columns get their own.
namespace col {
inline constexpr const char* dwell_time = "Ia_Dwell_Time";
inline constexpr const char* first_saccade_amplitude = "Ia_First_Saccade_Amplitude";
inline constexpr const char* regression_in_count = "Ia_Regression_In_Count";
inline constexpr const char* regression_out_count = "Ia_Regression_Out_Count";
inline constexpr const char* fixation_count = "Ia_Fixation_Count";
inline constexpr const char* saccade_duration = "Saccade_Duration";
inline constexpr const char* first_run_fixation_count = "Ia_First_Run_Fixation_Count";
inline constexpr const char* first_fixation_index = "Ia_First_Fixation_Index";
inline constexpr const char* first_fixation_time = "Ia_First_Fixation_Time";
inline constexpr const char* first_fixation_x = "Ia_First_Fixation_X";
inline constexpr const char* first_fixation_y = "Ia_First_Fixation_Y";
inline constexpr const char* ia_right = "Ia_Right";
inline constexpr const char* skip = "Ia_Skip";
inline constexpr const char* word_number = "Word_Number";
inline constexpr const char* word_length = "Word_Length";
inline constexpr const char* tfidf_weight = "Tfidf_Weight";
inline constexpr const char* label = "Reading_Difficulties";
}  // namespace col

// End minus start of the first saccade; missing when either input is.
// Throws DataError when end precedes start.
std::optional<double> saccade_duration(const IaRecord& record);

// Lowercase, non-alphanumerics stripped.
std::string clean_word(std::string_view word);

// Smoothed tf-idf: tf = count(t, d) / tokens(d), idf = ln((1+N)/(1+df)) + 1.
// Each row receives the weight of its own token inside its own document.
// Empty tokens weigh 0 and do not count toward document length.
std::vector<double> tfidf_weights(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>& doc_keys);

// x' = (x - min) / (max - min) per column; the (min, max) pair is recorded on
// the matrix. Constant columns become all zeros and are reported back.
std::vector<std::string> minmax_scale(FeatureMatrix& matrix,
                                      const std::vector<std::string>& columns);

// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

enum class Tail { upper, lower };

struct MetricSpec {
    enum class Rule { any, all, at_least_k };

    std::vector<std::pair<std::string, Tail>> metrics;
    double percentile_p = 95.0;
    Rule rule = Rule::any;
    int k = 1;  // used by at_least_k

    static MetricSpec defaults();
    std::string rule_name() const;
};

struct LabelVector {
    std::vector<std::uint8_t> labels;
    std::vector<std::pair<std::string, double>> thresholds;  // per metric
    std::string rule;

    double positive_fraction() const;
    nlohmann::json to_json() const;
};

// Per metric, threshold = percentile_p of its column; a row is flagged when
// strictly above it (strictly below for lower-tail metrics). The combination
// rule turns per-metric flags into the final binary label.
LabelVector label_reading_difficulty(const FeatureMatrix& matrix,
                                     const MetricSpec& spec);

struct FeatureTable {
    FeatureMatrix matrix;
    std::vector<std::string> participant_ids;
    std::vector<std::string> text_ids;
    std::map<std::string, std::size_t> mean_filled_cells;  // column -> count
};

// Builds the model feature matrix from cleaned records: canonical numeric
// columns, derived saccade duration, and the tf-idf weight. Remaining missing
// numeric cells fall back to the column mean (reported per column).
FeatureTable build_feature_table(const std::vector<IaRecord>& records);

}  // namespace dyscreen
