#include "dyscreen/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dyscreen/errors.hpp"

namespace dyscreen {

std::optional<double> saccade_duration(const IaRecord& record) {
    if (!record.first_saccade_start_time || !record.first_saccade_end_time)
        return std::nullopt;
    const double start = *record.first_saccade_start_time;
    const double end = *record.first_saccade_end_time;
    if (end < start)
        throw DataError("first saccade ends before it starts (participant " +
                        record.participant_id + ")");
    return end - start;
}

std::string clean_word(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (unsigned char c : word)
        if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

std::vector<double> tfidf_weights(const std::vector<std::string>& tokens,
                                  const std::vector<std::string>& doc_keys) {
    if (tokens.size() != doc_keys.size())
        throw DataError("tfidf: token and document key counts differ");
    if (tokens.empty()) throw DataError("tfidf: empty corpus");

    struct DocStats {
        std::unordered_map<std::string, std::size_t> counts;
        std::size_t length = 0;
    };
    std::unordered_map<std::string, DocStats> docs;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].empty()) continue;
        DocStats& doc = docs[doc_keys[i]];
        ++doc.counts[tokens[i]];
        ++doc.length;
    }
    if (docs.empty()) throw DataError("tfidf: corpus has no usable tokens");

    std::unordered_map<std::string, std::size_t> doc_freq;
    for (const auto& [key, doc] : docs)
        for (const auto& [term, count] : doc.counts) ++doc_freq[term];

    const double n_docs = static_cast<double>(docs.size());
    std::vector<double> weights(tokens.size(), 0.0);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].empty()) continue;
        const DocStats& doc = docs.at(doc_keys[i]);
        const double tf = static_cast<double>(doc.counts.at(tokens[i])) /
                          static_cast<double>(doc.length);
        const double df = static_cast<double>(doc_freq.at(tokens[i]));
        const double idf = std::log((1.0 + n_docs) / (1.0 + df)) + 1.0;
        weights[i] = tf * idf;
    }
    return weights;
}

std::vector<std::string> minmax_scale(FeatureMatrix& matrix,
                                      const std::vector<std::string>& columns) {
    std::vector<std::string> degenerate;
    for (const auto& name : columns) {
        const std::size_t c = matrix.column_index(name);
        double lo = matrix.at(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < matrix.rows(); ++r) {
            lo = std::min(lo, matrix.at(r, c));
            hi = std::max(hi, matrix.at(r, c));
        }
        auto& scale = matrix.scales()[c];
        scale.scaled = true;
        scale.min = lo;
        scale.max = hi;
        if (hi == lo) {
            for (std::size_t r = 0; r < matrix.rows(); ++r) matrix.at(r, c) = 0.0;
            degenerate.push_back(name);
            continue;
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < matrix.rows(); ++r)
            matrix.at(r, c) = (matrix.at(r, c) - lo) / span;
    }
    return degenerate;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("percentile of empty input");
    if (p < 0.0 || p > 100.0)
        throw DataError("percentile p out of [0, 100]: " + std::to_string(p));
    for (double v : values)
        if (!std::isfinite(v)) throw DataError("percentile over non-finite values");
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
    if (lo == hi) return values[lo];
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

MetricSpec MetricSpec::defaults() {
    MetricSpec spec;
    spec.metrics = {
        {col::first_saccade_amplitude, Tail::upper},
        {col::dwell_time, Tail::upper},
        {col::regression_in_count, Tail::upper},
        {col::regression_out_count, Tail::upper},
        {col::fixation_count, Tail::upper},
        {col::saccade_duration, Tail::upper},
    };
    return spec;
}

std::string MetricSpec::rule_name() const {
    switch (rule) {
        case Rule::any: return "any";
        case Rule::all: return "all";
        case Rule::at_least_k: return "at_least_" + std::to_string(k);
    }
    return "any";
}

double LabelVector::positive_fraction() const {
    if (labels.empty()) return 0.0;
    std::size_t ones = 0;
    for (auto v : labels) ones += v;
    return static_cast<double>(ones) / static_cast<double>(labels.size());
}

nlohmann::json LabelVector::to_json() const {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, value] : thresholds) t[name] = value;
    return nlohmann::json{
        {"thresholds", std::move(t)},
        {"rule", rule},
        {"positive_fraction", positive_fraction()},
    };
}

LabelVector label_reading_difficulty(const FeatureMatrix& matrix,
                                     const MetricSpec& spec) {
    if (spec.metrics.empty()) throw ConfigError("label spec has no metrics");
    if (matrix.rows() == 0) throw DataError("cannot label an empty matrix");

    LabelVector out;
    out.rule = spec.rule_name();
    std::vector<int> flag_counts(matrix.rows(), 0);
    for (const auto& [name, tail] : spec.metrics) {
        const std::size_t c = matrix.column_index(name);
        const std::vector<double> values = matrix.column(c);
        const double threshold = percentile(values, spec.percentile_p);
        out.thresholds.emplace_back(name, threshold);
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            const bool flagged = tail == Tail::upper ? values[r] > threshold
                                                     : values[r] < threshold;
            if (flagged) ++flag_counts[r];
        }
    }

    int needed = 1;
    switch (spec.rule) {
        case MetricSpec::Rule::any: needed = 1; break;
        case MetricSpec::Rule::all: needed = static_cast<int>(spec.metrics.size()); break;
        case MetricSpec::Rule::at_least_k: needed = spec.k; break;
    }
    out.labels.resize(matrix.rows());
    for (std::size_t r = 0; r < matrix.rows(); ++r)
        out.labels[r] = flag_counts[r] >= needed ? 1 : 0;
    return out;
}

namespace {

struct ColumnBuilder {
    std::string name;
    std::vector<double> values;
    std::vector<std::uint32_t> missing;

    void push(std::optional<double> v) {
        if (v) {
            values.push_back(*v);
        } else {
            missing.push_back(static_cast<std::uint32_t>(values.size()));
            values.push_back(0.0);
        }
    }
};

std::optional<double> to_opt(const std::optional<long>& v) {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
}

}  // namespace

FeatureTable build_feature_table(const std::vector<IaRecord>& records) {
    if (records.empty()) throw DataError("no records to featurize");

    FeatureTable table;
    table.participant_ids.reserve(records.size());
    table.text_ids.reserve(records.size());

    std::vector<ColumnBuilder> cols;
    auto add = [&cols](const char* name) {
        cols.push_back(ColumnBuilder{name, {}, {}});
        return cols.size() - 1;
    };
    const std::size_t c_dwell = add(col::dwell_time);
    const std::size_t c_amp = add(col::first_saccade_amplitude);
    const std::size_t c_reg_in = add(col::regression_in_count);
    const std::size_t c_reg_out = add(col::regression_out_count);
    const std::size_t c_fix = add(col::fixation_count);
    const std::size_t c_sacdur = add(col::saccade_duration);
    const std::size_t c_first_run = add(col::first_run_fixation_count);
    const std::size_t c_ffi = add(col::first_fixation_index);
    const std::size_t c_fft = add(col::first_fixation_time);
    const std::size_t c_ffx = add(col::first_fixation_x);
    const std::size_t c_ffy = add(col::first_fixation_y);
    const std::size_t c_right = add(col::ia_right);
    const std::size_t c_skip = add(col::skip);
    const std::size_t c_word_number = add(col::word_number);
    const std::size_t c_word_length = add(col::word_length);

    std::vector<std::string> tokens;
    std::vector<std::string> doc_keys;
    tokens.reserve(records.size());
    doc_keys.reserve(records.size());

    for (const auto& rec : records) {
        table.participant_ids.push_back(rec.participant_id);
        table.text_ids.push_back(rec.text_id ? std::to_string(*rec.text_id) : "");
        cols[c_dwell].push(rec.dwell_time);
        cols[c_amp].push(rec.first_saccade_amplitude);
        cols[c_reg_in].push(to_opt(rec.regression_in_count));
        cols[c_reg_out].push(to_opt(rec.regression_out_count));
        cols[c_fix].push(to_opt(rec.fixation_count));
        cols[c_sacdur].push(saccade_duration(rec));
        cols[c_first_run].push(to_opt(rec.first_run_fixation_count));
        cols[c_ffi].push(to_opt(rec.first_fixation_index));
        cols[c_fft].push(rec.first_fixation_time);
        cols[c_ffx].push(rec.first_fixation_x);
        cols[c_ffy].push(rec.first_fixation_y);
        cols[c_right].push(rec.ia_right);
        cols[c_skip].push(rec.skip ? std::optional<double>(*rec.skip) : std::nullopt);
        cols[c_word_number].push(to_opt(rec.word_number));
        cols[c_word_length].push(to_opt(rec.word_length));
        tokens.push_back(clean_word(rec.word));
        doc_keys.push_back(rec.text_id ? std::to_string(*rec.text_id) : "");
    }

    // Mean-fill what is still missing after cleaning.
    for (auto& cb : cols) {
        if (cb.missing.empty()) continue;
        if (cb.missing.size() == cb.values.size())
            throw DataError("feature column " + cb.name + " is entirely missing");
        double sum = 0.0;
        std::vector<bool> is_missing(cb.values.size(), false);
        for (auto idx : cb.missing) is_missing[idx] = true;
        std::size_t present = 0;
        for (std::size_t i = 0; i < cb.values.size(); ++i) {
            if (is_missing[i]) continue;
            sum += cb.values[i];
            ++present;
        }
        const double mean = sum / static_cast<double>(present);
        for (auto idx : cb.missing) cb.values[idx] = mean;
        table.mean_filled_cells[cb.name] = cb.missing.size();
    }

    std::vector<std::string> names;
    names.reserve(cols.size() + 1);
    for (const auto& cb : cols) names.push_back(cb.name);
    names.push_back(col::tfidf_weight);

    FeatureMatrix matrix(names, records.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        matrix.set_column(c, cols[c].values);
    matrix.set_column(cols.size(), tfidf_weights(tokens, doc_keys));
    matrix.check_finite();
    table.matrix = std::move(matrix);
    return table;
}

}  // namespace dyscreen
