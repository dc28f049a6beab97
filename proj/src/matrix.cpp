#include "dyscreen/matrix.hpp"

#include <cmath>
#include <set>

#include "dyscreen/errors.hpp"

namespace dyscreen {

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::size_t n_rows)
    : names_(std::move(names)), rows_(n_rows) {
    std::set<std::string_view> unique(names_.begin(), names_.end());
    if (unique.size() != names_.size())
        throw DataError("feature matrix column names must be unique");
    data_.assign(rows_ * names_.size(), 0.0);
    scales_.assign(names_.size(), ColumnScale{});
}

std::optional<std::size_t> FeatureMatrix::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw DataError("feature column not found: " + std::string(name));
    return *idx;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
    return out;
}

void FeatureMatrix::set_column(std::size_t c, const std::vector<double>& values) {
    if (values.size() != rows_) throw DataError("column length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) at(r, c) = values[r];
}

void FeatureMatrix::append_column(const std::string& name,
                                  const std::vector<double>& values) {
    if (rows_ == 0 && cols() == 0) rows_ = values.size();
    if (values.size() != rows_) throw DataError("column length mismatch");
    if (find(name)) throw DataError("duplicate feature column: " + name);
    std::vector<double> data(rows_ * (cols() + 1));
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols(); ++c) data[r * (cols() + 1) + c] = at(r, c);
        data[r * (cols() + 1) + cols()] = values[r];
    }
    names_.push_back(name);
    data_ = std::move(data);
    scales_.push_back(ColumnScale{});
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const {
    FeatureMatrix out(names, rows_);
    for (std::size_t c = 0; c < names.size(); ++c) {
        const std::size_t src = column_index(names[c]);
        for (std::size_t r = 0; r < rows_; ++r) out.at(r, c) = at(r, src);
        out.scales_[c] = scales_[src];
    }
    return out;
}

FeatureMatrix FeatureMatrix::take_rows(const std::vector<std::uint32_t>& rows) const {
    FeatureMatrix out(names_, rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols(); ++c) out.at(r, c) = at(rows[r], c);
    out.scales_ = scales_;
    return out;
}

void FeatureMatrix::check_finite() const {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols(); ++c)
            if (!std::isfinite(at(r, c)))
                throw DataError("non-finite value in feature column " + names_[c] +
                                " at row " + std::to_string(r));
}

}  // namespace dyscreen
