#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dyscreen/forest.hpp"

namespace dyscreen {

// Dense numeric matrix with named, unique columns. Values are finite by
// construction; per-column (min, max) is recorded when a column is scaled.
class FeatureMatrix {
public:
    struct ColumnScale {
        bool scaled = false;
        double min = 0.0;
        double max = 0.0;
    };

    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> names, std::size_t n_rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return names_.size(); }

    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }

    const std::vector<std::string>& names() const { return names_; }
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;  // throws DataError

    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, const std::vector<double>& values);
    void append_column(const std::string& name, const std::vector<double>& values);

    FeatureMatrix select(const std::vector<std::string>& names) const;
    FeatureMatrix take_rows(const std::vector<std::uint32_t>& rows) const;

    const std::vector<ColumnScale>& scales() const { return scales_; }
    std::vector<ColumnScale>& scales() { return scales_; }

    MatrixView view() const { return {data_.data(), rows_, cols()}; }

    // Throws DataError on NaN or infinity anywhere.
    void check_finite() const;

private:
    std::vector<std::string> names_;
    std::vector<double> data_;  // row-major
    std::size_t rows_ = 0;
    std::vector<ColumnScale> scales_;
};

}  // namespace dyscreen
