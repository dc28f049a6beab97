#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyscreen/column_map.hpp"
#include "dyscreen/csv.hpp"
#include "dyscreen/forest.hpp"

namespace dyscreen {

struct ImputeOptions {
    std::uint64_t seed = 42;
    int max_iters = 10;
    double tol_frac = 0.01;
    HyperParams forest;  // imputation model
    int n_threads = 1;

    ImputeOptions() {
        forest.n_trees = 30;
        forest.max_depth = 12;
    }
};

struct CleaningReport {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t missing_word_rows_dropped = 0;
    std::vector<std::string> columns_dropped;
    std::map<std::string, std::size_t> cells_forward_filled;
    std::size_t leading_gaps = 0;
    struct Imputation {
        bool ran = false;
        int iterations = 0;
        std::size_t imputed_cells = 0;
        std::vector<double> changed_fraction;  // per iteration
    } imputation;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Reads the report and checks that every mapped header is present.
// Unmapped columns are preserved as opaque extras.
CsvTable parse_report(const std::filesystem::path& path, const ColumnMap& map);

// Cleaning steps. Fixed pipeline order: drop_columns -> drop_missing_word ->
// forward_fill -> impute_skip. Each is a no-op on already-clean input.
void drop_columns(CsvTable& table, const ColumnMap& map, CleaningReport& report);
void drop_missing_word(CsvTable& table, const ColumnMap& map, CleaningReport& report);
void forward_fill(CsvTable& table, const ColumnMap& map, CleaningReport& report);
void impute_skip(CsvTable& table, const ColumnMap& map, const ImputeOptions& opts,
                 CleaningReport& report);

CleaningReport clean_pipeline(CsvTable& table, const ColumnMap& map,
                              const ImputeOptions& opts);

}  // namespace dyscreen
