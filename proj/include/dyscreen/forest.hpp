#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dyscreen/rng.hpp"

namespace dyscreen {

// Dense row-major matrix view shared by the learning modules.
struct MatrixView {
    const double* data = nullptr;
    std::size_t n = 0;
    std::size_t d = 0;

    double at(std::size_t row, std::size_t col) const { return data[row * d + col]; }
    std::span<const double> row(std::size_t i) const { return {data + i * d, d}; }
};

struct HyperParams {
    int n_trees = 100;
    int max_depth = -1;               // -1: unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    double max_features = -1.0;       // -1: floor(sqrt(d)); in (0,1): fraction; >=1: count
    double bootstrap_fraction = 1.0;  // sample size / n, drawn with replacement
    std::uint64_t seed = 0;

    int resolve_max_features(int d) const;
    void validate() const;

    nlohmann::json to_json() const;
    static HyperParams from_json(const nlohmann::json& j);
};

// Flat node array; feature < 0 marks a leaf. Every node keeps its class
// counts so importances can be recomputed from a deserialized model.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int64_t count0 = 0;
    std::int64_t count1 = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    // Fraction of class 1 at the reached leaf.
    double leaf_fraction(std::span<const double> row) const;
    int depth() const;
};

struct ForestModel {
    HyperParams params;
    std::vector<std::string> feature_names;
    std::uint32_t n_features = 0;
    std::vector<DecisionTree> trees;
    std::vector<double> importances;

    nlohmann::json to_json() const;
    static ForestModel from_json(const nlohmann::json& j);
};

inline double gini_impurity(double c0, double c1) {
    double n = c0 + c1;
    if (n <= 0.0) return 0.0;
    double p0 = c0 / n;
    double p1 = c1 / n;
    return 1.0 - (p0 * p0 + p1 * p1);
}

// Impurity decrease of a split given child class counts. Used both when
// scanning candidates and when recomputing importances, so the two agree
// bit for bit.
inline double split_gain(double l0, double l1, double r0, double r1) {
    double nl = l0 + l1;
    double nr = r0 + r1;
    double n = nl + nr;
    double parent = gini_impurity(l0 + r0, l1 + r1);
    return parent - (nl / n) * gini_impurity(l0, l1) - (nr / n) * gini_impurity(r0, r1);
}

// CART on the full input (no bootstrap). Candidate thresholds are midpoints
// between consecutive distinct sorted values of each drawn feature; the best
// (feature, threshold) by Gini decrease wins, ties broken toward the lowest
// feature index then the lowest threshold.
DecisionTree train_tree(MatrixView X, std::span<const std::uint8_t> y,
                        const HyperParams& params, RngStream& stream);

// Bagged ensemble; tree i trains on a with-replacement sample drawn from the
// sub-stream (seed, i), so the result is independent of thread count.
ForestModel train_forest(MatrixView X, std::span<const std::uint8_t> y,
                         const HyperParams& params,
                         std::vector<std::string> feature_names = {},
                         int n_threads = 1);

// Mean over trees of the reached leaf's class-1 fraction.
std::vector<double> predict_proba(const ForestModel& model, MatrixView X);

// 1 iff probability > 0.5 (exact tie goes to 0).
std::vector<std::uint8_t> predict(const ForestModel& model, MatrixView X);

// Normalized Gini-decrease importance; zero vector when no split exists.
std::vector<double> feature_importance(const ForestModel& model);

}  // namespace dyscreen
