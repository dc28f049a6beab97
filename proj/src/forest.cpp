#include "dyscreen/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "dyscreen/errors.hpp"

namespace dyscreen {

int HyperParams::resolve_max_features(int d) const {
    if (d < 1) throw DataError("no features to train on");
    int mf;
    if (max_features < 0.0)
        mf = static_cast<int>(std::floor(std::sqrt(static_cast<double>(d))));
    else if (max_features < 1.0)
        mf = static_cast<int>(std::floor(max_features * d));
    else
        mf = static_cast<int>(std::floor(max_features));
    return std::clamp(mf, 1, d);
}

void HyperParams::validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (min_samples_split < 2) throw ConfigError("min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw ConfigError("min_samples_leaf must be >= 1");
    if (bootstrap_fraction <= 0.0) throw ConfigError("bootstrap_fraction must be > 0");
    if (max_features == 0.0) throw ConfigError("max_features must be nonzero");
}

double DecisionTree::leaf_fraction(std::span<const double> row) const {
    std::size_t idx = 0;
    while (nodes[idx].feature >= 0) {
        const TreeNode& node = nodes[idx];
        idx = static_cast<std::size_t>(
            row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                          : node.right);
    }
    const TreeNode& leaf = nodes[idx];
    return static_cast<double>(leaf.count1) /
           static_cast<double>(leaf.count0 + leaf.count1);
}

int DecisionTree::depth() const {
    // Iterative: depth of node i = depth of parent + 1.
    std::vector<int> depths(nodes.size(), 0);
    int max_depth = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].feature < 0) continue;
        depths[static_cast<std::size_t>(nodes[i].left)] = depths[i] + 1;
        depths[static_cast<std::size_t>(nodes[i].right)] = depths[i] + 1;
        max_depth = std::max(max_depth, depths[i] + 1);
    }
    return max_depth;
}

namespace {

// Grows one tree over a row sample. Keeps one presorted index list per
// feature and partitions all lists in place at each split, so a node of size
// s costs O(d * s) instead of a per-node sort.
class TreeBuilder {
public:
    TreeBuilder(MatrixView X, std::span<const std::uint8_t> y,
                const HyperParams& params, RngStream& stream)
        : X_(X), y_(y), params_(params), stream_(stream),
          d_(static_cast<int>(X.d)), mf_(params.resolve_max_features(d_)) {}

    DecisionTree build(std::span<const std::uint32_t> sample) {
        m_ = sample.size();
        if (m_ == 0) throw DataError("cannot train a tree on zero rows");
        values_.resize(static_cast<std::size_t>(d_) * m_);
        labels_.resize(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            labels_[j] = y_[sample[j]];
            const double* row = X_.data + static_cast<std::size_t>(sample[j]) * X_.d;
            for (int f = 0; f < d_; ++f)
                values_[static_cast<std::size_t>(f) * m_ + j] = row[f];
        }
        order_.resize(values_.size());
        scratch_.resize(m_);
        for (int f = 0; f < d_; ++f) {
            std::uint32_t* slice = order_.data() + static_cast<std::size_t>(f) * m_;
            const double* vals = values_.data() + static_cast<std::size_t>(f) * m_;
            std::iota(slice, slice + m_, 0u);
            std::sort(slice, slice + m_, [vals](std::uint32_t a, std::uint32_t b) {
                if (vals[a] != vals[b]) return vals[a] < vals[b];
                return a < b;
            });
        }
        feature_pool_.resize(static_cast<std::size_t>(d_));
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);

        DecisionTree tree;
        grow(tree);
        return tree;
    }

private:
    struct Task {
        std::size_t lo, hi;
        int depth;
        std::int32_t node;
    };

    void grow(DecisionTree& tree) {
        tree.nodes.emplace_back();
        std::vector<Task> stack;
        stack.push_back({0, m_, 0, 0});
        while (!stack.empty()) {
            Task task = stack.back();
            stack.pop_back();
            process(tree, task, stack);
        }
    }

    void process(DecisionTree& tree, const Task& task, std::vector<Task>& stack) {
        const std::size_t lo = task.lo, hi = task.hi;
        const std::size_t n = hi - lo;
        std::int64_t c1 = 0;
        for (std::size_t k = lo; k < hi; ++k)
            c1 += labels_[order_[k]];  // feature 0 slice holds the node's members
        const std::int64_t c0 = static_cast<std::int64_t>(n) - c1;
        TreeNode& node = tree.nodes[static_cast<std::size_t>(task.node)];
        node.count0 = c0;
        node.count1 = c1;

        const bool depth_ok = params_.max_depth < 0 || task.depth < params_.max_depth;
        if (c0 == 0 || c1 == 0 || !depth_ok ||
            n < static_cast<std::size_t>(params_.min_samples_split)) {
            return;  // leaf
        }

        // Draw max_features distinct features, evaluated in ascending index
        // order so equal gains resolve to the lowest feature.
        for (int i = 0; i < mf_; ++i) {
            std::size_t j = static_cast<std::size_t>(i) +
                            stream_.uniform_int(static_cast<std::uint64_t>(d_ - i));
            std::swap(feature_pool_[static_cast<std::size_t>(i)], feature_pool_[j]);
        }
        drawn_.assign(feature_pool_.begin(), feature_pool_.begin() + mf_);
        std::sort(drawn_.begin(), drawn_.end());

        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::size_t best_nl = 0;
        const std::size_t min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
        for (int f : drawn_) {
            const std::uint32_t* slice =
                order_.data() + static_cast<std::size_t>(f) * m_;
            const double* vals = values_.data() + static_cast<std::size_t>(f) * m_;
            std::int64_t l1 = 0;
            for (std::size_t k = lo; k + 1 < hi; ++k) {
                l1 += labels_[slice[k]];
                const double v = vals[slice[k]];
                const double v_next = vals[slice[k + 1]];
                if (v_next <= v) continue;  // not a distinct-value boundary
                const std::size_t nl = k - lo + 1;
                const std::size_t nr = n - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                const std::int64_t l0 = static_cast<std::int64_t>(nl) - l1;
                const double gain =
                    split_gain(static_cast<double>(l0), static_cast<double>(l1),
                               static_cast<double>(c0 - l0),
                               static_cast<double>(c1 - l1));
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (v + v_next) / 2.0;
                    best_nl = nl;
                }
            }
        }

        if (best_feature < 0 || best_gain <= 0.0) return;  // no usable split

        // Stable partition of every feature's slice by the chosen split.
        const double* split_vals =
            values_.data() + static_cast<std::size_t>(best_feature) * m_;
        for (int f = 0; f < d_; ++f) {
            std::uint32_t* slice = order_.data() + static_cast<std::size_t>(f) * m_;
            std::size_t left_pos = lo;
            std::size_t right_pos = 0;
            for (std::size_t k = lo; k < hi; ++k) {
                const std::uint32_t j = slice[k];
                if (split_vals[j] <= best_threshold)
                    slice[left_pos++] = j;
                else
                    scratch_[right_pos++] = j;
            }
            std::copy(scratch_.begin(), scratch_.begin() + right_pos,
                      slice + left_pos);
        }

        const std::size_t mid = lo + best_nl;
        const std::int32_t left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        const std::int32_t right_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(task.node)];
        parent.feature = best_feature;
        parent.threshold = best_threshold;
        parent.left = left_id;
        parent.right = right_id;
        // Left child pops first: depth-first, left-first stream consumption.
        stack.push_back({mid, hi, task.depth + 1, right_id});
        stack.push_back({lo, mid, task.depth + 1, left_id});
    }

    MatrixView X_;
    std::span<const std::uint8_t> y_;
    const HyperParams& params_;
    RngStream& stream_;
    int d_;
    int mf_;
    std::size_t m_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> labels_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> scratch_;
    std::vector<int> feature_pool_;
    std::vector<int> drawn_;
};

void check_training_input(MatrixView X, std::span<const std::uint8_t> y) {
    if (X.n == 0) throw DataError("cannot train on zero rows");
    if (X.d == 0) throw DataError("cannot train on zero features");
    if (X.n != y.size()) throw DataError("label count does not match row count");
    for (std::uint8_t v : y)
        if (v > 1) throw DataError("labels must be binary");
}

}  // namespace

DecisionTree train_tree(MatrixView X, std::span<const std::uint8_t> y,
                        const HyperParams& params, RngStream& stream) {
    check_training_input(X, y);
    params.validate();
    std::vector<std::uint32_t> all(X.n);
    std::iota(all.begin(), all.end(), 0u);
    TreeBuilder builder(X, y, params, stream);
    return builder.build(all);
}

ForestModel train_forest(MatrixView X, std::span<const std::uint8_t> y,
                         const HyperParams& params,
                         std::vector<std::string> feature_names, int n_threads) {
    check_training_input(X, y);
    params.validate();
    if (!feature_names.empty() && feature_names.size() != X.d)
        throw DataError("feature name count does not match column count");

    ForestModel model;
    model.params = params;
    model.feature_names = std::move(feature_names);
    model.n_features = static_cast<std::uint32_t>(X.d);
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    const std::size_t sample_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(params.bootstrap_fraction * static_cast<double>(X.n))));

    auto train_one = [&](std::size_t i) {
        RngStream stream = RngStream::derive(params.seed, i);
        std::vector<std::uint32_t> sample(sample_size);
        for (auto& s : sample)
            s = static_cast<std::uint32_t>(stream.uniform_int(X.n));
        TreeBuilder builder(X, y, params, stream);
        model.trees[i] = builder.build(sample);
    };

    const std::size_t n_trees = model.trees.size();
    if (n_threads <= 1 || n_trees < 2) {
        for (std::size_t i = 0; i < n_trees; ++i) train_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n_trees) return;
                train_one(i);
            }
        };
        std::vector<std::thread> pool;
        const int workers =
            std::min<int>(n_threads, static_cast<int>(n_trees));
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    model.importances = feature_importance(model);
    return model;
}

std::vector<double> predict_proba(const ForestModel& model, MatrixView X) {
    if (X.d != model.n_features)
        throw DataError("prediction input has " + std::to_string(X.d) +
                        " columns, model expects " + std::to_string(model.n_features));
    std::vector<double> probs(X.n, 0.0);
    for (std::size_t i = 0; i < X.n; ++i) {
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.leaf_fraction(X.row(i));
        probs[i] = sum / static_cast<double>(model.trees.size());
    }
    return probs;
}

std::vector<std::uint8_t> predict(const ForestModel& model, MatrixView X) {
    auto probs = predict_proba(model, X);
    std::vector<std::uint8_t> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] > 0.5 ? 1 : 0;
    return out;
}

std::vector<double> feature_importance(const ForestModel& model) {
    std::vector<double> imp(model.n_features, 0.0);
    for (const auto& tree : model.trees) {
        if (tree.nodes.empty()) continue;
        const double n_root = static_cast<double>(tree.nodes[0].count0 +
                                                  tree.nodes[0].count1);
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) continue;
            const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
            const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
            const double gain =
                split_gain(static_cast<double>(l.count0), static_cast<double>(l.count1),
                           static_cast<double>(r.count0), static_cast<double>(r.count1));
            const double n_node = static_cast<double>(node.count0 + node.count1);
            imp[static_cast<std::size_t>(node.feature)] += (n_node / n_root) * gain;
        }
    }
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total > 0.0)
        for (auto& v : imp) v /= total;
    return imp;
}

nlohmann::json HyperParams::to_json() const {
    return nlohmann::json{
        {"n_trees", n_trees},
        {"max_depth", max_depth},
        {"min_samples_split", min_samples_split},
        {"min_samples_leaf", min_samples_leaf},
        {"max_features", max_features},
        {"bootstrap_fraction", bootstrap_fraction},
        {"seed", seed},
    };
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
    HyperParams p;
    p.n_trees = j.value("n_trees", p.n_trees);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.min_samples_split = j.value("min_samples_split", p.min_samples_split);
    p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
    p.max_features = j.value("max_features", p.max_features);
    p.bootstrap_fraction = j.value("bootstrap_fraction", p.bootstrap_fraction);
    p.seed = j.value("seed", p.seed);
    p.validate();
    return p;
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json trees_json = nlohmann::json::array();
    for (const auto& tree : trees) {
        nlohmann::json t;
        auto& feature = t["feature"] = nlohmann::json::array();
        auto& threshold = t["threshold"] = nlohmann::json::array();
        auto& left = t["left"] = nlohmann::json::array();
        auto& right = t["right"] = nlohmann::json::array();
        auto& count0 = t["count0"] = nlohmann::json::array();
        auto& count1 = t["count1"] = nlohmann::json::array();
        for (const auto& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            count0.push_back(node.count0);
            count1.push_back(node.count1);
        }
        trees_json.push_back(std::move(t));
    }
    return nlohmann::json{
        {"schema_version", 1},
        {"kind", "forest_model"},
        {"hyperparams", params.to_json()},
        {"feature_names", feature_names},
        {"n_features", n_features},
        {"trees", std::move(trees_json)},
        {"importances", importances},
    };
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "forest_model")
        throw ConfigError("not a forest model document");
    ForestModel model;
    model.params = HyperParams::from_json(j.at("hyperparams"));
    model.feature_names = j.value("feature_names", std::vector<std::string>{});
    model.n_features = j.at("n_features").get<std::uint32_t>();
    for (const auto& t : j.at("trees")) {
        DecisionTree tree;
        const auto& feature = t.at("feature");
        const auto& threshold = t.at("threshold");
        const auto& left = t.at("left");
        const auto& right = t.at("right");
        const auto& count0 = t.at("count0");
        const auto& count1 = t.at("count1");
        const std::size_t n = feature.size();
        if (threshold.size() != n || left.size() != n || right.size() != n ||
            count0.size() != n || count1.size() != n)
            throw ConfigError("forest model tree arrays are inconsistent");
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            tree.nodes[i].feature = feature[i].get<std::int32_t>();
            tree.nodes[i].threshold = threshold[i].get<double>();
            tree.nodes[i].left = left[i].get<std::int32_t>();
            tree.nodes[i].right = right[i].get<std::int32_t>();
            tree.nodes[i].count0 = count0[i].get<std::int64_t>();
            tree.nodes[i].count1 = count1[i].get<std::int64_t>();
        }
        model.trees.push_back(std::move(tree));
    }
    model.importances = j.value("importances", std::vector<double>{});
    return model;
}

}  // namespace dyscreen
