#include "etune/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "etune/errors.hpp"

namespace etune {

namespace {

constexpr double kPredictionFloor = 1e-6;
constexpr double kMinSplitGain = 1e-12;

} // namespace

LossTerms energy_loss(double predicted, double measured) {
    if (!(measured > 0.0)) {
        throw NonPositiveEnergy("measured energy must be positive, got " +
                                std::to_string(measured));
    }
    const double diff = predicted - measured;
    LossTerms t;
    t.value = diff * diff / measured;
    t.gradient = 2.0 * diff / measured;
    t.hessian = 2.0 / measured;
    return t;
}

double RegressionTree::eval(const FeatureVector& f) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = f[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left
                                                                    : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

// Exact greedy split search, level by level over presorted feature columns.
struct TreeBuilder {
    struct NodeStats {
        double grad_sum = 0.0;
        double hess_sum = 0.0;
    };
    struct SplitChoice {
        double gain = 0.0;
        int feature = -1;
        double threshold = 0.0;
    };

    static double leaf_objective(const NodeStats& s, double lambda) {
        return s.grad_sum * s.grad_sum / (s.hess_sum + lambda);
    }

    static RegressionTree build(const std::vector<FeatureVector>& feats,
                                const std::vector<std::vector<int>>& sorted_by_feature,
                                const std::vector<double>& grad,
                                const std::vector<double>& hess,
                                const BoostParams& params) {
        const int n = static_cast<int>(feats.size());
        RegressionTree tree;
        tree.nodes.push_back(TreeNode{});

        std::vector<int> node_of(static_cast<std::size_t>(n), 0);
        std::vector<NodeStats> stats(1);
        for (int i = 0; i < n; ++i) {
            stats[0].grad_sum += grad[static_cast<std::size_t>(i)];
            stats[0].hess_sum += hess[static_cast<std::size_t>(i)];
        }
        std::vector<int> frontier = {0};

        for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
            std::vector<SplitChoice> best(tree.nodes.size());
            std::vector<NodeStats> running(tree.nodes.size());
            std::vector<double> prev_value(tree.nodes.size(), 0.0);
            std::vector<char> has_prev(tree.nodes.size(), 0);
            std::vector<char> active(tree.nodes.size(), 0);
            for (int id : frontier) active[static_cast<std::size_t>(id)] = 1;

            for (int f = 0; f < kFeatureDim; ++f) {
                for (int id : frontier) {
                    running[static_cast<std::size_t>(id)] = NodeStats{};
                    has_prev[static_cast<std::size_t>(id)] = 0;
                }
                for (int idx : sorted_by_feature[static_cast<std::size_t>(f)]) {
                    const int id = node_of[static_cast<std::size_t>(idx)];
                    if (!active[static_cast<std::size_t>(id)]) continue;
                    const double value =
                        feats[static_cast<std::size_t>(idx)][static_cast<std::size_t>(f)];
                    NodeStats& run = running[static_cast<std::size_t>(id)];
                    if (has_prev[static_cast<std::size_t>(id)] &&
                        value > prev_value[static_cast<std::size_t>(id)]) {
                        const NodeStats& total = stats[static_cast<std::size_t>(id)];
                        const NodeStats right{total.grad_sum - run.grad_sum,
                                              total.hess_sum - run.hess_sum};
                        if (run.hess_sum >= params.min_leaf_weight &&
                            right.hess_sum >= params.min_leaf_weight) {
                            const double gain =
                                0.5 * (leaf_objective(run, params.reg_lambda) +
                                       leaf_objective(right, params.reg_lambda) -
                                       leaf_objective(total, params.reg_lambda));
                            SplitChoice& b = best[static_cast<std::size_t>(id)];
                            if (gain > kMinSplitGain && gain > b.gain) {
                                b.gain = gain;
                                b.feature = f;
                                b.threshold =
                                    0.5 * (prev_value[static_cast<std::size_t>(id)] + value);
                            }
                        }
                    }
                    run.grad_sum += grad[static_cast<std::size_t>(idx)];
                    run.hess_sum += hess[static_cast<std::size_t>(idx)];
                    prev_value[static_cast<std::size_t>(id)] = value;
                    has_prev[static_cast<std::size_t>(id)] = 1;
                }
            }

            std::vector<int> next_frontier;
            for (int id : frontier) {
                const SplitChoice& b = best[static_cast<std::size_t>(id)];
                if (b.feature < 0) continue; // stays a leaf
                TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
                node.feature = b.feature;
                node.threshold = b.threshold;
                node.left = static_cast<int>(tree.nodes.size());
                node.right = node.left + 1;
                tree.nodes.push_back(TreeNode{});
                tree.nodes.push_back(TreeNode{});
                stats.resize(tree.nodes.size());
                next_frontier.push_back(node.left);
                next_frontier.push_back(node.right);
            }
            if (next_frontier.empty()) break;

            // route samples of split nodes to their children
            for (int i = 0; i < n; ++i) {
                int id = node_of[static_cast<std::size_t>(i)];
                const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
                if (node.feature < 0) continue;
                const double value =
                    feats[static_cast<std::size_t>(i)][static_cast<std::size_t>(node.feature)];
                id = value < node.threshold ? node.left : node.right;
                node_of[static_cast<std::size_t>(i)] = id;
                stats[static_cast<std::size_t>(id)].grad_sum +=
                    grad[static_cast<std::size_t>(i)];
                stats[static_cast<std::size_t>(id)].hess_sum +=
                    hess[static_cast<std::size_t>(i)];
            }
            frontier = std::move(next_frontier);
        }

        // Newton step per leaf (unscaled; the learning rate applies at predict)
        for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
            TreeNode& node = tree.nodes[id];
            if (node.feature >= 0) continue;
            node.value = -stats[id].grad_sum / (stats[id].hess_sum + params.reg_lambda);
        }
        return tree;
    }
};

} // namespace

EnergyModel EnergyModel::train(const std::vector<EnergySample>& samples,
                               const BoostParams& params) {
    if (samples.size() < 2) {
        throw InsufficientData("training needs at least 2 samples, got " +
                               std::to_string(samples.size()));
    }
    double reference = std::numeric_limits<double>::infinity();
    for (const EnergySample& s : samples) {
        if (!(s.measured_energy_mj > 0.0)) {
            throw NonPositiveEnergy("training sample with non-positive energy");
        }
        reference = std::min(reference, s.measured_energy_mj);
    }

    const int n = static_cast<int>(samples.size());
    std::vector<FeatureVector> feats(samples.size());
    std::vector<double> target(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        feats[i] = samples[i].features;
        target[i] = samples[i].measured_energy_mj / reference;
    }

    EnergyModel model;
    model.params_ = params;
    model.reference_energy_mj_ = reference;

    // base score minimizing sum((b - y)^2 / y): the harmonic mean
    double inv_sum = 0.0;
    for (double y : target) inv_sum += 1.0 / y;
    model.base_score_ = static_cast<double>(n) / inv_sum;

    std::vector<std::vector<int>> sorted_by_feature(kFeatureDim);
    for (int f = 0; f < kFeatureDim; ++f) {
        std::vector<int>& order = sorted_by_feature[static_cast<std::size_t>(f)];
        order.resize(samples.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return feats[static_cast<std::size_t>(a)][static_cast<std::size_t>(f)] <
                   feats[static_cast<std::size_t>(b)][static_cast<std::size_t>(f)];
        });
    }

    std::vector<double> pred(samples.size(), model.base_score_);
    std::vector<double> grad(samples.size());
    std::vector<double> hess(samples.size());

    auto mean_loss = [&]() {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            total += energy_loss(pred[i], target[i]).value;
        }
        return total / static_cast<double>(n);
    };
    model.training_loss_.push_back(mean_loss());

    for (int round = 0; round < params.num_trees; ++round) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const LossTerms t = energy_loss(pred[i], target[i]);
            grad[i] = t.gradient;
            hess[i] = t.hessian;
        }
        RegressionTree tree =
            TreeBuilder::build(feats, sorted_by_feature, grad, hess, params);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            pred[i] += params.learning_rate * tree.eval(feats[i]);
        }
        model.trees_.push_back(std::move(tree));
        model.training_loss_.push_back(mean_loss());
    }
    return model;
}

double EnergyModel::predict(const FeatureVector& features) const {
    double sum = 0.0;
    for (const RegressionTree& tree : trees_) sum += tree.eval(features);
    return std::max(kPredictionFloor, base_score_ + params_.learning_rate * sum);
}

std::vector<double> EnergyModel::predict_many(
    const std::vector<FeatureVector>& features) const {
    std::vector<double> out;
    out.reserve(features.size());
    for (const FeatureVector& f : features) out.push_back(predict(f));
    return out;
}

std::string EnergyModel::to_json() const {
    nlohmann::json j;
    j["model_version"] = kModelVersion;
    j["feature_schema"] = feature_schema_;
    j["params"] = {{"num_trees", params_.num_trees},
                   {"max_depth", params_.max_depth},
                   {"learning_rate", params_.learning_rate},
                   {"min_leaf_weight", params_.min_leaf_weight},
                   {"reg_lambda", params_.reg_lambda}};
    j["base_score"] = base_score_;
    j["reference_energy_mj"] = reference_energy_mj_;
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree.nodes) {
            nodes.push_back({{"f", n.feature},
                             {"t", n.threshold},
                             {"l", n.left},
                             {"r", n.right},
                             {"v", n.value}});
        }
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    return j.dump();
}

EnergyModel EnergyModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("unreadable model file: ") + e.what());
    }
    const std::string version = j.value("model_version", "");
    if (version != kModelVersion) {
        throw VersionMismatch("model version '" + version +
                              "' is not supported");
    }
    const std::string schema = j.value("feature_schema", "");
    if (schema != kFeatureSchemaVersion) {
        throw VersionMismatch("model feature schema '" + schema +
                              "' does not match " +
                              std::string(kFeatureSchemaVersion));
    }
    EnergyModel model;
    try {
        model.feature_schema_ = schema;
        const auto& p = j.at("params");
        model.params_.num_trees = p.at("num_trees").get<int>();
        model.params_.max_depth = p.at("max_depth").get<int>();
        model.params_.learning_rate = p.at("learning_rate").get<double>();
        model.params_.min_leaf_weight = p.at("min_leaf_weight").get<double>();
        model.params_.reg_lambda = p.at("reg_lambda").get<double>();
        model.base_score_ = j.at("base_score").get<double>();
        model.reference_energy_mj_ = j.at("reference_energy_mj").get<double>();
        for (const auto& tree_json : j.at("trees")) {
            RegressionTree tree;
            for (const auto& n : tree_json) {
                TreeNode node;
                node.feature = n.at("f").get<int>();
                node.threshold = n.at("t").get<double>();
                node.left = n.at("l").get<int>();
                node.right = n.at("r").get<int>();
                node.value = n.at("v").get<double>();
                tree.nodes.push_back(node);
            }
            if (tree.nodes.empty()) {
                throw IoError("model file contains an empty tree");
            }
            model.trees_.push_back(std::move(tree));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("unreadable model file: ") + e.what());
    }
    return model;
}

void EnergyModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file '" + path + "'");
    out << to_json() << '\n';
    if (!out) throw IoError("failed writing model file '" + path + "'");
}

EnergyModel EnergyModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

double snr_db(const std::vector<double>& predicted,
              const std::vector<double>& measured) {
    if (predicted.size() != measured.size()) {
        throw LengthMismatch("snr_db requires equal-length vectors");
    }
    if (predicted.empty()) throw EmptyInput("snr_db requires non-empty input");
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if (!(measured[i] > 0.0)) {
            throw NonPositiveEnergy("snr_db requires positive measurements");
        }
        signal += measured[i] * measured[i];
        const double diff = predicted[i] - measured[i];
        error += diff * diff;
    }
    if (error <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(signal / error));
}

void save_energy_samples(const std::vector<EnergySample>& samples,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write samples file '" + path + "'");
    for (const EnergySample& s : samples) {
        nlohmann::json j;
        j["features"] = s.features;
        j["measured_energy_mj"] = s.measured_energy_mj;
        j["normalized_energy"] = s.normalized_energy;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing samples file '" + path + "'");
}

std::vector<EnergySample> load_energy_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open samples file '" + path + "'");
    std::vector<EnergySample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("bad JSONL at line " + std::to_string(line_no) + ": " +
                          e.what());
        }
        EnergySample s;
        const auto& f = j.at("features");
        if (!f.is_array() || f.size() != kFeatureDim) {
            throw SchemaMismatch("line " + std::to_string(line_no) +
                                 ": feature vector width " +
                                 std::to_string(f.size()) + " != " +
                                 std::to_string(kFeatureDim));
        }
        for (std::size_t i = 0; i < kFeatureDim; ++i) {
            s.features[i] = f.at(i).get<double>();
        }
        s.measured_energy_mj = j.at("measured_energy_mj").get<double>();
        s.normalized_energy = j.value("normalized_energy", 0.0);
        if (!(s.measured_energy_mj > 0.0)) {
            throw NonPositiveEnergy("line " + std::to_string(line_no) +
                                    ": measured energy must be positive");
        }
        samples.push_back(s);
    }
    return samples;
}

} // namespace etune
