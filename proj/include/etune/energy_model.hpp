#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etune/features.hpp"

namespace etune {

inline constexpr const char* kModelVersion = "etune-model-v1";

// Training loss, Loss(e_p, e_m) = (e_p - e_m)^2 / e_m: squared error with a
// 1/e_m weight so low-energy kernels dominate the fit. Gradient and hessian
// are taken with respect to the prediction e_p.
struct LossTerms {
    double value = 0.0;
    double gradient = 0.0;
    double hessian = 0.0;
};

// Throws NonPositiveEnergy when measured <= 0.
LossTerms energy_loss(double predicted, double measured);

// One training example: features plus the measured energy and its
// normalized form (measured / task reference energy).
struct EnergySample {
    FeatureVector features{};
    double measured_energy_mj = 0.0;
    double normalized_energy = 0.0;
};

struct BoostParams {
    int num_trees = 100;
    int max_depth = 6;
    double learning_rate = 0.1;
    double min_leaf_weight = 1e-3; // minimum hessian mass per child
    double reg_lambda = 1.0;

    bool operator==(const BoostParams&) const = default;
};

// Binary regression tree in flat-array form. Interior nodes route
// value < threshold to `left`; leaves carry unscaled Newton weights.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double eval(const FeatureVector& f) const;
};

// Gradient-boosted ensemble predicting normalized energy. Prediction is
//   base_score + learning_rate * sum(tree leaf outputs)
// clamped to a small positive floor. Immutable once trained; safe to share
// across threads for prediction.
class EnergyModel {
public:
    // Trains on all samples with second-order boosting under energy_loss.
    // The task reference energy is the minimum measured energy of the batch
    // and targets are measured / reference (so the best kernel maps to 1).
    // Throws InsufficientData (< 2 samples) and NonPositiveEnergy.
    static EnergyModel train(const std::vector<EnergySample>& samples,
                             const BoostParams& params);

    double predict(const FeatureVector& features) const;
    std::vector<double> predict_many(const std::vector<FeatureVector>& features) const;

    double base_score() const { return base_score_; }
    double reference_energy_mj() const { return reference_energy_mj_; }
    const BoostParams& params() const { return params_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    const std::string& feature_schema() const { return feature_schema_; }

    // Mean training loss after each boosting round (round 0 = base score
    // only). Not serialized.
    const std::vector<double>& training_loss_per_round() const {
        return training_loss_;
    }

    std::string to_json() const;
    static EnergyModel from_json(const std::string& text);

    // Versioned JSON file. Throws IoError on unreadable/truncated files and
    // VersionMismatch on foreign versions or feature schemas.
    void save(const std::string& path) const;
    static EnergyModel load(const std::string& path);

private:
    BoostParams params_;
    std::string feature_schema_ = kFeatureSchemaVersion;
    double base_score_ = 0.0;
    double reference_energy_mj_ = 1.0;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_loss_;
};

// Signal-to-noise ratio of predictions against measurements, in dB:
//   10 * log10( sum(measured^2) / sum((predicted - measured)^2) )
// capped at +100 dB when the error energy underflows. Throws LengthMismatch,
// EmptyInput and NonPositiveEnergy (measured must be positive).
double snr_db(const std::vector<double>& predicted,
              const std::vector<double>& measured);

// JSONL persistence of training data; one EnergySample per line.
// Load validates vector width (SchemaMismatch) and positivity.
void save_energy_samples(const std::vector<EnergySample>& samples,
                         const std::string& path);
std::vector<EnergySample> load_energy_samples(const std::string& path);

} // namespace etune
