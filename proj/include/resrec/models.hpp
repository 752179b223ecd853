#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "resrec/features.hpp"

namespace resrec {

/// Training diverged or produced non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LogregHyper {
    double learning_rate = 0.1;
    double l2 = 1e-4;
    int max_iters = 500;
    double tol = 1e-8;
};

struct GbtHyper {
    int n_trees = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_leaf = 5;
};

struct SvmHyper {
    double l2 = 1e-4;
    int epochs = 20;
    std::uint64_t seed = 1;
};

struct Hyperparams {
    LogregHyper logreg;
    GbtHyper gbt;
    SvmHyper svm;
};

/// Throws std::invalid_argument on non-positive rates or iteration counts.
void validate(const Hyperparams& hyper);

enum class ModelKind { constant, logreg, gbt, svm };
enum class ConstantMode { majority_class, always_positive };

std::string_view kind_name(ModelKind kind);
std::optional<ModelKind> parse_kind(std::string_view text);
std::string_view constant_mode_name(ConstantMode mode);
std::optional<ConstantMode> parse_constant_mode(std::string_view text);

/// Dense row-major design matrix with {0,1} labels.
struct TrainingSet {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> x;
    std::vector<int> y;

    std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
};

/// Standardizes each example's features and packs them.
TrainingSet make_training_set(std::span<const LabeledExample> examples, const Standardizer& standardizer);

struct ConstantParams {
    ConstantMode mode = ConstantMode::majority_class;
    double value = 0.0;
};

struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;
};

/// Tree node; a leaf when feature < 0.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;   // taken when x[feature] <= threshold
    int right = -1;
    double value = 0.0;
};

struct GbtParams {
    double initial_score = 0.0;  // log-odds
    double learning_rate = 0.1;
    std::vector<std::vector<TreeNode>> trees;
};

double eval_tree(const std::vector<TreeNode>& tree, std::span<const double> x);

class TrainedModel {
public:
    using Params = std::variant<ConstantParams, LinearParams, GbtParams>;

    TrainedModel(ModelKind kind, std::vector<std::string> feature_names, Standardizer standardizer,
                 Params params);

    ModelKind kind() const { return kind_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const Standardizer& standardizer() const { return standardizer_; }
    const Params& params() const { return params_; }

    /// Free-form provenance (task, feature set, cutoff); saved with the model.
    std::map<std::string, std::string>& metadata() { return metadata_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    /// Probability for logreg and gbt, margin for svm, the constant otherwise.
    /// Throws ModelError when the vector's names differ from the model's.
    double score(const FeatureVector& features) const;
    /// Score of an already standardized row.
    double score_standardized(std::span<const double> x) const;

    /// Default threshold: 0 for svm margins, 0.5 otherwise.
    double default_threshold() const { return kind_ == ModelKind::svm ? 0.0 : 0.5; }
    /// 1 iff score > threshold.
    int predict(const FeatureVector& features, std::optional<double> threshold = std::nullopt) const;

    /// Same model with the SVM weights (and bias) multiplied by factor.
    TrainedModel scaled_linear(double factor) const;

private:
    ModelKind kind_;
    std::vector<std::string> feature_names_;
    Standardizer standardizer_;
    Params params_;
    std::map<std::string, std::string> metadata_;
};

/// Loss value after each accepted iteration (logreg) or boosting round (gbt).
using LossTrace = std::vector<double>;

double sigmoid(double z);
/// Probability clipped to [1e-6, 1 - 1e-6].
double clip_probability(double p);

TrainedModel train_constant(std::span<const LabeledExample> examples, ConstantMode mode);

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;  // d weights, then bias
};

/// Mean log-loss + (l2/2)|w|^2; params are d weights followed by the bias.
LossAndGradient logreg_loss_and_gradient(std::span<const double> params, const TrainingSet& data,
                                         double l2);

/// Full-batch fixed-step gradient descent from zero. Throws NumericalError on non-finite loss.
LinearParams fit_logreg(const TrainingSet& data, const LogregHyper& hyper, LossTrace* trace = nullptr);
TrainedModel train_logreg(std::span<const LabeledExample> examples, const LogregHyper& hyper,
                          const Standardizer& standardizer, LossTrace* trace = nullptr);

/// Logistic-loss gradient boosting with variance-reduction trees and
/// one-step Newton leaves. trace gets the training log-loss after each round.
GbtParams fit_gbt(const TrainingSet& data, const GbtHyper& hyper, LossTrace* trace = nullptr);
TrainedModel train_gbt(std::span<const LabeledExample> examples, const GbtHyper& hyper,
                       const Standardizer& standardizer, LossTrace* trace = nullptr);

/// Primal hinge loss + (l2/2)|w|^2 by stochastic subgradient steps of size
/// 1/(l2 t), one seeded pass order per epoch. The bias is an extra constant
/// input, regularized with the weights.
LinearParams fit_svm(const TrainingSet& data, const SvmHyper& hyper);
TrainedModel train_svm(std::span<const LabeledExample> examples, const SvmHyper& hyper,
                       const Standardizer& standardizer);

/// Method names: majority, always_positive, logreg, gbt, svm.
struct TrainOptions {
    Hyperparams hyper;
    StandardizerOptions standardizer;
};
TrainedModel train_method(std::string_view method, std::span<const LabeledExample> examples,
                          const TrainOptions& options);
bool is_known_method(std::string_view method);

/// Text format "resrec-model 1"; see README for the layout.
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace resrec
