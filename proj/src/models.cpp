#include "resrec/models.hpp"

#include <algorithm>
#include <cmath>

#include "resrec/rng.hpp"

namespace resrec {

void validate(const Hyperparams& h) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid hyperparameter: ") + what);
    };
    require(h.logreg.learning_rate > 0.0, "logreg.learning_rate must be positive");
    require(h.logreg.l2 >= 0.0, "logreg.l2 must be non-negative");
    require(h.logreg.max_iters > 0, "logreg.max_iters must be positive");
    require(h.logreg.tol >= 0.0, "logreg.tol must be non-negative");
    require(h.gbt.n_trees >= 0, "gbt.n_trees must be non-negative");
    require(h.gbt.max_depth >= 0, "gbt.max_depth must be non-negative");
    require(h.gbt.learning_rate > 0.0, "gbt.learning_rate must be positive");
    require(h.gbt.min_leaf >= 1, "gbt.min_leaf must be positive");
    require(h.svm.l2 > 0.0, "svm.l2 must be positive");
    require(h.svm.epochs > 0, "svm.epochs must be positive");
}

std::string_view kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::constant: return "constant";
        case ModelKind::logreg: return "logreg";
        case ModelKind::gbt: return "gbt";
        case ModelKind::svm: return "svm";
    }
    return "unknown";
}

std::optional<ModelKind> parse_kind(std::string_view text) {
    for (auto k : {ModelKind::constant, ModelKind::logreg, ModelKind::gbt, ModelKind::svm})
        if (kind_name(k) == text) return k;
    return std::nullopt;
}

std::string_view constant_mode_name(ConstantMode mode) {
    return mode == ConstantMode::majority_class ? "majority" : "always_positive";
}

std::optional<ConstantMode> parse_constant_mode(std::string_view text) {
    if (text == "majority" || text == "majority_class") return ConstantMode::majority_class;
    if (text == "always_positive") return ConstantMode::always_positive;
    return std::nullopt;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double clip_probability(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

TrainingSet make_training_set(std::span<const LabeledExample> examples, const Standardizer& standardizer) {
    TrainingSet data;
    data.n = examples.size();
    data.d = standardizer.names().size();
    data.x.reserve(data.n * data.d);
    data.y.reserve(data.n);
    for (const auto& ex : examples) {
        if (ex.features.size() != data.d) throw ModelError("example has the wrong number of features");
        for (std::size_t j = 0; j < data.d; ++j) {
            if (ex.features.name(j) != standardizer.names()[j])
                throw ModelError("feature '" + ex.features.name(j) + "' does not match '" +
                                 standardizer.names()[j] + "'");
            data.x.push_back(standardizer.apply(j, ex.features.values[j]));
        }
        if (ex.label != 0 && ex.label != 1) throw ModelError("labels must be 0 or 1");
        data.y.push_back(ex.label);
    }
    return data;
}

double eval_tree(const std::vector<TreeNode>& tree, std::span<const double> x) {
    std::size_t i = 0;
    while (tree[i].feature >= 0)
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(tree[i].feature)] <= tree[i].threshold
                                         ? tree[i].left
                                         : tree[i].right);
    return tree[i].value;
}

TrainedModel::TrainedModel(ModelKind kind, std::vector<std::string> feature_names,
                           Standardizer standardizer, Params params)
    : kind_(kind),
      feature_names_(std::move(feature_names)),
      standardizer_(std::move(standardizer)),
      params_(std::move(params)) {
    if (standardizer_.names() != feature_names_)
        throw ModelError("standardizer features do not match model features");
    const bool ok = (kind_ == ModelKind::constant && std::holds_alternative<ConstantParams>(params_)) ||
                    ((kind_ == ModelKind::logreg || kind_ == ModelKind::svm) &&
                     std::holds_alternative<LinearParams>(params_)) ||
                    (kind_ == ModelKind::gbt && std::holds_alternative<GbtParams>(params_));
    if (!ok) throw ModelError("parameters do not match model kind");
    if (const auto* lin = std::get_if<LinearParams>(&params_); lin && lin->weights.size() != feature_names_.size())
        throw ModelError("weight count does not match feature count");
}

double TrainedModel::score_standardized(std::span<const double> x) const {
    switch (kind_) {
        case ModelKind::constant: return std::get<ConstantParams>(params_).value;
        case ModelKind::logreg:
        case ModelKind::svm: {
            const auto& p = std::get<LinearParams>(params_);
            double z = p.bias;
            for (std::size_t j = 0; j < x.size(); ++j) z += p.weights[j] * x[j];
            return kind_ == ModelKind::logreg ? sigmoid(z) : z;
        }
        case ModelKind::gbt: {
            const auto& p = std::get<GbtParams>(params_);
            double f = p.initial_score;
            for (const auto& tree : p.trees) f += p.learning_rate * eval_tree(tree, x);
            return sigmoid(f);
        }
    }
    return 0.0;
}

double TrainedModel::score(const FeatureVector& features) const {
    if (features.size() != feature_names_.size())
        throw ModelError("model expects " + std::to_string(feature_names_.size()) + " features, got " +
                         std::to_string(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j)
        if (features.name(j) != feature_names_[j])
            throw ModelError("feature '" + features.name(j) + "' where model expects '" +
                             feature_names_[j] + "'");
    std::vector<double> x(features.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = standardizer_.apply(j, features.values[j]);
    return score_standardized(x);
}

int TrainedModel::predict(const FeatureVector& features, std::optional<double> threshold) const {
    return score(features) > threshold.value_or(default_threshold()) ? 1 : 0;
}

TrainedModel TrainedModel::scaled_linear(double factor) const {
    auto copy = *this;
    auto* lin = std::get_if<LinearParams>(&copy.params_);
    if (!lin) throw ModelError("scaled_linear needs a linear model");
    for (auto& w : lin->weights) w *= factor;
    lin->bias *= factor;
    return copy;
}

TrainedModel train_constant(std::span<const LabeledExample> examples, ConstantMode mode) {
    if (examples.empty()) throw ModelError("cannot train on no examples");
    std::size_t positives = 0;
    for (const auto& ex : examples) positives += ex.label == 1 ? 1 : 0;
    double value = 1.0;
    if (mode == ConstantMode::majority_class) value = positives * 2 > examples.size() ? 1.0 : 0.0;
    const auto& names = *examples.front().features.names;
    return TrainedModel(ModelKind::constant, names, Standardizer::identity(names),
                        ConstantParams{mode, value});
}

LossAndGradient logreg_loss_and_gradient(std::span<const double> params, const TrainingSet& data,
                                         double l2) {
    const std::size_t d = data.d;
    if (params.size() != d + 1) throw ModelError("parameter vector must hold d weights and a bias");
    if (data.n == 0) throw ModelError("cannot evaluate loss on no examples");
    LossAndGradient out;
    out.gradient.assign(d + 1, 0.0);
    const double bias = params[d];
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto x = data.row(i);
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += params[j] * x[j];
        const double p = sigmoid(z);
        const double pc = clip_probability(p);
        out.loss -= data.y[i] ? std::log(pc) : std::log(1.0 - pc);
        const double r = p - data.y[i];
        for (std::size_t j = 0; j < d; ++j) out.gradient[j] += r * x[j];
        out.gradient[d] += r;
    }
    const auto n = static_cast<double>(data.n);
    out.loss /= n;
    for (auto& g : out.gradient) g /= n;
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        sq += params[j] * params[j];
        out.gradient[j] += l2 * params[j];
    }
    out.loss += 0.5 * l2 * sq;
    return out;
}

LinearParams fit_logreg(const TrainingSet& data, const LogregHyper& hyper, LossTrace* trace) {
    std::vector<double> params(data.d + 1, 0.0);
    auto current = logreg_loss_and_gradient(params, data, hyper.l2);
    if (!std::isfinite(current.loss)) throw NumericalError("logistic regression loss is not finite");
    if (trace) trace->assign(1, current.loss);
    std::vector<double> next(params.size());
    for (int iter = 0; iter < hyper.max_iters; ++iter) {
        for (std::size_t j = 0; j < params.size(); ++j)
            next[j] = params[j] - hyper.learning_rate * current.gradient[j];
        auto candidate = logreg_loss_and_gradient(next, data, hyper.l2);
        if (!std::isfinite(candidate.loss))
            throw NumericalError("logistic regression diverged (non-finite loss); lower learning_rate");
        const double improvement = current.loss - candidate.loss;
        if (improvement < 0.0) break;
        params.swap(next);
        current = std::move(candidate);
        if (trace) trace->push_back(current.loss);
        if (improvement < hyper.tol) break;
    }
    LinearParams out;
    out.bias = params.back();
    params.pop_back();
    out.weights = std::move(params);
    return out;
}

TrainedModel train_logreg(std::span<const LabeledExample> examples, const LogregHyper& hyper,
                          const Standardizer& standardizer, LossTrace* trace) {
    const auto data = make_training_set(examples, standardizer);
    return TrainedModel(ModelKind::logreg, standardizer.names(), standardizer,
                        fit_logreg(data, hyper, trace));
}

LinearParams fit_svm(const TrainingSet& data, const SvmHyper& hyper) {
    if (data.n == 0) throw ModelError("cannot train on no examples");
    const std::size_t d = data.d;
    std::vector<double> w(d + 1, 0.0);  // last entry multiplies the constant input
    std::vector<std::size_t> order(data.n);
    for (std::size_t i = 0; i < data.n; ++i) order[i] = i;
    Rng rng = Rng(hyper.seed).fork("svm");
    const double radius = 1.0 / std::sqrt(hyper.l2);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (auto i : order) {
            ++t;
            const auto x = data.row(i);
            const double y = data.y[i] ? 1.0 : -1.0;
            const double eta = 1.0 / (hyper.l2 * static_cast<double>(t));
            double margin = w[d];
            for (std::size_t j = 0; j < d; ++j) margin += w[j] * x[j];
            margin *= y;
            const double shrink = 1.0 - eta * hyper.l2;
            for (auto& v : w) v *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * x[j];
                w[d] += eta * y;
            }
            double norm = 0.0;
            for (double v : w) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > radius)
                for (auto& v : w) v *= radius / norm;
        }
    }
    for (double v : w)
        if (!std::isfinite(v)) throw NumericalError("svm weights are not finite");
    LinearParams out;
    out.bias = w[d];
    w.pop_back();
    out.weights = std::move(w);
    return out;
}

TrainedModel train_svm(std::span<const LabeledExample> examples, const SvmHyper& hyper,
                       const Standardizer& standardizer) {
    const auto data = make_training_set(examples, standardizer);
    return TrainedModel(ModelKind::svm, standardizer.names(), standardizer, fit_svm(data, hyper));
}

bool is_known_method(std::string_view method) {
    return method == "majority" || method == "always_positive" || method == "logreg" ||
           method == "gbt" || method == "svm";
}

TrainedModel train_method(std::string_view method, std::span<const LabeledExample> examples,
                          const TrainOptions& options) {
    if (examples.empty()) throw ModelError("cannot train on no examples");
    if (method == "majority") return train_constant(examples, ConstantMode::majority_class);
    if (method == "always_positive") return train_constant(examples, ConstantMode::always_positive);
    const auto standardizer = Standardizer::fit(examples, options.standardizer);
    if (method == "logreg") return train_logreg(examples, options.hyper.logreg, standardizer);
    if (method == "gbt") return train_gbt(examples, options.hyper.gbt, standardizer);
    if (method == "svm") return train_svm(examples, options.hyper.svm, standardizer);
    throw ModelError("unknown method '" + std::string(method) + "'");
}

}  // namespace resrec
