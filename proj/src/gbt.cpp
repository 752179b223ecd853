#include <algorithm>
#include <cmath>
#include <numeric>

#include "resrec/models.hpp"

namespace resrec {

namespace {

constexpr double kMinHessian = 1e-12;

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& data, const std::vector<double>& residual,
                const std::vector<double>& hessian, const GbtHyper& hyper)
        : data_(data), residual_(residual), hessian_(hessian), hyper_(hyper) {}

    std::vector<TreeNode> build(std::vector<std::size_t> rows) {
        nodes_.clear();
        grow(std::move(rows), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        const Split split = depth < hyper_.max_depth ? best_split(rows) : Split{};
        if (split.feature < 0) {
            double r = 0.0, h = 0.0;
            for (auto i : rows) {
                r += residual_[i];
                h += hessian_[i];
            }
            nodes_[static_cast<std::size_t>(id)].value = r / std::max(h, kMinHessian);
            return id;
        }
        std::vector<std::size_t> left, right;
        for (auto i : rows)
            (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    double x(std::size_t row, int feature) const {
        return data_.x[row * data_.d + static_cast<std::size_t>(feature)];
    }

    // Variance reduction of the residuals over all midpoints between
    // consecutive distinct values. Scans features then thresholds in
    // ascending order and keeps the first strictly best gain.
    Split best_split(const std::vector<std::size_t>& rows) const {
        Split best;
        const std::size_t n = rows.size();
        const auto min_leaf = static_cast<std::size_t>(hyper_.min_leaf);
        if (n < 2 * min_leaf) return best;
        double total = 0.0;
        for (auto i : rows) total += residual_[i];
        const double parent = total * total / static_cast<double>(n);

        std::vector<std::size_t> sorted;
        for (std::size_t f = 0; f < data_.d; ++f) {
            const int feature = static_cast<int>(f);
            sorted = rows;
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return x(a, feature) < x(b, feature);
            });
            double left_sum = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                left_sum += residual_[sorted[k - 1]];
                const double lo = x(sorted[k - 1], feature);
                const double hi = x(sorted[k], feature);
                if (!(lo < hi) || k < min_leaf || n - k < min_leaf) continue;
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(k) +
                                    right_sum * right_sum / static_cast<double>(n - k) - parent;
                if (gain > best.gain) {
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best = {feature, mid, gain};
                }
            }
        }
        return best;
    }

    const TrainingSet& data_;
    const std::vector<double>& residual_;
    const std::vector<double>& hessian_;
    const GbtHyper& hyper_;
    std::vector<TreeNode> nodes_;
};

double mean_log_loss(const TrainingSet& data, const std::vector<double>& f) {
    double loss = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double p = clip_probability(sigmoid(f[i]));
        loss -= data.y[i] ? std::log(p) : std::log(1.0 - p);
    }
    return loss / static_cast<double>(data.n);
}

}  // namespace

GbtParams fit_gbt(const TrainingSet& data, const GbtHyper& hyper, LossTrace* trace) {
    if (data.n == 0) throw ModelError("cannot train on no examples");
    GbtParams model;
    model.learning_rate = hyper.learning_rate;

    const double positives = std::accumulate(data.y.begin(), data.y.end(), 0.0);
    const double base = clip_probability(positives / static_cast<double>(data.n));
    model.initial_score = std::log(base / (1.0 - base));

    std::vector<double> f(data.n, model.initial_score);
    if (trace) trace->assign(1, mean_log_loss(data, f));
    const bool degenerate = positives == 0.0 || positives == static_cast<double>(data.n);
    if (degenerate) return model;

    std::vector<double> residual(data.n), hessian(data.n);
    std::vector<std::size_t> all(data.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    TreeBuilder builder(data, residual, hessian, hyper);

    for (int round = 0; round < hyper.n_trees; ++round) {
        for (std::size_t i = 0; i < data.n; ++i) {
            const double p = sigmoid(f[i]);
            const double pc = clip_probability(p);
            residual[i] = data.y[i] - p;
            hessian[i] = pc * (1.0 - pc);
        }
        auto tree = builder.build(all);
        for (std::size_t i = 0; i < data.n; ++i) {
            f[i] += hyper.learning_rate * eval_tree(tree, data.row(i));
            if (!std::isfinite(f[i])) throw NumericalError("gradient boosting produced a non-finite score");
        }
        model.trees.push_back(std::move(tree));
        if (trace) trace->push_back(mean_log_loss(data, f));
    }
    return model;
}

TrainedModel train_gbt(std::span<const LabeledExample> examples, const GbtHyper& hyper,
                       const Standardizer& standardizer, LossTrace* trace) {
    const auto data = make_training_set(examples, standardizer);
    return TrainedModel(ModelKind::gbt, standardizer.names(), standardizer, fit_gbt(data, hyper, trace));
}

}  // namespace resrec
