#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "resrec/models.hpp"
#include "resrec/rng.hpp"

using namespace resrec;

namespace {

const std::vector<std::string>& names(std::size_t d) {
    static const std::vector<std::vector<std::string>> all = {
        {}, {"x0"}, {"x0", "x1"}, {"x0", "x1", "x2"}};
    return all.at(d);
}

FeatureVector vec(std::vector<double> values) {
    FeatureVector v;
    v.names = &names(values.size());
    v.values = std::move(values);
    return v;
}

LabeledExample example(std::vector<double> values, int label) {
    LabeledExample e;
    e.key.student = StudentId("s");
    e.features = vec(std::move(values));
    e.label = label;
    return e;
}

using Examples = std::vector<LabeledExample>;

Examples random_examples(std::uint64_t seed, std::size_t n, std::size_t d) {
    Rng rng(seed);
    Examples out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        double z = 0.3;
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = rng.normal();
            z += (double(j) - 0.8) * x[j];
        }
        out.push_back(example(x, rng.uniform() < sigmoid(z) ? 1 : 0));
    }
    return out;
}

/// Random points in the four quadrants; label 1 when the signs differ.
Examples xor_examples() {
    Rng rng(13);
    Examples out;
    for (int i = 0; i < 80; ++i) {
        const double a = rng.uniform() * 2 - 1, b = rng.uniform() * 2 - 1;
        out.push_back(example({a, b}, (a < 0) != (b < 0)));
    }
    return out;
}

Examples separable_1d() {
    Examples out;
    for (int i = 1; i <= 10; ++i) {
        out.push_back(example({-0.5 - 0.2 * i}, 0));
        out.push_back(example({0.5 + 0.2 * i}, 1));
    }
    return out;
}

double training_accuracy(const TrainedModel& m, const Examples& ex) {
    int ok = 0;
    for (const auto& e : ex) ok += m.predict(e.features) == e.label;
    return double(ok) / double(ex.size());
}

Standardizer identity(std::size_t d) { return Standardizer::identity(names(d)); }

TrainingSet pack(const Examples& ex) { return make_training_set(ex, identity(ex.front().features.size())); }

}  // namespace

TEST_CASE("constant models") {
    Examples ninety;
    for (int i = 0; i < 100; ++i) ninety.push_back(example({double(i)}, i < 10 ? 1 : 0));
    const auto majority = train_constant(ninety, ConstantMode::majority_class);
    CHECK(majority.score(vec({3.0})) == 0.0);
    CHECK(training_accuracy(majority, ninety) == doctest::Approx(0.90));

    const auto positive = train_constant(ninety, ConstantMode::always_positive);
    CHECK(positive.predict(vec({3.0})) == 1);

    Examples tie = {example({1}, 1), example({2}, 0)};
    CHECK(train_constant(tie, ConstantMode::majority_class).predict(vec({0.0})) == 0);
    CHECK_THROWS_AS(train_constant(Examples{}, ConstantMode::majority_class), ModelError);
}

TEST_CASE("zero-weight logistic model") {
    const TrainedModel m(ModelKind::logreg, names(2), identity(2), LinearParams{{0.0, 0.0}, 0.0});
    CHECK(m.score(vec({3.0, -7.0})) == 0.5);
    CHECK(m.predict(vec({3.0, -7.0})) == 0);
    CHECK(m.predict(vec({3.0, -7.0}), 0.49) == 1);
}

TEST_CASE("logistic regression fits separable data with non-increasing loss") {
    const auto ex = separable_1d();
    LogregHyper h;
    h.max_iters = 2000;
    LossTrace trace;
    const auto m = train_logreg(ex, h, identity(1), &trace);
    CHECK(training_accuracy(m, ex) == 1.0);
    REQUIRE(trace.size() > 1);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);

    LossTrace trace2;
    const auto random = random_examples(4, 200, 3);
    train_logreg(random, LogregHyper{}, identity(3), &trace2);
    for (std::size_t i = 1; i < trace2.size(); ++i) CHECK(trace2[i] <= trace2[i - 1]);
}

TEST_CASE("logistic gradient matches central finite differences") {
    const auto data = pack(random_examples(9, 40, 3));
    Rng rng(21);
    double worst = 0.0;
    for (int point = 0; point < 20; ++point) {
        std::vector<double> w(4);
        for (auto& v : w) v = rng.normal();
        const auto analytic = logreg_loss_and_gradient(w, data, 0.05).gradient;
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto up = w, down = w;
            up[j] += 1e-5;
            down[j] -= 1e-5;
            const double fd = (logreg_loss_and_gradient(up, data, 0.05).loss -
                               logreg_loss_and_gradient(down, data, 0.05).loss) / 2e-5;
            const double rel = std::abs(fd - analytic[j]) / std::max({std::abs(fd), std::abs(analytic[j]), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("logistic gradient special cases") {
    const auto balanced = pack({example({1.0, 2.0}, 1), example({-3.0, 0.5}, 0), example({2.0, 2.0}, 1),
                                example({0.0, -1.0}, 0)});
    CHECK(logreg_loss_and_gradient(std::vector<double>{0, 0, 0}, balanced, 0.0).gradient[2] == 0.0);

    // Duplicated input with opposite labels: only the penalty remains.
    const auto pair = pack({example({1.0, -1.0}, 1), example({1.0, -1.0}, 0)});
    const double l2 = 0.3;
    const auto g = logreg_loss_and_gradient(std::vector<double>{0.5, 0.5, 0.0}, pair, l2).gradient;
    CHECK(g[0] == doctest::Approx(l2 * 0.5));
    CHECK(g[1] == doctest::Approx(l2 * 0.5));
    CHECK(g[2] == doctest::Approx(0.0));

    CHECK_THROWS_AS(logreg_loss_and_gradient(std::vector<double>{0, 0}, pair, 0.0), ModelError);
}

TEST_CASE("divergent learning rate raises NumericalError") {
    LogregHyper h;
    h.learning_rate = 1e200;
    h.l2 = 1e-4;
    CHECK_THROWS_AS(train_logreg(random_examples(2, 50, 2), h, identity(2)), NumericalError);
}

TEST_CASE("gbt degenerate cases") {
    const auto ex = random_examples(3, 80, 2);
    GbtHyper h;
    h.n_trees = 0;
    const auto m0 = train_gbt(ex, h, identity(2));
    double rate = 0;
    for (const auto& e : ex) rate += e.label;
    rate /= double(ex.size());
    CHECK(m0.score(vec({0.1, 5.0})) == doctest::Approx(rate));

    Examples ones;
    for (int i = 0; i < 20; ++i) ones.push_back(example({double(i), 1.0}, 1));
    const auto m1 = train_gbt(ones, GbtHyper{}, identity(2));
    const auto& p = std::get<GbtParams>(m1.params());
    CHECK(p.trees.empty());
    CHECK(p.initial_score == doctest::Approx(std::log((1 - 1e-6) / 1e-6)));
    CHECK(m1.score(vec({3.0, 1.0})) == doctest::Approx(1 - 1e-6));
}

TEST_CASE("gbt learns xor") {
    const auto ex = xor_examples();
    GbtHyper h;
    h.max_depth = 2;
    h.n_trees = 50;
    h.min_leaf = 1;
    LossTrace trace;
    const auto m = train_gbt(ex, h, identity(2), &trace);
    CHECK(training_accuracy(m, ex) == 1.0);
    REQUIRE(trace.size() == 51);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);

    // A linear model cannot separate it.
    LogregHyper lh;
    lh.max_iters = 2000;
    CHECK(training_accuracy(train_logreg(ex, lh, identity(2)), ex) <= 0.75);
}

TEST_CASE("gbt loss is non-increasing and scores are probabilities") {
    const auto ex = random_examples(5, 300, 3);
    LossTrace trace;
    const auto m = train_gbt(ex, GbtHyper{}, identity(3), &trace);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
        const double s = m.score(vec({rng.normal() * 10, rng.normal() * 10, rng.normal() * 10}));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("gbt is invariant to strictly increasing feature transforms") {
    const auto ex = random_examples(7, 200, 3);
    auto transformed = ex;
    for (auto& e : transformed) {
        auto& v = e.features.values;
        v[0] = std::exp(v[0]);
        v[1] = v[1] * v[1] * v[1] + 2 * v[1];
        v[2] = 5 * v[2] - 3;
    }
    const auto a = train_gbt(ex, GbtHyper{}, identity(3));
    const auto b = train_gbt(transformed, GbtHyper{}, identity(3));
    for (std::size_t i = 0; i < ex.size(); ++i)
        CHECK(std::bit_cast<std::uint64_t>(a.score(ex[i].features)) ==
              std::bit_cast<std::uint64_t>(b.score(transformed[i].features)));
}

TEST_CASE("svm") {
    Examples sep;
    for (int i = 1; i <= 15; ++i) {
        sep.push_back(example({1.0 + 0.1 * i, 0.5}, 1));
        sep.push_back(example({-1.0 - 0.1 * i, -0.5}, 0));
    }
    SvmHyper h;
    const auto m = train_svm(sep, h, identity(2));
    CHECK(training_accuracy(m, sep) == 1.0);
    CHECK(m.default_threshold() == 0.0);

    const auto ex = random_examples(8, 120, 3);
    const auto a = train_svm(ex, h, identity(3));
    const auto b = train_svm(ex, h, identity(3));
    CHECK(std::get<LinearParams>(a.params()).weights == std::get<LinearParams>(b.params()).weights);

    auto flipped = ex;
    for (auto& e : flipped) e.label = 1 - e.label;
    const auto f = train_svm(flipped, h, identity(3));
    for (const auto& e : ex) CHECK(std::abs(f.score(e.features) + a.score(e.features)) < 1e-6);

    // Positive scaling keeps the ranking.
    const auto scaled = a.scaled_linear(3.7);
    for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
        const bool before = a.score(ex[i].features) < a.score(ex[i + 1].features);
        CHECK(before == (scaled.score(ex[i].features) < scaled.score(ex[i + 1].features)));
    }
    CHECK_THROWS_AS(train_constant(sep, ConstantMode::majority_class).scaled_linear(2.0), ModelError);
}

TEST_CASE("feature name mismatch is an error") {
    const auto m = train_logreg(random_examples(1, 30, 2), LogregHyper{}, identity(2));
    static const std::vector<std::string> other = {"x0", "y"};
    FeatureVector v;
    v.names = &other;
    v.values = {1.0, 2.0};
    CHECK_THROWS_AS(m.score(v), ModelError);
    CHECK_THROWS_AS(m.score(vec({1.0, 2.0, 3.0})), ModelError);
    CHECK(m.score(vec({1.0, 2.0})) == m.score(vec({1.0, 2.0})));
}

TEST_CASE("model files round-trip bitwise") {
    const auto ex = random_examples(12, 150, 3);
    TrainOptions opt;
    for (const char* method : {"majority", "always_positive", "logreg", "gbt", "svm"}) {
        CAPTURE(method);
        auto m = train_method(method, ex, opt);
        m.metadata()["task"] = "1";
        std::stringstream buf;
        write_model(buf, m);
        const auto text = buf.str();
        auto back = read_model(buf);
        CHECK(back.kind() == m.kind());
        CHECK(back.metadata() == m.metadata());
        for (const auto& e : ex)
            CHECK(std::bit_cast<std::uint64_t>(back.score(e.features)) ==
                  std::bit_cast<std::uint64_t>(m.score(e.features)));
        std::ostringstream again;
        write_model(again, back);
        CHECK(again.str() == text);
    }
    CHECK_THROWS_AS(train_method("forest", ex, opt), ModelError);
    CHECK(is_known_method("svm"));
    CHECK_FALSE(is_known_method("forest"));
}

TEST_CASE("corrupt model files are rejected") {
    std::stringstream buf;
    GbtHyper h;
    h.n_trees = 3;
    write_model(buf, train_gbt(random_examples(2, 60, 2), h, identity(2)));
    const auto good = buf.str();
    const auto load = [](const std::string& text) {
        std::istringstream in(text);
        return read_model(in);
    };
    CHECK_NOTHROW(load(good));
    auto replace = [&](const std::string& from, const std::string& to) {
        auto t = good;
        const auto at = t.find(from);
        REQUIRE(at != std::string::npos);
        t.replace(at, from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(load(replace("resrec-model", "resrec-modex")), ModelError);
    CHECK_THROWS_AS(load(replace("resrec-model 1", "resrec-model 2")), ModelError);
    CHECK_THROWS_AS(load(replace("kind gbt", "kind forest")), ModelError);
    CHECK_THROWS_AS(load(good.substr(0, good.size() / 2)), ModelError);
    CHECK_THROWS_AS(load(""), ModelError);
    CHECK_THROWS_AS(load(replace("\nnode ", "\nnode x")), ModelError);
    CHECK_THROWS_AS(load_model("/nonexistent/dir/model.txt"), ModelError);
}

TEST_CASE("hyperparameter validation") {
    CHECK_NOTHROW(validate(Hyperparams{}));
    auto bad = [](auto mutate) {
        Hyperparams h;
        mutate(h);
        return h;
    };
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.logreg.learning_rate = 0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.logreg.max_iters = 0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.gbt.max_depth = -1; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.gbt.learning_rate = -0.1; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.svm.l2 = 0; })), std::invalid_argument);
    CHECK_THROWS_AS(validate(bad([](Hyperparams& h) { h.svm.epochs = 0; })), std::invalid_argument);
    CHECK_NOTHROW(validate(bad([](Hyperparams& h) { h.gbt.n_trees = 0; })));
}
