// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "resrec/cli.hpp"
#include "resrec/datagen.hpp"
#include "resrec/eval.hpp"
#include "support.hpp"

using namespace resrec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = limit_seconds <= 0 || secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("C%d %s %s (%.2f s", id, pass ? "PASS" : "FAIL", title, secs);
    if (limit_seconds > 0) std::printf(" / limit %.0f s", limit_seconds);
    std::printf(") %s\n", o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double standard_error(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

OpportunityId oid(std::size_t i) { return OpportunityId("O" + std::to_string(i)); }

RankedList ordered(const std::vector<std::size_t>& ids) {
    RankedList r;
    double s = double(ids.size());
    for (auto i : ids) r.items.push_back({oid(i), s--});
    return r;
}

double brute_force_ap(const RankedList& list, const std::set<OpportunityId>& relevant, std::size_t k) {
    double sum = 0;
    for (std::size_t i = 0; i < std::min(k, list.items.size()); ++i) {
        if (!relevant.count(list.items[i].opportunity)) continue;
        double hits = 0;
        for (std::size_t j = 0; j <= i; ++j) hits += double(relevant.count(list.items[j].opportunity));
        sum += hits / double(i + 1);
    }
    return sum / double(std::min(relevant.size(), k));
}

const std::vector<std::string>& names(std::size_t d) {
    static std::map<std::size_t, std::vector<std::string>> cache;
    auto& n = cache[d];
    if (n.empty())
        for (std::size_t j = 0; j < d; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

LabeledExample example(std::vector<double> x, int label) {
    LabeledExample e;
    e.key.student = StudentId("s");
    e.features.names = &names(x.size());
    e.features.values = std::move(x);
    e.label = label;
    return e;
}

std::vector<LabeledExample> synthetic(std::uint64_t seed, std::size_t n, std::size_t d) {
    Rng rng(seed);
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        double z = -0.2;
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = rng.normal();
            z += (0.7 - 0.4 * double(j)) * x[j];
        }
        out.push_back(example(std::move(x), rng.uniform() < sigmoid(z) ? 1 : 0));
    }
    return out;
}

double accuracy(const TrainedModel& m, const std::vector<LabeledExample>& ex) {
    double ok = 0;
    for (const auto& e : ex) ok += m.predict(e.features) == e.label;
    return ok / double(ex.size());
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};
const Term kCutoff{2014, 1};

Dataset default_dataset(std::uint64_t seed) {
    GenConfig g;
    g.seed = seed;
    return generate(g);
}

Outcome metric_oracles() {
    Rng rng(101);
    std::size_t ap_mismatch = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(20);
        std::vector<std::size_t> ids(n);
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(ids));
        std::set<OpportunityId> relevant;
        for (std::size_t r = 1 + rng.below(n); r > 0; --r) relevant.insert(oid(rng.below(n + 5)));
        const std::size_t k = 1 + rng.below(n + 3);
        const auto list = ordered(ids);
        if (average_precision(list, relevant, k) != brute_force_ap(list, relevant, k)) ++ap_mismatch;
    }
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<int> y, p;
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 1 + rng.below(200); i > 0; --i) {
            y.push_back(int(rng.below(2)));
            p.push_back(int(rng.below(2)));
            (y.back() ? (p.back() ? tp : fn) : (p.back() ? fp : tn))++;
        }
        const auto r = classification_metrics(y, p);
        const double n = double(y.size());
        worst = std::max(worst, std::abs(r.accuracy - double(tp + tn) / n));
        const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
        const double rec = tp + fn ? double(tp) / double(tp + fn) : 0.0;
        const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        if (r.precision) worst = std::max(worst, std::abs(*r.precision - prec));
        if (r.recall) worst = std::max(worst, std::abs(*r.recall - rec));
        worst = std::max(worst, std::abs(r.f1 - f1));
        if (r.tp != tp || r.fp != fp || r.tn != tn || r.fn != fn) worst = 1;
    }
    return {ap_mismatch == 0 && worst <= 1e-12,
            fmt("AP mismatches %.0f/1000, max metric deviation %.2e", double(ap_mismatch), worst)};
}

Outcome gradient_check() {
    const auto ex = synthetic(7, 200, 4);
    const auto data = make_training_set(ex, Standardizer::identity(names(4)));
    Rng rng(8);
    double worst = 0;
    const double l2 = 1e-2, h = 1e-5;
    for (int point = 0; point < 20; ++point) {
        std::vector<double> w(5);
        for (auto& v : w) v = rng.normal();
        const auto g = logreg_loss_and_gradient(w, data, l2).gradient;
        for (std::size_t j = 0; j < w.size(); ++j) {
            auto up = w, down = w;
            up[j] += h;
            down[j] -= h;
            const double fd =
                (logreg_loss_and_gradient(up, data, l2).loss - logreg_loss_and_gradient(down, data, l2).loss) / (2 * h);
            worst = std::max(worst, std::abs(fd - g[j]) / std::max({std::abs(fd), std::abs(g[j]), 1e-8}));
        }
    }
    return {worst < 1e-4, fmt("max relative error %.2e", worst)};
}

Outcome boosting_sanity() {
    const auto big = synthetic(9, 2000, 3);
    LossTrace trace;
    GbtHyper h;
    h.n_trees = 100;
    train_gbt(big, h, Standardizer::identity(names(3)), &trace);
    std::size_t increases = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) increases += trace[i] > trace[i - 1];

    Rng rng(10);
    std::vector<LabeledExample> x;
    // Four quadrant clusters kept 0.2 away from the axes.
    const auto coord = [&] { return (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.2 + 0.8 * rng.uniform()); };
    for (int i = 0; i < 200; ++i) {
        const double a = coord(), b = coord();
        x.push_back(example({a, b}, (a < 0) != (b < 0)));
    }
    GbtHyper xh;
    xh.max_depth = 2;
    xh.n_trees = 50;
    xh.min_leaf = 1;
    const double gbt_acc = accuracy(train_gbt(x, xh, Standardizer::identity(names(2))), x);
    LogregHyper lh;
    lh.max_iters = 2000;
    const double lr_acc = accuracy(train_logreg(x, lh, Standardizer::fit(x)), x);
    return {trace.size() == 101 && increases == 0 && gbt_acc == 1.0 && lr_acc <= 0.75,
            fmt("loss increases %.0f over 100 rounds; XOR accuracy gbt %.3f, logreg %.3f", double(increases),
                gbt_acc, lr_acc)};
}

Outcome task1_reproduction() {
    std::map<std::string, std::vector<double>> f1;
    std::vector<double> base, base_plus, applicant;
    for (auto seed : kSeeds) {
        const auto d = default_dataset(seed);
        applicant.push_back(*summarize(d).applicant_rate);
        ExperimentConfig c;
        c.run_task2 = false;
        c.seeds = {seed};
        c.methods = {"majority", "always_positive", "logreg", "gbt"};
        c.task1_sets = {FeatureLevel::base_plus_plus};
        for (const auto& row : run_experiment(d, c).task1)
            if (row.group == "methods") f1[row.method].push_back(row.f1);
        c.methods = {"logreg"};
        c.task1_sets = {FeatureLevel::base, FeatureLevel::base_plus};
        for (const auto& row : run_experiment(d, c).task1) {
            if (row.group != "ablation") continue;
            (row.level == FeatureLevel::base ? base : base_plus).push_back(row.f1);
        }
    }
    const double baseline = std::max(mean(f1["majority"]), mean(f1["always_positive"]));
    const double lr = mean(f1["logreg"]), gbt = mean(f1["gbt"]);
    const bool ok = lr - baseline >= 0.15 && gbt - baseline >= 0.15 && mean(base) < mean(base_plus);
    std::ostringstream s;
    s << fmt("F1 logreg %.3f gbt %.3f vs best baseline %.3f", lr, gbt, baseline)
      << fmt(" (majority %.3f, always_positive %.3f);", mean(f1["majority"]), mean(f1["always_positive"]))
      << fmt(" logreg F1 base %.3f < base_plus %.3f; applicant rate %.3f", mean(base), mean(base_plus),
             mean(applicant));
    return {ok, s.str()};
}

struct Task2Runs {
    std::vector<double> logreg, random, base, base_plus, base_plus_plus;
};

Task2Runs task2_runs;

Outcome task2_reproduction() {
    for (auto seed : kSeeds) {
        const auto d = default_dataset(seed);
        ExperimentConfig c;
        c.run_task1 = false;
        c.seeds = {seed};
        c.methods = {"baseline", "logreg"};
        c.k_grid = {20};
        for (const auto& row : run_experiment(d, c).task2) {
            if (row.group == "methods" && row.method == "logreg") task2_runs.logreg.push_back(row.map);
            if (row.group == "methods" && row.method == "random") task2_runs.random.push_back(row.map);
            if (row.group != "ablation") continue;
            if (row.level == FeatureLevel::base) task2_runs.base.push_back(row.map);
            if (row.level == FeatureLevel::base_plus) task2_runs.base_plus.push_back(row.map);
            if (row.level == FeatureLevel::base_plus_plus) task2_runs.base_plus_plus.push_back(row.map);
        }
    }
    const double ratio = mean(task2_runs.logreg) / mean(task2_runs.random);
    return {ratio >= 5.0, fmt("logreg MAP@20 %.4f, random %.4f, ratio %.1fx", mean(task2_runs.logreg),
                               mean(task2_runs.random), ratio)};
}

Outcome ablation_ordering() {
    const auto& r = task2_runs;
    if (r.base.size() != kSeeds.size()) return {false, "Task-2 runs missing"};
    std::vector<double> d1, d2;
    for (std::size_t i = 0; i < r.base.size(); ++i) {
        d1.push_back(r.base_plus[i] - r.base[i]);
        d2.push_back(r.base_plus_plus[i] - r.base_plus[i]);
    }
    const bool ok = mean(d1) >= -standard_error(d1) && mean(d2) >= -standard_error(d2);
    std::ostringstream s;
    s << fmt("MAP@20 base %.4f, base_plus %.4f, base_plus_plus %.4f", mean(r.base), mean(r.base_plus),
             mean(r.base_plus_plus))
      << fmt("; paired diffs %.4f (SE %.4f), ", mean(d1), standard_error(d1))
      << fmt("%.4f (SE %.4f); reuses the C5 runs", mean(d2), standard_error(d2));
    return {ok, s.str()};
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e);
    if (out) *out = o.str();
    return code;
}

Outcome determinism() {
    testing::TempDir root("acceptance_det");
    testing::write_file(root / "config.json", R"({"generator": {"n_students": 1500, "n_opportunities": 300},
        "seeds": [1, 2], "k": [5, 20]})");
    std::vector<std::string> problems;
    std::string recs[2];
    for (int i = 0; i < 2; ++i) {
        const auto dir = root / ("run" + std::to_string(i));
        const auto cfg = (root / "config.json").string();
        const auto data = (dir / "data").string();
        if (cli({"datagen", "--config", cfg, "--out", data}) != 0) problems.push_back("datagen");
        if (cli({"train", "--config", cfg, "--dataset", data, "--out", (dir / "models").string()}) != 0)
            problems.push_back("train");
        if (cli({"eval", "--config", cfg, "--dataset", data, "--out", (dir / "reports").string()}) != 0)
            problems.push_back("eval");
        const auto model = (dir / "models" / cli::model_file_name(2, "gbt", FeatureLevel::base_plus_plus)).string();
        for (const char* student : {"S0010", "S0500", "S1234"}) {
            std::string o;
            if (cli({"recommend", "--model", model, "--dataset", data, "--student", student, "--k", "20"}, &o) != 0)
                problems.push_back(std::string("recommend ") + student);
            recs[i] += o;
        }
    }
    std::size_t files = 0;
    for (const char* sub : {"data", "models", "reports"}) {
        auto a = testing::snapshot(root / "run0" / sub), b = testing::snapshot(root / "run1" / sub);
        a.erase("manifest.json");
        b.erase("manifest.json");
        files += a.size();
        if (a.empty() || a != b) problems.push_back(std::string(sub) + " differ");
    }
    if (recs[0].empty() || recs[0] != recs[1]) problems.push_back("rankings differ");
    std::string detail = std::to_string(files) + " files and 3 rankings compared";
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

Outcome leakage_audit() {
    const auto full = default_dataset(2018);
    const Dataset past(history_before(full, kCutoff));
    const SplitView a(full, kCutoff, Phase::test), b(past, kCutoff, Phase::test);
    const TextContext ta(full, kCutoff), tb(past, kCutoff);
    const FeatureSetId s1{1, FeatureLevel::base_plus_plus}, s2{2, FeatureLevel::base_plus_plus};
    const auto candidates = a.candidate_opportunities();
    std::size_t compared = 0, changed = 0;
    for (std::size_t s = 0; s < full.students().size(); ++s) {
        const auto& id = full.students()[s].student_id;
        ++compared;
        if (task1_features(id, a, s1).values != task1_features(id, b, s1).values) ++changed;
        const auto pa = make_profile(full, s, kCutoff, ta, a.options());
        const auto pb = make_profile(past, s, kCutoff, tb, b.options());
        for (auto o : candidates) {
            ++compared;
            if (task2_features(pa, o, full, s2, ta).values != task2_features(pb, o, past, s2, tb).values) ++changed;
        }
        // The id-based path resolves the horizon itself.
        if (s % 50 == 0)
            for (std::size_t i = 0; i < candidates.size(); i += 25) {
                const auto& oid = full.opportunities()[candidates[i]].opportunity_id;
                ++compared;
                if (task2_features(id, oid, a, s2, ta).values != task2_features(id, oid, b, s2, tb).values) ++changed;
            }
    }
    return {changed == 0 && compared > full.students().size(),
            fmt("%.0f feature vectors compared, %.0f changed; %.0f post-cutoff applications removed",
                double(compared), double(changed), double(full.applications().size() - past.applications().size()))};
}

Outcome random_ranker_calibration() {
    std::vector<std::size_t> perm{0, 1, 2, 3};
    double total = 0;
    int count = 0;
    do {
        total += average_precision(ordered(perm), {oid(0)}, 4);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double exact = total / count;
    const std::vector<OpportunityId> ids{oid(0), oid(1), oid(2), oid(3)};
    std::vector<double> ap;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        ap.push_back(average_precision(random_ranker(StudentId("S"), ids, seed, 4), {oid(0)}, 4));
    const double m = mean(ap), se = standard_error(ap);
    return {std::abs(m - exact) <= 3 * se && std::abs(exact - 0.5208) < 1e-4,
            fmt("mean AP %.4f vs enumerated %.4f, 3 SE = %.4f", m, exact, 3 * se)};
}

}  // namespace

int main() {
    criterion(1, "metric oracles", 10, metric_oracles);
    criterion(2, "logreg gradient check", 5, gradient_check);
    criterion(3, "boosting sanity", 0, boosting_sanity);
    criterion(4, "Task-1 qualitative reproduction", 60, task1_reproduction);
    criterion(5, "Task-2 MAP@20 vs random baseline", 120, task2_reproduction);
    criterion(6, "Task-2 feature ablation ordering", 0, ablation_ordering);
    criterion(7, "determinism", 0, determinism);
    criterion(8, "leakage audit", 0, leakage_audit);
    criterion(9, "random-ranker calibration", 0, random_ranker_calibration);
    std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
