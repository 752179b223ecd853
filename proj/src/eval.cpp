#include "resrec/eval.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "resrec/csv.hpp"
#include "resrec/format.hpp"
#include "resrec/rng.hpp"

namespace resrec {

ClassificationReport classification_metrics(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.empty()) throw std::invalid_argument("classification_metrics: empty input");
    if (labels.size() != predictions.size())
        throw std::invalid_argument("classification_metrics: labels and predictions differ in length");
    ClassificationReport r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        const int p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1))
            throw std::invalid_argument("classification_metrics: values must be 0 or 1");
        if (y == 1 && p == 1) ++r.tp;
        else if (y == 0 && p == 1) ++r.fp;
        else if (y == 0 && p == 0) ++r.tn;
        else ++r.fn;
    }
    const auto n = static_cast<double>(r.n());
    r.accuracy = static_cast<double>(r.tp + r.tn) / n;
    if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    if (r.precision && r.recall && *r.precision + *r.recall > 0.0)
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

RankedList make_ranked_list(StudentId student, std::vector<RankedItem> items, std::size_t k) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.opportunity < b.opportunity;
    });
    std::set<OpportunityId> seen;
    RankedList out{std::move(student), {}};
    for (auto& item : items) {
        if (out.items.size() == k) break;
        if (seen.insert(item.opportunity).second) out.items.push_back(std::move(item));
    }
    return out;
}

RankedList rank_candidates(const TrainedModel& model, const StudentProfile& profile,
                           std::span<const std::size_t> candidates, const Dataset& dataset, FeatureSetId set,
                           const TextContext& text, std::size_t k) {
    if (candidates.empty()) throw std::invalid_argument("rank_candidates: empty candidate set");
    if (k == 0) throw std::invalid_argument("rank_candidates: k must be positive");
    std::vector<RankedItem> items;
    items.reserve(candidates.size());
    for (auto o : candidates) {
        const auto features = task2_features(profile, o, dataset, set, text);
        items.push_back({dataset.opportunities()[o].opportunity_id, model.score(features)});
    }
    return make_ranked_list(dataset.students()[profile.student].student_id, std::move(items), k);
}

RankedList rank_candidates(const TrainedModel& model, const StudentId& student,
                           std::span<const std::size_t> candidates, const SplitView& view, FeatureSetId set,
                           const TextContext& text, std::size_t k) {
    if (candidates.empty()) throw std::invalid_argument("rank_candidates: empty candidate set");
    if (k == 0) throw std::invalid_argument("rank_candidates: k must be positive");
    const auto& dataset = view.dataset();
    const auto s = dataset.student_index(student);
    if (s == npos) throw FeatureError("unknown student '" + student.value + "'");

    // One profile per distinct horizon among the candidates.
    std::map<Term, std::vector<std::size_t>> by_horizon;
    for (auto o : candidates) by_horizon[view.task2_history_end(dataset.opportunities()[o])].push_back(o);
    std::vector<RankedItem> items;
    items.reserve(candidates.size());
    for (const auto& [horizon, group] : by_horizon) {
        const auto profile = make_profile(dataset, s, horizon, text, view.options());
        for (auto o : group) {
            const auto features = task2_features(profile, o, dataset, set, text);
            items.push_back({dataset.opportunities()[o].opportunity_id, model.score(features)});
        }
    }
    return make_ranked_list(student, std::move(items), k);
}

RankedList random_ranker(const StudentId& student, std::span<const OpportunityId> candidates,
                         std::uint64_t seed, std::size_t k) {
    std::vector<OpportunityId> order(candidates.begin(), candidates.end());
    Rng rng(seed);
    rng.shuffle(std::span<OpportunityId>(order));
    RankedList out{student, {}};
    const auto n = std::min(k, order.size());
    for (std::size_t i = 0; i < n; ++i)
        out.items.push_back({order[i], static_cast<double>(order.size() - i)});
    return out;
}

double average_precision(const RankedList& ranked, const std::set<OpportunityId>& relevant, std::size_t k) {
    if (relevant.empty()) throw std::invalid_argument("average_precision: empty relevant set");
    if (k == 0) throw std::invalid_argument("average_precision: k must be positive");
    const auto n = std::min(k, ranked.items.size());
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (relevant.count(ranked.items[i].opportunity)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(std::min(relevant.size(), k));
}

double map_at_k(std::span<const RankedWithRelevant> per_student, std::size_t k) {
    if (per_student.empty()) throw std::invalid_argument("map_at_k: no students");
    double sum = 0.0;
    for (const auto& s : per_student) sum += average_precision(s.ranked, s.relevant, k);
    return sum / static_cast<double>(per_student.size());
}

RankingReport ranking_report(std::span<const RankedWithRelevant> per_student, std::span<const std::size_t> k_grid,
                             std::size_t n_excluded) {
    RankingReport report;
    report.n_evaluated_students = per_student.size();
    report.n_excluded_students = n_excluded;
    for (auto k : k_grid) {
        auto& aps = report.average_precisions[k];
        double sum = 0.0;
        for (const auto& s : per_student) {
            const double ap = average_precision(s.ranked, s.relevant, k);
            aps.emplace_back(s.ranked.student, ap);
            sum += ap;
        }
        report.map_at_k[k] = per_student.empty() ? 0.0 : sum / static_cast<double>(per_student.size());
    }
    return report;
}

namespace {

bool is_constant_method(std::string_view m) {
    return m == "baseline" || m == "majority" || m == "always_positive";
}

std::string resolve_method(std::string_view method, ConstantMode baseline_mode) {
    if (method == "baseline") return std::string(constant_mode_name(baseline_mode));
    return std::string(method);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::optional<double> mean_present(const std::vector<std::optional<double>>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& x : v)
        if (x) {
            s += *x;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
}

TrainOptions options_for_seed(const ExperimentConfig& config, std::uint64_t seed) {
    TrainOptions options{config.hyper, config.standardizer};
    options.hyper.svm.seed = seed;
    return options;
}

struct Task1Cell {
    std::vector<ClassificationReport> per_seed;
};

struct EvalStudent {
    std::size_t index = npos;
    std::set<OpportunityId> relevant;
};

}  // namespace

std::string method_label(std::string_view method, ConstantMode baseline_mode) {
    if (method == "baseline") return "baseline(" + std::string(constant_mode_name(baseline_mode)) + ")";
    return std::string(method);
}

void validate(const ExperimentConfig& config) {
    if (config.methods.empty()) throw std::invalid_argument("experiment: no methods");
    for (const auto& m : config.methods)
        if (m != "baseline" && !is_known_method(m))
            throw std::invalid_argument("experiment: unknown method '" + m + "'");
    if (config.run_task2 && !is_known_method(config.task2_ablation_method))
        throw std::invalid_argument("experiment: unknown ablation method '" + config.task2_ablation_method + "'");
    if (config.seeds.empty()) throw std::invalid_argument("experiment: no seeds");
    if (config.run_task1 && config.task1_sets.empty()) throw std::invalid_argument("experiment: no Task-1 feature sets");
    if (config.run_task2 && config.task2_sets.empty()) throw std::invalid_argument("experiment: no Task-2 feature sets");
    if (config.run_task2 && config.k_grid.empty()) throw std::invalid_argument("experiment: empty k grid");
    for (auto k : config.k_grid)
        if (k == 0) throw std::invalid_argument("experiment: k must be positive");
    if (!(config.neg_ratio > 0.0)) throw std::invalid_argument("experiment: neg_ratio must be positive");
    if (!config.cutoff.valid()) throw std::invalid_argument("experiment: invalid cutoff");
    if (config.features.task1_horizon_terms < 1)
        throw std::invalid_argument("experiment: task1_horizon_terms must be at least 1");
    validate(config.hyper);
}

namespace {

void run_task1(const Dataset& dataset, const ExperimentConfig& config, const Split& split,
               const ModelSource& source, ExperimentResult& result) {
    std::map<std::pair<std::string, FeatureLevel>, Task1Cell> cells;
    std::map<FeatureLevel, std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>>> examples;
    const auto get_examples = [&](FeatureLevel level) -> const auto& {
        auto it = examples.find(level);
        if (it == examples.end()) {
            const FeatureSetId set{1, level};
            it = examples.emplace(level, std::make_pair(build_task1_examples(split.train, set),
                                                        build_task1_examples(split.test, set)))
                     .first;
        }
        return it->second;
    };
    (void)dataset;

    const auto evaluate = [&](const std::string& method, FeatureLevel level) {
        auto& cell = cells[{method, level}];
        if (!cell.per_seed.empty()) return;
        const auto& [train, test] = get_examples(level);
        for (auto seed : config.seeds) {
            const auto resolved = resolve_method(method, config.baseline_mode);
            const auto model = source ? source(1, resolved, level, seed)
                                      : train_method(resolved, train, options_for_seed(config, seed));
            std::vector<int> labels, predictions;
            for (const auto& e : test) {
                labels.push_back(e.label);
                predictions.push_back(model.predict(e.features));
            }
            cell.per_seed.push_back(classification_metrics(labels, predictions));
        }
    };

    const auto make_row = [&](const std::string& group, const std::string& method, FeatureLevel level) {
        const auto& cell = cells.at({method, level});
        Task1Row row;
        row.group = group;
        row.method = method_label(method, config.baseline_mode);
        row.level = level;
        std::vector<double> acc;
        std::vector<std::optional<double>> prec, rec;
        for (const auto& r : cell.per_seed) {
            acc.push_back(r.accuracy);
            prec.push_back(r.precision);
            rec.push_back(r.recall);
            row.f1_per_seed.push_back(r.f1);
        }
        row.accuracy = mean(acc);
        row.precision = mean_present(prec);
        row.recall = mean_present(rec);
        row.f1 = mean(row.f1_per_seed);
        return row;
    };

    constexpr auto full = FeatureLevel::base_plus_plus;
    for (const auto& m : config.methods) evaluate(m, full);
    for (const auto& m : config.methods) result.task1.push_back(make_row("methods", m, full));

    // Best learned method by mean F1; constants only if nothing else was asked for.
    std::string best;
    double best_f1 = -1.0;
    for (int pass = 0; pass < 2 && best.empty(); ++pass)
        for (const auto& m : config.methods) {
            if (pass == 0 && is_constant_method(m)) continue;
            const double f1 = make_row("", m, full).f1;
            if (f1 > best_f1) {
                best_f1 = f1;
                best = m;
            }
        }
    result.task1_best_method = method_label(best, config.baseline_mode);
    for (auto level : config.task1_sets) {
        evaluate(best, level);
        result.task1.push_back(make_row("ablation", best, level));
    }
}

void run_task2(const Dataset& dataset, const ExperimentConfig& config, const Split& split,
               const ModelSource& source, ExperimentResult& result) {
    const TextContext text(dataset, config.cutoff, config.min_df);
    const auto candidates = split.test.candidate_opportunities();
    if (candidates.empty()) {
        result.warnings.push_back("Task 2: no opportunities posted in the test window; skipped");
        return;
    }
    std::set<std::size_t> candidate_set(candidates.begin(), candidates.end());
    std::vector<OpportunityId> candidate_ids;
    for (auto o : candidates) candidate_ids.push_back(dataset.opportunities()[o].opportunity_id);

    // Relevant items are test-window applications to test-window opportunities.
    std::map<std::size_t, std::set<OpportunityId>> relevant;
    for (auto a : split.test.applications()) {
        const auto o = dataset.application_opportunity(a);
        if (candidate_set.count(o))
            relevant[dataset.application_student(a)].insert(dataset.opportunities()[o].opportunity_id);
    }
    std::vector<EvalStudent> students;
    for (auto& [s, rel] : relevant) students.push_back({s, std::move(rel)});
    std::sort(students.begin(), students.end(), [&](const EvalStudent& a, const EvalStudent& b) {
        return dataset.students()[a.index].student_id < dataset.students()[b.index].student_id;
    });
    if (students.empty()) {
        result.warnings.push_back("Task 2: no student has a test-window application; skipped");
        return;
    }
    const auto n_excluded = dataset.students().size() - students.size();
    std::vector<StudentProfile> profiles;
    for (const auto& s : students)
        profiles.push_back(make_profile(dataset, s.index, config.cutoff, text, split.test.options()));

    const auto max_k = *std::max_element(config.k_grid.begin(), config.k_grid.end());
    std::vector<std::size_t> k_grid = config.k_grid;
    std::sort(k_grid.begin(), k_grid.end());
    k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());

    // per seed: baseline MAP by k
    std::vector<std::map<std::size_t, double>> baseline_by_seed;
    for (auto seed : config.seeds) {
        const Rng base(Rng(seed).fork("random_ranker"));
        std::vector<RankedWithRelevant> lists;
        for (std::size_t i = 0; i < students.size(); ++i) {
            const auto& id = dataset.students()[students[i].index].student_id;
            lists.push_back({random_ranker(id, candidate_ids, base.fork(id.value).next(), max_k),
                             students[i].relevant});
        }
        baseline_by_seed.push_back(ranking_report(lists, k_grid).map_at_k);
    }

    std::map<FeatureLevel, std::vector<Task2Examples>> train_by_level;
    const auto train_examples = [&](FeatureLevel level) -> const std::vector<Task2Examples>& {
        auto it = train_by_level.find(level);
        if (it != train_by_level.end()) return it->second;
        std::vector<Task2Examples> per_seed;
        for (auto seed : config.seeds) {
            per_seed.push_back(build_task2_examples(split.train, FeatureSetId{2, level}, config.neg_ratio, seed, text));
            for (const auto& w : per_seed.back().warnings) result.warnings.push_back("Task 2: " + w);
        }
        return train_by_level.emplace(level, std::move(per_seed)).first->second;
    };

    std::map<std::pair<std::string, FeatureLevel>, std::vector<std::map<std::size_t, double>>> cells;
    const auto evaluate = [&](const std::string& method, FeatureLevel level) {
        auto& cell = cells[{method, level}];
        if (!cell.empty()) return;
        if (method == "baseline") {
            cell = baseline_by_seed;
            return;
        }
        const FeatureSetId set{2, level};
        static const std::vector<Task2Examples> none;
        const auto& per_seed = source ? none : train_examples(level);
        for (std::size_t si = 0; si < config.seeds.size(); ++si) {
            const auto seed = config.seeds[si];
            const auto model = source ? source(2, method, level, seed)
                                      : train_method(method, per_seed[si].examples, options_for_seed(config, seed));
            std::vector<RankedWithRelevant> lists;
            for (std::size_t i = 0; i < students.size(); ++i)
                lists.push_back({rank_candidates(model, profiles[i], candidates, dataset, set, text, max_k),
                                 students[i].relevant});
            cell.push_back(ranking_report(lists, k_grid).map_at_k);
        }
    };

    const auto add_rows = [&](const std::string& group, const std::string& method, FeatureLevel level) {
        const auto& cell = cells.at({method, level});
        for (auto k : k_grid) {
            Task2Row row;
            row.group = group;
            row.method = method == "baseline" ? std::string("random") : method;
            row.level = level;
            row.k = k;
            std::vector<double> base;
            for (std::size_t si = 0; si < cell.size(); ++si) {
                row.map_per_seed.push_back(cell[si].at(k));
                base.push_back(baseline_by_seed[si].at(k));
            }
            row.map = mean(row.map_per_seed);
            row.baseline_map = mean(base);
            if (row.baseline_map > 0.0) row.ratio = row.map / row.baseline_map;
            row.n_evaluated_students = students.size();
            result.task2.push_back(std::move(row));
        }
    };

    constexpr auto full = FeatureLevel::base_plus_plus;
    for (const auto& m : config.methods) evaluate(m, full);
    for (const auto& m : config.methods) add_rows("methods", m, full);
    for (auto level : config.task2_sets) {
        evaluate(config.task2_ablation_method, level);
        add_rows("ablation", config.task2_ablation_method, level);
    }
    if (n_excluded > 0)
        result.warnings.push_back("Task 2: " + std::to_string(n_excluded) +
                                  " students without test-window applications excluded from MAP");
}

}  // namespace

ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const ModelSource& source) {
    validate(config);
    ExperimentResult result;
    const auto split = temporal_split(dataset, config.cutoff, config.features);
    result.warnings = split.warnings;
    if (config.run_task1) run_task1(dataset, config, split, source, result);
    if (config.run_task2) run_task2(dataset, config, split, source, result);
    return result;
}

namespace {

std::string optional_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

void write_task1_report(std::ostream& out, std::span<const Task1Row> rows) {
    csv::write_row(out, {"method", "feature_set", "accuracy", "precision", "recall", "f1"});
    for (const auto& r : rows)
        csv::write_row(out, {r.method, std::string(level_name(r.level)), format_real(r.accuracy),
                        optional_real(r.precision), optional_real(r.recall), format_real(r.f1)});
}

void write_task2_report(std::ostream& out, std::span<const Task2Row> rows) {
    csv::write_row(out, {"method", "feature_set", "k", "map", "baseline_map", "ratio"});
    for (const auto& r : rows)
        csv::write_row(out, {r.method, std::string(level_name(r.level)), std::to_string(r.k), format_real(r.map),
                        format_real(r.baseline_map), optional_real(r.ratio)});
}

std::vector<std::filesystem::path> write_reports(const ExperimentResult& result,
                                                 const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    const auto write = [&](const std::string& name, const auto& fn) {
        const auto path = directory / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        fn(out);
        written.push_back(path);
    };
    if (!result.task1.empty()) write("task1_report.csv", [&](std::ostream& o) { write_task1_report(o, result.task1); });
    if (!result.task2.empty()) write("task2_map.csv", [&](std::ostream& o) { write_task2_report(o, result.task2); });
    return written;
}

}  // namespace resrec
