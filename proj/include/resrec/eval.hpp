#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "resrec/features.hpp"
#include "resrec/models.hpp"

namespace resrec {

struct ClassificationReport {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    std::optional<double> precision;  // absent when tp + fp == 0
    std::optional<double> recall;     // absent when tp + fn == 0
    double f1 = 0.0;                  // 0 when precision + recall == 0 or either is absent

    std::size_t n() const { return tp + fp + tn + fn; }
};

/// Throws std::invalid_argument on empty or mismatched inputs or labels outside {0,1}.
ClassificationReport classification_metrics(std::span<const int> labels, std::span<const int> predictions);

struct RankedItem {
    OpportunityId opportunity;
    double score = 0.0;
};

/// Scores non-increasing; equal scores by ascending opportunity id.
struct RankedList {
    StudentId student;
    std::vector<RankedItem> items;
};

/// Sorts in place with the tie rule, drops duplicates and truncates at k.
RankedList make_ranked_list(StudentId student, std::vector<RankedItem> items, std::size_t k);

/// Scores every candidate (opportunity indices) for the student and keeps the top k.
/// Throws std::invalid_argument on an empty candidate set or k == 0.
RankedList rank_candidates(const TrainedModel& model, const StudentId& student,
                           std::span<const std::size_t> candidates, const SplitView& view, FeatureSetId set,
                           const TextContext& text, std::size_t k);

/// Same with a profile already built at the candidates' horizon.
RankedList rank_candidates(const TrainedModel& model, const StudentProfile& profile,
                           std::span<const std::size_t> candidates, const Dataset& dataset, FeatureSetId set,
                           const TextContext& text, std::size_t k);

/// Seeded uniform shuffle; scores strictly decrease with rank.
RankedList random_ranker(const StudentId& student, std::span<const OpportunityId> candidates,
                         std::uint64_t seed, std::size_t k);

/// Sum of precision@i over relevant hits in the top k, over min(|relevant|, k).
/// Throws std::invalid_argument on an empty relevant set or k == 0.
double average_precision(const RankedList& ranked, const std::set<OpportunityId>& relevant, std::size_t k);

struct RankedWithRelevant {
    RankedList ranked;
    std::set<OpportunityId> relevant;
};

/// Unweighted mean AP@k. Throws on an empty student set.
double map_at_k(std::span<const RankedWithRelevant> per_student, std::size_t k);

struct RankingReport {
    std::map<std::size_t, double> map_at_k;
    std::map<std::size_t, std::vector<std::pair<StudentId, double>>> average_precisions;
    std::size_t n_evaluated_students = 0;
    std::size_t n_excluded_students = 0;  // no relevant test item
};

RankingReport ranking_report(std::span<const RankedWithRelevant> per_student, std::span<const std::size_t> k_grid,
                             std::size_t n_excluded = 0);

struct ExperimentConfig {
    Term cutoff{2014, 1};
    bool run_task1 = true;
    bool run_task2 = true;
    /// baseline, majority, always_positive, logreg, gbt, svm.
    std::vector<std::string> methods{"baseline", "logreg", "gbt", "svm"};
    std::vector<FeatureLevel> task1_sets{FeatureLevel::base, FeatureLevel::base_plus, FeatureLevel::base_plus_plus};
    std::vector<FeatureLevel> task2_sets{FeatureLevel::base, FeatureLevel::base_plus, FeatureLevel::base_plus_plus};
    std::vector<std::size_t> k_grid{5, 10, 20, 50};
    double neg_ratio = 1.0;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    /// Mode used for the "baseline" method in Task 1.
    ConstantMode baseline_mode = ConstantMode::always_positive;
    /// Task-2 ablation method; Task 1 uses the best method by F1.
    std::string task2_ablation_method = "logreg";
    Hyperparams hyper;
    StandardizerOptions standardizer;
    FeatureOptions features;
    std::size_t min_df = 2;
};

/// Throws std::invalid_argument for unknown methods, empty grids or seeds.
void validate(const ExperimentConfig& config);

struct Task1Row {
    std::string group;  // "methods" or "ablation"
    std::string method;
    FeatureLevel level = FeatureLevel::base_plus_plus;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    double f1 = 0.0;
    std::vector<double> f1_per_seed;
};

struct Task2Row {
    std::string group;
    std::string method;
    FeatureLevel level = FeatureLevel::base_plus_plus;
    std::size_t k = 0;
    double map = 0.0;
    double baseline_map = 0.0;
    std::optional<double> ratio;  // absent when baseline_map == 0
    std::vector<double> map_per_seed;
    std::size_t n_evaluated_students = 0;
};

struct ExperimentResult {
    std::vector<Task1Row> task1;
    std::vector<Task2Row> task2;
    std::string task1_best_method;
    std::vector<std::string> warnings;
};

/// Label used in reports for a method name ("baseline" resolves to its mode).
std::string method_label(std::string_view method, ConstantMode baseline_mode);

/// Pre-trained models by (task, method, level, seed). May throw ModelError.
using ModelSource = std::function<TrainedModel(int, std::string_view, FeatureLevel, std::uint64_t)>;

/// Trains on the pre-cutoff window (unless a source is given) and scores the
/// post-cutoff window, once per seed, and averages. Task 2 ranks every
/// test-window opportunity for each student with a test application.

ExperimentResult run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const ModelSource& source = {});

/// method, feature_set, accuracy, precision, recall, f1. Absent values are empty fields.
void write_task1_report(std::ostream& out, std::span<const Task1Row> rows);
/// method, feature_set, k, map, baseline_map, ratio.
void write_task2_report(std::ostream& out, std::span<const Task2Row> rows);

/// Writes task1_report.csv and/or task2_map.csv into the directory.
std::vector<std::filesystem::path> write_reports(const ExperimentResult& result,
                                                 const std::filesystem::path& directory);

}  // namespace resrec
