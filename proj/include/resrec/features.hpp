#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "resrec/domain.hpp"
#include "resrec/text.hpp"

namespace resrec {

class FeatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Phase { train, test };

/// Nested feature sets. Task 1: base = {semesters, credits}, base_plus adds
/// prior_application, base_plus_plus adds gpa. Task 2: base = {content_sim},
/// base_plus adds had_teacher, base_plus_plus adds dept_frac.
enum class FeatureLevel { base, base_plus, base_plus_plus };

struct FeatureSetId {
    int task = 1;
    FeatureLevel level = FeatureLevel::base_plus_plus;
    auto operator<=>(const FeatureSetId&) const = default;
};

std::string_view level_name(FeatureLevel level);
/// Accepts base, base_plus, base_plus_plus and the descriptive aliases
/// base+ipre, base+ipre+gpa, base+ht, base+ht+dept.
std::optional<FeatureLevel> parse_level(std::string_view text);

/// Feature names of a set, in vector order. Throws FeatureError on a bad task.
const std::vector<std::string>& feature_names(FeatureSetId set);
bool is_binary_feature(std::string_view name);

struct FeatureOptions {
    /// Task-1 training examples take features as of cutoff - horizon and
    /// labels from [cutoff - horizon, cutoff).
    int task1_horizon_terms = 2;
    /// Count a teacher regardless of whether the teaching term matches the enrollment term.
    bool had_teacher_any_term = false;
};

/// One side of a temporal split.
class SplitView {
public:
    SplitView(const Dataset& dataset, Term cutoff, Phase phase, FeatureOptions options = {});

    const Dataset& dataset() const { return *dataset_; }
    Term cutoff() const { return cutoff_; }
    Phase phase() const { return phase_; }
    const FeatureOptions& options() const { return options_; }

    /// Train: strictly before the cutoff. Test: at or after it.
    bool in_window(const Term& term) const;

    /// History horizon for Task-1 predictors (records strictly before it count).
    Term task1_history_end() const;
    bool in_task1_label_window(const Term& term) const;

    /// History horizon for a Task-2 pair: min(posted term, cutoff).
    Term task2_history_end(const Opportunity& opportunity) const;

    /// Application rows whose term falls in the window, in input order.
    std::vector<std::size_t> applications() const;
    /// Opportunities posted in the window, by ascending id.
    std::vector<std::size_t> candidate_opportunities() const;

private:
    const Dataset* dataset_;
    Term cutoff_;
    Phase phase_;
    FeatureOptions options_;
};

struct Split {
    SplitView train;
    SplitView test;
    std::vector<std::string> warnings;
};

/// Warns (does not fail) when the cutoff lies outside the data's term range.
Split temporal_split(const Dataset& dataset, Term cutoff, FeatureOptions options = {});

/// Copy of the tables with every enrollment, teaching record and application
/// at or after the cutoff removed. Students and opportunities are kept.
DatasetTables history_before(const Dataset& dataset, Term cutoff);

struct FeatureVector {
    const std::vector<std::string>* names = nullptr;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    const std::string& name(std::size_t i) const { return (*names)[i]; }
};

struct ExampleKey {
    StudentId student;
    std::optional<OpportunityId> opportunity;
    auto operator<=>(const ExampleKey&) const = default;
};

struct LabeledExample {
    ExampleKey key;
    FeatureVector features;
    int label = 0;
};

/// Frozen vocabulary (course descriptions plus opportunities posted before
/// the cutoff) and precomputed document vectors.
class TextContext {
public:
    TextContext(const Dataset& dataset, Term cutoff, std::size_t min_df = 2,
                const std::set<std::string>& stopwords = {});

    const Vocabulary& vocabulary() const { return vocabulary_; }
    const SparseVector& course_counts(std::size_t course) const { return course_counts_[course]; }
    const SparseVector& opportunity_vector(std::size_t opportunity) const {
        return opportunity_vectors_[opportunity];
    }

private:
    Vocabulary vocabulary_;
    std::vector<SparseVector> course_counts_;
    std::vector<SparseVector> opportunity_vectors_;
};

/// What Task-2 features need to know about a student as of a horizon.
struct StudentProfile {
    std::size_t student = npos;
    Term horizon;
    std::vector<std::size_t> approved_courses;  // distinct, ascending
    std::vector<std::size_t> teachers;          // faculty indices, ascending
    SparseVector tfidf;
};

StudentProfile make_profile(const Dataset& dataset, std::size_t student, Term horizon,
                            const TextContext& text, const FeatureOptions& options = {});

/// Throws FeatureError for an unknown student or a non-Task-1 set.
FeatureVector task1_features(const StudentId& student, const SplitView& view, FeatureSetId set);

FeatureVector task2_features(const StudentId& student, const OpportunityId& opportunity,
                             const SplitView& view, FeatureSetId set, const TextContext& text);
/// Fast path when the profile's horizon already matches the pair.
FeatureVector task2_features(const StudentProfile& profile, std::size_t opportunity,
                             const Dataset& dataset, FeatureSetId set, const TextContext& text);

std::vector<LabeledExample> build_task1_examples(const SplitView& view, FeatureSetId set);

struct Task2Examples {
    std::vector<LabeledExample> examples;  // sorted by key
    std::size_t n_positives = 0;
    std::size_t n_negatives = 0;
    std::vector<std::string> warnings;
};

/// Positives are all applications in the window; negatives are uniformly
/// sampled non-applied (applicant student, window opportunity) pairs,
/// ceil(neg_ratio * positives) of them or all that exist.
Task2Examples build_task2_examples(const SplitView& view, FeatureSetId set, double neg_ratio,
                                   std::uint64_t seed, const TextContext& text);

struct StandardizerOptions {
    bool standardize_binary = true;
};

/// Column-wise (x - mean) / sd fitted on training rows. Zero-sd columns map
/// to 0; pass-through columns are left unchanged.
class Standardizer {
public:
    Standardizer() = default;

    static Standardizer fit(std::span<const LabeledExample> examples, StandardizerOptions options = {});
    static Standardizer identity(const std::vector<std::string>& names);
    static Standardizer from_stats(std::vector<std::string> names, std::vector<double> mean,
                                   std::vector<double> sd, std::vector<bool> passthrough);

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& sd() const { return sd_; }
    const std::vector<bool>& passthrough() const { return passthrough_; }

    double apply(std::size_t column, double value) const;
    FeatureVector apply(const FeatureVector& vector) const;

private:
    std::vector<std::string> names_;
    std::vector<double> mean_;
    std::vector<double> sd_;
    std::vector<bool> passthrough_;
};

/// key columns, feature columns, label.
void write_examples_csv(std::ostream& out, std::span<const LabeledExample> examples);

}  // namespace resrec
