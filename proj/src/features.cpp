#include "resrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "resrec/csv.hpp"
#include "resrec/format.hpp"
#include "resrec/rng.hpp"

namespace resrec {

std::string_view level_name(FeatureLevel level) {
    switch (level) {
        case FeatureLevel::base: return "base";
        case FeatureLevel::base_plus: return "base_plus";
        case FeatureLevel::base_plus_plus: return "base_plus_plus";
    }
    return "base";
}

std::optional<FeatureLevel> parse_level(std::string_view text) {
    if (text == "base" || text == "a") return FeatureLevel::base;
    if (text == "base_plus" || text == "base+ipre" || text == "base+ht" || text == "b")
        return FeatureLevel::base_plus;
    if (text == "base_plus_plus" || text == "base+ipre+gpa" || text == "base+ht+dept" || text == "c" ||
        text == "all")
        return FeatureLevel::base_plus_plus;
    return std::nullopt;
}

const std::vector<std::string>& feature_names(FeatureSetId set) {
    static const std::vector<std::string> t1[3] = {
        {"semesters_enrolled", "credits_approved"},
        {"semesters_enrolled", "credits_approved", "prior_application"},
        {"semesters_enrolled", "credits_approved", "prior_application", "gpa"}};
    static const std::vector<std::string> t2[3] = {
        {"content_sim"}, {"content_sim", "had_teacher"}, {"content_sim", "had_teacher", "dept_frac"}};
    const auto level = static_cast<std::size_t>(set.level);
    if (set.task == 1) return t1[level];
    if (set.task == 2) return t2[level];
    throw FeatureError("unknown task " + std::to_string(set.task));
}

bool is_binary_feature(std::string_view name) {
    return name == "prior_application" || name == "had_teacher";
}

SplitView::SplitView(const Dataset& dataset, Term cutoff, Phase phase, FeatureOptions options)
    : dataset_(&dataset), cutoff_(cutoff), phase_(phase), options_(options) {
    if (options_.task1_horizon_terms < 1) throw FeatureError("task1_horizon_terms must be >= 1");
}

bool SplitView::in_window(const Term& term) const {
    return phase_ == Phase::train ? term_before(term, cutoff_) : !term_before(term, cutoff_);
}

Term SplitView::task1_history_end() const {
    return phase_ == Phase::train ? cutoff_.offset(-options_.task1_horizon_terms) : cutoff_;
}

bool SplitView::in_task1_label_window(const Term& term) const {
    if (phase_ == Phase::test) return !term_before(term, cutoff_);
    return !term_before(term, task1_history_end()) && term_before(term, cutoff_);
}

Term SplitView::task2_history_end(const Opportunity& opportunity) const {
    return std::min(opportunity.posted_term, cutoff_);
}

std::vector<std::size_t> SplitView::applications() const {
    std::vector<std::size_t> rows;
    const auto& apps = dataset_->applications();
    for (std::size_t a = 0; a < apps.size(); ++a)
        if (in_window(apps[a].term)) rows.push_back(a);
    return rows;
}

std::vector<std::size_t> SplitView::candidate_opportunities() const {
    std::vector<std::size_t> rows;
    const auto& opps = dataset_->opportunities();
    for (std::size_t o = 0; o < opps.size(); ++o)
        if (in_window(opps[o].posted_term)) rows.push_back(o);
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return opps[a].opportunity_id < opps[b].opportunity_id;
    });
    return rows;
}

Split temporal_split(const Dataset& dataset, Term cutoff, FeatureOptions options) {
    Split split{SplitView(dataset, cutoff, Phase::train, options),
                SplitView(dataset, cutoff, Phase::test, options), {}};
    if (cutoff <= dataset.first_term() || dataset.last_term() < cutoff)
        split.warnings.push_back("cutoff " + cutoff.str() + " outside data range " +
                                 dataset.first_term().str() + ".." + dataset.last_term().str());
    return split;
}

DatasetTables history_before(const Dataset& dataset, Term cutoff) {
    DatasetTables t = dataset.tables();
    std::erase_if(t.enrollments, [&](const Enrollment& e) { return !term_before(e.term, cutoff); });
    std::erase_if(t.teaching, [&](const TeachingRecord& r) { return !term_before(r.term, cutoff); });
    std::erase_if(t.applications, [&](const Application& a) { return !term_before(a.term, cutoff); });
    return t;
}

TextContext::TextContext(const Dataset& dataset, Term cutoff, std::size_t min_df,
                         const std::set<std::string>& stopwords) {
    std::vector<TokenList> course_tokens, opportunity_tokens;
    for (const auto& c : dataset.courses()) course_tokens.push_back(tokenize(c.description));
    for (const auto& o : dataset.opportunities()) opportunity_tokens.push_back(tokenize(o.abstract_text));

    std::vector<TokenList> corpus = course_tokens;
    for (std::size_t o = 0; o < opportunity_tokens.size(); ++o)
        if (term_before(dataset.opportunities()[o].posted_term, cutoff))
            corpus.push_back(opportunity_tokens[o]);
    if (corpus.empty()) throw FeatureError("no training-period documents to build a vocabulary from");
    vocabulary_ = build_vocabulary(corpus, min_df, stopwords);

    for (const auto& tokens : course_tokens) course_counts_.push_back(term_counts(tokens, vocabulary_));
    for (const auto& tokens : opportunity_tokens)
        opportunity_vectors_.push_back(tfidf_vector(tokens, vocabulary_));
}

StudentProfile make_profile(const Dataset& dataset, std::size_t student, Term horizon,
                            const TextContext& text, const FeatureOptions& options) {
    StudentProfile p;
    p.student = student;
    p.horizon = horizon;
    std::set<std::size_t> courses, teachers;
    for (auto e : dataset.enrollments_of(student)) {
        const auto& row = dataset.enrollments()[e];
        if (!term_before(row.term, horizon) || !row.approved) continue;
        const auto course = dataset.enrollment_course(e);
        courses.insert(course);
        for (auto r : dataset.teaching_of(course)) {
            const auto& taught = dataset.teaching()[r];
            if (!term_before(taught.term, horizon)) continue;
            if (options.had_teacher_any_term || taught.term == row.term)
                teachers.insert(dataset.teaching_faculty(r));
        }
    }
    p.approved_courses.assign(courses.begin(), courses.end());
    p.teachers.assign(teachers.begin(), teachers.end());

    std::vector<SparseVector::Entry> counts;
    for (auto c : p.approved_courses) {
        const auto& entries = text.course_counts(c).entries();
        counts.insert(counts.end(), entries.begin(), entries.end());
    }
    p.tfidf = tfidf_from_counts(SparseVector(std::move(counts)), text.vocabulary());
    return p;
}

namespace {

std::size_t require_student(const Dataset& dataset, const StudentId& id) {
    const auto s = dataset.student_index(id);
    if (s == npos) throw FeatureError("unknown student '" + id.value + "'");
    return s;
}

std::size_t require_opportunity(const Dataset& dataset, const OpportunityId& id) {
    const auto o = dataset.opportunity_index(id);
    if (o == npos) throw FeatureError("unknown opportunity '" + id.value + "'");
    return o;
}

FeatureVector task1_vector(const Dataset& dataset, std::size_t s, Term horizon, FeatureSetId set) {
    if (set.task != 1) throw FeatureError("task1_features needs a Task-1 feature set");
    std::set<Term> terms;
    double credits = 0.0;
    for (auto e : dataset.enrollments_of(s)) {
        const auto& row = dataset.enrollments()[e];
        if (!term_before(row.term, horizon)) continue;
        terms.insert(row.term);
        if (row.approved) credits += dataset.courses()[dataset.enrollment_course(e)].credits;
    }
    bool prior = false;
    for (auto a : dataset.applications_of(s))
        if (term_before(dataset.applications()[a].term, horizon)) prior = true;

    FeatureVector v;
    v.names = &feature_names(set);
    v.values = {static_cast<double>(terms.size()), credits};
    if (set.level >= FeatureLevel::base_plus) v.values.push_back(prior ? 1.0 : 0.0);
    if (set.level >= FeatureLevel::base_plus_plus) v.values.push_back(dataset.students()[s].gpa);
    return v;
}

}  // namespace

FeatureVector task1_features(const StudentId& student, const SplitView& view, FeatureSetId set) {
    const auto& dataset = view.dataset();
    return task1_vector(dataset, require_student(dataset, student), view.task1_history_end(), set);
}

FeatureVector task2_features(const StudentProfile& profile, std::size_t opportunity,
                             const Dataset& dataset, FeatureSetId set, const TextContext& text) {
    if (set.task != 2) throw FeatureError("task2_features needs a Task-2 feature set");
    FeatureVector v;
    v.names = &feature_names(set);
    const double sim = cosine(profile.tfidf, text.opportunity_vector(opportunity));
    v.values.push_back(std::clamp(sim, 0.0, 1.0));
    if (set.level >= FeatureLevel::base_plus) {
        const auto f = dataset.opportunity_faculty(opportunity);
        const bool taught = std::binary_search(profile.teachers.begin(), profile.teachers.end(), f);
        v.values.push_back(taught ? 1.0 : 0.0);
    }
    if (set.level >= FeatureLevel::base_plus_plus) {
        const auto& dept = dataset.faculty()[dataset.opportunity_faculty(opportunity)].department_id;
        std::size_t same = 0;
        for (auto c : profile.approved_courses)
            if (dataset.courses()[c].department_id == dept) ++same;
        const auto n = profile.approved_courses.size();
        v.values.push_back(n ? static_cast<double>(same) / static_cast<double>(n) : 0.0);
    }
    return v;
}

FeatureVector task2_features(const StudentId& student, const OpportunityId& opportunity,
                             const SplitView& view, FeatureSetId set, const TextContext& text) {
    const auto& dataset = view.dataset();
    const auto s = require_student(dataset, student);
    const auto o = require_opportunity(dataset, opportunity);
    const auto horizon = view.task2_history_end(dataset.opportunities()[o]);
    const auto profile = make_profile(dataset, s, horizon, text, view.options());
    return task2_features(profile, o, dataset, set, text);
}

std::vector<LabeledExample> build_task1_examples(const SplitView& view, FeatureSetId set) {
    const auto& dataset = view.dataset();
    const auto horizon = view.task1_history_end();
    std::vector<std::size_t> order(dataset.students().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dataset.students()[a].student_id < dataset.students()[b].student_id;
    });

    std::vector<LabeledExample> examples;
    examples.reserve(order.size());
    for (auto s : order) {
        int label = 0;
        for (auto a : dataset.applications_of(s))
            if (view.in_task1_label_window(dataset.applications()[a].term)) label = 1;
        examples.push_back({ExampleKey{dataset.students()[s].student_id, std::nullopt},
                            task1_vector(dataset, s, horizon, set), label});
    }
    return examples;
}

Task2Examples build_task2_examples(const SplitView& view, FeatureSetId set, double neg_ratio,
                                   std::uint64_t seed, const TextContext& text) {
    if (!(neg_ratio > 0.0)) throw FeatureError("neg_ratio must be positive");
    if (set.task != 2) throw FeatureError("build_task2_examples needs a Task-2 feature set");
    const auto& dataset = view.dataset();
    Task2Examples out;

    std::set<std::pair<std::size_t, std::size_t>> positives;
    std::set<std::size_t> applicants;
    for (auto a : view.applications()) {
        positives.emplace(dataset.application_student(a), dataset.application_opportunity(a));
        applicants.insert(dataset.application_student(a));
    }
    std::set<std::pair<std::size_t, std::size_t>> applied;
    for (std::size_t a = 0; a < dataset.applications().size(); ++a)
        applied.emplace(dataset.application_student(a), dataset.application_opportunity(a));

    const std::vector<std::size_t> students(applicants.begin(), applicants.end());
    const auto opportunities = view.candidate_opportunities();
    const std::uint64_t n_pairs = static_cast<std::uint64_t>(students.size()) * opportunities.size();
    std::uint64_t n_blocked = 0;
    for (const auto& [s, o] : applied)
        if (applicants.contains(s) && view.in_window(dataset.opportunities()[o].posted_term)) ++n_blocked;
    const std::uint64_t available = n_pairs - n_blocked;
    const auto wanted = static_cast<std::uint64_t>(std::ceil(neg_ratio * static_cast<double>(positives.size())));

    auto pair_at = [&](std::uint64_t i) {
        return std::pair{students[i / opportunities.size()], opportunities[i % opportunities.size()]};
    };

    std::set<std::pair<std::size_t, std::size_t>> negatives;
    Rng rng = Rng(seed).fork("negatives");
    if (wanted >= available) {
        if (wanted > available)
            out.warnings.push_back("requested " + std::to_string(wanted) + " negatives but only " +
                                   std::to_string(available) + " non-applied pairs exist");
        for (std::uint64_t i = 0; i < n_pairs; ++i)
            if (auto p = pair_at(i); !applied.contains(p)) negatives.insert(p);
    } else if (wanted * 2 <= available) {
        while (negatives.size() < wanted) {
            auto p = pair_at(rng.below(n_pairs));
            if (!applied.contains(p)) negatives.insert(p);
        }
    } else {
        std::vector<std::pair<std::size_t, std::size_t>> pool;
        for (std::uint64_t i = 0; i < n_pairs; ++i)
            if (auto p = pair_at(i); !applied.contains(p)) pool.push_back(p);
        for (std::uint64_t i = 0; i < wanted; ++i) {
            const auto j = i + rng.below(pool.size() - i);
            std::swap(pool[i], pool[j]);
            negatives.insert(pool[i]);
        }
    }

    std::map<std::pair<std::size_t, Term>, StudentProfile> profiles;
    auto emit = [&](std::size_t s, std::size_t o, int label) {
        const auto horizon = view.task2_history_end(dataset.opportunities()[o]);
        auto it = profiles.find({s, horizon});
        if (it == profiles.end())
            it = profiles.emplace(std::pair{s, horizon},
                                  make_profile(dataset, s, horizon, text, view.options()))
                     .first;
        out.examples.push_back({ExampleKey{dataset.students()[s].student_id,
                                           dataset.opportunities()[o].opportunity_id},
                                task2_features(it->second, o, dataset, set, text), label});
    };
    for (const auto& [s, o] : positives) emit(s, o, 1);
    for (const auto& [s, o] : negatives) emit(s, o, 0);
    out.n_positives = positives.size();
    out.n_negatives = negatives.size();
    std::sort(out.examples.begin(), out.examples.end(),
              [](const LabeledExample& a, const LabeledExample& b) { return a.key < b.key; });
    return out;
}

Standardizer Standardizer::fit(std::span<const LabeledExample> examples, StandardizerOptions options) {
    if (examples.empty()) throw FeatureError("cannot fit a standardizer on no examples");
    const auto& first = examples.front().features;
    Standardizer s;
    s.names_ = *first.names;
    const auto d = first.size();
    s.mean_.assign(d, 0.0);
    s.sd_.assign(d, 0.0);
    s.passthrough_.assign(d, false);
    for (const auto& ex : examples) {
        if (ex.features.size() != d || *ex.features.names != s.names_)
            throw FeatureError("inconsistent feature names across examples");
        for (std::size_t j = 0; j < d; ++j) s.mean_[j] += ex.features.values[j];
    }
    const auto n = static_cast<double>(examples.size());
    for (auto& m : s.mean_) m /= n;
    for (const auto& ex : examples)
        for (std::size_t j = 0; j < d; ++j) {
            const double r = ex.features.values[j] - s.mean_[j];
            s.sd_[j] += r * r;
        }
    for (std::size_t j = 0; j < d; ++j) {
        s.sd_[j] = std::sqrt(s.sd_[j] / n);
        if (!options.standardize_binary && is_binary_feature(s.names_[j])) s.passthrough_[j] = true;
    }
    return s;
}

Standardizer Standardizer::identity(const std::vector<std::string>& names) {
    return from_stats(names, std::vector<double>(names.size(), 0.0), std::vector<double>(names.size(), 1.0),
                      std::vector<bool>(names.size(), true));
}

Standardizer Standardizer::from_stats(std::vector<std::string> names, std::vector<double> mean,
                                      std::vector<double> sd, std::vector<bool> passthrough) {
    if (mean.size() != names.size() || sd.size() != names.size() || passthrough.size() != names.size())
        throw FeatureError("standardizer statistics do not match feature names");
    Standardizer s;
    s.names_ = std::move(names);
    s.mean_ = std::move(mean);
    s.sd_ = std::move(sd);
    s.passthrough_ = std::move(passthrough);
    return s;
}

double Standardizer::apply(std::size_t column, double value) const {
    if (passthrough_[column]) return value;
    if (sd_[column] == 0.0) return 0.0;
    return (value - mean_[column]) / sd_[column];
}

FeatureVector Standardizer::apply(const FeatureVector& vector) const {
    if (vector.size() != names_.size()) throw FeatureError("feature count does not match standardizer");
    FeatureVector out;
    out.names = vector.names;
    out.values.resize(vector.size());
    for (std::size_t j = 0; j < vector.size(); ++j) out.values[j] = apply(j, vector.values[j]);
    return out;
}

void write_examples_csv(std::ostream& out, std::span<const LabeledExample> examples) {
    std::vector<std::string> header = {"student_id", "opportunity_id"};
    if (!examples.empty())
        for (const auto& n : *examples.front().features.names) header.push_back(n);
    header.push_back("label");
    csv::write_row(out, header);
    for (const auto& ex : examples) {
        std::vector<std::string> row = {ex.key.student.value,
                                        ex.key.opportunity ? ex.key.opportunity->value : ""};
        for (double v : ex.features.values) row.push_back(format_real(v));
        row.push_back(std::to_string(ex.label));
        csv::write_row(out, row);
    }
}

}  // namespace resrec
