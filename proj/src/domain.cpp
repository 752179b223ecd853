#include "resrec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "resrec/format.hpp"

namespace resrec {

Term Term::from_ordinal(int ordinal) {
    const int year = ordinal >= 0 ? ordinal / 2 : -((1 - ordinal) / 2);
    return Term{year, ordinal - year * 2 + 1};
}

std::string Term::str() const { return std::to_string(year) + "." + std::to_string(half); }

std::optional<Term> Term::parse(std::string_view text) {
    text = trim(text);
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    const auto year = parse_int(text.substr(0, dot));
    const auto half = parse_int(text.substr(dot + 1));
    if (!year || !half || (*half != 1 && *half != 2)) return std::nullopt;
    return Term{static_cast<int>(*year), static_cast<int>(*half)};
}

bool term_before(const Term& a, const Term& b) { return a < b; }

std::string_view table_name(Table table) {
    switch (table) {
        case Table::students: return "students";
        case Table::courses: return "courses";
        case Table::enrollments: return "enrollments";
        case Table::teaching: return "teaching";
        case Table::faculty: return "faculty";
        case Table::opportunities: return "opportunities";
        case Table::applications: return "applications";
    }
    return "unknown";
}

std::vector<Issue> validate(const DatasetTables& t) {
    std::vector<Issue> issues;
    auto report = [&](Table table, std::size_t row, std::string message) {
        issues.push_back(Issue{table, row, std::move(message)});
    };
    auto check_term = [&](Table table, std::size_t row, const Term& term, std::string_view what) {
        if (!term.valid()) report(table, row, std::string(what) + " half must be 1 or 2");
    };

    if (!(t.gpa_scale.min < t.gpa_scale.max))
        report(Table::students, npos, "gpa scale min must be below max");

    std::set<std::string> students, courses, faculty, opportunities;
    std::unordered_map<std::string, Term> posted;

    for (std::size_t i = 0; i < t.students.size(); ++i) {
        const auto& s = t.students[i];
        if (s.student_id.empty()) report(Table::students, i, "empty student_id");
        if (!students.insert(s.student_id.value).second)
            report(Table::students, i, "duplicate student_id '" + s.student_id.value + "'");
        check_term(Table::students, i, s.admission_term, "admission");
        if (!std::isfinite(s.gpa) || s.gpa < t.gpa_scale.min || s.gpa > t.gpa_scale.max)
            report(Table::students, i, "gpa " + format_real(s.gpa) + " outside scale [" +
                                           format_real(t.gpa_scale.min) + ", " +
                                           format_real(t.gpa_scale.max) + "]");
    }
    for (std::size_t i = 0; i < t.courses.size(); ++i) {
        const auto& c = t.courses[i];
        if (c.course_id.empty()) report(Table::courses, i, "empty course_id");
        if (!courses.insert(c.course_id.value).second)
            report(Table::courses, i, "duplicate course_id '" + c.course_id.value + "'");
        if (trim(c.description).empty()) report(Table::courses, i, "empty description");
        if (c.credits <= 0) report(Table::courses, i, "credits must be positive");
        if (c.department_id.empty()) report(Table::courses, i, "empty department_id");
    }
    for (std::size_t i = 0; i < t.faculty.size(); ++i) {
        const auto& f = t.faculty[i];
        if (f.faculty_id.empty()) report(Table::faculty, i, "empty faculty_id");
        if (!faculty.insert(f.faculty_id.value).second)
            report(Table::faculty, i, "duplicate faculty_id '" + f.faculty_id.value + "'");
        if (f.department_id.empty()) report(Table::faculty, i, "empty department_id");
    }
    for (std::size_t i = 0; i < t.opportunities.size(); ++i) {
        const auto& o = t.opportunities[i];
        if (o.opportunity_id.empty()) report(Table::opportunities, i, "empty opportunity_id");
        if (!opportunities.insert(o.opportunity_id.value).second)
            report(Table::opportunities, i,
                   "duplicate opportunity_id '" + o.opportunity_id.value + "'");
        if (trim(o.abstract_text).empty()) report(Table::opportunities, i, "empty abstract");
        if (!faculty.contains(o.faculty_id.value))
            report(Table::opportunities, i, "unknown faculty_id '" + o.faculty_id.value + "'");
        check_term(Table::opportunities, i, o.posted_term, "posted");
        posted.emplace(o.opportunity_id.value, o.posted_term);
    }

    std::set<std::tuple<std::string, std::string, Term>> enrollment_keys;
    for (std::size_t i = 0; i < t.enrollments.size(); ++i) {
        const auto& e = t.enrollments[i];
        if (!students.contains(e.student_id.value))
            report(Table::enrollments, i, "unknown student_id '" + e.student_id.value + "'");
        if (!courses.contains(e.course_id.value))
            report(Table::enrollments, i, "unknown course_id '" + e.course_id.value + "'");
        check_term(Table::enrollments, i, e.term, "enrollment");
        if (!enrollment_keys.emplace(e.student_id.value, e.course_id.value, e.term).second)
            report(Table::enrollments, i, "duplicate (student_id, course_id, term)");
    }
    std::set<std::tuple<std::string, std::string, Term>> teaching_keys;
    for (std::size_t i = 0; i < t.teaching.size(); ++i) {
        const auto& r = t.teaching[i];
        if (!faculty.contains(r.faculty_id.value))
            report(Table::teaching, i, "unknown faculty_id '" + r.faculty_id.value + "'");
        if (!courses.contains(r.course_id.value))
            report(Table::teaching, i, "unknown course_id '" + r.course_id.value + "'");
        check_term(Table::teaching, i, r.term, "teaching");
        if (!teaching_keys.emplace(r.faculty_id.value, r.course_id.value, r.term).second)
            report(Table::teaching, i, "duplicate (faculty_id, course_id, term)");
    }
    std::set<std::pair<std::string, std::string>> application_keys;
    for (std::size_t i = 0; i < t.applications.size(); ++i) {
        const auto& a = t.applications[i];
        if (!students.contains(a.student_id.value))
            report(Table::applications, i, "unknown student_id '" + a.student_id.value + "'");
        check_term(Table::applications, i, a.term, "application");
        auto it = posted.find(a.opportunity_id.value);
        if (it == posted.end()) {
            report(Table::applications, i,
                   "unknown opportunity_id '" + a.opportunity_id.value + "'");
        } else if (a.term < it->second) {
            report(Table::applications, i,
                   "application term " + a.term.str() + " precedes posted term " +
                       it->second.str());
        }
        if (!application_keys.emplace(a.student_id.value, a.opportunity_id.value).second)
            report(Table::applications, i, "duplicate (student_id, opportunity_id)");
    }
    return issues;
}

namespace {

std::string describe(const std::vector<Issue>& issues) {
    std::string text = std::to_string(issues.size()) + " dataset integrity violation(s)";
    if (!issues.empty()) {
        const auto& first = issues.front();
        text += "; first: ";
        text += table_name(first.table);
        if (first.row != npos) text += " row " + std::to_string(first.row);
        text += ": " + first.message;
    }
    return text;
}

template <typename Map, typename Key>
std::size_t lookup(const Map& map, const Key& key) {
    auto it = map.find(key);
    return it == map.end() ? npos : it->second;
}

template <typename Rows>
void sort_by_term(std::vector<std::size_t>& indices, const Rows& rows) {
    std::stable_sort(indices.begin(), indices.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].term < rows[b].term; });
}

}  // namespace

DatasetError::DatasetError(std::vector<Issue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

Dataset::Dataset(DatasetTables tables) : tables_(std::move(tables)) {
    if (auto issues = validate(tables_); !issues.empty()) throw DatasetError(std::move(issues));

    const auto& t = tables_;
    for (std::size_t i = 0; i < t.students.size(); ++i) student_by_id_[t.students[i].student_id.value] = i;
    for (std::size_t i = 0; i < t.courses.size(); ++i) course_by_id_[t.courses[i].course_id.value] = i;
    for (std::size_t i = 0; i < t.faculty.size(); ++i) faculty_by_id_[t.faculty[i].faculty_id.value] = i;
    for (std::size_t i = 0; i < t.opportunities.size(); ++i)
        opportunity_by_id_[t.opportunities[i].opportunity_id.value] = i;

    student_enrollments_.resize(t.students.size());
    student_applications_.resize(t.students.size());
    course_teaching_.resize(t.courses.size());

    std::vector<Term> seen;
    for (const auto& s : t.students) seen.push_back(s.admission_term);

    for (std::size_t e = 0; e < t.enrollments.size(); ++e) {
        const auto& row = t.enrollments[e];
        enrollment_student_.push_back(student_by_id_.at(row.student_id.value));
        enrollment_course_.push_back(course_by_id_.at(row.course_id.value));
        student_enrollments_[enrollment_student_.back()].push_back(e);
        seen.push_back(row.term);
    }
    for (std::size_t r = 0; r < t.teaching.size(); ++r) {
        const auto& row = t.teaching[r];
        teaching_faculty_.push_back(faculty_by_id_.at(row.faculty_id.value));
        teaching_course_.push_back(course_by_id_.at(row.course_id.value));
        course_teaching_[teaching_course_.back()].push_back(r);
        seen.push_back(row.term);
    }
    for (const auto& o : t.opportunities) {
        opportunity_faculty_.push_back(faculty_by_id_.at(o.faculty_id.value));
        seen.push_back(o.posted_term);
    }
    for (std::size_t a = 0; a < t.applications.size(); ++a) {
        const auto& row = t.applications[a];
        application_student_.push_back(student_by_id_.at(row.student_id.value));
        application_opportunity_.push_back(opportunity_by_id_.at(row.opportunity_id.value));
        student_applications_[application_student_.back()].push_back(a);
        seen.push_back(row.term);
    }

    for (auto& rows : student_enrollments_) sort_by_term(rows, t.enrollments);
    for (auto& rows : student_applications_) sort_by_term(rows, t.applications);
    for (auto& rows : course_teaching_) sort_by_term(rows, t.teaching);

    if (!seen.empty()) {
        auto [lo, hi] = std::minmax_element(seen.begin(), seen.end());
        first_term_ = *lo;
        last_term_ = *hi;
    }
}

std::size_t Dataset::student_index(const StudentId& id) const { return lookup(student_by_id_, id.value); }
std::size_t Dataset::course_index(const CourseId& id) const { return lookup(course_by_id_, id.value); }
std::size_t Dataset::faculty_index(const FacultyId& id) const { return lookup(faculty_by_id_, id.value); }
std::size_t Dataset::opportunity_index(const OpportunityId& id) const {
    return lookup(opportunity_by_id_, id.value);
}

}  // namespace resrec
