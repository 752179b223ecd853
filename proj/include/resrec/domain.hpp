#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace resrec {

/// Half-year academic term, ordered by (year, half).
struct Term {
    int year = 0;
    int half = 1;

    auto operator<=>(const Term&) const = default;

    /// Dense ordinal: consecutive terms differ by one.
    int ordinal() const { return year * 2 + (half - 1); }
    static Term from_ordinal(int ordinal);

    Term next() const { return from_ordinal(ordinal() + 1); }
    Term offset(int terms) const { return from_ordinal(ordinal() + terms); }
    bool valid() const { return half == 1 || half == 2; }

    /// "YEAR.HALF", e.g. "2014.1".
    std::string str() const;
    static std::optional<Term> parse(std::string_view text);
};

bool term_before(const Term& a, const Term& b);

/// Opaque string identifier tagged by the entity it names.
template <typename Tag>
struct Id {
    std::string value;

    Id() = default;
    explicit Id(std::string v) : value(std::move(v)) {}

    auto operator<=>(const Id&) const = default;
    bool empty() const { return value.empty(); }
};

using StudentId = Id<struct StudentTag>;
using CourseId = Id<struct CourseTag>;
using FacultyId = Id<struct FacultyTag>;
using DepartmentId = Id<struct DepartmentTag>;
using OpportunityId = Id<struct OpportunityTag>;

struct GpaScale {
    double min = 1.0;
    double max = 7.0;
    auto operator<=>(const GpaScale&) const = default;
};

struct StudentRecord {
    StudentId student_id;
    Term admission_term;
    double gpa = 0.0;
    bool operator==(const StudentRecord&) const = default;
};

struct Course {
    CourseId course_id;
    std::string title;
    std::string description;
    DepartmentId department_id;
    int credits = 0;
    bool operator==(const Course&) const = default;
};

struct Enrollment {
    StudentId student_id;
    CourseId course_id;
    Term term;
    bool approved = false;
    bool operator==(const Enrollment&) const = default;
};

struct TeachingRecord {
    FacultyId faculty_id;
    CourseId course_id;
    Term term;
    bool operator==(const TeachingRecord&) const = default;
};

struct Faculty {
    FacultyId faculty_id;
    DepartmentId department_id;
    bool operator==(const Faculty&) const = default;
};

struct Opportunity {
    OpportunityId opportunity_id;
    std::string abstract_text;
    FacultyId faculty_id;
    Term posted_term;
    bool operator==(const Opportunity&) const = default;
};

struct Application {
    StudentId student_id;
    OpportunityId opportunity_id;
    Term term;
    bool accepted = false;
    bool operator==(const Application&) const = default;
};

enum class Table { students, courses, enrollments, teaching, faculty, opportunities, applications };

std::string_view table_name(Table table);

/// Raw record collections, before integrity checks.
struct DatasetTables {
    GpaScale gpa_scale;
    std::vector<StudentRecord> students;
    std::vector<Course> courses;
    std::vector<Enrollment> enrollments;
    std::vector<TeachingRecord> teaching;
    std::vector<Faculty> faculty;
    std::vector<Opportunity> opportunities;
    std::vector<Application> applications;

    bool operator==(const DatasetTables&) const = default;
};

/// One integrity violation, located by table and zero-based row.
struct Issue {
    Table table;
    std::size_t row;
    std::string message;
};

/// Every integrity violation in the tables; empty means valid.
std::vector<Issue> validate(const DatasetTables& tables);

class DatasetError : public std::runtime_error {
public:
    explicit DatasetError(std::vector<Issue> issues);
    const std::vector<Issue>& issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Immutable, referentially intact snapshot.
///
/// Construction resolves every foreign id into a row index, so lookups
/// after construction are by index. Records keep their input order.
class Dataset {
public:
    /// Throws DatasetError listing all violations.
    explicit Dataset(DatasetTables tables);

    const DatasetTables& tables() const { return tables_; }
    const GpaScale& gpa_scale() const { return tables_.gpa_scale; }
    const std::vector<StudentRecord>& students() const { return tables_.students; }
    const std::vector<Course>& courses() const { return tables_.courses; }
    const std::vector<Enrollment>& enrollments() const { return tables_.enrollments; }
    const std::vector<TeachingRecord>& teaching() const { return tables_.teaching; }
    const std::vector<Faculty>& faculty() const { return tables_.faculty; }
    const std::vector<Opportunity>& opportunities() const { return tables_.opportunities; }
    const std::vector<Application>& applications() const { return tables_.applications; }

    std::size_t student_index(const StudentId& id) const;
    std::size_t course_index(const CourseId& id) const;
    std::size_t faculty_index(const FacultyId& id) const;
    std::size_t opportunity_index(const OpportunityId& id) const;

    // Resolved foreign keys, parallel to the record vectors.
    std::size_t enrollment_student(std::size_t e) const { return enrollment_student_[e]; }
    std::size_t enrollment_course(std::size_t e) const { return enrollment_course_[e]; }
    std::size_t teaching_faculty(std::size_t t) const { return teaching_faculty_[t]; }
    std::size_t teaching_course(std::size_t t) const { return teaching_course_[t]; }
    std::size_t opportunity_faculty(std::size_t o) const { return opportunity_faculty_[o]; }
    std::size_t application_student(std::size_t a) const { return application_student_[a]; }
    std::size_t application_opportunity(std::size_t a) const { return application_opportunity_[a]; }

    /// Enrollment rows of a student, ordered by term then input order.
    const std::vector<std::size_t>& enrollments_of(std::size_t student) const {
        return student_enrollments_[student];
    }
    /// Application rows of a student, ordered by term then input order.
    const std::vector<std::size_t>& applications_of(std::size_t student) const {
        return student_applications_[student];
    }
    /// Teaching rows for a course, ordered by term then input order.
    const std::vector<std::size_t>& teaching_of(std::size_t course) const {
        return course_teaching_[course];
    }

    /// Earliest and latest term mentioned by any record.
    Term first_term() const { return first_term_; }
    Term last_term() const { return last_term_; }

private:
    DatasetTables tables_;
    std::unordered_map<std::string, std::size_t> student_by_id_;
    std::unordered_map<std::string, std::size_t> course_by_id_;
    std::unordered_map<std::string, std::size_t> faculty_by_id_;
    std::unordered_map<std::string, std::size_t> opportunity_by_id_;
    std::vector<std::size_t> enrollment_student_, enrollment_course_;
    std::vector<std::size_t> teaching_faculty_, teaching_course_;
    std::vector<std::size_t> opportunity_faculty_;
    std::vector<std::size_t> application_student_, application_opportunity_;
    std::vector<std::vector<std::size_t>> student_enrollments_;
    std::vector<std::vector<std::size_t>> student_applications_;
    std::vector<std::vector<std::size_t>> course_teaching_;
    Term first_term_;
    Term last_term_;
};

}  // namespace resrec

template <typename Tag>
struct std::hash<resrec::Id<Tag>> {
    std::size_t operator()(const resrec::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};
