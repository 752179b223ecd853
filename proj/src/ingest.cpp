#include "resrec/ingest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "resrec/csv.hpp"
#include "resrec/format.hpp"
#include "resrec/rng.hpp"

namespace resrec {

namespace fs = std::filesystem;

namespace {

const std::array<std::vector<std::string>, 7> kHeaders = {{
    {"student_id", "admission_year", "admission_half", "gpa"},
    {"course_id", "title", "description", "department_id", "credits"},
    {"student_id", "course_id", "year", "half", "approved"},
    {"faculty_id", "course_id", "year", "half"},
    {"faculty_id", "department_id"},
    {"opportunity_id", "abstract", "faculty_id", "posted_year", "posted_half"},
    {"student_id", "opportunity_id", "year", "half", "accepted"},
}};

constexpr std::array<Table, 7> kTables = {Table::students, Table::courses, Table::enrollments,
                                          Table::teaching, Table::faculty, Table::opportunities,
                                          Table::applications};

std::size_t slot(Table table) {
    for (std::size_t i = 0; i < kTables.size(); ++i)
        if (kTables[i] == table) return i;
    return 0;
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Per-row field conversion that accumulates messages.
class RowReader {
public:
    RowReader(const csv::Row& row, const std::vector<std::string>& header,
              std::vector<std::string>& messages)
        : row_(row), header_(header), messages_(messages) {}

    const std::string& text(std::size_t col) const { return row_.fields[col]; }

    int integer(std::size_t col) {
        auto v = parse_int(row_.fields[col]);
        if (!v) {
            fail(col, "not an integer");
            return 0;
        }
        return static_cast<int>(*v);
    }

    double real(std::size_t col) {
        auto v = parse_real(row_.fields[col]);
        if (!v) {
            fail(col, "not a number");
            return 0.0;
        }
        return *v;
    }

    bool flag(std::size_t col) {
        const auto v = trim(row_.fields[col]);
        if (v == "1") return true;
        if (v != "0") fail(col, "must be 0 or 1");
        return false;
    }

    Term term(std::size_t year_col, std::size_t half_col) {
        Term t{integer(year_col), integer(half_col)};
        if (!t.valid()) fail(half_col, "must be 1 or 2");
        return t;
    }

private:
    void fail(std::size_t col, std::string_view what) {
        messages_.push_back(header_[col] + " '" + row_.fields[col] + "' " + std::string(what));
    }

    const csv::Row& row_;
    const std::vector<std::string>& header_;
    std::vector<std::string>& messages_;
};

void convert(Table table, RowReader& r, DatasetTables& out) {
    switch (table) {
        case Table::students:
            out.students.push_back({StudentId(r.text(0)), r.term(1, 2), r.real(3)});
            break;
        case Table::courses:
            out.courses.push_back({CourseId(r.text(0)), r.text(1), r.text(2),
                                   DepartmentId(r.text(3)), r.integer(4)});
            break;
        case Table::enrollments:
            out.enrollments.push_back(
                {StudentId(r.text(0)), CourseId(r.text(1)), r.term(2, 3), r.flag(4)});
            break;
        case Table::teaching:
            out.teaching.push_back({FacultyId(r.text(0)), CourseId(r.text(1)), r.term(2, 3)});
            break;
        case Table::faculty:
            out.faculty.push_back({FacultyId(r.text(0)), DepartmentId(r.text(1))});
            break;
        case Table::opportunities:
            out.opportunities.push_back(
                {OpportunityId(r.text(0)), r.text(1), FacultyId(r.text(2)), r.term(3, 4)});
            break;
        case Table::applications:
            out.applications.push_back(
                {StudentId(r.text(0)), OpportunityId(r.text(1)), r.term(2, 3), r.flag(4)});
            break;
    }
}

std::vector<std::vector<std::string>> rows_of(const DatasetTables& t, Table table) {
    std::vector<std::vector<std::string>> rows;
    auto half = [](const Term& term) { return std::to_string(term.half); };
    auto year = [](const Term& term) { return std::to_string(term.year); };
    auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
    switch (table) {
        case Table::students:
            for (const auto& s : t.students)
                rows.push_back({s.student_id.value, year(s.admission_term), half(s.admission_term),
                                format_real(s.gpa)});
            break;
        case Table::courses:
            for (const auto& c : t.courses)
                rows.push_back({c.course_id.value, c.title, c.description, c.department_id.value,
                                std::to_string(c.credits)});
            break;
        case Table::enrollments:
            for (const auto& e : t.enrollments)
                rows.push_back({e.student_id.value, e.course_id.value, year(e.term), half(e.term),
                                flag(e.approved)});
            break;
        case Table::teaching:
            for (const auto& r : t.teaching)
                rows.push_back({r.faculty_id.value, r.course_id.value, year(r.term), half(r.term)});
            break;
        case Table::faculty:
            for (const auto& f : t.faculty) rows.push_back({f.faculty_id.value, f.department_id.value});
            break;
        case Table::opportunities:
            for (const auto& o : t.opportunities)
                rows.push_back({o.opportunity_id.value, o.abstract_text, o.faculty_id.value,
                                year(o.posted_term), half(o.posted_term)});
            break;
        case Table::applications:
            for (const auto& a : t.applications)
                rows.push_back({a.student_id.value, a.opportunity_id.value, year(a.term),
                                half(a.term), flag(a.accepted)});
            break;
    }
    return rows;
}

}  // namespace

const std::vector<std::string>& dataset_files() {
    static const std::vector<std::string> files = {kStudentsFile,      kCoursesFile, kEnrollmentsFile,
                                                   kTeachingFile,      kFacultyFile,
                                                   kOpportunitiesFile, kApplicationsFile};
    return files;
}

LoadResult load_dataset(const fs::path& directory, const SchemaConfig& schema) {
    LoadResult result;
    auto& report = result.report;
    DatasetTables tables;
    tables.gpa_scale = schema.gpa_scale;
    std::array<std::vector<std::size_t>, 7> lines;

    const auto& files = dataset_files();
    for (std::size_t f = 0; f < files.size(); ++f) {
        const auto& name = files[f];
        auto text = read_file(directory / name);
        if (!text) {
            report.errors.push_back({name, 0, "missing file"});
            continue;
        }
        auto doc = csv::parse(*text);
        for (auto& e : doc.errors) report.errors.push_back({name, e.line, e.message});
        if (doc.rows.empty()) {
            report.errors.push_back({name, 1, "missing header row"});
            continue;
        }
        const auto& header = kHeaders[f];
        if (doc.rows.front().fields != header) {
            std::string expected;
            for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
            report.errors.push_back({name, doc.rows.front().line, "header must be '" + expected + "'"});
            continue;
        }
        for (std::size_t r = 1; r < doc.rows.size(); ++r) {
            const auto& row = doc.rows[r];
            if (row.fields.size() != header.size()) {
                report.errors.push_back({name, row.line,
                                         "expected " + std::to_string(header.size()) +
                                             " fields, found " + std::to_string(row.fields.size())});
                continue;
            }
            std::vector<std::string> messages;
            RowReader reader(row, header, messages);
            DatasetTables scratch;
            convert(kTables[f], reader, scratch);
            if (!messages.empty()) {
                for (auto& m : messages) report.errors.push_back({name, row.line, std::move(m)});
                continue;
            }
            // Move the single converted record into the real tables.
            switch (kTables[f]) {
                case Table::students: tables.students.push_back(std::move(scratch.students[0])); break;
                case Table::courses: tables.courses.push_back(std::move(scratch.courses[0])); break;
                case Table::enrollments: tables.enrollments.push_back(std::move(scratch.enrollments[0])); break;
                case Table::teaching: tables.teaching.push_back(std::move(scratch.teaching[0])); break;
                case Table::faculty: tables.faculty.push_back(std::move(scratch.faculty[0])); break;
                case Table::opportunities: tables.opportunities.push_back(std::move(scratch.opportunities[0])); break;
                case Table::applications: tables.applications.push_back(std::move(scratch.applications[0])); break;
            }
            lines[f].push_back(row.line);
        }
    }

    for (auto& issue : validate(tables)) {
        const auto s = slot(issue.table);
        const std::size_t line = issue.row == npos ? 0 : lines[s][issue.row];
        report.errors.push_back({files[s], line, std::move(issue.message)});
    }

    if (report.ok()) {
        if (tables.applications.empty())
            report.warnings.push_back({kApplicationsFile, 0, "no applications"});
        result.dataset.emplace(std::move(tables));
    }
    return result;
}

void write_tables(const DatasetTables& tables, const fs::path& directory) {
    fs::create_directories(directory);
    const auto& files = dataset_files();
    for (std::size_t f = 0; f < files.size(); ++f) {
        std::ofstream out(directory / files[f], std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + (directory / files[f]).string());
        csv::write_row(out, kHeaders[f]);
        for (const auto& row : rows_of(tables, kTables[f])) csv::write_row(out, row);
        if (!out) throw std::runtime_error("write failed for " + (directory / files[f]).string());
    }
}

void write_dataset(const Dataset& dataset, const fs::path& directory) {
    write_tables(dataset.tables(), directory);
}

DatasetSummary summarize(const Dataset& dataset) {
    DatasetSummary s;
    s.n_students = dataset.students().size();
    s.n_opportunities = dataset.opportunities().size();
    s.n_applications = dataset.applications().size();
    for (std::size_t i = 0; i < s.n_students; ++i)
        if (!dataset.applications_of(i).empty()) ++s.n_applicants;
    for (const auto& a : dataset.applications())
        if (a.accepted) ++s.n_accepted;
    if (s.n_applications > 0)
        s.acceptance_rate = static_cast<double>(s.n_accepted) / static_cast<double>(s.n_applications);
    if (s.n_students > 0)
        s.applicant_rate = static_cast<double>(s.n_applicants) / static_cast<double>(s.n_students);
    return s;
}

std::string dataset_digest(const fs::path& directory) {
    std::string bytes;
    for (const auto& name : dataset_files()) {
        bytes += name;
        bytes += '\0';
        if (auto text = read_file(directory / name)) bytes += *text;
        bytes += '\0';
    }
    const auto h = Rng::hash(bytes);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace resrec
