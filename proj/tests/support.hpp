#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "resrec/datagen.hpp"
#include "resrec/domain.hpp"
#include "resrec/rng.hpp"

namespace testing {

inline resrec::GenConfig small_config(std::uint64_t seed) {
    resrec::GenConfig g;
    g.n_students = 300;
    g.n_courses = 48;
    g.n_faculty = 24;
    g.n_departments = 3;
    g.n_opportunities = 120;
    g.n_topics = 6;
    g.vocab_per_topic = 12;
    g.applicant_base_rate = 0.2;
    g.seed = seed;
    return g;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("resrec_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

/// File name -> bytes for every regular file directly in the directory.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) out[entry.path().filename().string()] = read_file(entry.path());
    return out;
}

inline resrec::Term term(int year, int half) { return resrec::Term{year, half}; }

/// Hand-built fixture with known counts. Cutoff 2014.1.
///
/// S1: C1 2012.1, C2 2012.2, C3 2013.1, C4 2013.1 approved (3 terms, 40 credits),
///     C4 2014.2 approved after the cutoff; applied to O1 (2013.1) and O3 (2014.1).
/// S2: C1 2013.1 not approved; applied to O2 (2013.2), O3 (2014.1), O4 (2014.2).
/// S3: no history.
/// F1 (D1) taught C1 in 2012.1; F2 (D2) taught C4 in 2013.2.
inline resrec::DatasetTables fixture_tables() {
    using namespace resrec;
    DatasetTables t;
    t.students = {{StudentId("S1"), term(2012, 1), 5.5},
                  {StudentId("S2"), term(2013, 1), 4.0},
                  {StudentId("S3"), term(2014, 1), 6.1}};
    t.courses = {{CourseId("C1"), "Intro", "machine learning models data", DepartmentId("D1"), 10},
                 {CourseId("C2"), "Stats", "statistics data inference models", DepartmentId("D1"), 10},
                 {CourseId("C3"), "Optim", "convex optimization models", DepartmentId("D1"), 10},
                 {CourseId("C4"), "Bio", "cell biology genetics", DepartmentId("D2"), 10}};
    t.faculty = {{FacultyId("F1"), DepartmentId("D1")}, {FacultyId("F2"), DepartmentId("D2")}};
    t.teaching = {{FacultyId("F1"), CourseId("C1"), term(2012, 1)},
                  {FacultyId("F2"), CourseId("C4"), term(2013, 2)}};
    t.enrollments = {{StudentId("S1"), CourseId("C1"), term(2012, 1), true},
                     {StudentId("S1"), CourseId("C2"), term(2012, 2), true},
                     {StudentId("S1"), CourseId("C3"), term(2013, 1), true},
                     {StudentId("S1"), CourseId("C4"), term(2013, 1), true},
                     {StudentId("S1"), CourseId("C4"), term(2014, 2), true},
                     {StudentId("S2"), CourseId("C1"), term(2013, 1), false}};
    t.opportunities = {{OpportunityId("O1"), "learning models from data", FacultyId("F1"), term(2013, 1)},
                       {OpportunityId("O2"), "genetics of the cell", FacultyId("F2"), term(2013, 2)},
                       {OpportunityId("O3"), "optimization models for learning", FacultyId("F1"), term(2014, 1)},
                       {OpportunityId("O4"), "cell biology data", FacultyId("F2"), term(2014, 2)}};
    t.applications = {{StudentId("S1"), OpportunityId("O1"), term(2013, 1), true},
                      {StudentId("S2"), OpportunityId("O2"), term(2013, 2), false},
                      {StudentId("S1"), OpportunityId("O3"), term(2014, 1), true},
                      {StudentId("S2"), OpportunityId("O3"), term(2014, 1), true},
                      {StudentId("S2"), OpportunityId("O4"), term(2014, 2), true}};
    return t;
}

}  // namespace testing
