#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resrec/domain.hpp"

namespace resrec {

struct SchemaConfig {
    GpaScale gpa_scale;
};

struct ValidationMessage {
    std::string file;
    std::size_t line = 0;  // 0 when the message concerns the whole file
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationMessage> errors;
    std::vector<ValidationMessage> warnings;
    bool ok() const { return errors.empty(); }
};

/// Either a dataset or the report explaining why there is none.
struct LoadResult {
    std::optional<Dataset> dataset;
    ValidationReport report;
};

inline constexpr const char* kStudentsFile = "students.csv";
inline constexpr const char* kCoursesFile = "courses.csv";
inline constexpr const char* kEnrollmentsFile = "enrollments.csv";
inline constexpr const char* kTeachingFile = "teaching.csv";
inline constexpr const char* kFacultyFile = "faculty.csv";
inline constexpr const char* kOpportunitiesFile = "opportunities.csv";
inline constexpr const char* kApplicationsFile = "applications.csv";

/// The seven dataset file names in canonical order.
const std::vector<std::string>& dataset_files();

/// Loads all seven CSV files. Reports every violation it finds, not just the first;
/// the dataset is present only when there are no errors.
LoadResult load_dataset(const std::filesystem::path& directory, const SchemaConfig& schema = {});

/// Writes the seven CSV files. Creates the directory if needed.
void write_dataset(const Dataset& dataset, const std::filesystem::path& directory);
void write_tables(const DatasetTables& tables, const std::filesystem::path& directory);

struct DatasetSummary {
    std::size_t n_students = 0;
    std::size_t n_opportunities = 0;
    std::size_t n_applications = 0;
    std::size_t n_applicants = 0;
    std::size_t n_accepted = 0;
    std::optional<double> acceptance_rate;  // absent when there are no applications
    std::optional<double> applicant_rate;   // absent when there are no students
};

DatasetSummary summarize(const Dataset& dataset);

/// FNV-1a 64 over the seven files (name, then bytes), as 16 hex digits.
std::string dataset_digest(const std::filesystem::path& directory);

}  // namespace resrec
