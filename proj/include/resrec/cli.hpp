#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "resrec/datagen.hpp"
#include "resrec/eval.hpp"
#include "resrec/ingest.hpp"

namespace resrec::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalError = 2;

/// Everything a command needs. Defaults, then the config file, then flags.
struct RunConfig {
    std::filesystem::path dataset;
    std::filesystem::path out;
    std::vector<int> tasks{1, 2};
    SchemaConfig schema;
    ExperimentConfig experiment;
    GenConfig generator;
    /// Pre-trained model directory for eval; empty means train on the fly.
    std::filesystem::path models;
    std::filesystem::path model;  // recommend
    std::string student;          // recommend
    std::size_t top_k = 10;       // recommend
};

/// Parses a JSON config. A run manifest is accepted too (its "config" member
/// is used). Unknown keys are errors. Throws std::invalid_argument.
RunConfig parse_config(const std::string& json_text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Canonical JSON of the resolved config; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

/// Model file name used by train and read by eval: task<t>_<method>_<level>.model.
std::string model_file_name(int task, std::string_view method, FeatureLevel level);

/// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resrec::cli
