#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "resrec/domain.hpp"

namespace resrec {

/// Weights of the planted application model, applied to z-scored features.
struct SignalWeights {
    double content = 2.0;
    double ht = 1.5;
    double dept = 1.0;
    double prior = 1.0;
    double semesters = 0.5;
    double credits = 0.5;
    double gpa = 0.5;
};

struct GenConfig {
    std::size_t n_students = 5000;
    std::size_t n_courses = 240;
    std::size_t n_faculty = 120;
    std::size_t n_departments = 6;
    std::size_t n_opportunities = 1000;
    std::size_t n_topics = 18;
    std::size_t vocab_per_topic = 30;

    // terms_range; applications start at first_application_term.
    Term first_term{2009, 1};
    Term last_term{2016, 2};
    Term first_application_term{2012, 1};

    std::size_t courses_per_term = 5;
    std::size_t max_semesters = 10;
    std::size_t description_tokens = 40;
    std::size_t abstract_tokens = 60;
    double topic_token_share = 0.8;
    std::size_t favorite_topics = 2;
    double favorite_weight = 8.0;

    double applicant_base_rate = 0.103;
    double acceptance_rate = 0.814;
    double extra_application_prob = 0.3;
    GpaScale gpa_scale;

    SignalWeights signal_weights;
    std::uint64_t seed = 2018;
};

/// Throws std::invalid_argument naming the first infeasible setting.
void validate_config(const GenConfig& config);

/// Deterministic in (config, seed): same inputs give identical tables.
DatasetTables generate_tables(const GenConfig& config);
Dataset generate(const GenConfig& config);

/// Plain-text description of the latent model and every GenConfig field.
std::string describe_generative_model();

}  // namespace resrec
