#include "resrec/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "resrec/rng.hpp"

namespace resrec {

namespace {

constexpr std::array<const char*, 20> kSyllables = {"ka", "ne", "ri", "so", "tu", "la", "me", "pi",
                                                    "do", "ru", "va", "le", "mi", "no", "zu", "ta",
                                                    "be", "gi", "fo", "hu"};

std::string pseudo_word(std::size_t index, std::size_t vocab_size) {
    std::size_t length = 3;
    for (std::size_t cap = 20 * 20 * 20; cap < vocab_size; cap *= 20) ++length;
    std::string word;
    for (std::size_t i = 0; i < length; ++i) {
        word.insert(0, kSyllables[index % 20]);
        index /= 20;
    }
    return word;
}

std::string make_id(char prefix, std::size_t index, std::size_t count) {
    std::size_t width = 3;
    for (std::size_t cap = 1000; cap <= count; cap *= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Standardize {
    double mean = 0.0;
    double sd = 0.0;
    double operator()(double x) const { return sd > 0.0 ? (x - mean) / sd : 0.0; }
};

Standardize fit(const std::vector<double>& xs) {
    Standardize s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

/// Draws one index with probability proportional to weights; zeroes it.
std::size_t draw_weighted(std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    std::size_t last = weights.size();
    if (total > 0.0) {
        double target = rng.uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last = i;
            target -= weights[i];
            if (target < 0.0) break;
        }
    }
    if (last < weights.size()) weights[last] = 0.0;
    return last;
}

struct Catalog {
    std::vector<std::string> words;                   // all words, topic-major
    std::vector<std::size_t> faculty_topic;
    std::vector<std::size_t> course_topic;
    std::vector<std::size_t> course_primary;
};

std::string draw_document(const GenConfig& c, const Catalog& cat, std::size_t topic,
                          std::size_t length, Rng& rng) {
    std::string text;
    for (std::size_t i = 0; i < length; ++i) {
        std::size_t word;
        if (rng.bernoulli(c.topic_token_share))
            word = topic * c.vocab_per_topic + rng.below(c.vocab_per_topic);
        else
            word = rng.below(cat.words.size());
        if (!text.empty()) text += ' ';
        text += cat.words[word];
    }
    text += '.';
    return text;
}

std::string capitalized(std::string word) {
    if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
    return word;
}

/// Student history as seen at the start of a term.
struct History {
    int semesters = 0;
    double credits = 0.0;
    std::size_t approved = 0;
    std::vector<int> topic_count;
    std::vector<int> dept_count;
    std::vector<std::size_t> teachers;  // sorted faculty indices
    bool applied = false;
};

}  // namespace

void validate_config(const GenConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("infeasible generator config: ") + what);
    };
    require(c.n_students >= 1, "n_students must be >= 1");
    require(c.n_courses >= 1, "n_courses must be >= 1");
    require(c.n_faculty >= 1, "n_faculty must be >= 1");
    require(c.n_departments >= 1, "n_departments must be >= 1");
    require(c.n_opportunities >= 1, "n_opportunities must be >= 1");
    require(c.n_topics >= 1, "n_topics must be >= 1");
    require(c.vocab_per_topic >= 1, "vocab_per_topic must be >= 1");
    require(c.first_term.valid() && c.last_term.valid() && c.first_application_term.valid(),
            "term half must be 1 or 2");
    require(c.first_term <= c.last_term, "terms_range is empty");
    require(c.first_term <= c.first_application_term && c.first_application_term <= c.last_term,
            "first_application_term outside terms_range");
    require(c.courses_per_term >= 1 && c.courses_per_term <= c.n_courses,
            "courses_per_term must be in [1, n_courses]");
    require(c.max_semesters >= 1, "max_semesters must be >= 1");
    require(c.description_tokens >= 1 && c.abstract_tokens >= 1, "document lengths must be >= 1");
    require(c.topic_token_share >= 0.0 && c.topic_token_share <= 1.0,
            "topic_token_share must be in [0, 1]");
    require(c.favorite_topics >= 1 && c.favorite_topics <= c.n_topics,
            "favorite_topics must be in [1, n_topics]");
    require(c.favorite_weight > 0.0, "favorite_weight must be positive");
    require(c.applicant_base_rate > 0.0 && c.applicant_base_rate < 1.0,
            "applicant_base_rate must be in (0, 1)");
    require(c.acceptance_rate >= 0.0 && c.acceptance_rate <= 1.0, "acceptance_rate must be in [0, 1]");
    require(c.extra_application_prob >= 0.0 && c.extra_application_prob < 1.0,
            "extra_application_prob must be in [0, 1)");
    require(c.gpa_scale.min < c.gpa_scale.max, "gpa scale min must be below max");
    const auto& w = c.signal_weights;
    for (double x : {w.content, w.ht, w.dept, w.prior, w.semesters, w.credits, w.gpa})
        require(std::isfinite(x), "signal weights must be finite");
}

DatasetTables generate_tables(const GenConfig& c) {
    validate_config(c);
    const Rng root(c.seed);
    DatasetTables out;
    out.gpa_scale = c.gpa_scale;

    // Catalog: words, departments, faculty, courses.
    Rng catalog_rng = root.fork("catalog");
    Catalog cat;
    const std::size_t n_words = c.n_topics * c.vocab_per_topic;
    for (std::size_t i = 0; i < n_words; ++i) cat.words.push_back(pseudo_word(i, n_words));

    auto dept_of_topic = [&](std::size_t topic) { return topic % c.n_departments; };
    auto dept_id = [&](std::size_t d) { return DepartmentId(make_id('D', d, c.n_departments)); };

    for (std::size_t f = 0; f < c.n_faculty; ++f) {
        const std::size_t topic = f < c.n_topics ? f : catalog_rng.below(c.n_topics);
        cat.faculty_topic.push_back(topic);
        out.faculty.push_back({FacultyId(make_id('F', f, c.n_faculty)), dept_id(dept_of_topic(topic))});
    }
    std::vector<std::vector<std::size_t>> faculty_by_dept(c.n_departments);
    for (std::size_t f = 0; f < c.n_faculty; ++f)
        faculty_by_dept[dept_of_topic(cat.faculty_topic[f])].push_back(f);

    for (std::size_t k = 0; k < c.n_courses; ++k) {
        const std::size_t topic = k % c.n_topics;
        cat.course_topic.push_back(topic);
        std::vector<std::size_t> pool;
        for (std::size_t f = 0; f < c.n_faculty; ++f)
            if (cat.faculty_topic[f] == topic) pool.push_back(f);
        if (pool.empty()) pool = faculty_by_dept[dept_of_topic(topic)];
        if (pool.empty()) {
            pool.resize(c.n_faculty);
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        }
        cat.course_primary.push_back(pool[catalog_rng.below(pool.size())]);

        const auto& w1 = cat.words[topic * c.vocab_per_topic + catalog_rng.below(c.vocab_per_topic)];
        const auto& w2 = cat.words[topic * c.vocab_per_topic + catalog_rng.below(c.vocab_per_topic)];
        Course course;
        course.course_id = CourseId(make_id('C', k, c.n_courses));
        course.title = capitalized(w1) + " " + capitalized(w2);
        course.description = draw_document(c, cat, topic, c.description_tokens, catalog_rng);
        course.department_id = dept_id(dept_of_topic(topic));
        course.credits = static_cast<int>(5 * (1 + catalog_rng.below(3)));
        out.courses.push_back(std::move(course));
    }

    const int first = c.first_term.ordinal();
    const int last = c.last_term.ordinal();
    const auto n_terms = static_cast<std::size_t>(last - first + 1);

    // teacher[course][term offset]
    std::vector<std::vector<std::size_t>> teacher(c.n_courses, std::vector<std::size_t>(n_terms));
    for (std::size_t k = 0; k < c.n_courses; ++k) {
        const auto& colleagues = faculty_by_dept[dept_of_topic(cat.course_topic[k])];
        for (std::size_t t = 0; t < n_terms; ++t) {
            std::size_t f = cat.course_primary[k];
            if (!colleagues.empty() && !catalog_rng.bernoulli(0.75))
                f = colleagues[catalog_rng.below(colleagues.size())];
            teacher[k][t] = f;
            out.teaching.push_back({out.faculty[f].faculty_id, out.courses[k].course_id,
                                    Term::from_ordinal(first + static_cast<int>(t))});
        }
    }

    // Students and enrollments.
    Rng student_rng = root.fork("students");
    Rng enroll_rng = root.fork("enrollment");
    std::vector<double> ability(c.n_students);
    std::vector<int> admission(c.n_students);
    struct Taken {
        int term;
        std::size_t course;
        bool approved;
    };
    std::vector<std::vector<Taken>> taken(c.n_students);

    for (std::size_t s = 0; s < c.n_students; ++s) {
        admission[s] = first + static_cast<int>(student_rng.below(n_terms));
        ability[s] = student_rng.normal();
        const double share = std::clamp(0.6 + 0.12 * ability[s], 0.0, 1.0);
        double gpa = c.gpa_scale.min + (c.gpa_scale.max - c.gpa_scale.min) * share;
        gpa = std::clamp(std::round(gpa * 100.0) / 100.0, c.gpa_scale.min, c.gpa_scale.max);
        out.students.push_back({StudentId(make_id('S', s, c.n_students)),
                                Term::from_ordinal(admission[s]), gpa});

        std::vector<double> preference(c.n_topics, 1.0);
        std::vector<double> pick(c.n_topics, 1.0);
        for (std::size_t i = 0; i < c.favorite_topics; ++i)
            preference[draw_weighted(pick, student_rng)] = 1.0 + c.favorite_weight;

        std::vector<bool> passed(c.n_courses, false);
        const double p_pass = sigmoid(1.8 + ability[s]);
        for (std::size_t sem = 0; sem < c.max_semesters; ++sem) {
            const int term = admission[s] + static_cast<int>(sem);
            if (term > last) break;
            std::vector<double> weights(c.n_courses);
            for (std::size_t k = 0; k < c.n_courses; ++k)
                weights[k] = passed[k] ? 0.0 : preference[cat.course_topic[k]];
            std::vector<std::size_t> chosen;
            for (std::size_t i = 0; i < c.courses_per_term; ++i) {
                const auto k = draw_weighted(weights, enroll_rng);
                if (k >= c.n_courses) break;
                chosen.push_back(k);
            }
            std::sort(chosen.begin(), chosen.end());
            for (auto k : chosen) {
                const bool ok = enroll_rng.bernoulli(p_pass);
                if (ok) passed[k] = true;
                taken[s].push_back({term, k, ok});
                out.enrollments.push_back({out.students[s].student_id, out.courses[k].course_id,
                                           Term::from_ordinal(term), ok});
            }
        }
    }

    // Opportunities, ordered by posted term.
    Rng opp_rng = root.fork("opportunities");
    const int app_first = c.first_application_term.ordinal();
    const auto n_app_terms = static_cast<std::size_t>(last - app_first + 1);
    struct Draft {
        int term;
        std::size_t faculty;
        std::string abstract_text;
    };
    std::vector<Draft> drafts;
    for (std::size_t o = 0; o < c.n_opportunities; ++o) {
        const int term = app_first + static_cast<int>(opp_rng.below(n_app_terms));
        const std::size_t f = opp_rng.below(c.n_faculty);
        drafts.push_back({term, f, draw_document(c, cat, cat.faculty_topic[f], c.abstract_tokens, opp_rng)});
    }
    std::stable_sort(drafts.begin(), drafts.end(),
                     [](const Draft& a, const Draft& b) { return a.term < b.term; });
    std::vector<std::vector<std::size_t>> opps_by_term(n_terms);
    for (std::size_t o = 0; o < drafts.size(); ++o) {
        out.opportunities.push_back({OpportunityId(make_id('O', o, c.n_opportunities)),
                                     drafts[o].abstract_text, out.faculty[drafts[o].faculty].faculty_id,
                                     Term::from_ordinal(drafts[o].term)});
        opps_by_term[static_cast<std::size_t>(drafts[o].term - first)].push_back(o);
    }

    // Snapshot each student's history at the start of every term.
    // snapshots[t][s] is valid when the student is active in term t.
    auto active = [&](std::size_t s, int term) {
        return admission[s] <= term && term < admission[s] + static_cast<int>(c.max_semesters);
    };
    std::vector<History> state(c.n_students);
    for (auto& h : state) {
        h.topic_count.assign(c.n_topics, 0);
        h.dept_count.assign(c.n_departments, 0);
    }
    std::vector<std::size_t> cursor(c.n_students, 0);
    std::vector<std::vector<History>> snapshots(n_terms);
    for (std::size_t t = 0; t < n_terms; ++t) {
        const int term = first + static_cast<int>(t);
        if (term >= app_first && !opps_by_term[t].empty()) {
            snapshots[t].resize(c.n_students);
            for (std::size_t s = 0; s < c.n_students; ++s)
                if (active(s, term)) snapshots[t][s] = state[s];
        }
        for (std::size_t s = 0; s < c.n_students; ++s) {
            bool any = false;
            while (cursor[s] < taken[s].size() && taken[s][cursor[s]].term == term) {
                const auto& e = taken[s][cursor[s]++];
                any = true;
                if (!e.approved) continue;
                auto& h = state[s];
                h.credits += out.courses[e.course].credits;
                ++h.approved;
                ++h.topic_count[cat.course_topic[e.course]];
                ++h.dept_count[dept_of_topic(cat.course_topic[e.course])];
                const auto f = teacher[e.course][t];
                auto it = std::lower_bound(h.teachers.begin(), h.teachers.end(), f);
                if (it == h.teachers.end() || *it != f) h.teachers.insert(it, f);
            }
            if (any) ++state[s].semesters;
        }
    }

    // Stage 1: does a student apply in term t? Logistic in z-scored
    // semesters, credits, gpa and prior-application; intercept calibrated so
    // the share of students with any application hits applicant_base_rate.
    const auto& w = c.signal_weights;
    std::vector<std::size_t> app_terms;
    for (std::size_t t = 0; t < n_terms; ++t)
        if (!snapshots[t].empty()) app_terms.push_back(t);

    struct Candidate {
        std::size_t student;
        double static_logit;  // semesters, credits, gpa part
        double uniform;
    };
    Rng propensity_rng = root.fork("propensity");
    std::vector<std::vector<Candidate>> candidates(n_terms);
    for (auto t : app_terms) {
        const int term = first + static_cast<int>(t);
        std::vector<double> sem, cred, gpa;
        std::vector<std::size_t> who;
        for (std::size_t s = 0; s < c.n_students; ++s) {
            if (!active(s, term)) continue;
            who.push_back(s);
            sem.push_back(snapshots[t][s].semesters);
            cred.push_back(snapshots[t][s].credits);
            gpa.push_back(out.students[s].gpa);
        }
        const auto zs = fit(sem), zc = fit(cred), zg = fit(gpa);
        for (std::size_t i = 0; i < who.size(); ++i) {
            const double logit = w.semesters * zs(sem[i]) + w.credits * zc(cred[i]) + w.gpa * zg(gpa[i]);
            candidates[t].push_back({who[i], logit, 0.0});
        }
    }
    // Uniforms drawn in (student, term) order so they do not depend on the intercept.
    {
        std::vector<std::vector<double>> u(c.n_students, std::vector<double>(n_terms));
        for (auto& row : u)
            for (auto& x : row) x = propensity_rng.uniform();
        for (auto t : app_terms)
            for (auto& cand : candidates[t]) cand.uniform = u[cand.student][t];
    }

    auto simulate = [&](double intercept, std::vector<std::vector<std::size_t>>* appliers) {
        std::vector<bool> prior(c.n_students, false);
        std::size_t n_applicants = 0;
        for (auto t : app_terms) {
            std::vector<double> pv;
            pv.reserve(candidates[t].size());
            for (const auto& cand : candidates[t]) pv.push_back(prior[cand.student] ? 1.0 : 0.0);
            const auto zp = fit(pv);
            std::vector<std::size_t> now;
            for (std::size_t i = 0; i < candidates[t].size(); ++i) {
                const auto& cand = candidates[t][i];
                const double p = sigmoid(intercept + cand.static_logit + w.prior * zp(pv[i]));
                if (cand.uniform < p) now.push_back(cand.student);
            }
            for (auto s : now) {
                if (!prior[s]) ++n_applicants;
                prior[s] = true;
            }
            if (appliers) (*appliers)[t] = std::move(now);
        }
        return static_cast<double>(n_applicants) / static_cast<double>(c.n_students);
    };

    double lo = -30.0, hi = 15.0;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (simulate(mid, nullptr) < c.applicant_base_rate)
            lo = mid;
        else
            hi = mid;
    }
    std::vector<std::vector<std::size_t>> appliers(n_terms);
    simulate(0.5 * (lo + hi), &appliers);

    // Stage 2: which opportunities. Conditional logit over the opportunities
    // posted that term, in z-scored topic overlap, had-teacher and
    // department fraction, computed from history before the posted term.
    Rng choice_rng = root.fork("choice");
    Rng accept_rng = root.fork("acceptance");
    for (auto t : app_terms) {
        const auto& opps = opps_by_term[t];
        const auto& who = appliers[t];
        if (who.empty()) continue;
        const std::size_t n_o = opps.size();
        std::vector<double> content, ht, dept;
        for (auto s : who) {
            const auto& h = snapshots[t][s];
            const double denom = h.approved ? static_cast<double>(h.approved) : 1.0;
            for (auto o : opps) {
                const auto f = drafts[o].faculty;
                const auto topic = cat.faculty_topic[f];
                content.push_back(h.topic_count[topic] / denom);
                dept.push_back(h.dept_count[dept_of_topic(topic)] / denom);
                ht.push_back(std::binary_search(h.teachers.begin(), h.teachers.end(), f) ? 1.0 : 0.0);
            }
        }
        const auto zc = fit(content), zh = fit(ht), zd = fit(dept);
        const int term = first + static_cast<int>(t);
        for (std::size_t i = 0; i < who.size(); ++i) {
            std::vector<double> weights(n_o);
            for (std::size_t j = 0; j < n_o; ++j) {
                const std::size_t p = i * n_o + j;
                weights[j] = std::exp(w.content * zc(content[p]) + w.ht * zh(ht[p]) + w.dept * zd(dept[p]));
            }
            std::size_t m = 1;
            while (m < n_o && choice_rng.bernoulli(c.extra_application_prob)) ++m;
            std::vector<std::size_t> chosen;
            for (std::size_t k = 0; k < m; ++k) {
                const auto j = draw_weighted(weights, choice_rng);
                if (j >= n_o) break;
                chosen.push_back(opps[j]);
            }
            std::sort(chosen.begin(), chosen.end());
            for (auto o : chosen)
                out.applications.push_back({out.students[who[i]].student_id,
                                            out.opportunities[o].opportunity_id,
                                            Term::from_ordinal(term),
                                            accept_rng.bernoulli(c.acceptance_rate)});
        }
    }
    std::stable_sort(out.applications.begin(), out.applications.end(),
                     [](const Application& a, const Application& b) {
                         return std::tie(a.term, a.student_id, a.opportunity_id) <
                                std::tie(b.term, b.student_id, b.opportunity_id);
                     });
    return out;
}

Dataset generate(const GenConfig& config) { return Dataset(generate_tables(config)); }

std::string describe_generative_model() {
    return R"(Synthetic undergraduate-research dataset: generative model

Random numbers: SplitMix64 seeded with `seed`. Each stage draws from its own
sub-stream fork(tag) = SplitMix64(mix(seed ^ mix(FNV1a64(tag)))) with tags
"catalog", "students", "enrollment", "opportunities", "propensity", "choice"
and "acceptance". uniform() = (next() >> 11) * 2^-53; below(n) rejects draws
at or above 2^64 - (2^64 mod n); normal() is Box-Muller on two uniforms.

Catalog
  There are n_topics latent topics, each owning vocab_per_topic pseudo-words
  built from two-letter syllables. Topic t belongs to department
  t mod n_departments (n_departments departments in total).
  n_faculty faculty: faculty f < n_topics gets topic f, the rest a uniform
  topic; a faculty member's department is the department of their topic.
  n_courses courses: course k has topic k mod n_topics, the department of
  that topic, credits uniform in {5, 10, 15}, and a primary instructor drawn
  from same-topic faculty. Each course is offered every term of
  terms_range = [first_term, last_term]; the primary instructor teaches it
  with probability 0.75, otherwise a uniform colleague from the department.

Documents
  A course description has description_tokens words, an opportunity abstract
  abstract_tokens words. Each word comes from the document's dominant topic
  with probability topic_token_share (default 0.8) and otherwise uniformly
  from the whole vocabulary (noise share 1 - topic_token_share).

Students
  n_students students, admission term uniform over terms_range, latent
  ability a ~ N(0, 1), gpa = gpa_min + (gpa_max - gpa_min) * clamp(0.6 + 0.12 a)
  rounded to 0.01 on gpa_scale. Each student picks favorite_topics favorite
  topics; topic preference is 1 + favorite_weight for favorites, 1 otherwise.
  For up to max_semesters consecutive terms from admission the student takes
  courses_per_term not-yet-approved courses, sampled without replacement with
  probability proportional to topic preference, and passes each with
  probability sigmoid(1.8 + a).

Opportunities
  n_opportunities opportunities, posted term uniform over
  [first_application_term, last_term], offering faculty uniform; the abstract
  is drawn from the faculty member's topic. Applications happen in the posted
  term.

Applications (the planted signal)
  Stage 1, for every term t with opportunities and every active student
  (admitted, fewer than max_semesters terms ago), features are measured from
  history strictly before t and z-scored across the active students:
    P(apply in t) = 1 / (1 + exp(-(b0 + w_semesters*z(semesters)
                     + w_credits*z(credits) + w_gpa*z(gpa)
                     + w_prior*z(prior_application))))
  b0 is set by bisection (common random numbers) so the fraction of students
  with at least one application equals applicant_base_rate (default 0.103).
  Stage 2, an applying student files 1 + Geometric(extra_application_prob)
  applications (capped by the opportunities that term), chosen without
  replacement from the term's opportunities with probability proportional to
    exp(w_content*z(topic_overlap) + w_ht*z(had_teacher) + w_dept*z(dept_frac))
  which is the multinomial (conditional) logistic model. topic_overlap is the
  share of approved courses in the opportunity's topic, had_teacher whether an
  approved course was taught in that term by the offering faculty, dept_frac
  the share of approved courses in the faculty's department; all from history
  before the posted term, z-scored over applicant x opportunity pairs.
  Each application is accepted with probability acceptance_rate
  (default 0.814).

signal_weights = {w_content, w_ht, w_dept, w_prior, w_semesters, w_credits,
w_gpa}. All distributional choices above are synthetic and not estimated
from any real institution.
)";
}

}  // namespace resrec
