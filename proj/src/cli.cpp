#include "resrec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "resrec/format.hpp"
#include "resrec/ingest.hpp"

#ifndef RESREC_VERSION
#define RESREC_VERSION "0.0.0"
#endif

namespace resrec::cli {

using nlohmann::json;

namespace {

// Scalar and list codecs.

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t and uint64_t share a codec");

json encode(std::uint64_t v) { return v; }
json encode(int v) { return v; }
json encode(double v) { return v; }
json encode(bool v) { return v; }
json encode(const std::string& v) { return v; }
json encode(const std::filesystem::path& v) { return v.string(); }
json encode(const Term& v) { return v.str(); }
json encode(FeatureLevel v) { return std::string(level_name(v)); }
json encode(ConstantMode v) { return std::string(constant_mode_name(v)); }
template <class T>
json encode(const std::vector<T>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(encode(x));
    return out;
}

void decode(const json& j, std::uint64_t& v) {
    if (!j.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
    v = j.get<std::uint64_t>();
}
void decode(const json& j, int& v) {
    if (!j.is_number_integer()) throw std::invalid_argument("expected an integer");
    v = j.get<int>();
}
void decode(const json& j, double& v) {
    if (!j.is_number()) throw std::invalid_argument("expected a number");
    v = j.get<double>();
}
void decode(const json& j, bool& v) {
    if (!j.is_boolean()) throw std::invalid_argument("expected true or false");
    v = j.get<bool>();
}
void decode(const json& j, std::string& v) {
    if (!j.is_string()) throw std::invalid_argument("expected a string");
    v = j.get<std::string>();
}
void decode(const json& j, std::filesystem::path& v) {
    std::string s;
    decode(j, s);
    v = s;
}
void decode(const json& j, Term& v) {
    std::string s;
    decode(j, s);
    const auto t = Term::parse(s);
    if (!t) throw std::invalid_argument("expected a term like 2014.1");
    v = *t;
}
void decode(const json& j, FeatureLevel& v) {
    std::string s;
    decode(j, s);
    const auto l = parse_level(s);
    if (!l) throw std::invalid_argument("unknown feature set '" + s + "'");
    v = *l;
}
void decode(const json& j, ConstantMode& v) {
    std::string s;
    decode(j, s);
    const auto m = parse_constant_mode(s);
    if (!m) throw std::invalid_argument("unknown baseline mode '" + s + "'");
    v = *m;
}
template <class T>
void decode(const json& j, std::vector<T>& v) {
    if (!j.is_array()) throw std::invalid_argument("expected a list");
    std::vector<T> out;
    for (const auto& x : j) {
        T item{};
        decode(x, item);
        out.push_back(std::move(item));
    }
    v = std::move(out);
}

class Reader {
public:
    Reader(const json& j, std::string context) : j_(j), context_(std::move(context)) {}

    template <class T>
    void operator()(const char* name, T& field) {
        seen_.insert(name);
        const auto it = j_.find(name);
        if (it == j_.end()) return;
        try {
            decode(*it, field);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config key '" + context_ + name + "': " + e.what());
        }
    }

    template <class F>
    void object(const char* name, F&& visit) {
        seen_.insert(name);
        const auto it = j_.find(name);
        if (it == j_.end()) return;
        if (!it->is_object()) throw std::invalid_argument("config key '" + context_ + name + "': expected an object");
        Reader inner(*it, context_ + name + ".");
        visit(inner);
        inner.finish();
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw std::invalid_argument("unknown config key '" + context_ + item.key() + "'");
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

class Writer {
public:
    explicit Writer(json& j) : j_(j) {}

    template <class T>
    void operator()(const char* name, const T& field) {
        j_[name] = encode(field);
    }

    template <class F>
    void object(const char* name, F&& visit) {
        json inner = json::object();
        Writer w(inner);
        visit(w);
        j_[name] = std::move(inner);
    }

    void finish() const {}

private:
    json& j_;
};

template <class V>
void visit_generator(V& v, GenConfig& g) {
    v("n_students", g.n_students);
    v("n_courses", g.n_courses);
    v("n_faculty", g.n_faculty);
    v("n_departments", g.n_departments);
    v("n_opportunities", g.n_opportunities);
    v("n_topics", g.n_topics);
    v("vocab_per_topic", g.vocab_per_topic);
    v("first_term", g.first_term);
    v("last_term", g.last_term);
    v("first_application_term", g.first_application_term);
    v("courses_per_term", g.courses_per_term);
    v("max_semesters", g.max_semesters);
    v("description_tokens", g.description_tokens);
    v("abstract_tokens", g.abstract_tokens);
    v("topic_token_share", g.topic_token_share);
    v("favorite_topics", g.favorite_topics);
    v("favorite_weight", g.favorite_weight);
    v("applicant_base_rate", g.applicant_base_rate);
    v("acceptance_rate", g.acceptance_rate);
    v("extra_application_prob", g.extra_application_prob);
    v.object("gpa_scale", [&](auto& s) {
        s("min", g.gpa_scale.min);
        s("max", g.gpa_scale.max);
    });
    v.object("signal_weights", [&](auto& s) {
        s("content", g.signal_weights.content);
        s("ht", g.signal_weights.ht);
        s("dept", g.signal_weights.dept);
        s("prior", g.signal_weights.prior);
        s("semesters", g.signal_weights.semesters);
        s("credits", g.signal_weights.credits);
        s("gpa", g.signal_weights.gpa);
    });
    v("seed", g.seed);
}

template <class V>
void visit_config(V& v, RunConfig& c) {
    auto& e = c.experiment;
    v("dataset", c.dataset);
    v("out", c.out);
    v("tasks", c.tasks);
    v("cutoff", e.cutoff);
    v("methods", e.methods);
    v("task1_feature_sets", e.task1_sets);
    v("task2_feature_sets", e.task2_sets);
    v("k", e.k_grid);
    v("top_k", c.top_k);
    v("neg_ratio", e.neg_ratio);
    v("seeds", e.seeds);
    v("baseline_mode", e.baseline_mode);
    v("task2_ablation_method", e.task2_ablation_method);
    v("min_df", e.min_df);
    v("task1_horizon_terms", e.features.task1_horizon_terms);
    v("had_teacher_any_term", e.features.had_teacher_any_term);
    v("standardize_binary", e.standardizer.standardize_binary);
    v.object("logreg", [&](auto& s) {
        s("learning_rate", e.hyper.logreg.learning_rate);
        s("l2", e.hyper.logreg.l2);
        s("max_iters", e.hyper.logreg.max_iters);
        s("tol", e.hyper.logreg.tol);
    });
    v.object("gbt", [&](auto& s) {
        s("n_trees", e.hyper.gbt.n_trees);
        s("max_depth", e.hyper.gbt.max_depth);
        s("learning_rate", e.hyper.gbt.learning_rate);
        s("min_leaf", e.hyper.gbt.min_leaf);
    });
    v.object("svm", [&](auto& s) {
        s("l2", e.hyper.svm.l2);
        s("epochs", e.hyper.svm.epochs);
    });
    v.object("gpa_scale", [&](auto& s) {
        s("min", c.schema.gpa_scale.min);
        s("max", c.schema.gpa_scale.max);
    });
    v("models", c.models);
    v("model", c.model);
    v("student", c.student);
    v.object("generator", [&](auto& s) { visit_generator(s, c.generator); });
}

void sync_tasks(RunConfig& c) {
    if (c.tasks.empty()) throw std::invalid_argument("no task selected");
    for (int t : c.tasks)
        if (t != 1 && t != 2) throw std::invalid_argument("task must be 1 or 2, got " + std::to_string(t));
    std::sort(c.tasks.begin(), c.tasks.end());
    c.tasks.erase(std::unique(c.tasks.begin(), c.tasks.end()), c.tasks.end());
    c.experiment.run_task1 = std::count(c.tasks.begin(), c.tasks.end(), 1) > 0;
    c.experiment.run_task2 = std::count(c.tasks.begin(), c.tasks.end(), 2) > 0;
}

json config_json(const RunConfig& config) {
    RunConfig copy = config;
    json j = json::object();
    Writer w(j);
    visit_config(w, copy);
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, RunConfig base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    // A run manifest carries its resolved config under "config".
    if (j.contains("manifest_version") && j.contains("config")) j = j["config"];
    if (!j.is_object()) throw std::invalid_argument("manifest config must be a JSON object");
    Reader r(j, "");
    visit_config(r, base);
    r.finish();
    sync_tasks(base);
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

std::string to_json(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

std::string model_file_name(int task, std::string_view method, FeatureLevel level) {
    return "task" + std::to_string(task) + "_" + std::string(method) + "_" + std::string(level_name(level)) + ".model";
}

namespace {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config, dataset, out, cutoff, task, method, features, k, seed, models, model, student;
    bool describe = false;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    if (out.empty()) throw InputError("empty list '" + text + "'");
    return out;
}

std::uint64_t parse_count(const std::string& text, const char* flag) {
    const auto v = parse_uint(text);
    if (!v) throw InputError(std::string(flag) + ": not a non-negative integer: '" + text + "'");
    return *v;
}

/// Applies flags over the config; the command decides what --k and --seed mean.
RunConfig resolve(const Flags& f, const std::string& command) {
    RunConfig c;
    try {
        if (!f.config.empty()) c = load_config(f.config);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    if (!f.dataset.empty()) c.dataset = f.dataset;
    if (!f.out.empty()) c.out = f.out;
    if (!f.models.empty()) c.models = f.models;
    if (!f.model.empty()) c.model = f.model;
    if (!f.student.empty()) c.student = f.student;
    if (!f.cutoff.empty()) {
        const auto t = Term::parse(f.cutoff);
        if (!t) throw InputError("--cutoff: expected YEAR.HALF, got '" + f.cutoff + "'");
        c.experiment.cutoff = *t;
    }
    if (!f.task.empty()) {
        c.tasks.clear();
        for (const auto& t : split_list(f.task)) {
            if (t != "1" && t != "2") throw InputError("--task: expected 1 or 2, got '" + t + "'");
            c.tasks.push_back(t == "1" ? 1 : 2);
        }
    }
    if (!f.method.empty()) {
        c.experiment.methods = split_list(f.method);
        for (const auto& m : c.experiment.methods)
            if (m != "baseline" && !is_known_method(m)) throw InputError("--method: unknown method '" + m + "'");
    }
    if (!f.features.empty()) {
        std::vector<FeatureLevel> levels;
        for (const auto& s : split_list(f.features)) {
            const auto l = parse_level(s);
            if (!l) throw InputError("--features: unknown feature set '" + s + "'");
            levels.push_back(*l);
        }
        c.experiment.task1_sets = levels;
        c.experiment.task2_sets = levels;
    }
    if (!f.k.empty()) {
        std::vector<std::size_t> ks;
        for (const auto& s : split_list(f.k)) ks.push_back(static_cast<std::size_t>(parse_count(s, "--k")));
        if (command == "recommend") c.top_k = ks.front();
        else c.experiment.k_grid = ks;
    }
    if (!f.seed.empty()) {
        std::vector<std::uint64_t> seeds;
        for (const auto& s : split_list(f.seed)) seeds.push_back(parse_count(s, "--seed"));
        if (command == "datagen") c.generator.seed = seeds.front();
        else c.experiment.seeds = seeds;
    }
    try {
        sync_tasks(c);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return c;
}

void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

Dataset load_or_fail(const RunConfig& c, std::ostream& err) {
    require(!c.dataset.empty(), "no dataset directory (--dataset)");
    auto result = load_dataset(c.dataset, c.schema);
    for (const auto& w : result.report.warnings)
        err << "warning: " << w.file << (w.line ? ":" + std::to_string(w.line) : "") << ": " << w.message << "\n";
    for (const auto& e : result.report.errors)
        err << "error: " << e.file << (e.line ? ":" + std::to_string(e.line) : "") << ": " << e.message << "\n";
    if (!result.dataset) throw InputError("dataset " + c.dataset.string() + " failed validation (" +
                                          std::to_string(result.report.errors.size()) + " errors)");
    return std::move(*result.dataset);
}

void require_separate_output(const RunConfig& c) {
    require(!c.out.empty(), "no output directory (--out)");
    if (!c.dataset.empty() && std::filesystem::exists(c.dataset) && std::filesystem::exists(c.out) &&
        std::filesystem::equivalent(c.dataset, c.out))
        throw InputError("output directory must differ from the dataset directory");
}

void write_manifest(const RunConfig& c, const std::string& command, const std::optional<std::string>& digest,
                    const std::vector<std::string>& outputs) {
    json m = json::object();
    m["manifest_version"] = 1;
    m["tool"] = "resrec";
    m["version"] = RESREC_VERSION;
    m["command"] = command;
    m["config"] = config_json(c);
    m["seeds"] = command == "datagen" ? json::array({c.generator.seed}) : encode(c.experiment.seeds);
    m["dataset_digest"] = digest ? json(*digest) : json(nullptr);
    m["outputs"] = outputs;
    std::filesystem::create_directories(c.out);
    std::ofstream out(c.out / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write manifest in " + c.out.string());
    out << m.dump(2) << "\n";
}

int cmd_datagen(const RunConfig& c, bool describe, std::ostream& out) {
    if (describe) {
        out << describe_generative_model();
        return kOk;
    }
    require(!c.out.empty(), "no output directory (--out)");
    try {
        validate_config(c.generator);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("invalid generator config: ") + e.what());
    }
    write_tables(generate_tables(c.generator), c.out);
    const auto digest = dataset_digest(c.out);
    write_manifest(c, "datagen", digest, dataset_files());
    out << "wrote " << dataset_files().size() << " files to " << c.out.string() << " (digest " << digest << ")\n";
    return kOk;
}

TrainOptions train_options(const RunConfig& c) {
    TrainOptions options{c.experiment.hyper, c.experiment.standardizer};
    options.hyper.svm.seed = c.experiment.seeds.front();
    return options;
}

int cmd_train(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require_separate_output(c);
    try {
        validate(c.experiment);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const auto dataset = load_or_fail(c, err);
    const auto digest = dataset_digest(c.dataset);
    const auto& e = c.experiment;
    const auto split = temporal_split(dataset, e.cutoff, e.features);
    for (const auto& w : split.warnings) err << "warning: " << w << "\n";
    const auto seed = e.seeds.front();
    std::optional<TextContext> text;
    std::vector<std::string> outputs;
    std::filesystem::create_directories(c.out);

    for (int task : c.tasks) {
        const auto& levels = task == 1 ? e.task1_sets : e.task2_sets;
        for (auto level : levels) {
            const FeatureSetId set{task, level};
            std::vector<LabeledExample> examples;
            if (task == 1) {
                examples = build_task1_examples(split.train, set);
            } else {
                if (!text) text.emplace(dataset, e.cutoff, e.min_df);
                auto t2 = build_task2_examples(split.train, set, e.neg_ratio, seed, *text);
                for (const auto& w : t2.warnings) err << "warning: " << w << "\n";
                examples = std::move(t2.examples);
            }
            require(!examples.empty(), "no training examples for task " + std::to_string(task));
            for (const auto& method : e.methods) {
                if (task == 2 && method == "baseline") {
                    err << "note: the Task-2 baseline is the random ranker; no model file\n";
                    continue;
                }
                const auto resolved = method == "baseline" ? std::string(constant_mode_name(e.baseline_mode)) : method;
                auto model = train_method(resolved, examples, train_options(c));
                auto& meta = model.metadata();
                meta["task"] = std::to_string(task);
                meta["method"] = resolved;
                meta["feature_set"] = std::string(level_name(level));
                meta["cutoff"] = e.cutoff.str();
                meta["seed"] = std::to_string(seed);
                meta["min_df"] = std::to_string(e.min_df);
                meta["neg_ratio"] = format_real(e.neg_ratio);
                meta["task1_horizon_terms"] = std::to_string(e.features.task1_horizon_terms);
                meta["had_teacher_any_term"] = e.features.had_teacher_any_term ? "1" : "0";
                meta["dataset_digest"] = digest;
                const auto name = model_file_name(task, resolved, level);
                save_model(model, c.out / name);
                outputs.push_back(name);
                out << "wrote " << (c.out / name).string() << "\n";
            }
        }
    }
    write_manifest(c, "train", digest, outputs);
    return kOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require_separate_output(c);
    try {
        validate(c.experiment);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const auto dataset = load_or_fail(c, err);
    const auto digest = dataset_digest(c.dataset);
    ModelSource source;
    if (!c.models.empty()) {
        source = [dir = c.models](int task, std::string_view method, FeatureLevel level, std::uint64_t) {
            const auto path = dir / model_file_name(task, method, level);
            if (!std::filesystem::exists(path)) throw InputError("missing model file " + path.string());
            return load_model(path);
        };
    }
    const auto result = run_experiment(dataset, c.experiment, source);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    std::vector<std::string> outputs;
    for (const auto& p : write_reports(result, c.out)) {
        outputs.push_back(p.filename().string());
        out << "wrote " << p.string() << "\n";
    }
    for (const auto& row : result.task2)
        if (row.k == 20 && row.group == "methods" && row.ratio && row.method != "random")
            out << row.method << " MAP@20 " << format_real(row.map) << " = " << format_real(*row.ratio)
                << "x random\n";
    write_manifest(c, "eval", digest, outputs);
    return kOk;
}

std::string meta_or_fail(const TrainedModel& model, const std::string& key) {
    const auto it = model.metadata().find(key);
    if (it == model.metadata().end()) throw InputError("model file lacks '" + key + "' metadata");
    return it->second;
}

int cmd_recommend(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require(!c.model.empty(), "no model file (--model)");
    require(!c.student.empty(), "no student id (--student)");
    require(c.top_k > 0, "--k must be positive");
    const auto model = load_model(c.model);
    if (meta_or_fail(model, "task") != "2") throw InputError("recommend needs a Task-2 model");
    const auto cutoff = Term::parse(meta_or_fail(model, "cutoff"));
    const auto level = parse_level(meta_or_fail(model, "feature_set"));
    const auto min_df = parse_uint(meta_or_fail(model, "min_df"));
    if (!cutoff || !level || !min_df) throw InputError("model file has malformed metadata");
    FeatureOptions options;
    if (auto it = model.metadata().find("had_teacher_any_term"); it != model.metadata().end())
        options.had_teacher_any_term = it->second == "1";

    const auto dataset = load_or_fail(c, err);
    const StudentId student(c.student);
    if (dataset.student_index(student) == npos) throw InputError("unknown student '" + c.student + "'");
    const SplitView view(dataset, *cutoff, Phase::test, options);
    const auto candidates = view.candidate_opportunities();
    require(!candidates.empty(), "no opportunities posted at or after " + cutoff->str());
    const TextContext text(dataset, *cutoff, static_cast<std::size_t>(*min_df));
    const auto ranked = rank_candidates(model, student, candidates, view, FeatureSetId{2, *level}, text, c.top_k);
    for (const auto& item : ranked.items) out << item.opportunity.value << '\t' << format_real(item.score) << '\n';
    if (!c.out.empty()) write_manifest(c, "recommend", dataset_digest(c.dataset), {});
    return kOk;
}

int cmd_summarize(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto dataset = load_or_fail(c, err);
    const auto s = summarize(dataset);
    json j = json::object();
    j["n_students"] = s.n_students;
    j["n_opportunities"] = s.n_opportunities;
    j["n_applications"] = s.n_applications;
    j["n_applicants"] = s.n_applicants;
    j["n_accepted"] = s.n_accepted;
    j["acceptance_rate"] = s.acceptance_rate ? json(*s.acceptance_rate) : json(nullptr);
    j["applicant_rate"] = s.applicant_rate ? json(*s.applicant_rate) : json(nullptr);
    j["first_term"] = dataset.first_term().str();
    j["last_term"] = dataset.last_term().str();
    j["dataset_digest"] = dataset_digest(c.dataset);
    out << j.dump(2) << "\n";
    if (!c.out.empty()) {
        require_separate_output(c);
        std::filesystem::create_directories(c.out);
        std::ofstream f(c.out / "summary.json", std::ios::binary | std::ios::trunc);
        f << j.dump(2) << "\n";
        write_manifest(c, "summarize", j["dataset_digest"].get<std::string>(), {"summary.json"});
    }
    return kOk;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config or run manifest");
    sub->add_option("--dataset", f.dataset, "Dataset directory with the seven CSV files");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--cutoff", f.cutoff, "Temporal cutoff YEAR.HALF");
    sub->add_option("--task", f.task, "1, 2 or 1,2");
    sub->add_option("--method", f.method, "Comma list: baseline,majority,always_positive,logreg,gbt,svm");
    sub->add_option("--features", f.features, "Comma list of feature sets");
    sub->add_option("--k", f.k, "k grid (eval) or list length (recommend)");
    sub->add_option("--seed", f.seed, "Seed or comma list of seeds");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Research-opportunity recommender toolkit", "resrec");
    app.require_subcommand(1);
    app.set_version_flag("--version", RESREC_VERSION);
    Flags f;
    auto* datagen = app.add_subcommand("datagen", "Generate a synthetic dataset");
    add_common(datagen, f);
    datagen->add_flag("--describe", f.describe, "Print the generative model and exit");
    auto* train = app.add_subcommand("train", "Train model files per task, method and feature set");
    add_common(train, f);
    auto* eval = app.add_subcommand("eval", "Run the method and feature sweeps and write reports");
    add_common(eval, f);
    eval->add_option("--models", f.models, "Directory of trained model files (default: train on the fly)");
    auto* recommend = app.add_subcommand("recommend", "Print a student's top-k opportunities");
    add_common(recommend, f);
    recommend->add_option("--model", f.model, "Task-2 model file");
    recommend->add_option("--student", f.student, "Student id");
    auto* summarize_cmd = app.add_subcommand("summarize", "Validate a dataset and print its summary");
    add_common(summarize_cmd, f);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    std::string command;
    for (auto* sub : {datagen, train, eval, recommend, summarize_cmd})
        if (sub->parsed()) command = sub->get_name();

    try {
        const auto config = resolve(f, command);
        if (command == "datagen") return cmd_datagen(config, f.describe, out);
        if (command == "train") return cmd_train(config, out, err);
        if (command == "eval") return cmd_eval(config, out, err);
        if (command == "recommend") return cmd_recommend(config, out, err);
        return cmd_summarize(config, out, err);
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace resrec::cli
