#include <fstream>
#include <sstream>

#include "resrec/format.hpp"
#include "resrec/models.hpp"

namespace resrec {

namespace {

constexpr std::string_view kMagic = "resrec-model";
constexpr int kVersion = 1;

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(std::string_view expected_tag) {
        std::string line;
        if (!std::getline(in_, line)) throw ModelError("model file truncated; expected '" +
                                                       std::string(expected_tag) + "'");
        ++line_no_;
        std::istringstream words(line);
        std::vector<std::string> out;
        for (std::string w; words >> w;) out.push_back(w);
        if (out.empty() || out[0] != expected_tag)
            throw ModelError("model file line " + std::to_string(line_no_) + ": expected '" +
                             std::string(expected_tag) + "'");
        return out;
    }

    /// Tag of the next line without consuming it.
    std::string peek_tag() {
        const auto pos = in_.tellg();
        std::string line;
        if (!std::getline(in_, line)) {
            in_.clear();
            in_.seekg(pos);
            return {};
        }
        in_.seekg(pos);
        std::istringstream words(line);
        std::string tag;
        words >> tag;
        return tag;
    }

    std::string rest_after_tag() {
        std::string line;
        std::getline(in_, line);
        ++line_no_;
        const auto space = line.find(' ');
        return space == std::string::npos ? std::string() : line.substr(space + 1);
    }

    double real(const std::string& text) const {
        auto v = parse_real(text);
        if (!v) throw ModelError("model file line " + std::to_string(line_no_) + ": bad number '" + text + "'");
        return *v;
    }

    long long integer(const std::string& text) const {
        auto v = parse_int(text);
        if (!v) throw ModelError("model file line " + std::to_string(line_no_) + ": bad integer '" + text + "'");
        return *v;
    }

    void expect_size(const std::vector<std::string>& words, std::size_t n) const {
        if (words.size() != n)
            throw ModelError("model file line " + std::to_string(line_no_) + ": expected " +
                             std::to_string(n - 1) + " values");
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const TrainedModel& model) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "kind " << kind_name(model.kind()) << '\n';
    for (const auto& [key, value] : model.metadata()) {
        if (key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos)
            throw ModelError("metadata keys must be single words and values single lines");
        out << "meta " << key << ' ' << value << '\n';
    }
    const auto& names = model.feature_names();
    const auto& std = model.standardizer();
    out << "features " << names.size() << '\n';
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j].find_first_of(" \t\n") != std::string::npos)
            throw ModelError("feature names must not contain whitespace");
        out << "feature " << names[j] << ' ' << format_real(std.mean()[j]) << ' '
            << format_real(std.sd()[j]) << ' ' << (std.passthrough()[j] ? 1 : 0) << '\n';
    }
    if (const auto* c = std::get_if<ConstantParams>(&model.params())) {
        out << "constant " << constant_mode_name(c->mode) << ' ' << format_real(c->value) << '\n';
    } else if (const auto* lin = std::get_if<LinearParams>(&model.params())) {
        out << "linear " << format_real(lin->bias);
        for (double w : lin->weights) out << ' ' << format_real(w);
        out << '\n';
    } else if (const auto* gbt = std::get_if<GbtParams>(&model.params())) {
        out << "gbt " << format_real(gbt->initial_score) << ' ' << format_real(gbt->learning_rate) << ' '
            << gbt->trees.size() << '\n';
        for (const auto& tree : gbt->trees) {
            out << "tree " << tree.size() << '\n';
            for (const auto& n : tree)
                out << "node " << n.feature << ' ' << format_real(n.threshold) << ' ' << n.left << ' '
                    << n.right << ' ' << format_real(n.value) << '\n';
        }
    }
    out << "end\n";
}

TrainedModel read_model(std::istream& in) {
    LineReader r(in);
    std::string first;
    if (!std::getline(in, first)) throw ModelError("empty model file");
    std::istringstream head(first);
    std::string magic, version;
    head >> magic >> version;
    if (magic != kMagic) throw ModelError("not a model file (bad magic)");
    if (version != std::to_string(kVersion))
        throw ModelError("unsupported model version '" + version + "' (expected " + std::to_string(kVersion) + ")");

    auto kind_line = r.next("kind");
    r.expect_size(kind_line, 2);
    const auto kind = parse_kind(kind_line[1]);
    if (!kind) throw ModelError("unknown model kind '" + kind_line[1] + "'");

    std::map<std::string, std::string> metadata;
    while (r.peek_tag() == "meta") {
        auto rest = r.rest_after_tag();
        const auto space = rest.find(' ');
        metadata[rest.substr(0, space)] = space == std::string::npos ? "" : rest.substr(space + 1);
    }

    auto features_line = r.next("features");
    r.expect_size(features_line, 2);
    const auto d = static_cast<std::size_t>(r.integer(features_line[1]));
    std::vector<std::string> names;
    std::vector<double> mean, sd;
    std::vector<bool> passthrough;
    for (std::size_t j = 0; j < d; ++j) {
        auto f = r.next("feature");
        r.expect_size(f, 5);
        names.push_back(f[1]);
        mean.push_back(r.real(f[2]));
        sd.push_back(r.real(f[3]));
        passthrough.push_back(r.integer(f[4]) != 0);
    }
    auto standardizer = Standardizer::from_stats(names, mean, sd, passthrough);

    TrainedModel::Params params;
    if (*kind == ModelKind::constant) {
        auto c = r.next("constant");
        r.expect_size(c, 3);
        const auto mode = parse_constant_mode(c[1]);
        if (!mode) throw ModelError("unknown constant mode '" + c[1] + "'");
        params = ConstantParams{*mode, r.real(c[2])};
    } else if (*kind == ModelKind::logreg || *kind == ModelKind::svm) {
        auto l = r.next("linear");
        r.expect_size(l, d + 2);
        LinearParams lin;
        lin.bias = r.real(l[1]);
        for (std::size_t j = 0; j < d; ++j) lin.weights.push_back(r.real(l[j + 2]));
        params = std::move(lin);
    } else {
        auto g = r.next("gbt");
        r.expect_size(g, 4);
        GbtParams gbt;
        gbt.initial_score = r.real(g[1]);
        gbt.learning_rate = r.real(g[2]);
        const auto n_trees = r.integer(g[3]);
        for (long long t = 0; t < n_trees; ++t) {
            auto header = r.next("tree");
            r.expect_size(header, 2);
            const auto n_nodes = r.integer(header[1]);
            if (n_nodes < 1) throw ModelError("tree without nodes");
            std::vector<TreeNode> tree;
            for (long long k = 0; k < n_nodes; ++k) {
                auto n = r.next("node");
                r.expect_size(n, 6);
                TreeNode node;
                node.feature = static_cast<int>(r.integer(n[1]));
                node.threshold = r.real(n[2]);
                node.left = static_cast<int>(r.integer(n[3]));
                node.right = static_cast<int>(r.integer(n[4]));
                node.value = r.real(n[5]);
                const bool leaf = node.feature < 0;
                const auto in_range = [&](int i) { return i > k && i < n_nodes; };
                if (!leaf && (node.feature >= static_cast<int>(d) || !in_range(node.left) ||
                              !in_range(node.right)))
                    throw ModelError("corrupt tree node");
                tree.push_back(node);
            }
            gbt.trees.push_back(std::move(tree));
        }
        params = std::move(gbt);
    }
    r.next("end");

    TrainedModel model(*kind, std::move(names), std::move(standardizer), std::move(params));
    model.metadata() = std::move(metadata);
    return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError("cannot write model file " + path.string());
    write_model(out, model);
    if (!out) throw ModelError("failed writing model file " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file " + path.string());
    return read_model(in);
}

}  // namespace resrec
