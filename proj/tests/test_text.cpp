#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "resrec/rng.hpp"
#include "resrec/text.hpp"

using namespace resrec;

namespace {

std::string join(const TokenList& tokens) {
    std::string out;
    for (const auto& t : tokens) out += t + " ";
    return out;
}

SparseVector random_vector(Rng& rng, std::uint32_t dims) {
    std::vector<SparseVector::Entry> e;
    for (std::uint32_t i = 0; i < dims; ++i)
        if (rng.uniform() < 0.5) e.emplace_back(i, rng.uniform() * 5.0);
    return SparseVector(std::move(e));
}

}  // namespace

TEST_CASE("tokenize examples") {
    CHECK(tokenize("Machine Learning, 2014!") == TokenList{"machine", "learning", "2014"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("Optimización-convexa") == TokenList{"optimización", "convexa"});
    CHECK(tokenize("ÉCOLE  naïve\tdata_set") == TokenList{"école", "naïve", "data", "set"});
    CHECK(tokenize("bad \xFF\xFE bytes") == TokenList{"bad", "bytes"});
}

TEST_CASE("tokenize is idempotent") {
    Rng rng(3);
    const std::vector<std::string> pieces = {"Data", " ", "-", "MODEL", "ñ", "Ü", "42", ",", "\n", "x", "é", "!"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        for (std::size_t k = rng.below(20); k > 0; --k) s += pieces[rng.below(pieces.size())];
        const auto once = tokenize(s);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("vocabulary document frequency") {
    const std::vector<TokenList> docs = {{"x", "y", "y"}, {"x", "z"}, {"x", "y"}};
    const auto v = build_vocabulary(docs, 2);
    CHECK(v.n_documents() == 3);
    REQUIRE(v.index_of("x") >= 0);
    CHECK(v.document_frequency(std::size_t(v.index_of("x"))) == 3);
    CHECK(v.document_frequency(std::size_t(v.index_of("y"))) == 2);
    CHECK(v.index_of("z") == -1);
    CHECK(v.size() == 2);
    CHECK(v.term(0) == "x");
    CHECK(v.term(1) == "y");

    std::ostringstream csv;
    v.write_csv(csv);
    CHECK(csv.str() == "term,index,df\nx,0,3\ny,1,2\n");
}

TEST_CASE("vocabulary errors and stopwords") {
    CHECK_THROWS_AS(build_vocabulary({}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_vocabulary({{"a"}}, 0), std::invalid_argument);
    const auto stop = read_stopwords("The\nof, AND");
    CHECK(stop == std::set<std::string>{"the", "of", "and"});
    const auto v = build_vocabulary({{"the", "cell"}, {"the", "cell"}}, 1, stop);
    CHECK(v.index_of("the") == -1);
    CHECK(v.index_of("cell") == 0);
}

TEST_CASE("tfidf weights") {
    // df(a) = 1, df(b) = 2, n = 3.
    const auto v = build_vocabulary({{"a", "b"}, {"b"}, {"c"}}, 1);
    const auto idf = [&](double df) { return std::log((1.0 + 3.0) / (1.0 + df)) + 1.0; };
    const auto w = tfidf_vector({"a", "a", "b"}, v);
    const auto a = std::uint32_t(v.index_of("a")), b = std::uint32_t(v.index_of("b"));
    CHECK(w.weight(a) == doctest::Approx(2 * idf(1)));
    CHECK(w.weight(b) == doctest::Approx(idf(2)));
    // Frozen from the oracle above.
    CHECK(w.weight(a) == doctest::Approx(3.386294361));
    CHECK(w.weight(b) == doctest::Approx(1.287682072));
    CHECK(w.size() == 2);

    CHECK(tfidf_vector({"q", "r"}, v).empty());
    const auto everywhere = build_vocabulary({{"t"}, {"t"}}, 1);
    CHECK(tfidf_vector({"t"}, everywhere).weight(0) == doctest::Approx(1.0));

    const auto counts = term_counts({"a", "a", "b", "zzz"}, v);
    CHECK(counts.weight(a) == 2.0);
    CHECK(tfidf_from_counts(counts, v).entries() == w.entries());
}

TEST_CASE("cosine examples") {
    const SparseVector a({{0, 1.0}, {1, 1.0}});
    const SparseVector b({{0, 1.0}, {2, 1.0}});
    CHECK(cosine(a, b) == doctest::Approx(0.5));
    CHECK(std::abs(cosine(a, a) - 1.0) < 1e-12);
    CHECK(cosine(SparseVector({{3, 2.0}}), a) == 0.0);
    CHECK(cosine(SparseVector(), a) == 0.0);
    CHECK(cosine(SparseVector(), SparseVector()) == 0.0);
}

TEST_CASE("cosine properties") {
    Rng rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_vector(rng, 12);
        const auto b = random_vector(rng, 12);
        const double c = cosine(a, b);
        CHECK(c == cosine(b, a));
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-12);
        const double lambda = 1e-3 + rng.uniform() * 1e3;
        CHECK(std::abs(cosine(a.scaled(lambda), b) - c) < 1e-12);
    }
}

TEST_CASE("sparse vector normalization") {
    const SparseVector v({{5, 1.0}, {2, 2.0}, {5, 3.0}, {7, 0.0}, {9, 1.0}, {9, -1.0}});
    REQUIRE(v.size() == 2);
    CHECK(v.entries()[0] == SparseVector::Entry{2, 2.0});
    CHECK(v.entries()[1] == SparseVector::Entry{5, 4.0});
    CHECK(v.norm() == doctest::Approx(std::sqrt(20.0)));
    CHECK_THROWS_AS(SparseVector({{0, std::numeric_limits<double>::quiet_NaN()}}), std::invalid_argument);
    CHECK_THROWS_AS(SparseVector({{0, std::numeric_limits<double>::infinity()}}), std::invalid_argument);
}
