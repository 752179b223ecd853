#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace resrec {

using TokenList = std::vector<std::string>;

/// Lowercased maximal runs of Unicode letters and digits. Everything else
/// (punctuation, whitespace, symbols, invalid UTF-8) separates tokens.
/// Combining marks stay with the run they follow.
TokenList tokenize(std::string_view text);

/// Sparse term-weight vector with strictly increasing indices and no zeros.
class SparseVector {
public:
    using Entry = std::pair<std::uint32_t, double>;

    SparseVector() = default;
    /// Sorts, merges duplicate indices by summing, and drops zeros.
    explicit SparseVector(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    double weight(std::uint32_t index) const;
    double norm() const;
    SparseVector scaled(double factor) const;

private:
    std::vector<Entry> entries_;
};

double dot(const SparseVector& a, const SparseVector& b);

/// dot(a,b) / (|a||b|), or 0 if either norm is zero.
double cosine(const SparseVector& a, const SparseVector& b);

class Vocabulary {
public:
    Vocabulary() = default;

    std::size_t size() const { return terms_.size(); }
    std::size_t n_documents() const { return n_documents_; }

    /// Index of the term, or -1 if out of vocabulary.
    std::int64_t index_of(std::string_view term) const;
    const std::string& term(std::size_t index) const { return terms_[index]; }
    std::size_t document_frequency(std::size_t index) const { return df_[index]; }

    /// ln((1 + n_documents) / (1 + df)) + 1
    double idf(std::size_t index) const { return idf_[index]; }

    /// term,index,df rows with a header, in index order.
    void write_csv(std::ostream& out) const;

    friend Vocabulary build_vocabulary(const std::vector<TokenList>& documents, std::size_t min_df,
                                       const std::set<std::string>& stopwords);

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t n_documents_ = 0;
};

/// Keeps terms that occur in at least min_df documents. Indices follow the
/// lexicographic order of the retained terms. Throws on an empty corpus or
/// min_df == 0.
Vocabulary build_vocabulary(const std::vector<TokenList>& documents, std::size_t min_df = 2,
                            const std::set<std::string>& stopwords = {});

/// In-vocabulary raw term counts of one document.
SparseVector term_counts(const TokenList& tokens, const Vocabulary& vocabulary);

/// tf * idf with raw-count tf. Out-of-vocabulary tokens are ignored.
SparseVector tfidf_vector(const TokenList& tokens, const Vocabulary& vocabulary);
SparseVector tfidf_from_counts(const SparseVector& counts, const Vocabulary& vocabulary);

std::set<std::string> read_stopwords(std::string_view text);

}  // namespace resrec
