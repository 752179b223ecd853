#include "resrec/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace resrec {

TokenList tokenize(std::string_view text) {
    TokenList tokens;
    std::string current;
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    while (i < length) {
        UChar32 c = 0;
        U8_NEXT(bytes, i, length, c);
        if (c < 0) {
            flush();
            continue;
        }
        const bool word_char = u_isalpha(c) || u_isdigit(c);
        const auto category = u_charType(c);
        const bool mark = category == U_NON_SPACING_MARK || category == U_COMBINING_SPACING_MARK ||
                          category == U_ENCLOSING_MARK;
        if (word_char || (mark && !current.empty())) {
            const UChar32 lower = u_tolower(c);
            std::uint8_t buf[U8_MAX_LENGTH];
            std::int32_t n = 0;
            U8_APPEND_UNSAFE(buf, n, lower);
            current.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

SparseVector::SparseVector(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (const auto& [index, weight] : entries) {
        if (!std::isfinite(weight)) throw std::invalid_argument("non-finite sparse weight");
        if (!entries_.empty() && entries_.back().first == index)
            entries_.back().second += weight;
        else
            entries_.emplace_back(index, weight);
    }
    std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::weight(std::uint32_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::uint32_t i) { return e.first < i; });
    return it != entries_.end() && it->first == index ? it->second : 0.0;
}

double SparseVector::norm() const { return std::sqrt(dot(*this, *this)); }

SparseVector SparseVector::scaled(double factor) const {
    auto copy = entries_;
    for (auto& e : copy) e.second *= factor;
    return SparseVector(std::move(copy));
}

double dot(const SparseVector& a, const SparseVector& b) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].first < y[j].first) {
            ++i;
        } else if (y[j].first < x[i].first) {
            ++j;
        } else {
            sum += x[i].second * y[j].second;
            ++i;
            ++j;
        }
    }
    return sum;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    // Multiply in a fixed order so cosine(a,b) == cosine(b,a) bit for bit.
    return dot(a, b) / (std::min(na, nb) * std::max(na, nb));
}

std::int64_t Vocabulary::index_of(std::string_view term) const {
    auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void Vocabulary::write_csv(std::ostream& out) const {
    out << "term,index,df\n";
    for (std::size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << ',' << i << ',' << df_[i] << '\n';
}

Vocabulary build_vocabulary(const std::vector<TokenList>& documents, std::size_t min_df,
                            const std::set<std::string>& stopwords) {
    if (documents.empty()) throw std::invalid_argument("cannot build a vocabulary from an empty corpus");
    if (min_df == 0) throw std::invalid_argument("min_df must be at least 1");

    std::map<std::string, std::size_t> df;
    for (const auto& doc : documents) {
        std::set<std::string_view> seen(doc.begin(), doc.end());
        for (auto term : seen)
            if (!stopwords.contains(std::string(term))) ++df[std::string(term)];
    }

    Vocabulary vocab;
    vocab.n_documents_ = documents.size();
    for (const auto& [term, count] : df) {
        if (count < min_df) continue;
        vocab.index_.emplace(term, static_cast<std::uint32_t>(vocab.terms_.size()));
        vocab.terms_.push_back(term);
        vocab.df_.push_back(count);
        vocab.idf_.push_back(std::log((1.0 + static_cast<double>(vocab.n_documents_)) /
                                      (1.0 + static_cast<double>(count))) +
                             1.0);
    }
    return vocab;
}

SparseVector term_counts(const TokenList& tokens, const Vocabulary& vocabulary) {
    std::vector<SparseVector::Entry> entries;
    entries.reserve(tokens.size());
    for (const auto& token : tokens) {
        const auto index = vocabulary.index_of(token);
        if (index >= 0) entries.emplace_back(static_cast<std::uint32_t>(index), 1.0);
    }
    return SparseVector(std::move(entries));
}

SparseVector tfidf_from_counts(const SparseVector& counts, const Vocabulary& vocabulary) {
    auto entries = counts.entries();
    for (auto& [index, weight] : entries) weight *= vocabulary.idf(index);
    return SparseVector(std::move(entries));
}

SparseVector tfidf_vector(const TokenList& tokens, const Vocabulary& vocabulary) {
    return tfidf_from_counts(term_counts(tokens, vocabulary), vocabulary);
}

std::set<std::string> read_stopwords(std::string_view text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

}  // namespace resrec
